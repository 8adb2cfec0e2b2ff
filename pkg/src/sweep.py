"""
Scenario files, parameter sweeps and tabular output.

A scenario is kept as a description (ScenarioSpec) from which validated
PairScenario or SingleDetector objects are built. Sweeps replace one named
parameter of the description per grid point, so each point is validated
independently and a failure is recorded in its row rather than aborting.

Scenario files are JSON:

    {
      "geometry": "coaxial" | "perpendicular" | "uniform-pair" | "single",
      "omega_gap": 0.1,
      "delta_d": 0.1,
      "detector_a": {"motion": "circular", "a": 1.0, "R": 0.5},
      "detector_b": {"motion": "circular", "a": 1.0, "R": 0.5, "direction": -1},
      "quantity": "concurrence",
      "sweep": {"parameter": "delta_d", "start": 0.05, "stop": 2.0, "points": 40}
    }
"""

import json
import logging
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from src.constants import DEFAULT_SWEEP_POINTS, FLOAT_FORMAT, OUTPUT_FORMATS, QUANTITIES, default_workers
from src.detector_response import edr_temperature, response_function, transition_probability
from src.errors import ScenarioError
from src.harvesting import compute_x, concurrence
from src.motion import (
    CircularTrajectory,
    DetectorParams,
    Geometry,
    OrbitPlane,
    PairScenario,
    Trajectory,
    UniformTrajectory,
)

logger = logging.getLogger(__name__)

GEOMETRIES = ("coaxial", "perpendicular", "uniform-pair", "single")
SCALES = ("linear", "log")

# Unordered pairs of fields that define a circular orbit
_CIRCULAR_FORMS = (
    frozenset({"R", "omega"}),
    frozenset({"a", "v"}),
    frozenset({"a", "R"}),
    frozenset({"omega", "v"}),
)
_SHARED_FIELDS = ("a", "R", "v", "omega")


# ========== Scenario descriptions ==========

@dataclass(frozen=True)
class DetectorSpec:
    """
    Description of one detector's motion by its defining fields.

    Attributes:
        motion: "circular" or "uniform"
        values: Defining (field, value) pairs, e.g. (("a", 1.0), ("R", 0.5))
        direction: Sense of rotation (+1 or -1) for forms without a signed omega
    """
    motion: str
    values: Tuple[Tuple[str, float], ...]
    direction: int = 1

    def __post_init__(self):
        names = frozenset(name for name, _ in self.values)
        if self.motion == "uniform":
            if names != {"a"}:
                raise ScenarioError(f"uniform motion is defined by 'a' alone, got {sorted(names)}")
        elif self.motion == "circular":
            if names not in _CIRCULAR_FORMS:
                forms = ", ".join("+".join(sorted(f)) for f in _CIRCULAR_FORMS)
                raise ScenarioError(f"circular motion needs one of {forms}, got {sorted(names)}")
        else:
            raise ScenarioError(f"unknown motion {self.motion!r} (expected circular or uniform)")
        if self.direction not in (1, -1):
            raise ScenarioError(f"direction must be +1 or -1, got {self.direction}")

    @property
    def fields(self) -> Dict[str, float]:
        return dict(self.values)

    def has_field(self, name: str) -> bool:
        return name in self.fields

    def with_field(self, name: str, value: float) -> "DetectorSpec":
        """Replace one defining field, keeping the other fixed."""
        fields = self.fields
        if name not in fields:
            raise ScenarioError(f"{name!r} is not a defining field (have {', '.join(sorted(fields))})")
        fields[name] = float(value)
        return replace(self, values=tuple(sorted(fields.items())))

    def build(self, plane: OrbitPlane = OrbitPlane.XY, offset: float = 0.0) -> Trajectory:
        """
        Construct the trajectory.

        Raises:
            SuperluminalError: If the fields imply v >= 1
            ValueError: If the fields are otherwise inconsistent
        """
        f = self.fields
        if self.motion == "uniform":
            return UniformTrajectory(f["a"], offset=offset)
        placement = {"plane": plane, "offset": offset}
        names = frozenset(f)
        if names == {"R", "omega"}:
            return CircularTrajectory(f["R"], f["omega"], **placement)
        if names == {"a", "v"}:
            return CircularTrajectory.from_acceleration_speed(f["a"], f["v"], self.direction, **placement)
        if names == {"a", "R"}:
            return CircularTrajectory.from_acceleration_radius(f["a"], f["R"], self.direction, **placement)
        return CircularTrajectory.from_angular_velocity_speed(f["omega"], f["v"], **placement)

    @classmethod
    def from_dict(cls, data: dict, field: str) -> "DetectorSpec":
        if not isinstance(data, dict):
            raise ScenarioError("must be an object", field=field)
        motion = data.get("motion", "circular")
        direction = data.get("direction", 1)
        values = []
        for key, value in data.items():
            if key in ("motion", "direction"):
                continue
            if key not in _SHARED_FIELDS:
                raise ScenarioError(f"unknown key {key!r}", field=field)
            values.append((key, _number(value, f"{field}.{key}")))
        try:
            return cls(motion, tuple(sorted(values)), int(_number(direction, f"{field}.direction")))
        except ScenarioError as e:
            raise ScenarioError(str(e), field=field)

    def to_dict(self) -> dict:
        data = {"motion": self.motion, **self.fields}
        if self.direction != 1:
            data["direction"] = self.direction
        return data


@dataclass(frozen=True)
class SingleDetector:
    """One detector with its gap."""
    trajectory: Trajectory
    params: DetectorParams


@dataclass(frozen=True)
class ScenarioSpec:
    """
    Description of a single detector or a pair.

    Attributes:
        geometry: One of GEOMETRIES
        omega_gap: Detector gap shared by both detectors
        detector_a: First (or only) detector
        detector_b: Second detector; defaults to a copy of detector_a for uniform pairs
        delta_d: Separation of the orbit centres
    """
    geometry: str
    omega_gap: float
    detector_a: DetectorSpec
    detector_b: Optional[DetectorSpec] = None
    delta_d: float = 0.0

    def __post_init__(self):
        if self.geometry not in GEOMETRIES:
            raise ScenarioError(f"unknown geometry {self.geometry!r} (expected one of {', '.join(GEOMETRIES)})",
                                field="geometry")
        if self.geometry in ("coaxial", "perpendicular") and self.detector_b is None:
            raise ScenarioError(f"{self.geometry} geometry needs a second detector", field="detector_b")

    @property
    def is_pair(self) -> bool:
        return self.geometry != "single"

    def build(self) -> Union[PairScenario, SingleDetector]:
        """
        Build and validate the scenario.

        Raises:
            ScenarioError: For malformed descriptions
            SuperluminalError: If a detector would move at v >= 1
            CoincidentDetectorError: If the two detectors share a worldline
        """
        params = DetectorParams(self.omega_gap)
        a = _build_detector(self.detector_a, "detector_a")
        if self.geometry == "single":
            return SingleDetector(a, params)

        if self.geometry == "uniform-pair":
            second = self.detector_b or self.detector_a
            if self.detector_a.motion != "uniform" or second.motion != "uniform":
                raise ScenarioError("uniform-pair geometry needs uniform motion for both detectors",
                                    field="geometry")
            b = _build_detector(second, "detector_b", offset=self.delta_d)
            return PairScenario(a, b, Geometry.UNIFORM_PAIR, self.delta_d, params)

        for name, spec in (("detector_a", self.detector_a), ("detector_b", self.detector_b)):
            if spec.motion != "circular":
                raise ScenarioError(f"{self.geometry} geometry needs circular motion", field=name)
        b = _build_detector(self.detector_b, "detector_b")
        factory = PairScenario.coaxial if self.geometry == "coaxial" else PairScenario.perpendicular
        return factory(a, b, self.delta_d, params)

    def with_parameter(self, name: str, value: float) -> "ScenarioSpec":
        """
        Replace one sweepable parameter.

        Names: omega_gap, delta_d, a, R, v, omega (every detector that has the
        field), detector_a.<field>, detector_b.<field>, omega_ratio and
        accel_ratio (detector B relative to detector A at fixed R_B).

        Raises:
            ScenarioError: If the parameter does not exist on this scenario
        """
        value = float(value)
        if name == "omega_gap":
            return replace(self, omega_gap=value)
        if name == "delta_d":
            if not self.is_pair:
                raise ScenarioError("a single detector has no separation", field="delta_d")
            return replace(self, delta_d=value)
        if name in _SHARED_FIELDS:
            detectors = {"detector_a": self.detector_a}
            if self.detector_b is not None:
                detectors["detector_b"] = self.detector_b
            matched = {k: d.with_field(name, value) for k, d in detectors.items() if d.has_field(name)}
            if not matched:
                raise ScenarioError(f"no detector is defined by {name!r}", field=name)
            return replace(self, **matched)
        if name.startswith("detector_a.") or name.startswith("detector_b."):
            label, field_name = name.split(".", 1)
            detector = getattr(self, label)
            if detector is None:
                raise ScenarioError("detector is not defined", field=label)
            try:
                return replace(self, **{label: detector.with_field(field_name, value)})
            except ScenarioError as e:
                raise ScenarioError(str(e), field=name)
        if name in ("omega_ratio", "accel_ratio"):
            return self._with_ratio(name, value)
        raise ScenarioError(f"unknown sweep parameter {name!r}", field="sweep.parameter")

    def _with_ratio(self, name: str, ratio: float) -> "ScenarioSpec":
        if self.geometry not in ("coaxial", "perpendicular"):
            raise ScenarioError(f"{name} needs two circular detectors", field="sweep.parameter")
        a = _build_detector(self.detector_a, "detector_a")
        b = _build_detector(self.detector_b, "detector_b")
        if name == "omega_ratio":
            detector_b = DetectorSpec("circular", (("R", b.R), ("omega", ratio * a.omega)))
        else:
            direction = -1 if b.omega < 0 else 1
            detector_b = DetectorSpec("circular", (("R", b.R), ("a", ratio * a.acceleration)), direction)
        return replace(self, detector_b=detector_b)

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioSpec":
        if not isinstance(data, dict):
            raise ScenarioError("scenario must be a JSON object")
        for key in ("geometry", "omega_gap", "detector_a"):
            if key not in data:
                raise ScenarioError("missing required key", field=key)
        detector_b = data.get("detector_b")
        return cls(
            geometry=data["geometry"],
            omega_gap=_number(data["omega_gap"], "omega_gap"),
            detector_a=DetectorSpec.from_dict(data["detector_a"], "detector_a"),
            detector_b=None if detector_b is None else DetectorSpec.from_dict(detector_b, "detector_b"),
            delta_d=_number(data.get("delta_d", 0.0), "delta_d"),
        )

    def to_dict(self) -> dict:
        data = {"geometry": self.geometry, "omega_gap": self.omega_gap, "delta_d": self.delta_d,
                "detector_a": self.detector_a.to_dict()}
        if self.detector_b is not None:
            data["detector_b"] = self.detector_b.to_dict()
        return data


def _number(value, field: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"must be a number, got {value!r}", field=field)
    if not math.isfinite(value):
        raise ScenarioError(f"must be finite, got {value}", field=field)
    return float(value)


def _build_detector(spec: DetectorSpec, field: str, offset: float = 0.0) -> Trajectory:
    try:
        return spec.build(offset=offset)
    except ScenarioError:
        raise
    except ValueError as e:
        raise type(e)(f"{field}: {e}") from e


# ========== Sweep specifications ==========

@dataclass(frozen=True)
class SweepRange:
    """Grid of parameter values, linear or logarithmic."""
    start: float
    stop: float
    points: int = DEFAULT_SWEEP_POINTS
    scale: str = "linear"

    def __post_init__(self):
        if self.points < 2:
            raise ScenarioError(f"needs at least 2 points, got {self.points}", field="sweep.points")
        if not self.start < self.stop:
            raise ScenarioError(f"start must be below stop, got {self.start} >= {self.stop}", field="sweep")
        if self.scale not in SCALES:
            raise ScenarioError(f"unknown scale {self.scale!r} (expected linear or log)", field="sweep.scale")
        if self.scale == "log" and not self.start > 0:
            raise ScenarioError(f"log scale needs a positive start, got {self.start}", field="sweep.start")


def make_grid(sweep_range: SweepRange) -> np.ndarray:
    """Parameter values of a sweep, endpoints included."""
    if sweep_range.scale == "log":
        return np.geomspace(sweep_range.start, sweep_range.stop, sweep_range.points)
    return np.linspace(sweep_range.start, sweep_range.stop, sweep_range.points)


@dataclass(frozen=True)
class SweepSpec:
    """
    One curve: a quantity evaluated over a grid of one scenario parameter.

    Attributes:
        quantity: One of QUANTITIES
        scenario: Base scenario description
        parameter: Swept parameter name
        range: Grid definition
        tol: Tolerance override (None for the per-quantity default)
        label: Curve label used by figure presets
        workers: Worker count from the scenario file, if any
    """
    quantity: str
    scenario: ScenarioSpec
    parameter: str
    range: SweepRange
    tol: Optional[float] = None
    label: str = ""
    workers: Optional[int] = None

    def __post_init__(self):
        if self.quantity not in QUANTITIES:
            raise ScenarioError(f"unknown quantity {self.quantity!r} (expected one of {', '.join(QUANTITIES)})",
                                field="quantity")
        pair_quantity = self.quantity in ("x", "concurrence")
        if pair_quantity != self.scenario.is_pair:
            kind = "a pair" if pair_quantity else "a single detector"
            raise ScenarioError(f"{self.quantity} needs {kind}", field="geometry")
        if self.tol is not None and not self.tol > 0:
            raise ScenarioError(f"must be positive, got {self.tol}", field="tol")
        self.scenario.with_parameter(self.parameter, self.range.start)

    def grid(self) -> np.ndarray:
        return make_grid(self.range)


def parse_sweep_arg(text: str) -> Tuple[str, SweepRange]:
    """
    Parse "param=start:stop:points[:log]".

    Raises:
        ScenarioError: If the text does not follow the pattern
    """
    name, sep, body = text.partition("=")
    parts = body.split(":")
    if not sep or not name or len(parts) not in (3, 4):
        raise ScenarioError(f"expected param=start:stop:points[:log], got {text!r}", field="sweep")
    try:
        start, stop, points = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ScenarioError(f"non-numeric bounds in {text!r}", field="sweep")
    scale = parts[3] if len(parts) == 4 else "linear"
    return name.strip(), SweepRange(start, stop, points, scale)


def load_scenario(path: str) -> Union[ScenarioSpec, SweepSpec]:
    """
    Load a scenario file, returning a SweepSpec when it has a "sweep" block.

    The base scenario is built once, so every kinematic invariant is checked
    at load time.

    Raises:
        FileNotFoundError: If the file does not exist
        ScenarioError: For JSON syntax errors (with line and column) or schema errors
        SuperluminalError, CoincidentDetectorError: For invalid kinematics
    """
    with open(path, 'r', encoding='utf-8') as f:
        text = f.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError(f"invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}")
    scenario = ScenarioSpec.from_dict(data)
    scenario.build()
    logger.info("Loaded %s scenario from %s", scenario.geometry, path)

    if "sweep" not in data:
        return scenario
    sweep = data["sweep"]
    if not isinstance(sweep, dict):
        raise ScenarioError("must be an object", field="sweep")
    for key in ("parameter", "start", "stop"):
        if key not in sweep:
            raise ScenarioError("missing required key", field=f"sweep.{key}")
    points = sweep.get("points", DEFAULT_SWEEP_POINTS)
    if isinstance(points, bool) or not isinstance(points, int):
        raise ScenarioError(f"must be an integer, got {points!r}", field="sweep.points")
    sweep_range = SweepRange(_number(sweep["start"], "sweep.start"), _number(sweep["stop"], "sweep.stop"),
                             points, sweep.get("scale", "linear"))
    if "quantity" not in data:
        raise ScenarioError("missing required key", field="quantity")
    tol = data.get("tol")
    workers = data.get("workers")
    if workers is not None and (isinstance(workers, bool) or not isinstance(workers, int) or workers < 1):
        raise ScenarioError(f"must be a positive integer, got {workers!r}", field="workers")
    return SweepSpec(data["quantity"], scenario, sweep["parameter"], sweep_range,
                     tol=None if tol is None else _number(tol, "tol"), workers=workers)


# ========== Evaluation ==========

COLUMNS = {
    "transition": ["p", "p_error"],
    "edr": ["temperature", "p_plus", "p_minus", "p_plus_error"],
    "x": ["x_real", "x_imag", "x_abs", "x_error", "reduction"],
    "concurrence": ["concurrence", "p_a", "p_b", "x_abs", "x_error", "reduction"],
}


def evaluate_point(quantity: str, scenario: ScenarioSpec, tol: Optional[float] = None) -> dict:
    """
    Compute one row of quantities for a scenario.

    Raises whatever the underlying computation raises.
    """
    built = scenario.build()
    if quantity == "transition":
        result = transition_probability(built.trajectory, built.params, **_tol(tol))
        return {"p": result.value, "p_error": result.total_error}
    if quantity == "edr":
        gap = abs(built.params.omega_gap)
        plus = transition_probability(built.trajectory, built.params.with_gap(gap), **_tol(tol))
        minus = transition_probability(built.trajectory, built.params.with_gap(-gap), **_tol(tol))
        temperature = edr_temperature(response_function(plus.value, built.params),
                                      response_function(minus.value, built.params), gap,
                                      plus_error=response_function(plus.total_error, built.params))
        return {"temperature": temperature, "p_plus": plus.value, "p_minus": minus.value,
                "p_plus_error": plus.total_error}

    x = compute_x(built, tol)
    row = {"x_abs": abs(x.value), "x_error": x.abs_error_estimate, "reduction": x.reduction.value}
    if quantity == "x":
        row.update({"x_real": x.value.real, "x_imag": x.value.imag})
        return row
    p_a = transition_probability(built.detector_a, built.params).value
    p_b = transition_probability(built.detector_b, built.params).value
    row.update({"concurrence": concurrence(p_a, p_b, x.value), "p_a": p_a, "p_b": p_b})
    return row


def _tol(tol: Optional[float]) -> dict:
    return {} if tol is None else {"tol": tol}


def _sweep_row(spec: SweepSpec, value: float, timing: bool) -> dict:
    """Evaluate one grid point, recording failures in the row."""
    row = {spec.parameter: float(value)}
    row.update({column: math.nan for column in COLUMNS[spec.quantity]})
    if "reduction" in row:
        row["reduction"] = ""
    start = time.time()
    try:
        row.update(evaluate_point(spec.quantity, spec.scenario.with_parameter(spec.parameter, value), spec.tol))
        row["status"] = "ok"
        row["message"] = ""
    except (ValueError, ArithmeticError) as e:
        logger.warning("Sweep point %s=%g failed: %s", spec.parameter, value, e)
        row["status"] = type(e).__name__
        row["message"] = str(e)
    if timing:
        row["wall_time"] = time.time() - start
    return row


def resolve_workers(flag: Optional[int] = None, spec: Optional[SweepSpec] = None) -> int:
    """Worker count: CLI flag, then scenario file, then UDW_WORKERS, then 1."""
    if flag is not None:
        if flag < 1:
            raise ValueError(f"Worker count must be positive, got {flag}")
        return flag
    if spec is not None and spec.workers is not None:
        return spec.workers
    return default_workers()


def run_sweep(spec: SweepSpec, workers: Optional[int] = None, timing: bool = False) -> pd.DataFrame:
    """
    Evaluate a sweep, one row per grid point in grid order.

    Args:
        spec: Sweep specification
        workers: Process count (None resolves through resolve_workers)
        timing: Add a wall_time column (makes the output non-deterministic)

    Returns:
        DataFrame with the swept parameter, the quantity columns, status and message
    """
    workers = resolve_workers(workers, spec)
    grid = spec.grid()
    logger.info("Sweeping %s over %d points with %d worker(s)", spec.parameter, grid.size, workers)
    if workers > 1 and grid.size > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            rows = list(executor.map(_sweep_row, [spec] * grid.size, grid.tolist(), [timing] * grid.size))
    else:
        rows = [_sweep_row(spec, value, timing) for value in grid.tolist()]
    return _frame(rows, spec, timing)


def _frame(rows: List[dict], spec: SweepSpec, timing: bool) -> pd.DataFrame:
    columns = [spec.parameter] + COLUMNS[spec.quantity] + ["status", "message"]
    if timing:
        columns.append("wall_time")
    return pd.DataFrame(rows, columns=columns)


def empty_table(quantity: str, parameter: str) -> pd.DataFrame:
    """Table with the sweep columns and no rows."""
    return pd.DataFrame(columns=[parameter] + COLUMNS[quantity] + ["status", "message"])


# ========== Output ==========

def emit(table: pd.DataFrame, fmt: str = "csv", path: Optional[str] = None) -> None:
    """
    Write a table as CSV (17 significant digits) or JSON records.

    Args:
        table: Rows to write
        fmt: "csv" or "json"
        path: Output file; stdout when None

    Raises:
        ValueError: For unknown formats
        OSError: If the path cannot be written
    """
    if fmt not in OUTPUT_FORMATS:
        raise ValueError(f"Unknown output format: {fmt!r} (expected one of {', '.join(OUTPUT_FORMATS)})")
    if fmt == "csv":
        text = table.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    else:
        records = [{k: _json_value(v) for k, v in record.items()}
                   for record in table.to_dict(orient="records")]
        text = json.dumps({"columns": list(table.columns), "records": records}, indent=2) + "\n"

    if path is None:
        sys.stdout.write(text)
        return
    with open(path, 'w', encoding='utf-8', newline="") as f:
        f.write(text)
    logger.info("Wrote %d rows to %s", len(table), path)


def _json_value(value):
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, np.integer):
        return int(value)
    return value
