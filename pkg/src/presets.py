"""
Figure presets.

Each preset is a set of sweep curves for one standard figure. The fixed
parameters (gap, acceleration, separation) are exact; curve values that the
figure only shows in its legend are chosen to span the same range and the
preset is marked approximate.
"""

from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Tuple

from src.sweep import DetectorSpec, ScenarioSpec, SweepRange, SweepSpec

GAP = 0.10                 # Omega sigma in every figure
PAIR_ACCELERATION = 1.0    # a sigma, separation figures
PAIR_SEPARATION = 0.10     # delta_d / sigma, acceleration and radius figures
REFERENCE_RADIUS = 0.10    # R_A / sigma, ratio figures
REFERENCE_OMEGA = 1.00     # omega_A sigma, ratio figures

RADII = (0.1, 0.5, 1.0, 2.0)
RATIO_RADII = (0.2, 0.3)


@dataclass(frozen=True)
class FigurePreset:
    """
    A reproducible figure.

    Attributes:
        id: Preset identifier, e.g. "fig5a"
        title: What is plotted against what
        curves: One SweepSpec per plotted line
        approximate: True when curve values are taken from a legend only
    """
    id: str
    title: str
    curves: Tuple[SweepSpec, ...]
    approximate: bool = False

    @property
    def quantity(self) -> str:
        return self.curves[0].quantity

    @property
    def parameter(self) -> str:
        return self.curves[0].parameter

    def with_points(self, points: int) -> "FigurePreset":
        """The same preset on a grid of `points` values per curve."""
        curves = tuple(replace(c, range=replace(c.range, points=points)) for c in self.curves)
        return replace(self, curves=curves)


# ========== Curve builders ==========

def _circular(**fields) -> DetectorSpec:
    direction = fields.pop("direction", 1)
    return DetectorSpec("circular", tuple(sorted((k, float(v)) for k, v in fields.items())), direction)


def _uniform(a: float = PAIR_ACCELERATION) -> DetectorSpec:
    return DetectorSpec("uniform", (("a", float(a)),))


def _curve(quantity: str, scenario: ScenarioSpec, parameter: str, start: float, stop: float,
           points: int, label: str, scale: str = "linear") -> SweepSpec:
    return SweepSpec(quantity, scenario, parameter, SweepRange(start, stop, points, scale), label=label)


def _single(detector: DetectorSpec, gap: float = GAP) -> ScenarioSpec:
    return ScenarioSpec("single", gap, detector)


def _pair(geometry: str, detector_a: DetectorSpec, detector_b: DetectorSpec,
          delta_d: float) -> ScenarioSpec:
    return ScenarioSpec(geometry, GAP, detector_a, detector_b, delta_d)


def _equal_pair(geometry: str, R: float, a: float, delta_d: float, direction: int = 1) -> ScenarioSpec:
    return _pair(geometry, _circular(R=R, a=a), _circular(R=R, a=a, direction=direction), delta_d)


def _uniform_pair(a: float, delta_d: float) -> ScenarioSpec:
    return ScenarioSpec("uniform-pair", GAP, _uniform(a), None, delta_d)


# ========== Single-detector figures ==========

def _transition_vs_acceleration() -> FigurePreset:
    curves = [_curve("transition", _single(_circular(R=R, a=1.0)), "a", 0.1, 10.0, 40, f"R={R:g}")
              for R in RADII]
    curves.append(_curve("transition", _single(_uniform()), "a", 0.1, 10.0, 40, "uniform"))
    return FigurePreset("fig1", "Transition probability vs a (Omega=0.1)", tuple(curves), approximate=True)


def _transition_vs_gap() -> FigurePreset:
    curves = [_curve("transition", _single(_circular(R=R, a=10.0)), "omega_gap", -2.0, 2.0, 41, f"R={R:g}")
              for R in RADII]
    return FigurePreset("fig2", "Transition probability vs Omega (a=10)", tuple(curves), approximate=True)


def _transition_vs_radius() -> FigurePreset:
    curves = [_curve("transition", _single(_circular(R=1.0, a=a)), "R", 0.05, 5.0, 40, f"a={a:g}")
              for a in (0.5, 1.0, 2.0, 5.0)]
    return FigurePreset("fig3", "Transition probability vs R (Omega=0.1)", tuple(curves), approximate=True)


def _edr_vs_acceleration() -> FigurePreset:
    curves = [_curve("edr", _single(_circular(R=R, a=1.0)), "a", 0.5, 10.0, 40, f"R={R:g}")
              for R in RADII]
    curves.append(_curve("edr", _single(_uniform()), "a", 0.5, 10.0, 40, "uniform"))
    return FigurePreset("fig4", "EDR temperature vs a (Omega=0.1)", tuple(curves), approximate=True)


# ========== Pair figures ==========

def _concurrence_vs_separation(preset_id: str, geometry: str, direction: int) -> FigurePreset:
    curves = [_curve("concurrence", _equal_pair(geometry, R, PAIR_ACCELERATION, 0.1, direction),
                     "delta_d", 0.05, 3.0, 40, f"R={R:g}")
              for R in RADII]
    curves.append(_curve("concurrence", _uniform_pair(PAIR_ACCELERATION, 0.1),
                         "delta_d", 0.05, 3.0, 40, "uniform"))
    sense = "counter-rotating" if direction < 0 else "co-rotating"
    if geometry == "perpendicular":
        sense = "perpendicular"
    return FigurePreset(preset_id, f"Concurrence vs delta_d, {sense} (a=1, Omega=0.1)", tuple(curves),
                        approximate=True)


def _concurrence_vs_acceleration(preset_id: str, geometry: str, direction: int) -> FigurePreset:
    curves = [_curve("concurrence", _equal_pair(geometry, R, 1.0, PAIR_SEPARATION, direction),
                     "a", 0.1, 5.0, 40, f"R={R:g}")
              for R in RADII]
    curves.append(_curve("concurrence", _uniform_pair(1.0, PAIR_SEPARATION), "a", 0.1, 5.0, 40, "uniform"))
    return FigurePreset(preset_id, f"Concurrence vs a, {geometry} (delta_d=0.1, Omega=0.1)", tuple(curves),
                        approximate=True)


def _concurrence_vs_radius(preset_id: str, geometry: str) -> FigurePreset:
    curves = []
    directions = (1, -1) if geometry == "coaxial" else (1,)
    for a in (0.5, 1.0):
        for direction in directions:
            label = f"a={a:g}" + (" counter" if direction < 0 else "")
            curves.append(_curve("concurrence", _equal_pair(geometry, 1.0, a, PAIR_SEPARATION, direction),
                                 "R", 0.05, 3.0, 40, label))
    return FigurePreset(preset_id, f"Concurrence vs R, {geometry} (delta_d=0.1, Omega=0.1)", tuple(curves),
                        approximate=True)


def _ratio_pair(geometry: str, R_B: float, direction: int) -> ScenarioSpec:
    detector_a = _circular(R=REFERENCE_RADIUS, omega=REFERENCE_OMEGA)
    detector_b = _circular(R=R_B, omega=direction * REFERENCE_OMEGA)
    return _pair(geometry, detector_a, detector_b, 0.0)


def _concurrence_vs_accel_ratio(preset_id: str, geometry: str) -> FigurePreset:
    directions = (1, -1) if geometry == "coaxial" else (1,)
    curves = []
    for R_B in RATIO_RADII:
        for direction in directions:
            label = f"R_B={R_B:g}" + (" counter" if direction < 0 else "")
            curves.append(_curve("concurrence", _ratio_pair(geometry, R_B, direction),
                                 "accel_ratio", 0.0, 5.0, 26, label))
    return FigurePreset(preset_id, f"Concurrence vs a_B/a_A, {geometry} (R_A=0.1, omega_A=1, delta_d=0)",
                        tuple(curves), approximate=True)


def _concurrence_vs_omega_ratio(preset_id: str, geometry: str) -> FigurePreset:
    curves = [_curve("concurrence", _ratio_pair(geometry, R_B, 1), "omega_ratio", -1.0, 3.0, 41,
                     f"R_B={R_B:g}")
              for R_B in RATIO_RADII]
    return FigurePreset(preset_id, f"Concurrence vs omega_B/omega_A, {geometry} (R_A=0.1, omega_A=1, delta_d=0)",
                        tuple(curves), approximate=True)


# ========== Registry ==========

def _build_presets() -> Dict[str, FigurePreset]:
    presets = [
        _transition_vs_acceleration(),
        _transition_vs_gap(),
        _transition_vs_radius(),
        _edr_vs_acceleration(),
        _concurrence_vs_separation("fig5a", "coaxial", 1),
        _concurrence_vs_separation("fig5b", "coaxial", -1),
        _concurrence_vs_acceleration("fig6a", "coaxial", 1),
        _concurrence_vs_acceleration("fig6b", "coaxial", -1),
        _concurrence_vs_radius("fig7", "coaxial"),
        _concurrence_vs_accel_ratio("fig8", "coaxial"),
        _concurrence_vs_omega_ratio("fig9", "coaxial"),
        _concurrence_vs_separation("fig10", "perpendicular", 1),
        _concurrence_vs_acceleration("fig11a", "perpendicular", 1),
        _concurrence_vs_radius("fig11b", "perpendicular"),
        _concurrence_vs_accel_ratio("fig12", "perpendicular"),
        _concurrence_vs_omega_ratio("fig13", "perpendicular"),
    ]
    return {p.id: p for p in presets}


PRESETS: Dict[str, FigurePreset] = _build_presets()

# Figures with two panels resolve to their first panel by the bare name
_ALIASES = {"fig5": "fig5a", "fig6": "fig6a", "fig11": "fig11a"}


def list_presets() -> List[FigurePreset]:
    """All presets in figure order."""
    return list(PRESETS.values())


def get_preset_by_id(preset_id: str, points: Optional[int] = None) -> FigurePreset:
    """
    Get a figure preset by its identifier.

    Args:
        preset_id: e.g. "fig1", "fig5b" (case-insensitive; "fig5" means "fig5a")
        points: Override the number of grid points per curve

    Returns:
        FigurePreset

    Raises:
        ValueError: If the identifier is unknown
    """
    key = preset_id.strip().lower()
    key = _ALIASES.get(key, key)
    if key not in PRESETS:
        raise ValueError(f"Unknown figure preset: {preset_id} (available: {', '.join(PRESETS)})")
    preset = PRESETS[key]
    return preset if points is None else preset.with_points(points)
