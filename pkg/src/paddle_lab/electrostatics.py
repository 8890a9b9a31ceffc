"""Capacitance and electrostatic force of the tilted paddle.

The paddle is a rigid plate over two parallel electrodes. Against either
electrode the local gap varies linearly along the plate, so both the
capacitance integral and the electrostatic pressure integral have closed
forms in terms of the gap at the paddle root (g0) and at the far edge (g1):

    C        = eps0 * w_p * l_p * ln(g1/g0) / (g1 - g0)
    |F| / V^2 = eps0 * w_p * l_p / (2 * g0 * g1)

The log form degenerates to 0/0 for a flat plate; below a small tilt the
integral factor is evaluated by series instead (see _inv_gap_mean). The
composite-trapezoid quadrature versions of both integrals are kept as
independent oracles for testing.

All functions are pure; the *_curve variants accept numpy arrays for fast
grid evaluation and the scalar paths stay allocation-free for use inside
root-finding loops.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InvalidParameter, OutOfRange, TouchViolation
from .model import PhysicalConstants, ValidatedModel
from .roots import bisect_root

# Below this relative gap change across the plate, ln(1+u)/u switches to its
# 4-term series; truncation error ~ u^4/5 < 1e-25 at the threshold.
SERIES_U_THRESHOLD = 1e-6

# Relative shrink of each touch limit bounding the capacitance inversion
# bracket. C diverges logarithmically at the limits, so values measured
# closer than this to an electrode are treated as out of range.
INVERSION_MARGIN = 0.05


class Electrode(str, Enum):
    TOP = "top"
    BOTTOM = "bottom"


@dataclass(frozen=True)
class CapacitanceReading:
    C: float  # F
    electrode: Electrode


@dataclass(frozen=True)
class ForcePerV2:
    f: float  # N/V^2, signed (+ toward top electrode)
    electrode: Electrode


def parallel_plate_capacitance(area: float, gap: float,
                               eps0: float = PhysicalConstants().eps0) -> float:
    """Ideal flat-plate capacitance eps0*A/d."""
    if gap <= 0.0:
        raise InvalidParameter("gap", f"must be > 0, got {gap!r}")
    if area <= 0.0:
        raise InvalidParameter("area", f"must be > 0, got {area!r}")
    return eps0 * area / gap


def gap_line(y_p, model: ValidatedModel, electrode: Electrode):
    """(g0, delta): gap at the paddle root and signed change to the far edge.

    Works elementwise on numpy arrays as well as floats.
    """
    geom = model.geom
    y_b = y_p / geom.center_ratio
    delta = 2.0 * y_b * geom.l_p / geom.l_b
    if Electrode(electrode) is Electrode.TOP:
        return geom.d_c - y_b, -delta
    return geom.d_e + y_b, delta


def _inv_gap_mean(g0: float, delta: float) -> float:
    """(1/l_p) * integral dx/gap for gap running linearly g0 -> g0+delta."""
    u = delta / g0
    if abs(u) < SERIES_U_THRESHOLD:
        return (1.0 - u * (0.5 - u * (1.0 / 3.0 - 0.25 * u))) / g0
    return math.log1p(u) / delta


def _inv_gap_mean_array(g0, delta):
    u = delta / g0
    small = np.abs(u) < SERIES_U_THRESHOLD
    series = (1.0 - u * (0.5 - u * (1.0 / 3.0 - 0.25 * u))) / g0
    exact = np.log1p(u) / np.where(small, 1.0, delta)
    return np.where(small, series, exact)


def _check_gaps(g0, g1) -> None:
    if np.any(np.asarray(g0) <= 0.0) or np.any(np.asarray(g1) <= 0.0):
        raise TouchViolation("paddle touches or crosses an electrode plane")


def capacitance_value(y_p: float, model: ValidatedModel, electrode: Electrode) -> float:
    """Closed-form paddle capacitance, F (scalar fast path)."""
    g0, delta = gap_line(y_p, model, electrode)
    if g0 <= 0.0 or g0 + delta <= 0.0:
        raise TouchViolation(f"gap closed at y_p={y_p!r} ({electrode})")
    c = model.constants.eps0 * model.geom.w_p * model.geom.l_p
    return c * _inv_gap_mean(g0, delta)


def capacitance_curve(y_p, model: ValidatedModel, electrode: Electrode) -> np.ndarray:
    """Closed-form paddle capacitance on an array of deflections."""
    y_p = np.asarray(y_p, dtype=float)
    g0, delta = gap_line(y_p, model, electrode)
    _check_gaps(g0, g0 + delta)
    c = model.constants.eps0 * model.geom.w_p * model.geom.l_p
    return c * _inv_gap_mean_array(g0, delta)


def paddle_capacitance(y_p: float, model: ValidatedModel,
                       electrode: Electrode) -> CapacitanceReading:
    electrode = Electrode(electrode)
    return CapacitanceReading(C=capacitance_value(y_p, model, electrode),
                              electrode=electrode)


def force_per_v2_value(y_p, model: ValidatedModel, electrode: Electrode):
    """Signed electrostatic force per squared volt, N/V^2.

    Positive means pull toward the top electrode. Closed form of the
    distributed pressure (eps0*w_p/2) * integral dx/gap^2; elementwise on
    arrays.
    """
    g0, delta = gap_line(y_p, model, electrode)
    g1 = g0 + delta
    _check_gaps(g0, g1)
    mag = 0.5 * model.constants.eps0 * model.geom.w_p * model.geom.l_p / (g0 * g1)
    return mag if Electrode(electrode) is Electrode.TOP else -mag


def electrostatic_force_per_v2(y_p: float, model: ValidatedModel,
                               electrode: Electrode) -> ForcePerV2:
    electrode = Electrode(electrode)
    return ForcePerV2(f=float(force_per_v2_value(y_p, model, electrode)),
                      electrode=electrode)


def _quadrature_grid(y_p: float, model: ValidatedModel, electrode: Electrode,
                     panels: int) -> tuple[np.ndarray, float]:
    if not isinstance(panels, (int, np.integer)) or panels < 2:
        raise InvalidParameter("panels", f"must be an integer >= 2, got {panels!r}")
    g0, delta = gap_line(y_p, model, electrode)
    _check_gaps(g0, g0 + delta)
    x = np.linspace(0.0, model.geom.l_p, panels + 1)
    gap = g0 + (delta / model.geom.l_p) * x
    return gap, model.geom.l_p / panels


def paddle_capacitance_quadrature(y_p: float, model: ValidatedModel,
                                  electrode: Electrode, panels: int) -> float:
    """Composite-trapezoid oracle for the capacitance integral."""
    gap, dx = _quadrature_grid(y_p, model, electrode, panels)
    return model.constants.eps0 * model.geom.w_p * np.trapezoid(1.0 / gap, dx=dx)


def electrostatic_force_per_v2_quadrature(y_p: float, model: ValidatedModel,
                                          electrode: Electrode, panels: int) -> float:
    """Composite-trapezoid oracle for the signed pressure integral."""
    gap, dx = _quadrature_grid(y_p, model, electrode, panels)
    mag = 0.5 * model.constants.eps0 * model.geom.w_p * np.trapezoid(1.0 / gap**2, dx=dx)
    return mag if Electrode(electrode) is Electrode.TOP else -mag


def inversion_bracket(model: ValidatedModel,
                      margin: float = INVERSION_MARGIN) -> tuple[float, float]:
    """Deflection interval on which capacitance inversion is performed."""
    return model.y_p_min * (1.0 - margin), model.y_p_max * (1.0 - margin)


def yp_from_capacitance(C: float, model: ValidatedModel, electrode: Electrode,
                        margin: float = INVERSION_MARGIN) -> float:
    """Deflection whose paddle capacitance equals C, by bracketed bisection.

    Raises OutOfRange when C is not attained inside the (margin-shrunk)
    touch window; converges to |dC/C| <= 1e-12.
    """
    electrode = Electrode(electrode)
    if C <= 0.0:
        raise OutOfRange(f"capacitance must be > 0, got {C!r}")
    lo, hi = inversion_bracket(model, margin)
    c_lo = capacitance_value(lo, model, electrode)
    c_hi = capacitance_value(hi, model, electrode)
    c_min, c_max = min(c_lo, c_hi), max(c_lo, c_hi)
    if not (c_min < C < c_max):
        raise OutOfRange(
            f"C={C!r} outside attainable range ({c_min!r}, {c_max!r}) for {electrode.value}")
    return bisect_root(lambda y: capacitance_value(y, model, electrode) - C,
                       lo, hi, ftol=1e-12 * C)
