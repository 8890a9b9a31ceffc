"""Beam mechanics, force balance, equilibrium and pull-in analysis.

Force components acting on the paddle center (all signed, + toward the top
electrode):

    film   F = E_F * V_F * a * (eps_F0 - a*y_p),  a = t_b / (l_b*(l_b+l_p))
    beam   F = -y_p / compliance,  compliance = 6*l_b*(l_b+l_p) / (E*K*t_b^3)
    top    F = +|f_top| * V_top^2
    bottom F = -|f_bottom| * V_bottom^2

Tensile residual stress (sigma0 > 0) lifts the paddle; the two DC
electrodes only attract. Equilibria are zeros of the total force; a zero
is stable when the force gradient there is restoring (dF/dy_p < 0).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .electrostatics import Electrode, capacitance_value, force_per_v2_value
from .errors import InvalidParameter, NoStableEquilibrium
from .model import PaddleGeometry, ValidatedModel
from .roots import bisect_root

# Relative margin keeping the equilibrium scan strictly inside the touch
# interval, and the fixed scan resolution used to bracket force zeros.
SCAN_MARGIN = 1e-6
SCAN_POINTS = 2048

STABILITY_FD_STEP = 1e-9  # m, central difference for dF/dy_p


@dataclass(frozen=True)
class StressProfile:
    """Surface bending stress sampled along the beam."""

    x: np.ndarray        # distance from the load point, m
    sigma: np.ndarray    # bending stress, Pa
    uniformity: float    # max/min stress magnitude over the span (1 for zero load)

    @property
    def samples(self) -> list[tuple[float, float]]:
        return list(zip(self.x.tolist(), self.sigma.tolist()))


@dataclass(frozen=True)
class ForceBreakdown:
    F_film: float
    F_beam: float
    F_elec_top: float
    F_elec_bottom: float
    F_total: float


@dataclass(frozen=True)
class EquilibriumSolution:
    y_p: float
    C_top: float
    breakdown: ForceBreakdown
    stable: bool
    residual: float


@dataclass(frozen=True)
class SweepRecord:
    V: float
    y_p: float
    C_top: float
    breakdown: ForceBreakdown


@dataclass(frozen=True)
class SweepResult:
    records: list[SweepRecord]
    truncated_at: float | None  # first requested voltage past pull-in, if any


@dataclass(frozen=True)
class PullInResult:
    V_pull_in: float
    y_p_last_stable: float  # equilibrium deflection just below pull-in
    electrode: Electrode


def bending_stress(P: float, x: float, width: float, thickness: float) -> float:
    """Surface bending stress 6*P*x / (width*thickness^2) of a cantilever."""
    if width <= 0.0:
        raise InvalidParameter("width", f"must be > 0, got {width!r}")
    if thickness <= 0.0:
        raise InvalidParameter("thickness", f"must be > 0, got {thickness!r}")
    return 6.0 * P * x / (width * thickness * thickness)


def stress_profile(P: float, geom: PaddleGeometry, plan: str, n: int,
                   x_min: float | None = None,
                   x_max: float | None = None) -> StressProfile:
    """Sampled stress along the beam for a tip load P.

    plan "triangular" tapers the width linearly to zero at the load point,
    which makes the surface stress uniform; "rectangular" keeps the root
    width everywhere, giving stress proportional to x. The default span
    [l_b/10, l_b] stays clear of the load point, where the rectangular
    profile's max/min ratio would diverge.
    """
    if plan not in ("triangular", "rectangular"):
        raise InvalidParameter("plan", f"must be 'triangular' or 'rectangular', got {plan!r}")
    if n < 2:
        raise InvalidParameter("n", f"need at least 2 samples, got {n!r}")
    if x_min is None:
        x_min = geom.l_b / 10.0
    if x_max is None:
        x_max = geom.l_b
    if not 0.0 < x_min < x_max <= geom.l_b:
        raise InvalidParameter("x_min", f"need 0 < x_min < x_max <= l_b, got [{x_min!r}, {x_max!r}]")
    x = np.linspace(x_min, x_max, n)
    if plan == "triangular":
        # width b(x) = b_root * x / l_b cancels the moment's x dependence
        sigma = np.full(n, 6.0 * P * geom.l_b / (geom.b_root * geom.t_b**2))
    else:
        sigma = 6.0 * P * x / (geom.b_root * geom.t_b**2)
    mags = np.abs(sigma)
    uniformity = 1.0 if mags.min() == 0.0 else float(mags.max() / mags.min())
    return StressProfile(x=x, sigma=sigma, uniformity=uniformity)


def compliance(model: ValidatedModel) -> float:
    """Paddle-center deflection per unit load, m/N."""
    g, s = model.geom, model.substrate
    return 6.0 * g.l_b * (g.l_b + g.l_p) / (s.E_biaxial * s.K * g.t_b**3)


def strain_coupling(model: ValidatedModel) -> float:
    """Film strain change per unit paddle-center deflection, 1/m."""
    g = model.geom
    return g.t_b / (g.l_b * (g.l_b + g.l_p))


def film_force(y_p, model: ValidatedModel):
    """Upward force from film stress at deflection y_p (elementwise on arrays)."""
    a = strain_coupling(model)
    return model.film.E_F * model.V_F * a * (model.eps_F0 - a * y_p)


def film_stiffness(model: ValidatedModel) -> float:
    """-dF_film/dy_p = E_F * V_F * a^2, N/m."""
    a = strain_coupling(model)
    return model.film.E_F * model.V_F * a * a


def total_force(y_p: float, V_top: float, V_bottom: float,
                model: ValidatedModel) -> ForceBreakdown:
    """All force components and their sum at one paddle pose."""
    F_f = float(film_force(y_p, model))
    F_b = -y_p / compliance(model)
    F_t = float(force_per_v2_value(y_p, model, Electrode.TOP)) * V_top * V_top
    F_e = float(force_per_v2_value(y_p, model, Electrode.BOTTOM)) * V_bottom * V_bottom
    return ForceBreakdown(F_film=F_f, F_beam=F_b, F_elec_top=F_t,
                          F_elec_bottom=F_e, F_total=F_f + F_b + F_t + F_e)


def _force_closure(model: ValidatedModel, V_top: float, V_bottom: float):
    """Scalar total-force function in plain arithmetic, for tight root loops."""
    g = model.geom
    cr = g.center_ratio
    tilt = 2.0 * g.l_p / g.l_b
    half = 0.5 * model.constants.eps0 * g.w_p * g.l_p
    a = strain_coupling(model)
    prestress = model.film.E_F * model.V_F * a * model.eps_F0
    k_lin = film_stiffness(model) + 1.0 / compliance(model)
    vt2 = V_top * V_top
    vb2 = V_bottom * V_bottom
    d_c, d_e = g.d_c, g.d_e

    def force(y_p: float) -> float:
        y_b = y_p / cr
        delta = tilt * y_b
        out = prestress - k_lin * y_p
        if vt2 != 0.0:
            g0 = d_c - y_b
            out += half * vt2 / (g0 * (g0 - delta))
        if vb2 != 0.0:
            g0 = d_e + y_b
            out -= half * vb2 / (g0 * (g0 + delta))
        return out

    return force


def total_force_curve(y_p, V_top: float, V_bottom: float,
                      model: ValidatedModel) -> np.ndarray:
    """Total force on an array of deflections (used by the scan and tests)."""
    y_p = np.asarray(y_p, dtype=float)
    F = film_force(y_p, model) - y_p / compliance(model)
    if V_top != 0.0:
        F = F + force_per_v2_value(y_p, model, Electrode.TOP) * V_top**2
    if V_bottom != 0.0:
        F = F + force_per_v2_value(y_p, model, Electrode.BOTTOM) * V_bottom**2
    return F


def zero_voltage_equilibrium(model: ValidatedModel) -> float:
    """Closed-form rest deflection: prestress force over total stiffness."""
    a = strain_coupling(model)
    k_film = film_stiffness(model)
    return model.film.E_F * model.V_F * a * model.eps_F0 / (k_film + 1.0 / compliance(model))


def _scan_grid(model: ValidatedModel) -> np.ndarray:
    lo = model.y_p_min * (1.0 - SCAN_MARGIN)
    hi = model.y_p_max * (1.0 - SCAN_MARGIN)
    return np.linspace(lo, hi, SCAN_POINTS)


def _force_slope(force, y: float, model: ValidatedModel) -> float:
    """Central-difference dF/dy_p, with the step shrunk near the scan ends."""
    h = STABILITY_FD_STEP
    h = min(h, 0.5 * (model.y_p_max * (1.0 - SCAN_MARGIN) - y),
            0.5 * (y - model.y_p_min * (1.0 - SCAN_MARGIN)))
    return (force(y + h) - force(y - h)) / (2.0 * h)


def solve_equilibrium(model: ValidatedModel, V_top: float = 0.0,
                      V_bottom: float = 0.0) -> EquilibriumSolution:
    """Stable force balance, found by a fixed scan plus bisection.

    The open touch interval is scanned on a 2048-point grid (relative
    margin 1e-6 at each end), every sign change is bisected to machine
    precision, and the root with restoring force gradient is returned.
    Raises NoStableEquilibrium when every zero is unstable or none exists
    (actuation beyond pull-in).
    """
    if V_top < 0.0 or V_bottom < 0.0:
        raise InvalidParameter("V", "drive voltages must be >= 0 (force is even in V)")
    grid = _scan_grid(model)
    F = total_force_curve(grid, V_top, V_bottom, model)
    force = _force_closure(model, V_top, V_bottom)

    sign = F > 0.0
    crossing = sign[:-1] != sign[1:]
    roots: list[float] = []
    for i in np.nonzero(crossing)[0]:
        roots.append(bisect_root(force, float(grid[i]), float(grid[i + 1])))
    for i in np.nonzero(F == 0.0)[0]:
        roots.append(float(grid[i]))

    for y in sorted(roots):
        if _force_slope(force, y, model) < 0.0:
            return EquilibriumSolution(
                y_p=y,
                C_top=capacitance_value(y, model, Electrode.TOP),
                breakdown=total_force(y, V_top, V_bottom, model),
                stable=True,
                residual=force(y),
            )
    raise NoStableEquilibrium(
        f"no restoring force balance for V_top={V_top!r}, V_bottom={V_bottom!r} "
        f"({len(roots)} unstable zero(s) found)")


def _actuation(electrode: Electrode, V: float) -> tuple[float, float]:
    return (V, 0.0) if Electrode(electrode) is Electrode.TOP else (0.0, V)


def has_stable_equilibrium(model: ValidatedModel, electrode: Electrode, V: float) -> bool:
    try:
        solve_equilibrium(model, *_actuation(electrode, V))
        return True
    except NoStableEquilibrium:
        return False


def pull_in_voltage(model: ValidatedModel, electrode: Electrode,
                    v_rel_tol: float = 1e-4, v_abs_tol: float = 5e-3) -> PullInResult:
    """Smallest drive voltage with no stable equilibrium, by bisection on V.

    The bracket is grown by doubling from 1 V, then narrowed until it is
    smaller than both tolerances; the absolute one keeps the answer finer
    than typical scan-oracle steps even when V is large. The y_p reported
    is the equilibrium at the last stable bracket end.
    """
    electrode = Electrode(electrode)
    solve_equilibrium(model, *_actuation(electrode, 0.0))  # propagates if unstable at rest

    lo, hi = 0.0, 1.0
    while has_stable_equilibrium(model, electrode, hi):
        lo = hi
        hi *= 2.0
        if hi > 1e9:
            raise InvalidParameter("V", "no pull-in found below 1e9 V")
    tol = min(v_abs_tol, v_rel_tol * hi)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if has_stable_equilibrium(model, electrode, mid):
            lo = mid
        else:
            hi = mid
        tol = min(v_abs_tol, v_rel_tol * hi)
    last_stable = solve_equilibrium(model, *_actuation(electrode, lo))
    return PullInResult(V_pull_in=hi, y_p_last_stable=last_stable.y_p,
                        electrode=electrode)


def sweep_voltage(model: ValidatedModel, electrode: Electrode,
                  V_list) -> SweepResult:
    """Equilibrium records for each voltage below pull-in, ascending.

    Voltages past pull-in do not produce records; the first such voltage
    is reported in truncated_at (truncation is data, not an error).
    """
    voltages = sorted(float(v) for v in V_list)
    if not voltages:
        raise InvalidParameter("V_list", "must be nonempty")
    if voltages[0] < 0.0:
        raise InvalidParameter("V_list", f"voltages must be >= 0, got {voltages[0]!r}")
    records: list[SweepRecord] = []
    truncated_at = None
    for v in voltages:
        try:
            sol = solve_equilibrium(model, *_actuation(electrode, v))
        except NoStableEquilibrium:
            truncated_at = v
            break
        records.append(SweepRecord(V=v, y_p=sol.y_p, C_top=sol.C_top,
                                   breakdown=sol.breakdown))
    return SweepResult(records=records, truncated_at=truncated_at)
