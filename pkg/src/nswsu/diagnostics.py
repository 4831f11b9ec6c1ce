"""Energies, relative entropy, dissipation and the Gronwall stability certificate.

Relative entropy between a candidate ``(rho, v)`` and a reference
``(rho_bar, v_bar)``::

    H = int rho |v - v_bar|^2 + a gamma/(gamma-1) int F(rho_bar, rho - rho_bar)
    F(rb, R) = (R + rb)^gamma / gamma - rb^(gamma-1) R - rb^gamma / gamma

and the certificate checks ``H(t) <= H(0) exp(int_0^t lambda) + tol`` with

    lambda = gamma |d_x u_bar|_inf + |d_x v_bar|_inf + mu/(2 a gamma) |d_x v_bar|_inf^2

which follows from bounding ``-gamma int d_x u_bar F - int rho U1 d_x v_bar U``
by Holder and absorbing the cross term into half the dissipation (Young).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import DEFAULT_FLOOR, FluidParams, Formulation, Grid1D, StateV, Trajectory, centered_diff
from .errors import InvalidArgumentError, UnsupportedRegimeError
from .transform import transport_velocity


@dataclass(frozen=True)
class EnergyReport:
    time: float
    kinetic: float
    potential: float
    dissipation_accum: float
    total: float
    # "viscous" for E(rho,u); for E(rho,v) the accumulated term is the
    # Bresch-Desjardins form P'(rho) mu(rho)/rho^2 |rho_x|^2
    dissipation_kind: str = "viscous"


def _require_alpha_equals_gamma(params: FluidParams):
    if params.alpha != params.gamma:
        raise UnsupportedRegimeError(
            f"relative-entropy diagnostics need alpha == gamma (got alpha={params.alpha}, gamma={params.gamma})"
        )


def _snapshot(traj: Trajectory, k: int):
    if not -len(traj) <= k < len(traj):
        raise IndexError(f"snapshot index {k} out of range for {len(traj)} snapshots")
    return traj.snapshots[k]


def _potential(rho, grid, params):
    return float(grid.spacing * np.sum(params.a * rho**params.gamma) / (params.gamma - 1.0))


def energy_u(traj: Trajectory, k: int, grid: Grid1D, params: FluidParams, floor: float = DEFAULT_FLOOR) -> EnergyReport:
    if traj.formulation is not Formulation.U_FORM:
        raise InvalidArgumentError("energy_u needs a u_form trajectory")
    s = _snapshot(traj, k)
    u = s.velocity(floor)
    kin = float(grid.spacing * np.sum(0.5 * s.rho * u * u))
    pot = _potential(s.rho, grid, params)
    acc = float(traj.dissipation_accum[k])
    return EnergyReport(float(traj.times[k]), kin, pot, acc, kin + pot + acc, "viscous")


def energy_v(traj: Trajectory, k: int, grid: Grid1D, params: FluidParams) -> EnergyReport:
    if traj.formulation is not Formulation.V_FORM:
        raise InvalidArgumentError("energy_v needs a v_form trajectory")
    _require_alpha_equals_gamma(params)
    s = _snapshot(traj, k)
    kin = float(grid.spacing * np.sum(0.5 * s.rho * s.v * s.v))
    pot = _potential(s.rho, grid, params)
    acc = float(traj.dissipation_accum[k])
    return EnergyReport(float(traj.times[k]), kin, pot, acc, kin + pot + acc, "bd_dissipation")


def energy_series(traj: Trajectory, grid: Grid1D, params: FluidParams, floor: float = DEFAULT_FLOOR):
    if traj.formulation is Formulation.U_FORM:
        return [energy_u(traj, k, grid, params, floor) for k in range(len(traj))]
    return [energy_v(traj, k, grid, params) for k in range(len(traj))]


# -- relative entropy -----------------------------------------------------------

# binomial-series terms kept for |R/rho_bar| below this threshold
_SERIES_CUTOFF = 1e-3


def rel_entropy_F(rho_bar, R, params: FluidParams):
    """Pressure-convexity remainder ``F(rho_bar, R)``; scalar or array.

    For ``|R| << rho_bar`` the closed form cancels catastrophically, so a short
    binomial series in ``R/rho_bar`` is used there instead.
    """
    g = params.gamma
    rb = np.asarray(rho_bar, dtype=float)
    Rr = np.asarray(R, dtype=float)
    if np.any(rb < 0):
        raise InvalidArgumentError("rel_entropy_F: rho_bar must be >= 0")
    if np.any(rb + Rr < 0):
        raise InvalidArgumentError("rel_entropy_F: rho_bar + R must be >= 0")
    rb, Rr = np.broadcast_arrays(rb, Rr)
    out = np.zeros(rb.shape)

    vac = rb == 0
    out[vac] = Rr[vac] ** g / g

    small = ~vac & (np.abs(Rr) < _SERIES_CUTOFF * rb)
    big = ~vac & ~small

    rs = Rr[small] / rb[small]
    series = np.zeros_like(rs)
    coef, power = 1.0, np.ones_like(rs)
    for j in range(2, 8):
        # binomial coefficient C(g, j) built incrementally
        coef = g * (g - 1.0) / 2.0 if j == 2 else coef * (g - j + 1.0) / j
        power = rs * rs if j == 2 else power * rs
        series = series + coef * power
    out[small] = rb[small] ** g / g * series

    rbb, Rb = rb[big], Rr[big]
    out[big] = (rbb + Rb) ** g / g - rbb ** (g - 1.0) * Rb - rbb**g / g
    out = np.maximum(out, 0.0)
    return float(out) if out.ndim == 0 else out


def _pair_checks(state, ref_state, grid, params):
    _require_alpha_equals_gamma(params)
    if not (isinstance(state, StateV) and isinstance(ref_state, StateV)):
        raise InvalidArgumentError("relative entropy is defined on v_form states")
    if state.rho.shape != (grid.cells,) or ref_state.rho.shape != (grid.cells,):
        raise InvalidArgumentError("states do not live on this grid")


def rel_entropy_total(state: StateV, ref_state: StateV, grid: Grid1D, params: FluidParams) -> float:
    _pair_checks(state, ref_state, grid, params)
    h, g = grid.spacing, params.gamma
    dv = state.v - ref_state.v
    kinetic = np.sum(state.rho * dv * dv)
    F = rel_entropy_F(ref_state.rho, state.rho - ref_state.rho, params)
    return float(h * kinetic + params.a * g / (g - 1.0) * h * np.sum(F))


def _safe_pow(rho, e):
    if e >= 0:
        return rho**e
    out = np.zeros_like(rho)
    np.power(rho, e, out=out, where=rho > 0)
    return out


def dissipation(state: StateV, ref_state: StateV, grid: Grid1D, params: FluidParams) -> float:
    """``a mu gamma |rho^(g-3/2) d_x rho - sqrt(rho) rho_bar^(g-2) d_x rho_bar|^2_{L2}``.

    Both gradients go through ``D_c[r^(g-1/2)] / (g-1/2)``, which stays
    regular at vacuum; the reference one is divided by ``sqrt(rho_bar)`` so
    that identical states cancel exactly.
    """
    _pair_checks(state, ref_state, grid, params)
    g = params.gamma
    rho, rb = state.rho, ref_state.rho
    first = centered_diff(rho ** (g - 0.5), grid) / (g - 0.5)
    ref_grad = centered_diff(rb ** (g - 0.5), grid) / (g - 0.5)
    second = np.sqrt(rho) * ref_grad * _safe_pow(rb, -0.5)
    diff = first - second
    return float(params.a * params.mu * g * grid.spacing * np.sum(diff * diff))


def gronwall_rate(ref_u_grad_norm: float, ref_v_grad_norm: float, params: FluidParams) -> float:
    if not (ref_u_grad_norm >= 0 and ref_v_grad_norm >= 0):
        raise InvalidArgumentError("gradient norms must be >= 0")
    g = params.gamma
    return g * ref_u_grad_norm + ref_v_grad_norm + params.mu / (2.0 * params.a * g) * ref_v_grad_norm**2


# -- weak-strong certificate ---------------------------------------------------------


@dataclass(frozen=True, eq=False)
class StabilityReport:
    times: np.ndarray
    H: np.ndarray
    D: np.ndarray
    lam: np.ndarray
    bound: np.ndarray
    margin: np.ndarray
    passed: bool
    tolerance_used: float
    # strong-solution monitors of the reference, one entry per snapshot
    ref_u_sup: np.ndarray = field(repr=False, default=None)
    ref_du_sup: np.ndarray = field(repr=False, default=None)
    ref_dv_sup: np.ndarray = field(repr=False, default=None)

    @property
    def sup_H(self) -> float:
        return float(np.max(self.H))

    @property
    def max_violation(self) -> float:
        """``max_k H[k] - bound[k]``; non-positive when the bound holds without tolerance."""
        return float(np.max(self.H - self.bound))

    def time_integral(self, series: np.ndarray) -> float:
        """Trapezoidal ``int_0^T`` of a per-snapshot series (the L^1_T part of L^1_T(L^inf))."""
        return float(np.sum(0.5 * (series[1:] + series[:-1]) * np.diff(self.times)))


def strong_monitors(state: StateV, grid: Grid1D, params: FluidParams):
    """``(|u|_inf, |d_x u|_inf, |d_x v|_inf)`` of a reference snapshot."""
    u = transport_velocity(state, grid, params)
    return (float(np.max(np.abs(u))),
            float(np.max(np.abs(centered_diff(u, grid)))),
            float(np.max(np.abs(centered_diff(state.v, grid)))))


def wsu_check(traj: Trajectory, ref_traj: Trajectory, grid: Grid1D, params: FluidParams,
              tolerance: float) -> StabilityReport:
    _require_alpha_equals_gamma(params)
    if traj.formulation is not Formulation.V_FORM or ref_traj.formulation is not Formulation.V_FORM:
        raise InvalidArgumentError("wsu_check needs v_form trajectories")
    if traj.times.shape != ref_traj.times.shape or not np.array_equal(traj.times, ref_traj.times):
        raise InvalidArgumentError("trajectories are recorded at different times")
    if not tolerance >= 0:
        raise InvalidArgumentError("tolerance must be >= 0")

    n = len(traj)
    H, D, lam = np.empty(n), np.empty(n), np.empty(n)
    mon = np.empty((n, 3))
    for k, (s, r) in enumerate(zip(traj.snapshots, ref_traj.snapshots)):
        H[k] = rel_entropy_total(s, r, grid, params)
        D[k] = dissipation(s, r, grid, params)
        mon[k] = strong_monitors(r, grid, params)
        lam[k] = gronwall_rate(mon[k, 1], mon[k, 2], params)
    if not np.all(np.isfinite(lam)):
        raise InvalidArgumentError("reference trajectory is not strong: non-finite gradient norms")

    growth = np.concatenate([[0.0], np.cumsum(0.5 * (lam[1:] + lam[:-1]) * np.diff(traj.times))])
    bound = H[0] * np.exp(growth)
    passed = bool(np.all(H <= bound + tolerance))
    return StabilityReport(traj.times, H, D, lam, bound, bound - H, passed, float(tolerance),
                           mon[:, 0].copy(), mon[:, 1].copy(), mon[:, 2].copy())
