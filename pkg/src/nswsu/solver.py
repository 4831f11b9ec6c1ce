"""Explicit first-order steppers for both formulations and the time loop.

u-form: Rusanov flux for (rho, m) with wave speed |u| + c, explicit face
viscous flux ``mu(rho_face) (u[i+1] - u[i]) / h``.

v-form: Rusanov flux for ``rho v`` plus the density diffusion
``(mu(rho)/rho)_face (rho[i+1] - rho[i]) / h``; ``v`` is transported by
first-order upwinding on the sign of ``u = v - D_c phi(rho)`` and the
pressure force is written as ``a gamma/(gamma-1) D_c rho**(gamma-1)`` so
that nothing is divided by the density.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    FluidParams,
    Formulation,
    Grid1D,
    StateU,
    StateV,
    TimeControls,
    Trajectory,
    centered_diff,
    pad,
)
from .errors import BudgetError, InvalidArgumentError, NumericalFailure, StepFailure
from .transform import kinematic_viscosity, pressure, sound_speed, to_effective, transport_velocity, viscosity


@dataclass(frozen=True, eq=False)
class Scenario:
    """Initial data on a grid.

    ``kind``/``knobs`` record the generator (see :mod:`nswsu.scenarios`) so the
    same data can be resampled on a refined grid; hand-built scenarios leave
    them empty.
    """

    grid: Grid1D
    params: FluidParams
    initial: StateU
    label: str = ""
    kind: str | None = None
    knobs: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.initial.rho.shape != (self.grid.cells,):
            raise InvalidArgumentError("initial state does not match the grid")
        self.initial.check_vacuum()


def _face_mean(left, right, how):
    if how == "harmonic":
        s = left + right
        return np.where(s > 0, 2.0 * left * right / np.where(s > 0, s, 1.0), 0.0)
    return 0.5 * (left + right)


def _mu_face(rl, rr, params, how):
    if how == "harmonic":
        return _face_mean(viscosity(rl, params), viscosity(rr, params), "harmonic")
    return viscosity(0.5 * (rl + rr), params)


def _max_speed_u(state: StateU, params, floor):
    u = state.velocity(floor)
    return np.abs(u) + sound_speed(state.rho, params)


def _max_speed_v(state: StateV, grid, params):
    u = transport_velocity(state, grid, params)
    return np.maximum(np.abs(u), np.abs(state.v)) + sound_speed(state.rho, params)


def stable_dt(state, grid: Grid1D, params: FluidParams, controls: TimeControls, t: float = 0.0) -> float:
    """Largest explicit step allowed by the advective and diffusive limits.

    Capped at the time left until ``t_end``; a state with no wave speed and no
    diffusivity gets exactly that remainder.
    """
    h = grid.spacing
    floor = controls.density_floor
    if isinstance(state, StateU):
        speed = _max_speed_u(state, params, floor)
    else:
        speed = _max_speed_v(state, grid, params)
    nu = viscosity(state.rho, params) / np.maximum(state.rho, floor)

    smax, numax = float(np.max(speed)), float(np.max(nu))
    dt = math.inf
    if smax > 0:
        dt = controls.cfl_advective * h / smax
    if numax > 0:
        dt = min(dt, controls.cfl_diffusive * h * h / numax)
    return min(dt, controls.t_end - t)


def _check(rho, others, t):
    if not (np.all(np.isfinite(rho)) and all(np.all(np.isfinite(o)) for o in others)):
        raise NumericalFailure("non-finite value after step", time=t)
    if np.any(rho < 0):
        i = int(np.argmin(rho))
        raise StepFailure(f"negative density {rho[i]!r} in cell {i}; reduce dt", time=t)


def step_u(state: StateU, dt: float, grid: Grid1D, params: FluidParams, controls: TimeControls,
           source=None, t: float = 0.0) -> StateU:
    h, bc, floor = grid.spacing, grid.boundary, controls.density_floor
    rho, m = state.rho, state.mom
    u = m / np.maximum(rho, floor)
    p = pressure(rho, params)
    s = np.abs(u) + sound_speed(rho, params)

    re, me, ue, pe, se = (pad(f, bc) for f in (rho, m, u, p, s))
    rl, rr = re[:-1], re[1:]
    ml, mr = me[:-1], me[1:]
    ul, ur = ue[:-1], ue[1:]
    sf = np.maximum(se[:-1], se[1:])

    f_rho = 0.5 * (ml + mr) - 0.5 * sf * (rr - rl)
    f_mom = 0.5 * (ml * ul + pe[:-1] + mr * ur + pe[1:]) - 0.5 * sf * (mr - ml)
    g_visc = _mu_face(rl, rr, params, controls.face_average) * (ur - ul) / h

    rho_new = rho - dt / h * (f_rho[1:] - f_rho[:-1])
    m_new = m - dt / h * (f_mom[1:] - f_mom[:-1]) + dt / h * (g_visc[1:] - g_visc[:-1])
    if source is not None:
        rho_new = rho_new + dt * np.asarray(source[0])
        m_new = m_new + dt * np.asarray(source[1])

    _check(rho_new, (m_new,), t)
    m_new = np.where(rho_new < floor, 0.0, m_new)
    return StateU(rho_new, m_new)


def step_v(state: StateV, dt: float, grid: Grid1D, params: FluidParams, controls: TimeControls,
           source=None, t: float = 0.0) -> StateV:
    h, bc = grid.spacing, grid.boundary
    g = params.gamma
    rho, v = state.rho, state.v
    u = transport_velocity(state, grid, params)
    s = np.maximum(np.abs(u), np.abs(v)) + sound_speed(rho, params)

    re, ve, se = pad(rho, bc), pad(v, bc), pad(s, bc)
    rl, rr = re[:-1], re[1:]
    sf = np.maximum(se[:-1], se[1:])
    nu = kinematic_viscosity(re, params)
    k_face = _face_mean(nu[:-1], nu[1:], controls.face_average)

    f_rho = 0.5 * (rl * ve[:-1] + rr * ve[1:]) - 0.5 * sf * (rr - rl) - k_face * (rr - rl) / h
    rho_new = rho - dt / h * (f_rho[1:] - f_rho[:-1])

    back = (ve[1:-1] - ve[:-2]) / h
    fwd = (ve[2:] - ve[1:-1]) / h
    upwind = np.where(u > 0, back, fwd)
    force = params.a * g / (g - 1.0) * centered_diff(rho ** (g - 1.0), grid)
    v_new = v - dt * (u * upwind + force)
    if source is not None:
        rho_new = rho_new + dt * np.asarray(source[0])
        v_new = v_new + dt * np.asarray(source[1])

    _check(rho_new, (v_new,), t)
    return StateV(rho_new, v_new)


# -- dissipation rates (integrands of the energy budgets) ---------------------


def viscous_dissipation_rate(state: StateU, grid: Grid1D, params: FluidParams, controls: TimeControls) -> float:
    """``h sum_faces mu_face |(u[i+1]-u[i])/h|^2``, the exact partner of the viscous flux."""
    h, bc = grid.spacing, grid.boundary
    ue, re = pad(state.velocity(controls.density_floor), bc), pad(state.rho, bc)
    mu_face = _mu_face(re[:-1], re[1:], params, controls.face_average)
    du = (ue[1:] - ue[:-1]) / h
    # face 0 duplicates face N (periodic) or carries no gradient (extrapolate)
    return float(h * np.sum(mu_face[1:] * du[1:] ** 2))


def bd_dissipation_rate(state: StateV, grid: Grid1D, params: FluidParams) -> float:
    """``h sum a mu gamma rho**(gamma+alpha-3) |D_c rho|^2`` (``P'(rho) mu(rho)/rho^2 |rho_x|^2``)."""
    rho = state.rho
    e = params.gamma + params.alpha - 3.0
    if e >= 0:
        w = rho**e
    else:
        w = np.zeros_like(rho)
        np.power(rho, e, out=w, where=rho > 0)
    dr = centered_diff(rho, grid)
    integrand = w * dr * dr
    return float(params.a * params.mu * params.gamma * grid.spacing * np.sum(integrand))


# -- time loop -----------------------------------------------------------------


def simulate(scenario: Scenario, controls: TimeControls, formulation=Formulation.V_FORM, *,
             source=None, output_times=None) -> Trajectory:
    """Advance ``scenario`` to ``controls.t_end`` with forward Euler and adaptive dt.

    ``source(x, t) -> (s_rho, s_second)`` adds a pointwise forcing evaluated at
    the left end of each step. ``output_times`` (or ``controls.snapshot_dt``)
    pins snapshots to given times; otherwise one snapshot is kept every
    ``snapshot_stride`` steps. The final time is always recorded.
    """
    formulation = Formulation(formulation)
    grid, params = scenario.grid, scenario.params
    floor = controls.density_floor
    if formulation is Formulation.V_FORM:
        if params.alpha <= 1 and np.any(scenario.initial.rho == 0):
            raise InvalidArgumentError("v_form with vacuum requires alpha > 1")
        state = to_effective(scenario.initial, grid, params, floor)
        step, rate = step_v, (lambda s: bd_dissipation_rate(s, grid, params))
    else:
        state = scenario.initial
        step, rate = step_u, (lambda s: viscous_dissipation_rate(s, grid, params, controls))

    t_end = controls.t_end
    if output_times is None and controls.snapshot_dt > 0:
        n_out = int(math.floor(t_end / controls.snapshot_dt + 1e-9))
        output_times = [k * controls.snapshot_dt for k in range(1, n_out + 1)]
    targets = sorted(float(x) for x in (output_times or []) if 0 < x < t_end) + [t_end]
    pinned = output_times is not None

    times, snaps, acc = [0.0], [state], [0.0]
    t, n, total, k_target = 0.0, 0, 0.0, 0
    min_rho = float(np.min(state.rho))
    x = grid.x

    def partial():
        return Trajectory(times, snaps, acc, formulation, n, min_rho)

    while t < t_end:
        if n >= controls.max_steps:
            raise BudgetError(f"max_steps={controls.max_steps} exhausted at t={t!r}", partial())
        while targets[k_target] <= t:
            k_target += 1
        target = targets[k_target]
        dt = min(stable_dt(state, grid, params, controls, t), target - t)
        if not dt > 0:
            raise NumericalFailure(f"non-positive time step {dt!r}", time=t)

        src = None
        if source is not None:
            src = source(x, t)
        total += dt * rate(state)
        state = step(state, dt, grid, params, controls, src, t)
        n += 1
        t = target if dt == target - t else t + dt
        if t >= target:
            t = target
        min_rho = min(min_rho, float(np.min(state.rho)))

        hit = t == target
        if t == t_end or (pinned and hit) or (not pinned and n % controls.snapshot_stride == 0):
            times.append(t)
            snaps.append(state)
            acc.append(total)

    return partial()
