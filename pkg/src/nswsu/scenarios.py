"""Initial-data generators, admissibility report, manufactured solutions and
fine-grid reference runs."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Boundary, FluidParams, Formulation, Grid1D, StateU, StateV, TimeControls, Trajectory, discrete_norm
from .errors import BudgetError, InvalidArgumentError
from .solver import Scenario, simulate
from .transform import to_effective

TWO_PI = 2.0 * math.pi

KNOBS = {
    "vacuum_bump": {"center", "width", "amplitude", "u_amp"},
    "smooth_periodic": {"rho_min", "amplitude", "k", "u_amp", "u_k"},
    "perturbed": {"base", "eps", "target", "pert_k"},
}


def _vacuum_bump(grid, params, knobs):
    x = grid.x
    x0 = knobs.get("center", grid.origin + 0.5 * grid.length)
    w = knobs.get("width", 0.25 * grid.length)
    amp = knobs.get("amplitude", 1.0)
    u_amp = knobs.get("u_amp", 0.0)
    if not (w > 0 and amp >= 0):
        raise InvalidArgumentError("vacuum_bump needs width > 0 and amplitude >= 0")
    xi = (x - x0) / w
    rho = amp * np.maximum(0.0, 1.0 - xi * xi) ** (1.0 / (params.gamma - 1.0))
    # linear velocity profile: expanding for u_amp > 0, compressing for u_amp < 0
    return rho, u_amp * xi


def _smooth_periodic(grid, params, knobs):
    xs = (grid.x - grid.origin) / grid.length
    rho_min = knobs.get("rho_min", 1.0)
    amp = knobs.get("amplitude", 1.0)
    k = knobs.get("k", 1)
    if not rho_min > 0:
        raise InvalidArgumentError("smooth_periodic needs rho_min > 0")
    rho = rho_min + amp * (1.0 + np.sin(TWO_PI * k * xs))
    u = knobs.get("u_amp", 0.0) * np.cos(TWO_PI * knobs.get("u_k", 1) * xs)
    return rho, u


def perturbation_shape(grid: Grid1D, k: int) -> np.ndarray:
    return np.sin(TWO_PI * k * (grid.x - grid.origin) / grid.length)


def initial_fields(kind: str, grid: Grid1D, params: FluidParams, knobs: dict | None = None):
    """Return ``(rho0, u0)`` point values for a generator kind."""
    knobs = dict(knobs or {})
    if kind == "vacuum_bump":
        return _vacuum_bump(grid, params, knobs)
    if kind == "smooth_periodic":
        return _smooth_periodic(grid, params, knobs)
    if kind == "perturbed":
        base = knobs.pop("base", "smooth_periodic")
        if base not in ("vacuum_bump", "smooth_periodic"):
            raise InvalidArgumentError(f"perturbed: unsupported base kind '{base}'")
        eps = knobs.pop("eps", 0.0)
        target = knobs.pop("target", "u")
        k = knobs.pop("pert_k", 2)
        if target not in ("rho", "u", "both"):
            raise InvalidArgumentError(f"perturbed: unknown target '{target}'")
        rho, u = initial_fields(base, grid, params, knobs)
        shape = perturbation_shape(grid, k)
        if target in ("rho", "both"):
            # relative perturbation keeps the support (and any vacuum) unchanged
            rho = rho + eps * rho * shape
        if target in ("u", "both"):
            u = u + eps * shape
        return rho, u
    raise InvalidArgumentError(f"unknown scenario kind '{kind}'")


def _check_knobs(kind, knobs):
    allowed = set(KNOBS.get(kind, ()))
    if kind == "perturbed":
        allowed |= KNOBS.get(knobs.get("base", "smooth_periodic"), set())
    unknown = set(knobs) - allowed
    if unknown:
        raise InvalidArgumentError(f"unknown knob(s) for {kind}: {sorted(unknown)}")


def make_scenario(kind: str, grid: Grid1D, params: FluidParams, knobs: dict | None = None,
                  label: str | None = None, floor: float = 1e-12) -> Scenario:
    knobs = dict(knobs or {})
    if kind not in KNOBS:
        raise InvalidArgumentError(f"unknown scenario kind '{kind}'")
    _check_knobs(kind, knobs)
    rho, u = initial_fields(kind, grid, params, knobs)
    if np.any(rho < 0) or not np.all(np.isfinite(rho)):
        raise InvalidArgumentError(f"{kind}: knobs produce negative or non-finite density")
    initial = StateU.from_velocity(rho, u, floor)
    return Scenario(grid, params, initial, label or kind, kind, knobs)


def resample(scenario: Scenario, grid: Grid1D) -> Scenario:
    """The same scenario on another grid (regenerated when possible, else piecewise-constant)."""
    if scenario.kind is not None:
        return make_scenario(scenario.kind, grid, scenario.params, scenario.knobs, scenario.label)
    r = grid.cells // scenario.grid.cells
    if r * scenario.grid.cells != grid.cells:
        raise InvalidArgumentError("hand-built scenarios can only be refined by an integer factor")
    init = scenario.initial
    return Scenario(grid, scenario.params, StateU(np.repeat(init.rho, r), np.repeat(init.mom, r)), scenario.label)


# -- admissibility --------------------------------------------------------------


@dataclass(frozen=True)
class AdmissibilityReport:
    mass_l1: float
    rho_lgamma: float
    kinetic_l2: float
    effective_l2: float
    weighted_l2plus: float
    admissible: bool
    tail_ok: bool = True


def check_admissibility(scenario: Scenario, floor: float = 1e-12) -> AdmissibilityReport:
    grid, params = scenario.grid, scenario.params
    h = grid.spacing
    rho = scenario.initial.rho
    u = scenario.initial.velocity(floor)
    v = to_effective(scenario.initial, grid, params, floor).v
    sqrt_rho = np.sqrt(rho)
    q = 2.0 + params.delta

    report = dict(
        mass_l1=discrete_norm(rho, grid, "L1"),
        rho_lgamma=float((h * np.sum(rho**params.gamma)) ** (1.0 / params.gamma)),
        kinetic_l2=discrete_norm(sqrt_rho * u, grid, "L2"),
        effective_l2=discrete_norm(sqrt_rho * v, grid, "L2"),
        weighted_l2plus=float((h * np.sum(np.abs(rho ** (1.0 / q) * u) ** q)) ** (1.0 / q)),
    )
    finite = all(math.isfinite(val) for val in report.values())
    tail_ok = True
    if grid.boundary is Boundary.EXTRAPOLATE:
        cap = 1e-8 * float(np.max(rho))
        tail_ok = bool(rho[0] <= cap and rho[-1] <= cap)
    return AdmissibilityReport(**report, admissible=finite and tail_ok, tail_ok=tail_ok)


# -- manufactured solution -------------------------------------------------------


def mms_fields(x, t, params: FluidParams | None = None):
    """Manufactured pair ``rho* = 2 + sin(2 pi (x - t))``, ``u* = cos(2 pi x) exp(-t)``."""
    x = np.asarray(x, dtype=float)
    rho = 2.0 + np.sin(TWO_PI * (x - t))
    u = np.cos(TWO_PI * x) * np.exp(-t)
    if rho.ndim == 0:
        return float(rho), float(u)
    return rho, u


def mms_effective_velocity(x, t, params: FluidParams):
    """Exact ``v* = u* + phi'(rho*) rho*_x``."""
    x = np.asarray(x, dtype=float)
    th = TWO_PI * (x - t)
    rho = 2.0 + np.sin(th)
    rho_x = TWO_PI * np.cos(th)
    u = np.cos(TWO_PI * x) * np.exp(-t)
    return u + params.mu * rho ** (params.alpha - 2.0) * rho_x


def mms_sources(x, t, params: FluidParams, formulation=Formulation.U_FORM):
    """Residuals of the manufactured pair in the form each stepper integrates.

    u_form: (mass residual, momentum residual).
    v_form: (mass residual, residual of ``v_t + u v_x + a gamma rho**(gamma-2) rho_x``).
    """
    formulation = Formulation(formulation)
    g, a, mu, al = params.gamma, params.a, params.mu, params.alpha
    x = np.asarray(x, dtype=float)
    th = TWO_PI * (x - t)
    rho = 2.0 + np.sin(th)
    rho_x = TWO_PI * np.cos(th)
    rho_t = -rho_x
    rho_xx = -TWO_PI**2 * np.sin(th)
    rho_xt = TWO_PI**2 * np.sin(th)
    e = np.exp(-t)
    u = np.cos(TWO_PI * x) * e
    u_x = -TWO_PI * np.sin(TWO_PI * x) * e
    u_t = -u
    u_xx = -TWO_PI**2 * u

    s_rho = rho_t + rho_x * u + rho * u_x
    if formulation is Formulation.U_FORM:
        mom_t = rho_t * u + rho * u_t
        conv_x = rho_x * u * u + 2.0 * rho * u * u_x
        p_x = a * g * rho ** (g - 1.0) * rho_x
        visc_x = mu * al * rho ** (al - 1.0) * rho_x * u_x + mu * rho**al * u_xx
        second = mom_t + conv_x + p_x - visc_x
    else:
        v_t = u_t + mu * ((al - 2.0) * rho ** (al - 3.0) * rho_t * rho_x + rho ** (al - 2.0) * rho_xt)
        v_x = u_x + mu * ((al - 2.0) * rho ** (al - 3.0) * rho_x**2 + rho ** (al - 2.0) * rho_xx)
        second = v_t + u * v_x + a * g * rho ** (g - 2.0) * rho_x
    if s_rho.ndim == 0:
        return float(s_rho), float(second)
    return s_rho, second


@dataclass(frozen=True)
class OrderTable:
    cells: list
    err_rho: list
    err_vel: list
    order_rho: list
    order_vel: list
    formulation: Formulation


def _orders(errs):
    return [math.log2(errs[k] / errs[k + 1]) for k in range(len(errs) - 1)]


def mms_error(cells: int, controls: TimeControls, params: FluidParams, formulation, use_sources: bool = True):
    """L2 errors of density and velocity (u or v) at ``t_end`` on a periodic unit box."""
    formulation = Formulation(formulation)
    grid = Grid1D(1.0, cells, 1.0 / cells)
    rho0, u0 = mms_fields(grid.x, 0.0)
    scen = Scenario(grid, params, StateU.from_velocity(rho0, u0, controls.density_floor), "mms")

    def source(x, t):
        return mms_sources(x, t, params, formulation)

    traj = simulate(scen, controls, formulation, source=source if use_sources else None)
    t_end, final = traj.times[-1], traj.snapshots[-1]
    rho_ex, u_ex = mms_fields(grid.x, t_end)
    if formulation is Formulation.U_FORM:
        vel, vel_ex = final.velocity(controls.density_floor), u_ex
    else:
        vel, vel_ex = final.v, mms_effective_velocity(grid.x, t_end, params)
    return discrete_norm(final.rho - rho_ex, grid, "L2"), discrete_norm(vel - vel_ex, grid, "L2")


def mms_convergence(levels: int, controls: TimeControls, params: FluidParams, formulation,
                    base_cells: int = 100) -> OrderTable:
    if levels < 3:
        raise InvalidArgumentError("mms_convergence needs at least 3 levels")
    formulation = Formulation(formulation)
    cells = [base_cells * 2**k for k in range(levels)]
    errs = [mms_error(n, controls, params, formulation) for n in cells]
    er, ev = [e[0] for e in errs], [e[1] for e in errs]
    return OrderTable(cells, er, ev, _orders(er), _orders(ev), formulation)


# -- fine-grid oracle ------------------------------------------------------------


def restrict(state, factor: int):
    """Cell averages of a fine-grid state over blocks of ``factor`` cells."""
    if factor == 1:
        return state
    n = state.rho.size // factor
    avg = lambda f: f.reshape(n, factor).mean(axis=1)
    if isinstance(state, StateU):
        return StateU(avg(state.rho), avg(state.mom))
    return StateV(avg(state.rho), avg(state.v))


def fine_grid_oracle(scenario: Scenario, refinement: int, controls: TimeControls, formulation,
                     max_cells: int = 1 << 16) -> Trajectory:
    """Run on a ``refinement``-times finer grid and restrict back to the original cells.

    Snapshots are taken at the times the original-grid run would record them.
    """
    if refinement not in (1, 2, 4, 8):
        raise InvalidArgumentError("refinement must be one of 1, 2, 4, 8")
    if refinement == 1:
        return simulate(scenario, controls, formulation)
    fine_grid = scenario.grid.refined(refinement)
    if fine_grid.cells > max_cells:
        raise BudgetError(f"refined grid of {fine_grid.cells} cells exceeds budget {max_cells}")
    if controls.snapshot_dt > 0:
        out_times = None
    else:
        out_times = list(simulate(scenario, controls, formulation).times[1:])
    fine = simulate(resample(scenario, fine_grid), controls, formulation, output_times=out_times)
    snaps = [restrict(s, refinement) for s in fine.snapshots]
    return Trajectory(fine.times, snaps, fine.dissipation_accum, fine.formulation, fine.steps, fine.min_density)
