"""Multi-run studies: cross-formulation equivalence, weak-strong checks and epsilon sweeps."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import FluidParams, Formulation, Grid1D, TimeControls, discrete_norm
from .diagnostics import StabilityReport, wsu_check
from .scenarios import fine_grid_oracle, make_scenario
from .solver import simulate
from .transform import to_primitive


def formulation_distance(kind, knobs, grid: Grid1D, params: FluidParams, controls: TimeControls) -> float:
    """L2 distance at ``t_end`` between the u-form run and the primitive form of the v-form run."""
    scen = make_scenario(kind, grid, params, knobs)
    floor = controls.density_floor
    a = simulate(scen, controls, Formulation.U_FORM).snapshots[-1]
    b = to_primitive(simulate(scen, controls, Formulation.V_FORM).snapshots[-1], grid, params, floor)
    d_rho = discrete_norm(a.rho - b.rho, grid, "L2")
    d_u = discrete_norm(a.velocity(floor) - b.velocity(floor), grid, "L2")
    return float(np.hypot(d_rho, d_u))


def equivalence_table(kind, knobs, grid: Grid1D, params, controls, levels: int = 3):
    """Rows ``(cells, distance, ratio_to_previous)`` over ``levels`` successive halvings of h."""
    rows, prev = [], None
    for k in range(levels):
        g = grid.refined(2**k)
        d = formulation_distance(kind, knobs, g, params, controls)
        rows.append((g.cells, d, prev / d if prev is not None and d > 0 else float("nan")))
        prev = d
    return rows


def perturbed_knobs(kind: str, knobs: dict, eps: float, target: str = "u", pert_k: int = 2) -> dict:
    base = dict(knobs)
    if kind == "perturbed":
        for key in ("eps", "target", "pert_k"):
            base.pop(key, None)
        base_kind = base.pop("base", "smooth_periodic")
    else:
        base_kind = kind
    return dict(base, base=base_kind, eps=eps, target=target, pert_k=pert_k)


@dataclass(frozen=True)
class WSURun:
    eps: float
    report: StabilityReport
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.report.passed


def reference_run(kind, knobs, grid, params, controls, refinement: int = 1):
    """Strong reference in v-form (unperturbed data), optionally from a refined grid."""
    scen = make_scenario("perturbed", grid, params, perturbed_knobs(kind, knobs, 0.0))
    if refinement == 1:
        return simulate(scen, controls, Formulation.V_FORM)
    return fine_grid_oracle(scen, refinement, controls, Formulation.V_FORM)


def wsu_run(kind, knobs, grid, params, controls, eps, *, target="u", pert_k=2,
            tol_abs=1e-6, tol_rel=0.1, reference=None, refinement: int = 1) -> WSURun:
    """Perturb the initial data by ``eps`` and certify the Gronwall bound against the reference.

    The tolerance is ``tol_abs + tol_rel * H(0)``.
    """
    if reference is None:
        reference = reference_run(kind, knobs, grid, params, controls, refinement)
    scen = make_scenario("perturbed", grid, params, perturbed_knobs(kind, knobs, eps, target, pert_k))
    traj = simulate(scen, controls, Formulation.V_FORM, output_times=list(reference.times[1:]))
    probe = wsu_check(traj, reference, grid, params, 0.0)
    tol = tol_abs + tol_rel * float(probe.H[0])
    return WSURun(eps, wsu_check(traj, reference, grid, params, tol), tol)


def fit_exponent(eps, sup_h) -> float:
    """Least-squares slope of ``log sup_H`` against ``log eps`` over strictly positive pairs."""
    pairs = [(e, h) for e, h in zip(eps, sup_h) if e > 0 and h > 0]
    if len(pairs) < 2:
        return float("nan")
    x, y = np.log([p[0] for p in pairs]), np.log([p[1] for p in pairs])
    return float(np.polyfit(x, y, 1)[0])
