import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nswsu.core import FluidParams, Formulation, StateU, StateV, TimeControls, Trajectory, make_grid
from nswsu.diagnostics import (
    dissipation, energy_u, energy_v, gronwall_rate, rel_entropy_F, rel_entropy_total, wsu_check,
)
from nswsu.errors import InvalidArgumentError, UnsupportedRegimeError
from nswsu.scenarios import make_scenario
from nswsu.solver import simulate
from nswsu.transform import to_effective

P2 = FluidParams(gamma=2.0, a=1.0, mu=1.0, alpha=2.0)


def _one(state, form):
    return Trajectory([0.0], [state], [0.0], form)


def test_energy_u_examples():
    g = make_grid(1.0, 10)
    rep = energy_u(_one(StateU(np.zeros(10), np.zeros(10)), Formulation.U_FORM), 0, g, P2)
    assert (rep.kinetic, rep.potential, rep.total) == (0.0, 0.0, 0.0)
    rep = energy_u(_one(StateU.from_velocity(np.ones(10), np.full(10, 2.0)), Formulation.U_FORM), 0, g, P2)
    assert rep.kinetic == pytest.approx(2.0) and rep.potential == pytest.approx(1.0)
    assert rep.total == pytest.approx(3.0)


def test_energy_v_examples():
    g = make_grid(1.0, 10)
    rep = energy_v(_one(StateV(np.zeros(10), np.zeros(10)), Formulation.V_FORM), 0, g, P2)
    assert rep.total == 0.0
    rep = energy_v(_one(StateV(np.ones(10), np.zeros(10)), Formulation.V_FORM), 0, g, P2)
    assert rep.potential == pytest.approx(1.0) and rep.kinetic == 0.0
    assert rep.dissipation_kind == "bd_dissipation"
    with pytest.raises(UnsupportedRegimeError):
        energy_v(_one(StateV(np.ones(10), np.zeros(10)), Formulation.V_FORM), 0, g,
                 FluidParams(gamma=2.0, alpha=1.5))


def test_F_examples():
    assert rel_entropy_F(3.7, 0.0, P2) == 0.0
    assert rel_entropy_F(1.0, 0.1, P2) == pytest.approx(0.005, rel=1e-12)
    assert rel_entropy_F(0.0, 1.0, P2) == pytest.approx(0.5, rel=1e-15)
    with pytest.raises(InvalidArgumentError):
        rel_entropy_F(1.0, -2.0, P2)


@given(st.floats(1.05, 4.0), st.floats(0.0, 5.0), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_F_nonnegative_and_convex(gamma, rb, s1, s2):
    p = FluidParams(gamma=gamma)
    # R ranges over [-rb, rb + 2]
    r1, r2 = -rb + s1 * (2 * rb + 2), -rb + s2 * (2 * rb + 2)
    f1, f2 = rel_entropy_F(rb, r1, p), rel_entropy_F(rb, r2, p)
    fm = rel_entropy_F(rb, 0.5 * (r1 + r2), p)
    assert f1 >= 0 and f2 >= 0
    scale = max(1.0, (rb + 2 * rb + 2) ** gamma)
    assert fm <= 0.5 * (f1 + f2) + 1e-12 * scale


@given(st.floats(1.05, 4.0), st.floats(0.1, 5.0), st.floats(-1.0, 1.0))
def test_F_quadratic_leading_term(gamma, rb, s):
    # F ~ (gamma-1) rb^(gamma-2) R^2 / 2 for small R
    p = FluidParams(gamma=gamma)
    R = s * 1e-4 * rb
    lead = (gamma - 1) * rb ** (gamma - 2) * R * R / 2
    assert rel_entropy_F(rb, R, p) == pytest.approx(lead, rel=1e-3, abs=1e-300)


def test_F_continuous_across_series_cutoff():
    p = FluidParams(gamma=1.4)
    rb = 2.0
    below, above = rel_entropy_F(rb, 0.999999e-3 * rb, p), rel_entropy_F(rb, 1.000001e-3 * rb, p)
    assert above == pytest.approx(below, rel=1e-5)


def test_H_examples():
    g = make_grid(1.0, 20)
    s, r = StateV(np.ones(20), np.ones(20)), StateV(np.ones(20), np.zeros(20))
    assert rel_entropy_total(s, r, g, P2) == pytest.approx(1.0)
    assert rel_entropy_total(r, r, g, P2) == 0.0


def test_H_scales_quadratically_for_velocity_perturbation():
    g = make_grid(4.0, 400, origin=-2.0)
    ref = make_scenario("vacuum_bump", g, P2, {"u_amp": 0.2})
    h = []
    for eps in (1e-2, 1e-3):
        pert = make_scenario("perturbed", g, P2, {"base": "vacuum_bump", "u_amp": 0.2, "eps": eps, "target": "u"})
        h.append(rel_entropy_total(to_effective(pert.initial, g, P2), to_effective(ref.initial, g, P2), g, P2))
    assert 100 / 1.1 <= h[0] / h[1] <= 100 * 1.1


def test_dissipation_zero_cases():
    g = make_grid(1.0, 64)
    rho = 2 + np.sin(2 * np.pi * g.x)
    s = StateV(rho, np.zeros(64))
    assert dissipation(s, s, g, P2) == pytest.approx(0.0, abs=1e-24)
    assert dissipation(StateV(np.full(64, 2.0), np.zeros(64)), StateV(np.full(64, 0.5), np.zeros(64)), g, P2) == 0.0


def test_dissipation_against_analytic_integral():
    # rho = 2 + sin(2 pi x) against a constant reference: a mu g * int rho rho_x^2 = a mu g 4 pi^2
    p = FluidParams(gamma=2.0, a=1.5, mu=0.3, alpha=2.0)
    exact = p.a * p.mu * p.gamma * 4 * math.pi**2
    errs = []
    for n in (100, 200):
        g = make_grid(1.0, n)
        s = StateV(2 + np.sin(2 * np.pi * g.x), np.zeros(n))
        errs.append(abs(dissipation(s, StateV(np.ones(n), np.zeros(n)), g, p) - exact))
    assert errs[1] < 1e-3 * exact
    assert errs[0] / errs[1] > 3.5


def test_gronwall_rate_examples():
    assert gronwall_rate(0.0, 0.0, P2) == 0.0
    assert gronwall_rate(1.0, 0.0, P2) == 2.0
    assert gronwall_rate(0.0, 1.0, P2) == 1.25
    with pytest.raises(InvalidArgumentError):
        gronwall_rate(-1.0, 0.0, P2)


def test_wsu_identity():
    p = FluidParams(gamma=2.0, a=1.0, mu=0.01, alpha=2.0)
    g = make_grid(1.0, 64)
    traj = simulate(make_scenario("smooth_periodic", g, p, {"u_amp": 0.5}), TimeControls(t_end=0.05))
    rep = wsu_check(traj, traj, g, p, 0.0)
    assert rep.passed and np.all(rep.H == 0.0)
    assert np.array_equal(rep.margin, rep.bound) and np.all(rep.bound >= 0)


def test_wsu_requires_matching_times():
    p = FluidParams(gamma=2.0, a=1.0, mu=0.01, alpha=2.0)
    g = make_grid(1.0, 32)
    scen = make_scenario("smooth_periodic", g, p, {"u_amp": 0.5})
    a = simulate(scen, TimeControls(t_end=0.05, snapshot_stride=1))
    b = simulate(scen, TimeControls(t_end=0.05, snapshot_stride=2))
    with pytest.raises(InvalidArgumentError):
        wsu_check(a, b, g, p, 0.0)


def test_energy_v_bounded_on_vacuum_bump():
    p = FluidParams(gamma=2.0, a=1.0, mu=0.01, alpha=2.0)
    g = make_grid(4.0, 400, origin=-2.0)
    traj = simulate(make_scenario("vacuum_bump", g, p, {"u_amp": 0.2}),
                    TimeControls(t_end=0.2, snapshot_stride=1), Formulation.V_FORM)
    totals = np.array([energy_v(traj, k, g, p).total for k in range(len(traj))])
    assert np.max(totals) <= totals[0] * (1 + 1e-6)
