import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nswsu.core import FluidParams, StateU, StateV, centered_diff, make_grid
from nswsu.errors import DomainError, InvalidArgumentError
from nswsu.transform import (
    grad_phi, kinematic_viscosity, phi, pressure, sound_speed, to_effective, to_primitive, viscosity,
)


def test_pressure_examples():
    assert pressure(0.0, FluidParams(gamma=2.0)) == 0.0
    assert pressure(2.0, FluidParams(gamma=2.0, a=1.0)) == 4.0
    assert pressure(1.5, FluidParams(gamma=1.4, a=0.5)) == pytest.approx(0.5 * 1.5**1.4, rel=1e-15)
    with pytest.raises(InvalidArgumentError):
        pressure(-1.0, FluidParams(gamma=2.0))


def test_sound_speed():
    p = FluidParams(gamma=2.0, a=1.0)
    assert sound_speed(2.0, p) == pytest.approx(2.0)


def test_viscosity_examples():
    assert viscosity(3.0, FluidParams(gamma=2.0, mu=2.0, alpha=0.0)) == 2.0
    assert viscosity(0.0, FluidParams(gamma=2.0, mu=1.0, alpha=1.0)) == 0.0
    assert viscosity(2.0, FluidParams(gamma=2.0, mu=1.0, alpha=2.0)) == 4.0
    with pytest.raises(InvalidArgumentError):
        viscosity(-0.1, FluidParams(gamma=2.0))


def test_kinematic_viscosity():
    assert kinematic_viscosity(0.0, FluidParams(gamma=2.0, alpha=2.0)) == 0.0
    with pytest.raises(DomainError):
        kinematic_viscosity(0.0, FluidParams(gamma=2.0, alpha=0.5))


def test_phi_examples():
    assert phi(1.0, FluidParams(gamma=2.0, mu=1.0, alpha=2.0)) == 1.0
    assert phi(1.0, FluidParams(gamma=2.0, mu=3.0, alpha=1.0)) == 0.0
    with pytest.raises(DomainError):
        phi(0.0, FluidParams(gamma=2.0, mu=1.0, alpha=0.5))


@given(st.floats(0.01, 10), st.floats(0.01, 10), st.floats(0.0, 3.0))
def test_phi_monotone(r1, r2, alpha):
    p = FluidParams(gamma=2.0, mu=0.7, alpha=alpha)
    lo, hi = sorted((r1, r2))
    assert phi(lo, p) <= phi(hi, p)


def test_phi_derivative_matches_viscosity_over_rho_squared():
    # central difference of phi against mu rho^alpha / rho^2
    for alpha in (0.0, 1.0, 1.5, 2.0, 3.0):
        p = FluidParams(gamma=2.0, mu=0.8, alpha=alpha)
        r, d = 1.7, 1e-5
        fd = (phi(r + d, p) - phi(r - d, p)) / (2 * d)
        assert fd == pytest.approx(viscosity(r, p) / r**2, rel=1e-8)


def test_constant_density_gives_v_equal_u():
    g = make_grid(1.0, 32)
    u = np.random.default_rng(1).normal(size=32)
    s = to_effective(StateU.from_velocity(np.full(32, 1.3), u), g, FluidParams(gamma=2.0))
    assert np.array_equal(s.v, StateU.from_velocity(np.full(32, 1.3), u).velocity())


def test_effective_velocity_second_order():
    p = FluidParams(gamma=2.0, mu=1.0, alpha=2.0)
    errs = []
    for n in (100, 200, 400):
        g = make_grid(1.0, n)
        rho = 2 + np.sin(2 * np.pi * g.x)
        v = to_effective(StateU(rho, np.zeros(n)), g, p).v
        errs.append(np.max(np.abs(v - 2 * np.pi * np.cos(2 * np.pi * g.x))))
    ratios = [errs[i] / errs[i + 1] for i in range(2)]
    assert all(3.5 < r < 4.5 for r in ratios)


def test_to_primitive_formula():
    p = FluidParams(gamma=2.0, mu=0.5, alpha=2.0)
    g = make_grid(1.0, 64)
    rho = 2 + np.sin(2 * np.pi * g.x)
    out = to_primitive(StateV(rho, np.ones(64)), g, p)
    expected = 1.0 - centered_diff(phi(rho, p), g)
    np.testing.assert_allclose(out.velocity(), expected, rtol=0, atol=1e-14)
    assert np.array_equal(out.rho, rho)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([1.4, 2.0, 3.0]), st.sampled_from([0.0, 1.0, 2.0, 2.5]))
def test_round_trip_bit_exact(seed, gamma, alpha):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(8, 64))
    g = make_grid(float(rng.uniform(0.5, 3.0)), n)
    p = FluidParams(gamma=gamma, mu=float(rng.uniform(0.01, 2.0)), alpha=alpha)
    s = StateU.from_velocity(rng.uniform(0.05, 5.0, n), rng.normal(size=n))
    back = to_primitive(to_effective(s, g, p), g, p)
    assert np.array_equal(back.rho, s.rho)
    assert np.array_equal(back.mom, s.mom)


def test_round_trip_with_vacuum_cells():
    p = FluidParams(gamma=2.0, mu=1.0, alpha=2.0)
    g = make_grid(4.0, 80, origin=-2.0)
    rho = np.maximum(0.0, 1 - g.x**2)
    s = StateU.from_velocity(rho, g.x)
    back = to_primitive(to_effective(s, g, p), g, p)
    assert np.array_equal(back.mom, s.mom)
    assert np.all(back.mom[rho == 0] == 0)


def test_grad_phi_power_identity():
    # phi = mu rho^(g-1)/(g-1) when alpha == gamma
    rng = np.random.default_rng(7)
    for gamma in (1.4, 2.0, 3.0):
        p = FluidParams(gamma=gamma, mu=0.3, alpha=gamma)
        g = make_grid(1.0, 50)
        rho = rng.uniform(0.1, 3.0, 50)
        lhs = grad_phi(rho, g, p)
        rhs = p.mu / (gamma - 1) * centered_diff(rho ** (gamma - 1), g)
        scale = np.max(np.abs(rhs))
        assert np.max(np.abs(lhs - rhs)) <= 1e-12 * scale


def test_phi_log_branch():
    p = FluidParams(gamma=2.0, mu=2.0, alpha=1.0)
    assert phi(math.e, p) == pytest.approx(2.0)
