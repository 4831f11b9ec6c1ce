"""Constitutive laws and the change of unknown ``v = u + d/dx phi(rho)``.

``phi`` is the antiderivative of ``mu(rho) / rho**2`` that vanishes at
``rho = 0`` when ``alpha > 1`` (and ``mu ln rho`` when ``alpha == 1``).
The discrete derivative is the centred difference of the point values
``phi(rho_i)``, so the map is finite at vacuum for ``alpha > 1``.
"""

from __future__ import annotations

import math

import numpy as np

from .core import DEFAULT_FLOOR, FluidParams, Grid1D, StateU, StateV, centered_diff
from .errors import DomainError, InvalidArgumentError


def _nonneg(rho, what):
    r = np.asarray(rho, dtype=float)
    if np.any(r < 0) or np.any(np.isnan(r)):
        raise InvalidArgumentError(f"{what}: density must be non-negative")
    return r


def _out(x, like):
    return float(x) if np.ndim(like) == 0 else x


def pressure(rho, params: FluidParams):
    r = _nonneg(rho, "pressure")
    return _out(params.a * r**params.gamma, rho)


def sound_speed(rho, params: FluidParams):
    r = _nonneg(rho, "sound_speed")
    return _out(np.sqrt(params.gamma * params.a * r ** (params.gamma - 1.0)), rho)


def viscosity(rho, params: FluidParams):
    r = _nonneg(rho, "viscosity")
    # 0**0 == 1, so alpha = 0 gives the constant-viscosity law everywhere
    return _out(params.mu * r**params.alpha, rho)


def kinematic_viscosity(rho, params: FluidParams):
    """``mu(rho) / rho = mu rho**(alpha - 1)``, finite at vacuum for alpha >= 1."""
    r = _nonneg(rho, "kinematic_viscosity")
    if params.alpha < 1 and np.any(r == 0):
        raise DomainError("mu(rho)/rho is singular at vacuum for alpha < 1")
    return _out(params.mu * r ** (params.alpha - 1.0), rho)


def phi(rho, params: FluidParams):
    r = _nonneg(rho, "phi")
    if params.alpha <= 1 and np.any(r == 0):
        raise DomainError(
            f"phi is singular at vacuum for alpha = {params.alpha} <= 1; "
            "use alpha > 1 or strictly positive density"
        )
    if params.alpha == 1:
        out = params.mu * np.log(r)
    else:
        out = params.mu * r ** (params.alpha - 1.0) / (params.alpha - 1.0)
    return _out(out, rho)


def grad_phi(rho: np.ndarray, grid: Grid1D, params: FluidParams) -> np.ndarray:
    return centered_diff(phi(np.asarray(rho, dtype=float), params), grid)


def transport_velocity(state: StateV, grid: Grid1D, params: FluidParams) -> np.ndarray:
    """``u = v - D_c phi(rho)``, defined in every cell including vacuum."""
    return state.v - grad_phi(state.rho, grid, params)


# -- error-free float transformations ----------------------------------------

_SPLITTER = 134217729.0  # 2**27 + 1


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _exact_sum(*terms) -> np.ndarray:
    # correctly rounded, hence exact whenever the true sum is a double
    return np.fromiter((math.fsum(t) for t in zip(*terms)), dtype=float, count=len(terms[0]))


def to_effective(state: StateU, grid: Grid1D, params: FluidParams, floor: float = DEFAULT_FLOOR) -> StateV:
    rho = state.rho
    rho_f = np.maximum(rho, floor)
    u = state.mom / rho_f
    d = grad_phi(rho, grid, params)
    v, v_err = _two_sum(u, d)
    p, q = _two_prod(rho_f, u)
    mom_res = (state.mom - p) - q
    if not (np.all(np.isfinite(v_err)) and np.all(np.isfinite(mom_res))):
        v_err = mom_res = None
    return StateV(rho, v, v_err, mom_res)


def to_primitive(state: StateV, grid: Grid1D, params: FluidParams, floor: float = DEFAULT_FLOOR) -> StateU:
    rho = state.rho
    d = grad_phi(rho, grid, params)
    vacuum = rho < floor
    if state.v_err is None:
        u = state.v - d
        return StateU(rho, np.where(vacuum, 0.0, rho * u))
    u = _exact_sum(state.v, state.v_err, -d)
    p, q = _two_prod(np.maximum(rho, floor), u)
    mom = _exact_sum(p, q, state.mom_res)
    return StateU(rho, np.where(vacuum, 0.0, mom))
