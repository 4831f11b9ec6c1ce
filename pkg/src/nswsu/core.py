"""Shared domain types: parameters, grid, discrete states and trajectories.

All integrals use the midpoint rule on a uniform cell-centred grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import InvalidArgumentError

DEFAULT_FLOOR = 1e-12


class Boundary(str, Enum):
    PERIODIC = "periodic"
    EXTRAPOLATE = "extrapolate"


class Formulation(str, Enum):
    U_FORM = "u_form"
    V_FORM = "v_form"


def _readonly(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class FluidParams:
    """Pressure law ``P = a rho**gamma`` and viscosity law ``mu(rho) = mu rho**alpha``.

    ``delta`` is the integrability exponent used by the admissibility report.
    """

    gamma: float
    a: float = 1.0
    mu: float = 1.0
    alpha: float = 2.0
    delta: float = 0.1

    def __post_init__(self):
        for name in ("gamma", "a", "mu", "alpha", "delta"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidArgumentError(f"{name} must be finite")
        if not self.gamma > 1:
            raise InvalidArgumentError(f"gamma must be > 1, got {self.gamma}")
        if not self.a > 0:
            raise InvalidArgumentError(f"a must be > 0, got {self.a}")
        if not self.mu > 0:
            raise InvalidArgumentError(f"mu must be > 0, got {self.mu}")
        if not self.alpha >= 0:
            raise InvalidArgumentError(f"alpha must be >= 0, got {self.alpha}")
        if not self.delta > 0:
            raise InvalidArgumentError(f"delta must be > 0, got {self.delta}")


@dataclass(frozen=True)
class Grid1D:
    length: float
    cells: int
    spacing: float
    boundary: Boundary = Boundary.PERIODIC
    origin: float = 0.0

    def __post_init__(self):
        if not (self.length > 0 and math.isfinite(self.length)):
            raise InvalidArgumentError(f"grid length must be positive, got {self.length}")
        if int(self.cells) != self.cells or self.cells < 4:
            raise InvalidArgumentError(f"grid needs at least 4 cells, got {self.cells}")
        if abs(self.spacing * self.cells - self.length) > 4 * np.finfo(float).eps * self.length:
            raise InvalidArgumentError("spacing * cells must equal length")
        object.__setattr__(self, "boundary", Boundary(self.boundary))

    @property
    def x(self) -> np.ndarray:
        """Cell centres ``origin + (i + 1/2) h``."""
        return self.origin + (np.arange(self.cells) + 0.5) * self.spacing

    def refined(self, factor: int) -> Grid1D:
        return make_grid(self.length, self.cells * factor, self.boundary, self.origin)


def make_grid(length: float, cells: int, boundary=Boundary.PERIODIC, origin: float = 0.0) -> Grid1D:
    if not length > 0:
        raise InvalidArgumentError(f"grid length must be positive, got {length}")
    if int(cells) != cells or cells < 4:
        raise InvalidArgumentError(f"grid needs at least 4 cells, got {cells}")
    try:
        boundary = Boundary(boundary)
    except ValueError:
        raise InvalidArgumentError(f"unknown boundary '{boundary}'") from None
    return Grid1D(float(length), int(cells), float(length) / int(cells), boundary, float(origin))


@dataclass(frozen=True)
class TimeControls:
    """Time-stepping policy.

    ``snapshot_dt > 0`` switches from stride-based recording to fixed output
    times ``k * snapshot_dt``; steps are shortened to land on them exactly, so
    runs with different adaptive steps can be compared snapshot by snapshot.
    ``face_average`` picks how face diffusivities are formed: ``arithmetic``
    or ``harmonic``.
    """

    t_end: float
    cfl_advective: float = 0.45
    cfl_diffusive: float = 0.25
    max_steps: int = 10_000_000
    snapshot_stride: int = 10
    density_floor: float = DEFAULT_FLOOR
    snapshot_dt: float = 0.0
    face_average: str = "arithmetic"

    def __post_init__(self):
        if not (self.t_end >= 0 and math.isfinite(self.t_end)):
            raise InvalidArgumentError(f"t_end must be >= 0, got {self.t_end}")
        if not 0 < self.cfl_advective <= 1:
            raise InvalidArgumentError("cfl_advective must lie in (0, 1]")
        if not 0 < self.cfl_diffusive <= 0.5:
            raise InvalidArgumentError("cfl_diffusive must lie in (0, 0.5]")
        if int(self.max_steps) != self.max_steps or self.max_steps < 1:
            raise InvalidArgumentError("max_steps must be an integer >= 1")
        if int(self.snapshot_stride) != self.snapshot_stride or self.snapshot_stride < 1:
            raise InvalidArgumentError("snapshot_stride must be an integer >= 1")
        if not self.density_floor >= 0:
            raise InvalidArgumentError("density_floor must be >= 0")
        if not self.snapshot_dt >= 0:
            raise InvalidArgumentError("snapshot_dt must be >= 0")
        if self.face_average not in ("arithmetic", "harmonic"):
            raise InvalidArgumentError(f"unknown face_average '{self.face_average}'")


@dataclass(frozen=True, eq=False)
class StateU:
    """Density and momentum ``m = rho u``."""

    rho: np.ndarray
    mom: np.ndarray

    def __post_init__(self):
        rho, mom = _readonly(self.rho), _readonly(self.mom)
        if rho.ndim != 1 or rho.shape != mom.shape:
            raise InvalidArgumentError("rho and mom must be 1-D arrays of equal length")
        if np.any(rho < 0):
            raise InvalidArgumentError("density must be non-negative")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "mom", mom)

    def velocity(self, floor: float = DEFAULT_FLOOR) -> np.ndarray:
        return self.mom / np.maximum(self.rho, floor)

    def check_vacuum(self, floor: float = DEFAULT_FLOOR) -> None:
        if np.any(self.mom[self.rho < floor] != 0):
            raise InvalidArgumentError("momentum must vanish in vacuum cells")

    @classmethod
    def from_velocity(cls, rho, u, floor: float = DEFAULT_FLOOR) -> StateU:
        rho = np.asarray(rho, dtype=float)
        mom = np.where(rho < floor, 0.0, rho * np.asarray(u, dtype=float))
        return cls(rho, mom)


@dataclass(frozen=True, eq=False)
class StateV:
    """Density and effective velocity ``v = u + d/dx phi(rho)``.

    ``v_err`` and ``mom_res`` are the exact rounding residuals left over when
    the state was produced by :func:`~nswsu.transform.to_effective`; they let
    :func:`~nswsu.transform.to_primitive` invert that map without loss.
    Any evolved state drops them.
    """

    rho: np.ndarray
    v: np.ndarray
    v_err: np.ndarray | None = field(default=None, repr=False)
    mom_res: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        rho, v = _readonly(self.rho), _readonly(self.v)
        if rho.ndim != 1 or rho.shape != v.shape:
            raise InvalidArgumentError("rho and v must be 1-D arrays of equal length")
        if np.any(rho < 0):
            raise InvalidArgumentError("density must be non-negative")
        if not np.all(np.isfinite(v)):
            raise InvalidArgumentError("effective velocity must be finite")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "v", v)
        for name in ("v_err", "mom_res"):
            if getattr(self, name) is not None:
                object.__setattr__(self, name, _readonly(getattr(self, name)))


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Snapshots of one run with the running dissipation integral.

    ``steps`` is the number of time steps taken and ``min_density`` the
    smallest density seen over all of them (not only at snapshots).
    """

    times: np.ndarray
    snapshots: list
    dissipation_accum: np.ndarray
    formulation: Formulation
    steps: int = 0
    min_density: float = math.inf

    def __post_init__(self):
        times = _readonly(self.times)
        if times.size == 0 or times[0] != 0.0:
            raise InvalidArgumentError("trajectory must start at t = 0")
        if np.any(np.diff(times) <= 0):
            raise InvalidArgumentError("trajectory times must be strictly increasing")
        if len(self.snapshots) != times.size or len(self.dissipation_accum) != times.size:
            raise InvalidArgumentError("times, snapshots and dissipation_accum must align")
        acc = _readonly(self.dissipation_accum)
        if np.any(np.diff(acc) < 0):
            raise InvalidArgumentError("dissipation_accum must be non-decreasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "dissipation_accum", acc)
        object.__setattr__(self, "snapshots", list(self.snapshots))
        object.__setattr__(self, "formulation", Formulation(self.formulation))

    def __len__(self):
        return self.times.size


# -- stencils ---------------------------------------------------------------


def pad(f: np.ndarray, boundary: Boundary) -> np.ndarray:
    """One ghost cell per side: wrap-around or zero-gradient copy."""
    mode = "wrap" if Boundary(boundary) is Boundary.PERIODIC else "edge"
    return np.pad(f, 1, mode=mode)


def centered_diff(f: np.ndarray, grid: Grid1D) -> np.ndarray:
    """``(f[i+1] - f[i-1]) / (2h)`` with the grid's boundary closure."""
    e = pad(np.asarray(f, dtype=float), grid.boundary)
    return (e[2:] - e[:-2]) / (2.0 * grid.spacing)


# -- norms and conserved quantities ------------------------------------------


def discrete_norm(field_: np.ndarray, grid: Grid1D, p: str = "L2") -> float:
    f = np.asarray(field_, dtype=float)
    if f.shape != (grid.cells,):
        raise InvalidArgumentError(f"field has shape {f.shape}, grid has {grid.cells} cells")
    p = str(p).upper()
    if p == "L1":
        return float(grid.spacing * np.sum(np.abs(f)))
    if p == "L2":
        return float(math.sqrt(grid.spacing * np.sum(f * f)))
    if p in ("LINF", "INF"):
        return float(np.max(np.abs(f))) if f.size else 0.0
    raise InvalidArgumentError(f"unknown norm '{p}'")


def total_mass(state, grid: Grid1D) -> float:
    if state.rho.shape != (grid.cells,):
        raise InvalidArgumentError("state does not live on this grid")
    return float(grid.spacing * np.sum(state.rho))
