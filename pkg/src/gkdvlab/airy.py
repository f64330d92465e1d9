"""The free dispersive group S(t) and the Duhamel integral.

S(t) multiplies mode xi by exp(+i xi^3 t); this is the sign for which
v(t) = S(t) phi satisfies the discretized v_t + v_xxx = 0 (plug in a single
harmonic: cos(xi x + xi^3 t) works). A global sign flip would change no norm
in this package, but the convention is fixed here once.

The propagator is unitary on the resolvable band; the Nyquist bin is zero by
the field construction contract, so unitarity and the group law hold to
rounding, not just approximately.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .grid import Field, GridMismatchError, GridSpec, Path

_PHASE_CACHE_LIMIT = 1 << 23  # do not retain (K+1)*N phase tables above this


@dataclass(frozen=True)
class Propagator:
    """Multiplier table of S(t) on one grid at one time."""

    grid: GridSpec
    time: float

    @cached_property
    def table(self) -> np.ndarray:
        xi = self.grid.frequencies
        tab = np.exp(1j * xi ** 3 * self.time)
        tab[self.grid.nyquist_index] = 0.0
        tab.flags.writeable = False
        return tab

    def apply(self, f: Field) -> Field:
        if f.grid != self.grid:
            raise GridMismatchError("field grid does not match propagator grid")
        out = self.table * f.coefficients
        return Field.from_coefficients(self.grid, out, check=False)


def evolve(f: Field, t: float) -> Field:
    """S(t) f."""
    return Propagator(f.grid, float(t)).apply(f)


@lru_cache(maxsize=8)
def _phase_matrix_cached(grid: GridSpec, sign: int) -> np.ndarray:
    return _phase_matrix_compute(grid, sign)


def _phase_matrix_compute(grid: GridSpec, sign: int) -> np.ndarray:
    xi3 = grid.frequencies ** 3
    m = np.exp((sign * 1j) * np.outer(grid.times, xi3))
    m[:, grid.nyquist_index] = 0.0
    m.flags.writeable = False
    return m


def phase_matrix(grid: GridSpec, sign: int = +1) -> np.ndarray:
    """exp(sign * i xi^3 t_k) for all sample times; cached for small grids."""
    if (grid.num_steps + 1) * grid.num_points <= _PHASE_CACHE_LIMIT:
        return _phase_matrix_cached(grid, sign)
    return _phase_matrix_compute(grid, sign)


def free_solution(phi: Field, grid: GridSpec | None = None) -> Path:
    """Path of S(t_k) phi over the grid's sample times."""
    g = phi.grid if grid is None else grid
    if g != phi.grid:
        raise GridMismatchError("initial data lives on a different grid")
    cmat = phase_matrix(g, +1) * phi.coefficients[None, :]
    return Path.from_spectral_matrix(g, cmat)


def duhamel(forcing: Path, grid: GridSpec | None = None) -> Path:
    """t -> integral_0^t S(t-s) f(s) ds by interaction-picture quadrature.

    The integrand is pulled back to g(s) = S(-s) f(s), integrated by a
    cumulative composite Simpson rule (one trapezoid step onto odd indices),
    and pushed forward again. Exact for forcing of the form S(s) phi, linear
    in the forcing, and identically zero at t = 0.
    """
    g = forcing.grid if grid is None else grid
    if g != forcing.grid:
        raise GridMismatchError("forcing path lives on a different grid")
    dt = g.dt
    pulled = forcing.spectral_matrix * phase_matrix(g, -1)
    acc = np.zeros_like(pulled)
    for k in range(1, g.num_steps + 1):
        if k >= 2 and k % 2 == 0:
            acc[k] = acc[k - 2] + (dt / 3.0) * (pulled[k - 2] + 4.0 * pulled[k - 1] + pulled[k])
        else:
            acc[k] = acc[k - 1] + (dt / 2.0) * (pulled[k - 1] + pulled[k])
    out = acc * phase_matrix(g, +1)
    return Path.from_spectral_matrix(g, out)


def free_equation_residual(path: Path) -> float:
    """sup_k L2 residual of v_t + v_xxx = 0, centered differences in time.

    O(dt^2) for free solutions; used as a self-check, not a norm.
    """
    g = path.grid
    c = path.spectral_matrix
    dt_c = (c[2:] - c[:-2]) / (2.0 * g.dt)
    xi = g.frequencies
    d3 = (1j * xi) ** 3
    resid = dt_c + c[1:-1] * d3[None, :]
    per_k = np.sqrt(g.domain_length * np.sum((resid * np.conj(resid)).real, axis=1))
    return float(per_k.max(initial=0.0))
