"""Real-power nonlinearity, frequency truncations, and decomposition identities.

The two check routines verify, in floating point, the exact algebraic
identities that rewrite |u|^{p-1}u as band sums of truncated fields. Both
identities hold pointwise at every sample (they are the fundamental theorem
of calculus in the value u(x)), so the only genuine error source is the
quadrature in the truncation parameters.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import littlewood_paley as lp
from .grid import Field, GridSpec


class ExpansionBudgetError(Exception):
    """Nested band sum would exceed the configured work budget."""


class IntegrandMagnitudeWarning(UserWarning):
    """A truncated-field integrand exceeded the configured magnitude."""


_ABS_FLOOR = 1e-300  # keeps 0**0 away from the power kernels


@dataclass(frozen=True)
class PowerLaw:
    """f(x) = |x|^{p-1} x with derivatives through order four.

    The order-k derivative is prod_{i<k}(p-i) times |x|^{p-1-k} x for even k
    and |x|^{p-k} for odd k; no order beyond four is ever needed here.
    """

    p: float
    coefficients: Tuple[float, ...] = field(init=False)

    def __post_init__(self):
        if not (self.p >= 5.0):
            raise ValueError("power must satisfy p >= 5")
        c = [1.0]
        for i in range(4):
            c.append(c[-1] * (self.p - i))
        object.__setattr__(self, "coefficients", tuple(c))

    def derivative(self, x, order: int = 0):
        if not (0 <= order <= 4):
            raise ValueError("derivative order must be in 0..4")
        x = np.asarray(x, dtype=np.float64)
        ax = np.maximum(np.abs(x), _ABS_FLOOR)
        if order % 2 == 0:
            return self.coefficients[order] * ax ** (self.p - 1 - order) * x
        return self.coefficients[order] * ax ** (self.p - order)

    def __call__(self, x):
        return self.derivative(x, 0)


def expansion_constant(p: float) -> float:
    """Constant in front of the four-fold band decomposition: the order-4
    derivative prefactor p(p-1)(p-2)(p-3). Equals 120 at p = 5."""
    return PowerLaw(p).coefficients[4]


def _padded_values(f: Field, factor: float) -> np.ndarray:
    n = f.grid.num_points
    m = int(round(factor * n))
    if m <= n:
        return f.values.copy()
    c = f.coefficients
    pad = np.zeros(m, dtype=np.complex128)
    half = n // 2
    pad[:half] = c[:half]
    pad[m - half + 1:] = c[half + 1:]
    return np.fft.ifft(pad).real * m


def _truncate_spectrum(w: np.ndarray, n: int) -> np.ndarray:
    m = w.size
    cc = np.fft.fft(w) / m
    half = n // 2
    out = np.zeros(n, dtype=np.complex128)
    out[:half] = cc[:half]
    out[half + 1:] = cc[m - half + 1:]
    return out


def _taper(grid: GridSpec) -> np.ndarray:
    # half-cosine rolloff on the top tenth of the resolvable band
    r = np.abs(grid.frequencies) / grid.resolvable_max
    t = np.ones(grid.num_points)
    hot = r > 0.9
    t[hot] = np.cos(0.5 * np.pi * np.minimum((r[hot] - 0.9) / 0.1, 1.0)) ** 2
    return t


def evaluate_power(f: Field, p: float) -> Field:
    """|f|^{p-1} f on a zero-padded grid, truncated back and tapered.

    Real powers alias; padding by the grid's dealias factor pushes the
    dominant aliases out, and the taper suppresses what re-enters near the
    top of the band.
    """
    law = PowerLaw(p)
    vals = _padded_values(f, f.grid.dealias_factor)
    out = _truncate_spectrum(law(vals), f.grid.num_points)
    out *= _taper(f.grid)
    return Field.from_coefficients(f.grid, out, check=False)


def dealiased_product(f: Field, g: Field) -> Field:
    """Pointwise product via the padded grid; exact for bandwidths that fit."""
    if f.grid != g.grid:
        raise ValueError("fields live on different grids")
    a = _padded_values(f, f.grid.dealias_factor)
    b = _padded_values(g, g.grid.dealias_factor)
    out = _truncate_spectrum(a * b, f.grid.num_points)
    return Field.from_coefficients(f.grid, out, check=False)


def truncation_operator(u: Field, sc: lp.LPScale, tau: float) -> Field:
    """Blend of the low-pass cutoffs: everything below the band plus tau
    times the band itself. Linear in u for fixed (scale, tau)."""
    tau = float(tau)
    if not (0.0 <= tau <= 1.0):
        raise ValueError("tau must lie in [0, 1]")
    return lp.project_lt(u, sc) + lp.project(u, sc) * tau


def _gl_nodes(n: int):
    if n < 1:
        raise ValueError("need at least one quadrature node")
    x, w = np.polynomial.legendre.leggauss(int(n))
    return (x + 1.0) / 2.0, w / 2.0


def window_project(u: Field, band: range) -> Field:
    """Sharp spectral window where the band's partition sums to one.

    Keeps |xi| in [2 lam_{zmin-1}, lam_zmax]; outside it the telescoping
    sums cannot reproduce u, so the identity checks pre-project."""
    lo = 2.0 * lp.scale_value(band.start - 1)
    hi = lp.scale_value(band.stop - 1)
    axi = np.abs(u.grid.frequencies)
    keep = (axi >= lo) & (axi <= hi)
    return Field.from_coefficients(u.grid, np.where(keep, u.coefficients, 0.0),
                                   check=False)


def _rel_l2(a: np.ndarray, b: np.ndarray) -> float:
    scale = float(np.linalg.norm(b))
    if scale == 0.0:
        return float(np.linalg.norm(a))
    return float(np.linalg.norm(a - b)) / scale


def telescoping_check(u: Field, p: float, band=None, nodes: int = 16) -> float:
    """Relative L2 residual of the one-level band decomposition of f(u).

    Rebuilds f(u) as sum over band scales of int_0^1 f'(blend) dtau times
    the band piece, with Gauss-Legendre in tau, and compares against the
    direct pointwise power. Scales whose band piece vanishes identically
    contribute nothing and are skipped.
    """
    grid = u.grid
    if band is None:
        band = lp.default_band(grid)
    u = window_project(u, band)
    law = PowerLaw(p)
    target = law(u.values)
    tnorm = float(np.linalg.norm(target))
    if tnorm == 0.0:
        return 0.0
    tau, wts = _gl_nodes(nodes)
    uh = u.coefficients
    n = grid.num_points
    acc = np.zeros(n)
    for z in band:
        psi = lp.symbol_array(grid, z, "psi")
        piece_h = psi * uh
        if not np.any(piece_h):
            continue
        low = lp.symbol_array(grid, z - 1, "leq")
        rows = low[None, :] + tau[:, None] * psi[None, :]
        stack = np.vstack([rows * uh[None, :], piece_h[None, :]])
        vals = np.fft.ifft(stack, axis=1).real * n
        blend = law.derivative(vals[:-1], 1)
        acc += (wts @ blend) * vals[-1]
    return _rel_l2(acc, target)


def _chain_cutoffs(band: range, length: int) -> List[int]:
    zs = np.linspace(band.start - 1, band.stop - 1, length + 1)
    zs = sorted(set(int(round(z)) for z in zs))
    if zs[0] != band.start - 1:
        zs.insert(0, band.start - 1)
    if zs[-1] != band.stop - 1:
        zs.append(band.stop - 1)
    return zs


def quintic_expansion_check(u: Field, p: float, band=None, nodes: int = 8,
                            chain_length: int = 3,
                            budget: int = 6_000_000,
                            integrand_limit: Optional[float] = None) -> float:
    """Relative L2 residual of the four-fold nested band decomposition.

    The band lattice is coarsened to a short chain of cutoffs (the percent-
    spaced lattice would make the nested sum astronomically large); the
    telescoping is exact for any chain drawn from the lattice. The sum runs
    over all four band indices independently: every factor is a multiplier
    applied in spectral space, and the innermost level is batched.
    """
    grid = u.grid
    if band is None:
        band = lp.default_band(grid)
    u = window_project(u, band)
    law = PowerLaw(p)
    cexp = expansion_constant(p)
    target = law(u.values)
    tnorm = float(np.linalg.norm(target))
    if tnorm == 0.0:
        return 0.0
    tau, wts = _gl_nodes(nodes)
    zs = _chain_cutoffs(band, chain_length)
    n = grid.num_points
    uh = u.coefficients
    cum = [lp.symbol_array(grid, z, "leq") for z in zs]
    bands = [cum[i] - cum[i - 1] for i in range(1, len(cum))]
    live = [i for i, q in enumerate(bands) if np.any(q * uh)]
    nb = len(live)
    work = (nb * nodes) ** 4
    if work > budget:
        raise ExpansionBudgetError(
            "nested band sum needs a budget of %d elementary transforms "
            "(budget is %d); coarsen the chain or lower the node count"
            % (work, budget))

    cum_below = [cum[i] for i in live]
    q_live = [bands[i] for i in live]
    blends = [cum_below[i][None, :] + tau[:, None] * q_live[i][None, :]
              for i in range(nb)]
    hot_rows = 0

    acc5 = np.zeros(n)
    for i5 in range(nb):
        p5 = np.fft.ifft(q_live[i5] * uh).real * n
        for a5 in range(nodes):
            m5 = blends[i5][a5]
            acc4 = np.zeros(n)
            for i4 in range(nb):
                p4 = np.fft.ifft(q_live[i4] * m5 * uh).real * n
                for a4 in range(nodes):
                    m45 = blends[i4][a4] * m5
                    acc3 = np.zeros(n)
                    for i3 in range(nb):
                        p3 = np.fft.ifft(q_live[i3] * m45 * uh).real * n
                        for a3 in range(nodes):
                            base = blends[i3][a3] * m45 * uh
                            stack = np.empty((nb * nodes + nb, n),
                                             dtype=np.complex128)
                            for i2 in range(nb):
                                stack[i2 * nodes:(i2 + 1) * nodes] = \
                                    blends[i2] * base[None, :]
                                stack[nb * nodes + i2] = q_live[i2] * base
                            vals = np.fft.ifft(stack, axis=1).real * n
                            v = vals[:nb * nodes]
                            pieces = vals[nb * nodes:]
                            av = np.maximum(np.abs(v), _ABS_FLOOR)
                            core = cexp * av ** (p - 5.0) * v
                            if integrand_limit is not None:
                                hot_rows += int(np.sum(
                                    np.max(np.abs(core), axis=1)
                                    > integrand_limit))
                            core3 = core.reshape(nb, nodes, n)
                            summed = np.einsum("a,ban->bn", wts, core3)
                            inner = (summed * pieces).sum(axis=0)
                            acc3 += wts[a3] * inner * p3
                    acc4 += wts[a4] * acc3 * p4
            acc5 += wts[a5] * acc4 * p5
    if integrand_limit is not None and hot_rows:
        warnings.warn(
            "%d inner evaluations exceeded the integrand magnitude limit"
            % hot_rows, IntegrandMagnitudeWarning)
    return _rel_l2(acc5, target)


def residual_csv(entries: Sequence[Tuple[int, int, float]]) -> str:
    """CSV rows (nodes per tau, band count, residual)."""
    lines = ["nodes,band_count,residual"]
    for nodes, count, res in entries:
        lines.append("%d,%d,%s" % (nodes, count, repr(float(res))))
    return "\n".join(lines) + "\n"
