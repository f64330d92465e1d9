"""Frequency decomposition on the multiplicative lattice 1.01^Z.

Bands are far denser than the classical dyadic ladder: roughly 70 lattice
points per octave, and each fixed frequency xi lies in the support of about
70 neighboring band symbols (ln 2.02 / ln 1.01). The smooth symbols

    Psi_z(xi) = cutoff(|xi| / lam_z) - cutoff(|xi| / lam_{z-1})

are built from ADJACENT entries of one shared lambda table so that partial
sums over z telescope term by term; the partition-of-unity identity then
holds to ~1e-14 in floating point, not merely to the bump's smoothness.

The cutoff profile equals 1 on [0,1], vanishes outside (-2,2), and is C-inf:
    cutoff(s) = h(2-|s|) / (h(2-|s|) + h(|s|-1)),  h(t) = exp(-1/t) for t>0.
Consequently supp Psi_z = (lam_z/1.01, 2 lam_z), inside the coarser bound
(lam_z/2.02, 2 lam_z) used for disjointness bookkeeping.

Mode 0 is excluded from every projection (homogeneous convention); the mean
must be tracked separately, which reconstruction helpers do.
"""

from __future__ import annotations

import threading
import warnings
from dataclasses import dataclass
from typing import Iterable, List, Tuple

import numpy as np

from .grid import Field, GridSpec, apply_multiplier

BASE = 1.01


class CoverageWarning(UserWarning):
    """Requested band does not intersect the grid's resolvable frequencies."""


# ---------------------------------------------------------------- lambda table

_table_lock = threading.Lock()
_pos_powers = [1.0]  # _pos_powers[k] = 1.01^k by repeated multiplication


def scale_value(z: int) -> float:
    """1.01^z: repeated multiplication upward from 1, one reciprocal for z < 0.

    Every call reads the same table, so lam_{z-1} and lam_z used by a symbol
    are always the identical floats, which is what makes band sums telescope
    exactly.
    """
    z = int(z)
    k = abs(z)
    if k >= len(_pos_powers):
        with _table_lock:
            while len(_pos_powers) <= k:
                _pos_powers.append(_pos_powers[-1] * BASE)
    v = _pos_powers[k]
    return 1.0 / v if z < 0 else v


@dataclass(frozen=True)
class LPScale:
    """One lattice frequency lam = 1.01^exponent."""

    exponent: int
    lam: float

    def __post_init__(self):
        if self.lam != scale_value(self.exponent):
            raise ValueError("lam must equal the shared table value for exponent")


def scale(z: int) -> LPScale:
    return LPScale(int(z), scale_value(z))


# ---------------------------------------------------------------- bump profile


def bump(s):
    """Smooth even cutoff: 1 on |s|<=1, 0 on |s|>=2, strictly between otherwise."""
    arr = np.abs(np.asarray(s, dtype=np.float64))
    scalar = arr.ndim == 0
    if scalar:
        arr = arr[None]
    out = np.ones_like(arr)
    out[arr >= 2.0] = 0.0
    mid = (arr > 1.0) & (arr < 2.0)
    if mid.any():
        sm = arr[mid]
        up = np.exp(-1.0 / (2.0 - sm))
        dn = np.exp(-1.0 / (sm - 1.0))
        out[mid] = up / (up + dn)
    return float(out[0]) if scalar else out


def psi_symbol(sc: LPScale, xi):
    """Band symbol Psi_lam(xi); nonnegative, supported in (lam/1.01, 2 lam)."""
    lam_hi = scale_value(sc.exponent)
    lam_lo = scale_value(sc.exponent - 1)
    a = np.abs(np.asarray(xi, dtype=np.float64))
    return bump(a / lam_hi) - bump(a / lam_lo)


def leq_symbol(sc: LPScale, xi):
    """Symbol of the cumulative cutoff P_{<=lam}: equals sum of Psi over z' <= z
    away from xi = 0; forced to 0 at xi = 0 (homogeneous convention)."""
    a = np.abs(np.asarray(xi, dtype=np.float64))
    out = np.asarray(bump(a / scale_value(sc.exponent)))
    return np.where(a == 0.0, 0.0, out)


# ------------------------------------------------------------- cached symbols

_symbol_lock = threading.Lock()
_symbol_cache: dict = {}
_SYMBOL_CACHE_MAX = 1024
_SYMBOL_CACHE_N_LIMIT = 8192  # larger grids are transient, do not retain


def _compute_symbol(grid: GridSpec, z: int, kind: str) -> np.ndarray:
    axi = np.abs(grid.frequencies)
    if kind == "psi":
        arr = bump(axi / scale_value(z)) - bump(axi / scale_value(z - 1))
    elif kind == "leq":
        arr = np.asarray(bump(axi / scale_value(z)))
        arr[0] = 0.0
    else:
        raise ValueError(kind)
    arr[grid.nyquist_index] = 0.0
    arr.flags.writeable = False
    return arr


def symbol_array(grid: GridSpec, z: int, kind: str = "psi") -> np.ndarray:
    if grid.num_points > _SYMBOL_CACHE_N_LIMIT:
        return _compute_symbol(grid, z, kind)
    key = (grid, int(z), kind)
    with _symbol_lock:
        hit = _symbol_cache.get(key)
    if hit is not None:
        return hit
    arr = _compute_symbol(grid, z, kind)
    with _symbol_lock:
        if len(_symbol_cache) >= _SYMBOL_CACHE_MAX:
            _symbol_cache.clear()
        _symbol_cache[key] = arr
    return arr


# ----------------------------------------------------------------- projections


def _band_is_resolvable(grid: GridSpec, sc: LPScale) -> bool:
    return (2.0 * sc.lam > grid.delta_xi) and (sc.lam / BASE < grid.resolvable_max)


def project(f: Field, sc: LPScale) -> Field:
    """P_lam f: multiply coefficients by Psi_lam. Out-of-band scales produce a
    zero field and a CoverageWarning."""
    if not _band_is_resolvable(f.grid, sc):
        warnings.warn(
            f"band z={sc.exponent} (lam={sc.lam:.4g}) lies outside the resolvable "
            f"range [{f.grid.delta_xi:.4g}, {f.grid.resolvable_max:.4g}]",
            CoverageWarning,
            stacklevel=2,
        )
        return Field.zero(f.grid)
    return apply_multiplier(f, symbol_array(f.grid, sc.exponent, "psi"), check=False)


def project_leq(f: Field, sc: LPScale) -> Field:
    return apply_multiplier(f, symbol_array(f.grid, sc.exponent, "leq"), check=False)


def project_lt(f: Field, sc: LPScale) -> Field:
    """P_{<lam} = P_{<=lam} - P_lam, computed literally as that difference so
    the identity is bitwise true."""
    if not _band_is_resolvable(f.grid, sc):
        return project_leq(f, sc)
    return project_leq(f, sc) - project(f, sc)


def default_band(grid: GridSpec) -> range:
    """Exponent range covering all nonzero resolvable grid frequencies.

    Bottom: smallest z with lam > delta_xi / 2, so the cumulative cutoff below
    the band vanishes on every grid frequency. Top: smallest z with
    lam >= top resolvable frequency, rounding OUTWARD so the partition still
    sums to 1 at the topmost frequencies (the top lambda may exceed pi N / L
    by under one percent).
    """
    lo_target = grid.delta_xi / 2.0
    z = int(np.floor(np.log(lo_target) / np.log(BASE)))
    while scale_value(z) <= lo_target:
        z += 1
    while z > -10_000_000 and scale_value(z - 1) > lo_target:
        z -= 1
    z_min = z
    hi_target = grid.resolvable_max
    z = int(np.ceil(np.log(hi_target) / np.log(BASE)))
    while scale_value(z) < hi_target:
        z += 1
    while z > z_min and scale_value(z - 1) >= hi_target:
        z -= 1
    z_max = z
    return range(z_min, z_max + 1)


def partition_sum(grid: GridSpec, band: Iterable[int]) -> np.ndarray:
    """sum_z Psi_z evaluated on the grid frequencies (telescopes exactly)."""
    total = np.zeros(grid.num_points)
    for z in band:
        total = total + symbol_array(grid, z, "psi")
    return total


def decompose(f: Field, band: Iterable[int]) -> List[Tuple[LPScale, Field]]:
    """Ordered (scale, P_lam f) list over the band; linear in f."""
    return [(scale(z), project(f, scale(z))) for z in band]


def reconstruct(pieces: List[Tuple[LPScale, Field]], mean_field: Field) -> Field:
    out = mean_field
    for _, piece in pieces:
        out = out + piece
    return out


def mean_mode(f: Field) -> Field:
    c = np.zeros(f.grid.num_points, dtype=np.complex128)
    c[0] = f.coefficients[0]
    return Field.from_coefficients(f.grid, c, check=False)


def coverage_rows(f: Field, band: Iterable[int]) -> List[Tuple[int, float, float]]:
    """(z, lam, fraction of ||f||^2 captured by band z) rows for reporting."""
    c2 = (f.coefficients * np.conj(f.coefficients)).real
    total = float(f.grid.domain_length * c2.sum())
    rows = []
    for z in band:
        psi = symbol_array(f.grid, z, "psi")
        cap = float(f.grid.domain_length * np.sum(psi * psi * c2))
        rows.append((z, scale_value(z), cap / total if total > 0 else 0.0))
    return rows


def coverage_csv(f: Field, band: Iterable[int]) -> str:
    lines = ["z,lam,fraction"]
    for z, lam, frac in coverage_rows(f, band):
        lines.append(f"{z},{lam!r},{frac!r}")
    return "\n".join(lines) + "\n"
