"""Discrete p-variation norms, the flow-adapted V2 norm, and the pairing form.

The continuum supremum over all partitions is replaced by the supremum over
the sample times, which is exact for the piecewise-constant interpolant and
is the declared semantics of every variation quantity here. A partition is
any strictly increasing subset of sample indices; the convention v(inf) = 0
is one extra jump of size ||v(t_last)|| appended after the final time, and
can be toggled off for experiments.

The dynamic program below is bitwise-equal to exhaustive enumeration of all
partitions: IEEE round-to-nearest addition is monotone, so maximizing before
adding the next increment never changes the attained floating-point maximum.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .airy import phase_matrix
from .grid import Path


@dataclass(frozen=True)
class SampledPath:
    """Finitely sampled path with values in a weighted inner-product space.

    vectors: (num_times, dim) real or complex rows; the inner product is
    weight * Re sum(a * conj(b)), matching the spatial L2 pairing when rows
    are spectral coefficient vectors (weight = L) or sample vectors
    (weight = L/N).
    """

    times: np.ndarray
    vectors: np.ndarray
    weight: float = 1.0
    terminal: bool = True

    def __post_init__(self):
        t = np.asarray(self.times, dtype=np.float64)
        v = np.asarray(self.vectors)
        if t.ndim != 1 or v.ndim != 2 or v.shape[0] != t.size:
            raise ValueError("need times (m,) and vectors (m, dim)")
        if t.size >= 2 and not np.all(np.diff(t) > 0):
            raise ValueError("times must be strictly increasing")
        if not (self.weight > 0):
            raise ValueError("weight must be positive")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "vectors", v)

    def __len__(self):
        return self.times.size


def pullback_sampled(path: Path, terminal: bool = True) -> SampledPath:
    """Undo the free flow snapshotwise: rows are S(-t_k) u(t_k) in spectral form."""
    pulled = path.spectral_matrix * phase_matrix(path.grid, -1)
    return SampledPath(path.grid.times, pulled,
                       weight=path.grid.domain_length, terminal=terminal)


def sampled_from_path(path: Path, terminal: bool = True) -> SampledPath:
    return SampledPath(path.grid.times, path.spectral_matrix,
                       weight=path.grid.domain_length, terminal=terminal)


def increment_tables(sp: SampledPath):
    """(D, nrm): pairwise increment sizes and vector norms via one Gram matrix.

    Distances come from d_j + d_k - 2 G_jk, which cancels catastrophically
    for nearly equal vectors: increments below sqrt(eps) * ||v|| are noise.
    Norm values themselves are exact to rounding.
    """
    V = sp.vectors
    G = sp.weight * np.real(V @ np.conj(V).T)
    d = np.diag(G)
    D2 = d[:, None] + d[None, :] - 2.0 * G
    np.maximum(D2, 0.0, out=D2)
    return np.sqrt(D2), np.sqrt(np.maximum(d, 0.0))


def vp_norm(sp: SampledPath, p: float) -> float:
    """Supremum over all sample-time partitions of the l^p increment sum,
    plus the terminal jump when the v(inf)=0 convention is on.

    Dynamic program: M[k] = max over j < k of M[j] + d(j,k)^p.
    """
    p = float(p)
    if p < 1:
        raise ValueError("p must be >= 1")
    m = len(sp)
    if m == 0:
        return 0.0
    D, nrm = increment_tables(sp)
    Dp = D ** p
    M = np.zeros(m)
    for k in range(1, m):
        M[k] = np.max(M[:k] + Dp[:k, k])
    if sp.terminal:
        best = float(np.max(M + nrm ** p))
    else:
        best = float(np.max(M))
    return best ** (1.0 / p)


def v2_kdv_norm(path: Path, terminal: bool = True) -> float:
    """V^2 norm of the flow-undone path (pull back by S(-t), then vp_norm).

    Free solutions pull back to constants, so their value is exactly the
    terminal jump ||phi||."""
    return vp_norm(pullback_sampled(path, terminal=terminal), 2.0)


def _inner(sp: SampledPath, a: np.ndarray, b: np.ndarray) -> float:
    return float(sp.weight * np.real(np.vdot(b, a)))


def bilinear_form(u: SampledPath, v: SampledPath,
                  indices: Sequence[int], include_terminal: bool = False) -> float:
    """sum_k <u(t_{k-1}), v(t_k) - v(t_{k-1})> over the given partition.

    With include_terminal the final jump of v to zero contributes
    <u(t_last), -v(t_last)>. The partition must have at least two indices
    (one suffices when the terminal jump supplies the second point).
    """
    if u.times.shape != v.times.shape or not np.array_equal(u.times, v.times):
        raise ValueError("paths must share sample times")
    idx = list(int(i) for i in indices)
    if any(b <= a for a, b in zip(idx, idx[1:])):
        raise ValueError("partition indices must be strictly increasing")
    if idx and (idx[0] < 0 or idx[-1] >= len(u)):
        raise ValueError("partition indices out of range")
    if len(idx) < (1 if include_terminal else 2):
        raise ValueError("partition needs at least two points")
    total = 0.0
    for a, b in zip(idx, idx[1:]):
        total += _inner(u, u.vectors[a], v.vectors[b] - v.vectors[a])
    if include_terminal:
        total += _inner(u, u.vectors[idx[-1]], -v.vectors[idx[-1]])
    return total


def duality_lower_bound(u: Path) -> float:
    """Lower bound for the atomic-space norm of the flow-undone path.

    Pairs the path against a dictionary of unit-V2 step paths
    chi_[t_j, inf) e (V2 norm sqrt(2) for j >= 1, norm 1 for j = 0) with
    directions e drawn from the normalized snapshots and increments. For a
    free solution the j=0 atom with e = phi/||phi|| pairs to exactly ||phi||,
    and no atom exceeds it.
    """
    sp = pullback_sampled(u, terminal=True)
    g = sp.vectors
    m = g.shape[0]
    w = sp.weight
    norms = np.sqrt(np.maximum(w * np.real(np.sum(g * np.conj(g), axis=1)), 0.0))
    dirs = []
    for k in range(m):
        if norms[k] > 0:
            dirs.append(g[k] / norms[k])
    for k in range(1, m):
        inc = g[k] - g[k - 1]
        ninc = np.sqrt(max(w * float(np.real(np.vdot(inc, inc))), 0.0))
        if ninc > 1e-14 * max(norms.max(initial=0.0), 1e-300):
            dirs.append(inc / ninc)
    if not dirs:
        return 0.0
    E = np.stack(dirs)  # (d, dim)
    last = g[-1]
    best = 0.0
    # j = 0 atom: v = e on every sample, single terminal jump, V2 norm 1
    b0 = np.abs(w * np.real(E @ np.conj(last)))
    best = float(b0.max(initial=0.0))
    if m >= 2:
        # j >= 1 atoms: B = <g(t_{j-1}) - g(t_K), e>, V2 norm sqrt(2)
        P = g[:-1] - last[None, :]
        vals = np.abs(w * np.real(P @ np.conj(E.T))) / np.sqrt(2.0)
        best = max(best, float(vals.max(initial=0.0)))
    return best
