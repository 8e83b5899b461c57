"""Numerical kernels with two interchangeable execution paths.

Every hot loop in the package (simulated annealing, exhaustive QUBO
minimization, node-weighted Dijkstra for the embedding router) exists
twice: a scalar version compiled with numba, and a vectorized pure-numpy
version.  The active path is chosen per call: an explicit ``use_numba``
argument wins, otherwise numba is used when importable unless the
``TREECUT_DISABLE_NUMBA`` environment variable is set (to anything
non-empty).

Both paths consume identical pre-generated random streams and visit
variables in identical order, so for a fixed seed they produce the same
samples.  (The only theoretical divergence is a 1-ulp difference between
scalar and vectorized ``exp``, which would require an acceptance draw
within ~1e-16 of the threshold to matter.)

Random layout for SA: for each shot a contiguous block of
``(sweeps + 1) * n`` uniforms — row 0 initializes the state
(``x_i = draw < 0.5``), row ``1 + t`` drives the acceptance tests of
sweep ``t``.  Shot blocks are consumed in shot order, which makes the
best-found energy a prefix property of the stream: growing the shot
count can only improve it.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from heapq import heappop, heappush

import numpy as np

from .errors import ParameterError, SizeLimitError
from .qubo import IsingModel, Qubo

__all__ = [
    "HAVE_NUMBA",
    "default_use_numba",
    "resolve_use_numba",
    "QuboArrays",
    "qubo_arrays",
    "ising_bit_arrays",
    "batch_qubo_energies",
    "batch_ising_energies",
    "beta_schedule",
    "sa_sample_bits",
    "brute_force_min",
    "dijkstra_node_weighted",
]

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):  # type: ignore[misc]
        raise RuntimeError("numba is not available")


def default_use_numba() -> bool:
    """True when numba is importable and TREECUT_DISABLE_NUMBA is unset/empty."""
    return HAVE_NUMBA and not os.environ.get("TREECUT_DISABLE_NUMBA")


def resolve_use_numba(use_numba: bool | None) -> bool:
    if use_numba is None:
        return default_use_numba()
    if use_numba and not HAVE_NUMBA:
        raise ParameterError("numba path requested but numba is not importable")
    return bool(use_numba)


# ---------------------------------------------------------------------------
# array forms of the sparse models
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuboArrays:
    """Array view of a QUBO: CSR symmetric neighbors + upper-triangle terms."""

    n: int
    offset: float
    u: np.ndarray  # (n,) linear coefficients
    indptr: np.ndarray  # (n+1,) CSR row pointers
    indices: np.ndarray  # neighbor column ids
    weights: np.ndarray  # neighbor coupling values
    qi: np.ndarray  # upper-triangle term rows
    qj: np.ndarray  # upper-triangle term cols
    qw: np.ndarray  # upper-triangle term values


def qubo_arrays(q: Qubo) -> QuboArrays:
    n = q.num_vars
    u = np.zeros(n, dtype=np.float64)
    for i, c in q.linear.items():
        u[i] = c
    items = sorted(q.quadratic.items())
    qi = np.array([k[0] for k, _ in items], dtype=np.int64)
    qj = np.array([k[1] for k, _ in items], dtype=np.int64)
    qw = np.array([v for _, v in items], dtype=np.float64)
    counts = np.zeros(n + 1, dtype=np.int64)
    for i, j in zip(qi, qj):
        counts[i + 1] += 1
        counts[j + 1] += 1
    indptr = np.cumsum(counts)
    indices = np.zeros(indptr[-1], dtype=np.int64)
    weights = np.zeros(indptr[-1], dtype=np.float64)
    cursor = indptr[:-1].copy()
    # fill in sorted (i, j) order so each row's neighbor list is ordered by
    # the opposite endpoint's term order — identical on both exec paths
    for i, j, w in zip(qi, qj, qw):
        indices[cursor[i]] = j
        weights[cursor[i]] = w
        cursor[i] += 1
        indices[cursor[j]] = i
        weights[cursor[j]] = w
        cursor[j] += 1
    return QuboArrays(
        n=n, offset=q.offset, u=u,
        indptr=indptr, indices=indices, weights=weights,
        qi=qi, qj=qj, qw=qw,
    )


def ising_bit_arrays(m: IsingModel) -> QuboArrays:
    """Exact affine map of an Ising model onto 0/1 variables (s = 2x − 1)."""
    linear: dict[int, float] = {}
    quadratic: dict[tuple[int, int], float] = {}
    offset = m.offset
    for i, h in m.h.items():
        linear[i] = linear.get(i, 0.0) + 2.0 * h
        offset -= h
    for (i, j), J in m.J.items():
        quadratic[(i, j)] = quadratic.get((i, j), 0.0) + 4.0 * J
        linear[i] = linear.get(i, 0.0) - 2.0 * J
        linear[j] = linear.get(j, 0.0) - 2.0 * J
        offset += J
    q = Qubo(
        num_vars=m.num_spins,
        var_labels=tuple(f"spin:{i}" for i in range(m.num_spins)),
        linear={i: v for i, v in sorted(linear.items()) if v != 0.0},
        quadratic={k: v for k, v in sorted(quadratic.items()) if v != 0.0},
        offset=offset,
    )
    return qubo_arrays(q)


def batch_qubo_energies(arr: QuboArrays, X: np.ndarray) -> np.ndarray:
    """Recompute energies for a batch of 0/1 rows (the reporting path)."""
    Xf = X.astype(np.float64, copy=False)
    e = arr.offset + Xf @ arr.u
    if arr.qw.size:
        e = e + (Xf[:, arr.qi] * Xf[:, arr.qj]) @ arr.qw
    return e


def batch_ising_energies(m: IsingModel, S: np.ndarray) -> np.ndarray:
    """Energies of spin rows, computed directly from the spin model."""
    Sf = S.astype(np.float64, copy=False)
    h = np.zeros(m.num_spins)
    for i, v in m.h.items():
        h[i] = v
    e = m.offset + Sf @ h
    if m.J:
        items = sorted(m.J.items())
        ji = np.array([k[0] for k, _ in items])
        jj = np.array([k[1] for k, _ in items])
        jw = np.array([v for _, v in items])
        e = e + (Sf[:, ji] * Sf[:, jj]) @ jw
    return e


def beta_schedule(kind: str, beta_min: float, beta_max: float, sweeps: int) -> np.ndarray:
    """Inverse-temperature ladder; one value per sweep.

    geometric: beta_t = beta_min·(beta_max/beta_min)^(t/(sweeps−1));
    linear: beta_t = beta_min + t·(beta_max−beta_min)/(sweeps−1).
    A single sweep uses beta_min.
    """
    if not (0 < beta_min < beta_max):
        raise ParameterError("need 0 < beta_min < beta_max")
    if sweeps < 1:
        raise ParameterError("sweeps must be ≥ 1")
    if kind == "geometric":
        return np.geomspace(beta_min, beta_max, sweeps)
    if kind == "linear":
        return np.linspace(beta_min, beta_max, sweeps)
    raise ParameterError(f"unknown schedule kind {kind!r}")


# ---------------------------------------------------------------------------
# simulated annealing
# ---------------------------------------------------------------------------


def _sa_bits_scalar(u, indptr, indices, weights, betas, randoms, out):
    shots = randoms.shape[0]
    sweeps = betas.shape[0]
    n = u.shape[0]
    x = np.zeros(n, dtype=np.int8)
    f = np.zeros(n, dtype=np.float64)
    for r in range(shots):
        for i in range(n):
            x[i] = 1 if randoms[r, 0, i] < 0.5 else 0
        for i in range(n):
            f[i] = u[i]
        for j in range(n):
            if x[j] == 1:
                for p in range(indptr[j], indptr[j + 1]):
                    f[indices[p]] += weights[p]
        for t in range(sweeps):
            beta = betas[t]
            for i in range(n):
                delta = f[i] if x[i] == 0 else -f[i]
                if delta <= 0.0 or randoms[r, 1 + t, i] < math.exp(-beta * delta):
                    x[i] = 1 - x[i]
                    sgn = 1.0 if x[i] == 1 else -1.0
                    for p in range(indptr[i], indptr[i + 1]):
                        f[indices[p]] += sgn * weights[p]
        for i in range(n):
            out[r, i] = x[i]
    return out


_sa_bits_numba = njit(cache=True, nogil=True)(_sa_bits_scalar) if HAVE_NUMBA else None


def _sa_bits_numpy(u, indptr, indices, weights, betas, randoms, out):
    shots = randoms.shape[0]
    sweeps = betas.shape[0]
    n = u.shape[0]
    X = (randoms[:, 0, :] < 0.5).astype(np.int8)
    F = np.repeat(u[None, :], shots, axis=0)
    # same accumulation order as the scalar path: columns j ascending
    for j in range(n):
        on = X[:, j] == 1
        if on.any() and indptr[j] != indptr[j + 1]:
            cols = indices[indptr[j]: indptr[j + 1]]
            F[np.ix_(on, cols)] += weights[indptr[j]: indptr[j + 1]]
    rows = np.arange(shots)
    for t in range(sweeps):
        beta = betas[t]
        for i in range(n):
            fi = F[:, i]
            delta = np.where(X[:, i] == 0, fi, -fi)
            accept = randoms[:, 1 + t, i] < np.exp(np.minimum(-beta * delta, 0.0))
            if not accept.any():
                continue
            X[accept, i] ^= 1
            lo, hi = indptr[i], indptr[i + 1]
            if lo != hi:
                sgn = np.where(X[accept, i] == 1, 1.0, -1.0)
                cols = indices[lo:hi]
                F[np.ix_(rows[accept], cols)] += sgn[:, None] * weights[lo:hi]
    out[:] = X
    return out


def sa_sample_bits(
    arr: QuboArrays,
    betas: np.ndarray,
    randoms: np.ndarray,
    use_numba: bool | None = None,
) -> np.ndarray:
    """Run Metropolis sweeps for every shot block in ``randoms``.

    ``randoms`` has shape (shots, sweeps + 1, n); the return value holds
    the final 0/1 state of each shot, shape (shots, n), dtype int8.
    """
    if randoms.ndim != 3 or randoms.shape[1] != betas.shape[0] + 1 or randoms.shape[2] != arr.n:
        raise ParameterError("randoms must have shape (shots, sweeps + 1, n)")
    out = np.empty((randoms.shape[0], arr.n), dtype=np.int8)
    if resolve_use_numba(use_numba):
        return _sa_bits_numba(
            arr.u, arr.indptr, arr.indices, arr.weights, betas, randoms, out
        )
    return _sa_bits_numpy(
        arr.u, arr.indptr, arr.indices, arr.weights, betas, randoms, out
    )


# ---------------------------------------------------------------------------
# exhaustive minimization
# ---------------------------------------------------------------------------

BRUTE_FORCE_LIMIT = 25


def _brute_gray_scalar(u, indptr, indices, weights, n):
    # Gray-code walk: state c and c+1 differ in bit ctz(c+1); energies are
    # maintained incrementally, the winner's energy is recomputed by the
    # caller.  Ties prefer the lexicographically smallest assignment.
    x = np.zeros(n, dtype=np.int8)
    best = np.zeros(n, dtype=np.int8)
    f = u.copy()
    e = 0.0
    best_e = 0.0
    total = np.int64(1) << n
    for c in range(1, total):
        b = 0
        while (c >> b) & 1 == 0:
            b += 1
        delta = f[b] if x[b] == 0 else -f[b]
        e += delta
        x[b] = 1 - x[b]
        sgn = 1.0 if x[b] == 1 else -1.0
        for p in range(indptr[b], indptr[b + 1]):
            f[indices[p]] += sgn * weights[p]
        if e < best_e:
            best_e = e
            for i in range(n):
                best[i] = x[i]
        elif e == best_e:
            for i in range(n):
                if x[i] != best[i]:
                    if x[i] < best[i]:
                        for k in range(n):
                            best[k] = x[k]
                    break
    return best


_brute_gray_numba = njit(cache=True, nogil=True)(_brute_gray_scalar) if HAVE_NUMBA else None

_BRUTE_CHUNK_BITS = 16


def _brute_numpy(arr: QuboArrays) -> np.ndarray:
    n = arr.n
    W = np.zeros((n, n))
    W[arr.qi, arr.qj] = arr.qw
    total = 1 << n
    chunk = 1 << min(n, _BRUTE_CHUNK_BITS)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    best_e = np.inf
    best_x = np.zeros(n, dtype=np.int8)
    for start in range(0, total, chunk):
        codes = np.arange(start, min(start + chunk, total), dtype=np.int64)
        # x_0 is the most significant bit, so ascending codes enumerate
        # assignments in lexicographic order and the first argmin is the
        # lex-smallest tie.
        X = ((codes[:, None] >> shifts) & 1).astype(np.float64)
        E = X @ arr.u + ((X @ W) * X).sum(axis=1)
        k = int(np.argmin(E))
        if E[k] < best_e:
            best_e = E[k]
            best_x = X[k].astype(np.int8)
    return best_x


def brute_force_min(arr: QuboArrays, use_numba: bool | None = None) -> tuple[np.ndarray, float]:
    """Global minimum over all 2^n assignments (n ≤ 25), lex tie-break."""
    if arr.n > BRUTE_FORCE_LIMIT:
        raise SizeLimitError(
            f"{arr.n} variables exceeds brute-force limit {BRUTE_FORCE_LIMIT}"
        )
    if arr.n == 0:
        return np.zeros(0, dtype=np.int8), float(arr.offset)
    if resolve_use_numba(use_numba):
        best = _brute_gray_numba(arr.u, arr.indptr, arr.indices, arr.weights, arr.n)
    else:
        best = _brute_numpy(arr)
    energy = float(batch_qubo_energies(arr, best[None, :])[0])
    return best, energy


# ---------------------------------------------------------------------------
# node-weighted multi-source Dijkstra (embedding router)
# ---------------------------------------------------------------------------


def _dijkstra_scalar(indptr, indices, nodew, sources):
    n = indptr.shape[0] - 1
    dist = np.full(n, np.inf)
    parent = np.full(n, -1, dtype=np.int64)
    # binary heap with (dist, node) ordering, lazy deletion
    cap = 4 * (indptr[n] + n + 1)
    hkey = np.empty(cap, dtype=np.float64)
    hnode = np.empty(cap, dtype=np.int64)
    size = 0
    for s in sources:
        dist[s] = 0.0
        hkey[size] = 0.0
        hnode[size] = s
        size += 1
        k = size - 1
        while k > 0:
            par = (k - 1) // 2
            if hkey[k] < hkey[par] or (hkey[k] == hkey[par] and hnode[k] < hnode[par]):
                hkey[k], hkey[par] = hkey[par], hkey[k]
                hnode[k], hnode[par] = hnode[par], hnode[k]
                k = par
            else:
                break
    while size > 0:
        key = hkey[0]
        node = hnode[0]
        size -= 1
        hkey[0] = hkey[size]
        hnode[0] = hnode[size]
        k = 0
        while True:
            left = 2 * k + 1
            right = left + 1
            small = k
            if left < size and (
                hkey[left] < hkey[small]
                or (hkey[left] == hkey[small] and hnode[left] < hnode[small])
            ):
                small = left
            if right < size and (
                hkey[right] < hkey[small]
                or (hkey[right] == hkey[small] and hnode[right] < hnode[small])
            ):
                small = right
            if small == k:
                break
            hkey[k], hkey[small] = hkey[small], hkey[k]
            hnode[k], hnode[small] = hnode[small], hnode[k]
            k = small
        if key > dist[node]:
            continue
        for p in range(indptr[node], indptr[node + 1]):
            b = indices[p]
            nd = dist[node] + nodew[b]
            if nd < dist[b]:
                dist[b] = nd
                parent[b] = node
                hkey[size] = nd
                hnode[size] = b
                size += 1
                k = size - 1
                while k > 0:
                    par = (k - 1) // 2
                    if hkey[k] < hkey[par] or (
                        hkey[k] == hkey[par] and hnode[k] < hnode[par]
                    ):
                        hkey[k], hkey[par] = hkey[par], hkey[k]
                        hnode[k], hnode[par] = hnode[par], hnode[k]
                        k = par
                    else:
                        break
    return dist, parent


_dijkstra_numba = njit(cache=True, nogil=True)(_dijkstra_scalar) if HAVE_NUMBA else None


def _dijkstra_python(indptr, indices, nodew, sources):
    n = indptr.shape[0] - 1
    dist = np.full(n, np.inf)
    parent = np.full(n, -1, dtype=np.int64)
    heap: list[tuple[float, int]] = []
    for s in sources:
        dist[s] = 0.0
        heappush(heap, (0.0, int(s)))
    while heap:
        key, node = heappop(heap)
        if key > dist[node]:
            continue
        for p in range(indptr[node], indptr[node + 1]):
            b = int(indices[p])
            nd = dist[node] + nodew[b]
            if nd < dist[b]:
                dist[b] = nd
                parent[b] = node
                heappush(heap, (nd, b))
    return dist, parent


def dijkstra_node_weighted(
    indptr: np.ndarray,
    indices: np.ndarray,
    nodew: np.ndarray,
    sources: np.ndarray,
    use_numba: bool | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Multi-source shortest paths where edge relaxation costs the *head*
    node's weight; sources start at distance 0.  Returns (dist, parent).
    """
    sources = np.asarray(sources, dtype=np.int64)
    if sources.size == 0:
        raise ParameterError("dijkstra needs at least one source")
    if resolve_use_numba(use_numba):
        return _dijkstra_numba(indptr, indices, nodew, sources)
    return _dijkstra_python(indptr, indices, nodew, sources)
