"""Tests for the dual-path numerical kernels.

The numba and numpy paths consume identical random streams and visit
variables in the same order, so agreement is checked exactly on fixed
seeds.  An un-jitted scalar reference arbitrates where the two
vectorization strategies could both be wrong the same way.
"""

import numpy as np
import pytest

from treecut import kernels as K
from treecut.errors import ParameterError, SizeLimitError
from treecut.qubo import Qubo, qubo_energy, to_ising

pytestmark = pytest.mark.skipif(not K.HAVE_NUMBA, reason="numba not installed")


def random_qubo(rng, n, density=0.6):
    linear = {i: float(rng.normal()) for i in range(n)}
    quadratic = {
        (i, j): float(rng.normal())
        for i in range(n)
        for j in range(i + 1, n)
        if rng.random() < density
    }
    return Qubo(n, tuple(f"vertex:{i}" for i in range(n)), linear, quadratic, float(rng.normal()))


def all_assignments(n):
    codes = np.arange(2**n, dtype=np.int64)
    return ((codes[:, None] >> np.arange(n - 1, -1, -1)) & 1).astype(np.int8)


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------


def test_env_flag_disables_numba(monkeypatch):
    monkeypatch.delenv("TREECUT_DISABLE_NUMBA", raising=False)
    assert K.default_use_numba()
    monkeypatch.setenv("TREECUT_DISABLE_NUMBA", "1")
    assert not K.default_use_numba()
    assert K.resolve_use_numba(None) is False
    assert K.resolve_use_numba(True) is True


# ---------------------------------------------------------------------------
# schedules
# ---------------------------------------------------------------------------


def test_beta_schedule_formulas():
    g = K.beta_schedule("geometric", 0.1, 10.0, 5)
    t = np.arange(5)
    np.testing.assert_allclose(g, 0.1 * (10.0 / 0.1) ** (t / 4), rtol=1e-12)
    lin = K.beta_schedule("linear", 0.1, 10.0, 5)
    np.testing.assert_allclose(lin, 0.1 + t * (10.0 - 0.1) / 4, rtol=1e-12)
    assert K.beta_schedule("geometric", 0.1, 10.0, 1).tolist() == [0.1]


def test_beta_schedule_rejects_bad_params():
    with pytest.raises(ParameterError):
        K.beta_schedule("geometric", 1.0, 0.5, 10)
    with pytest.raises(ParameterError):
        K.beta_schedule("geometric", 0.1, 10.0, 0)
    with pytest.raises(ParameterError):
        K.beta_schedule("exponential", 0.1, 10.0, 10)


# ---------------------------------------------------------------------------
# simulated annealing kernel
# ---------------------------------------------------------------------------


def test_sa_paths_agree_exactly():
    rng = np.random.default_rng(11)
    for n in (1, 2, 7, 15, 31):
        q = random_qubo(rng, n)
        arr = K.qubo_arrays(q)
        betas = K.beta_schedule("geometric", 0.1, 10.0, 40)
        draws = rng.random((25, 41, n))
        a = K.sa_sample_bits(arr, betas, draws, use_numba=True)
        b = K.sa_sample_bits(arr, betas, draws, use_numba=False)
        ref = np.empty_like(a)
        K._sa_bits_scalar(arr.u, arr.indptr, arr.indices, arr.weights, betas, draws, ref)
        assert np.array_equal(a, ref)
        assert np.array_equal(b, ref)


def test_sa_shot_blocks_are_independent():
    # running the first k shot blocks alone reproduces the prefix of a
    # bigger run — the basis of the monotone-shots property
    rng = np.random.default_rng(5)
    q = random_qubo(rng, 9)
    arr = K.qubo_arrays(q)
    betas = K.beta_schedule("linear", 0.5, 8.0, 30)
    draws = rng.random((20, 31, 9))
    full = K.sa_sample_bits(arr, betas, draws, use_numba=True)
    head = K.sa_sample_bits(arr, betas, draws[:7], use_numba=True)
    assert np.array_equal(full[:7], head)


def test_sa_finds_single_variable_minimum():
    q = Qubo(1, ("vertex:0",), {0: -1.0}, {}, 0.0)
    arr = K.qubo_arrays(q)
    betas = K.beta_schedule("geometric", 0.1, 10.0, 20)
    draws = np.random.default_rng(0).random((50, 21, 1))
    out = K.sa_sample_bits(arr, betas, draws, use_numba=True)
    assert (out == 1).all()


def test_sa_shape_validation():
    q = random_qubo(np.random.default_rng(1), 4)
    arr = K.qubo_arrays(q)
    betas = K.beta_schedule("geometric", 0.1, 10.0, 10)
    with pytest.raises(ParameterError):
        K.sa_sample_bits(arr, betas, np.zeros((3, 10, 4)))


# ---------------------------------------------------------------------------
# exhaustive minimization
# ---------------------------------------------------------------------------


def test_brute_paths_agree_with_dense_enumeration():
    rng = np.random.default_rng(21)
    for _ in range(30):
        n = int(rng.integers(1, 13))
        q = random_qubo(rng, n)
        arr = K.qubo_arrays(q)
        X = all_assignments(n)
        E = K.batch_qubo_energies(arr, X)
        k = int(np.argmin(E))
        xa, ea = K.brute_force_min(arr, use_numba=True)
        xb, eb = K.brute_force_min(arr, use_numba=False)
        assert np.array_equal(xa, X[k]) and np.array_equal(xb, X[k])
        assert ea == pytest.approx(E[k], abs=1e-9) and eb == ea


def test_brute_lexicographic_ties():
    # x0 x1 alone cost nothing; only the pair costs: states 00, 01, 10 tie
    q = Qubo(2, ("vertex:0", "vertex:1"), {}, {(0, 1): 1.0}, 0.0)
    arr = K.qubo_arrays(q)
    for flag in (True, False):
        x, e = K.brute_force_min(arr, use_numba=flag)
        assert x.tolist() == [0, 0] and e == 0.0


def test_brute_empty_and_oversized():
    empty = K.qubo_arrays(Qubo(0, (), {}, {}, 2.5))
    x, e = K.brute_force_min(empty)
    assert x.size == 0 and e == 2.5
    big = Qubo(26, tuple(f"vertex:{i}" for i in range(26)), {}, {}, 0.0)
    with pytest.raises(SizeLimitError):
        K.brute_force_min(K.qubo_arrays(big))


def test_brute_crosses_chunk_boundaries():
    # n > 16 exercises the numpy path's chunked enumeration
    rng = np.random.default_rng(3)
    q = random_qubo(rng, 18, density=0.2)
    arr = K.qubo_arrays(q)
    xa, ea = K.brute_force_min(arr, use_numba=True)
    xb, eb = K.brute_force_min(arr, use_numba=False)
    assert np.array_equal(xa, xb) and ea == eb


# ---------------------------------------------------------------------------
# energies and conversions
# ---------------------------------------------------------------------------


def test_batch_energies_match_scalar_evaluator():
    rng = np.random.default_rng(9)
    q = random_qubo(rng, 10)
    arr = K.qubo_arrays(q)
    X = (rng.random((64, 10)) < 0.5).astype(np.int8)
    E = K.batch_qubo_energies(arr, X)
    for k in range(64):
        assert E[k] == pytest.approx(qubo_energy(q, X[k]), abs=1e-9)


def test_ising_bit_arrays_energy_identity():
    rng = np.random.default_rng(13)
    for _ in range(20):
        n = int(rng.integers(1, 9))
        q = random_qubo(rng, n)
        m = to_ising(q)
        arr = K.ising_bit_arrays(m)
        X = all_assignments(n)
        S = (2 * X - 1).astype(np.int8)
        np.testing.assert_allclose(
            K.batch_qubo_energies(arr, X),
            K.batch_ising_energies(m, S),
            atol=1e-9,
        )


# ---------------------------------------------------------------------------
# node-weighted Dijkstra
# ---------------------------------------------------------------------------


def _random_graph(rng, n, m):
    edges = set()
    while len(edges) < m:
        u, v = (int(x) for x in rng.integers(0, n, 2))
        if u != v:
            edges.add((min(u, v), max(u, v)))
    counts = np.zeros(n + 1, np.int64)
    for u, v in edges:
        counts[u + 1] += 1
        counts[v + 1] += 1
    indptr = np.cumsum(counts)
    indices = np.zeros(indptr[-1], np.int64)
    cur = indptr[:-1].copy()
    for u, v in sorted(edges):
        indices[cur[u]] = v
        cur[u] += 1
        indices[cur[v]] = u
        cur[v] += 1
    return indptr, indices, sorted(edges)


def _bellman_ford_oracle(n, edges, nodew, sources):
    dist = np.full(n, np.inf)
    dist[list(sources)] = 0.0
    for _ in range(n):
        changed = False
        for u, v in edges:
            for a, b in ((u, v), (v, u)):
                nd = dist[a] + nodew[b]
                if nd < dist[b]:
                    dist[b] = nd
                    changed = True
        if not changed:
            break
    return dist


def test_dijkstra_against_bellman_ford():
    rng = np.random.default_rng(31)
    for trial in range(10):
        n = int(rng.integers(10, 80))
        indptr, indices, edges = _random_graph(rng, n, 2 * n)
        nodew = rng.random(n) * 4 + 0.25
        sources = rng.choice(n, size=int(rng.integers(1, 4)), replace=False)
        expected = _bellman_ford_oracle(n, edges, nodew, sources)
        for flag in (True, False):
            dist, parent = K.dijkstra_node_weighted(
                indptr, indices, nodew, sources, use_numba=flag
            )
            np.testing.assert_allclose(dist, expected, atol=1e-12)
            for b in range(n):
                if parent[b] >= 0:
                    assert dist[b] == pytest.approx(dist[parent[b]] + nodew[b])


def test_dijkstra_paths_agree():
    rng = np.random.default_rng(77)
    indptr, indices, _ = _random_graph(rng, 120, 300)
    nodew = np.ones(120)
    nodew[rng.choice(120, 10, replace=False)] = np.inf  # blocked qubits
    src = np.array([3, 40, 41])
    d1, p1 = K.dijkstra_node_weighted(indptr, indices, nodew, src, use_numba=True)
    d2, p2 = K.dijkstra_node_weighted(indptr, indices, nodew, src, use_numba=False)
    assert np.array_equal(d1, d2)
    assert np.array_equal(p1, p2)


def test_dijkstra_requires_sources():
    with pytest.raises(ParameterError):
        K.dijkstra_node_weighted(
            np.array([0, 0]), np.array([], dtype=np.int64), np.ones(1), np.array([], dtype=np.int64)
        )
