"""Tests for topology generation, minor embedding, chaining, and decoding."""

import itertools
import math

import numpy as np
import pytest

from treecut.embedding import (
    ChainStats,
    Embedding,
    HardwareGraph,
    chimera_graph,
    embed_ising,
    embedding_overhead,
    find_embedding,
    load_embedding,
    load_hardware_graph,
    parse_embedding,
    save_embedding,
    save_hardware_graph,
    serialize_embedding,
    unembed,
    uniform_torque_chain_strength,
    validate_embedding,
)
from treecut.errors import EmbeddingError, ParameterError, ParseError
from treecut.qubo import IsingModel, ising_energy
from treecut.solvers import SampleRecord, SampleSet, SaSchedule, simulated_annealing


# ---------------------------------------------------------------------------
# helpers / oracles
# ---------------------------------------------------------------------------


def chimera_by_coordinates(m, n, t):
    """Independent chimera construction via (row, col, side, k) tuples."""
    coords = [
        (row, col, side, k)
        for row in range(m)
        for col in range(n)
        for side in range(2)
        for k in range(t)
    ]
    ids = {c: ((c[0] * n) + c[1]) * 2 * t + c[2] * t + c[3] for c in coords}
    edges = set()
    for a, b in itertools.combinations(coords, 2):
        ra, ca, sa, ka = a
        rb, cb, sb, kb = b
        same_cell = (ra, ca) == (rb, cb)
        if same_cell and sa != sb:
            adjacent = True  # complete bipartite inside a cell
        elif sa == 0 and sb == 0 and ca == cb and abs(ra - rb) == 1 and ka == kb:
            adjacent = True  # vertical qubits couple across rows
        elif sa == 1 and sb == 1 and ra == rb and abs(ca - cb) == 1 and ka == kb:
            adjacent = True  # horizontal qubits couple across columns
        else:
            adjacent = False
        if adjacent:
            u, v = ids[a], ids[b]
            edges.add((min(u, v), max(u, v)))
    return 2 * t * m * n, edges


def adjacency_of(hw):
    adj = {q: set() for q in range(hw.num_qubits)}
    for u, v in hw.edges:
        adj[u].add(v)
        adj[v].add(u)
    return adj


def is_connected(nodes, adj):
    nodes = set(nodes)
    stack = [next(iter(nodes))]
    seen = {stack[0]}
    while stack:
        a = stack.pop()
        for b in adj[a] & nodes:
            if b not in seen:
                seen.add(b)
                stack.append(b)
    return seen == nodes


def has_k6_minor(hw):
    """Exhaustive search for six disjoint, connected, pairwise-touching sets."""
    adj = adjacency_of(hw)
    qubits = list(range(hw.num_qubits))

    def touches(a, b):
        return any(adj[q] & b for q in a)

    def extend(blocks, remaining):
        if len(blocks) == 6:
            return True
        # the next block must anchor on the smallest unused qubit, which
        # kills permutation symmetry between blocks
        anchor = remaining[0]
        rest = remaining[1:]
        for extra in range(0, len(rest) + 1):
            for combo in itertools.combinations(rest, extra):
                block = {anchor, *combo}
                if not is_connected(block, adj):
                    continue
                if not all(touches(block, other) for other in blocks):
                    continue
                left = [q for q in rest if q not in block]
                if len(left) < 5 - len(blocks):
                    continue
                if extend(blocks + [block], left):
                    return True
        # the anchor may also simply be left out of the minor
        if len(rest) >= 6 - len(blocks):
            return extend(blocks, rest)
        return False

    return extend([], qubits)


def random_logical_graph(rng, num_vars, p):
    edges = [
        (u, v)
        for u, v in itertools.combinations(range(num_vars), 2)
        if rng.random() < p
    ]
    return edges


def chain_consistent_state(emb, qubit_order, logical_spins):
    compact = {q: k for k, q in enumerate(qubit_order)}
    s = np.zeros(len(qubit_order), dtype=np.int64)
    for v, chain in emb.chains.items():
        for q in chain:
            s[compact[q]] = logical_spins[v]
    return s


# ---------------------------------------------------------------------------
# chimera generator
# ---------------------------------------------------------------------------


def test_chimera_single_cell_is_complete_bipartite():
    hw = chimera_graph(1, 1, 4)
    assert hw.num_qubits == 8
    assert len(hw.edges) == 16
    assert set(hw.edges) == {(k, 4 + kk) for k in range(4) for kk in range(4)}
    assert hw.topology_tag == "chimera-1-1-4"


def test_chimera_2_2_4_qubit_zero_neighbors():
    hw = chimera_graph(2, 2, 4)
    assert hw.num_qubits == 32
    adj = adjacency_of(hw)
    assert adj[0] == {4, 5, 6, 7, 16}


def test_chimera_matches_coordinate_oracle():
    for m, n, t in [(1, 1, 4), (2, 2, 4), (3, 2, 2), (2, 3, 1), (4, 4, 4)]:
        hw = chimera_graph(m, n, t)
        nq, edges = chimera_by_coordinates(m, n, t)
        assert hw.num_qubits == nq
        assert set(hw.edges) == edges
        assert list(hw.edges) == sorted(edges)


def test_chimera_full_scale_counts():
    hw = chimera_graph(16, 16, 4)
    assert hw.num_qubits == 2048
    # 256 cells x 16 in-cell + 2 * (15*16*4) inter-cell couplers
    assert len(hw.edges) == 256 * 16 + 2 * 15 * 16 * 4


def test_chimera_rejects_bad_parameters():
    for m, n, t in [(0, 1, 1), (1, 0, 1), (1, 1, 0), (-2, 2, 2)]:
        with pytest.raises(ParameterError):
            chimera_graph(m, n, t)


# ---------------------------------------------------------------------------
# hardware graph files
# ---------------------------------------------------------------------------


def test_hardware_file_round_trip(tmp_path):
    hw = chimera_graph(2, 2, 3)
    path = str(tmp_path / "hw.txt")
    save_hardware_graph(hw, path)
    back = load_hardware_graph(path, topology_tag=hw.topology_tag)
    assert back == hw
    lines = open(path).read().splitlines()
    assert lines[0] == str(hw.num_qubits)
    pairs = [tuple(map(int, ln.split())) for ln in lines[1:]]
    assert pairs == sorted(pairs)
    assert all(u < v for u, v in pairs)


def test_hardware_file_duplicate_edges_warn_and_dedupe(tmp_path):
    path = str(tmp_path / "dup.txt")
    with open(path, "w") as fh:
        fh.write("4\n0 1\n1 0\n2 3\n0 1\n")
    with pytest.warns(UserWarning, match="duplicate"):
        hw = load_hardware_graph(path)
    assert hw.edges == ((0, 1), (2, 3))


def test_hardware_file_parse_errors(tmp_path):
    cases = [
        ("", "empty"),
        ("abc\n", "qubit count"),
        ("0\n", "positive"),
        ("4\n0 9\n", "out of range"),
        ("4\n2 2\n", "self loop"),
        ("4\n0 1 2\n", "expected"),
        ("4\n0 x\n", "invalid literal"),
    ]
    for i, (text, fragment) in enumerate(cases):
        path = str(tmp_path / f"bad{i}.txt")
        with open(path, "w") as fh:
            fh.write(text)
        with pytest.raises(ParseError, match=fragment):
            load_hardware_graph(path)


# ---------------------------------------------------------------------------
# find_embedding
# ---------------------------------------------------------------------------


def test_triangle_into_single_cell():
    hw = chimera_graph(1, 1, 4)
    edges = [(0, 1), (1, 2), (0, 2)]
    emb = find_embedding(edges, hw, seed=7)
    assert emb is not None
    assert validate_embedding(edges, hw, emb).ok
    # a triangle cannot use one qubit per variable on a bipartite cell:
    # exhaustively, every all-singleton assignment misses some edge
    adj = adjacency_of(hw)
    for trio in itertools.permutations(range(8), 3):
        singleton_ok = (
            trio[1] in adj[trio[0]]
            and trio[2] in adj[trio[1]]
            and trio[2] in adj[trio[0]]
        )
        assert not singleton_ok
    assert emb.qubits_used() >= 4
    assert max(len(c) for c in emb.chains.values()) >= 2


def test_path_graph_embeds_and_validates():
    hw = chimera_graph(1, 1, 4)
    edges = [(0, 1), (1, 2)]
    emb = find_embedding(edges, hw, seed=3)
    assert emb is not None
    assert validate_embedding(edges, hw, emb).ok
    assert set(emb.chains) == {0, 1, 2}


def test_isolated_variable_gets_singleton_chain():
    hw = chimera_graph(1, 1, 4)
    emb = find_embedding([(0, 1)], hw, seed=1, num_vars=3)
    assert emb is not None
    assert set(emb.chains) == {0, 1, 2}
    assert len(emb.chains[2]) == 1
    assert validate_embedding([(0, 1)], hw, emb).ok


def test_exact_fit_complete_bipartite():
    hw = chimera_graph(1, 1, 4)
    edges = [(a, 4 + b) for a in range(4) for b in range(4)]
    emb = find_embedding(edges, hw, seed=11, max_tries=40)
    assert emb is not None
    assert validate_embedding(edges, hw, emb).ok
    assert emb.qubits_used() == 8  # uses every qubit exactly once


def test_k6_does_not_embed_into_single_cell():
    hw = chimera_graph(1, 1, 4)
    edges = list(itertools.combinations(range(6), 2))
    assert find_embedding(edges, hw, seed=0, max_tries=6) is None
    # oracle: K_{4,4} genuinely has no K6 minor, so failure is forced
    assert not has_k6_minor(hw)


def test_too_many_variables_returns_none():
    hw = chimera_graph(1, 1, 4)
    assert find_embedding([], hw, num_vars=9, seed=0) is None


def test_find_embedding_is_deterministic():
    hw = chimera_graph(2, 2, 4)
    edges = list(itertools.combinations(range(5), 2))
    a = find_embedding(edges, hw, seed=42)
    b = find_embedding(edges, hw, seed=42)
    assert a is not None
    assert a == b


def test_find_embedding_parameter_errors():
    hw = chimera_graph(1, 1, 4)
    with pytest.raises(ParameterError, match="self loop"):
        find_embedding([(1, 1)], hw)
    with pytest.raises(ParameterError, match="empty"):
        find_embedding([], hw)
    with pytest.raises(ParameterError, match="num_vars"):
        find_embedding([(0, 5)], hw, num_vars=3)
    with pytest.raises(ParameterError, match="max_tries"):
        find_embedding([(0, 1)], hw, max_tries=0)


def test_every_found_embedding_validates():
    rng = np.random.default_rng(2026)
    hw_small = chimera_graph(2, 2, 4)
    hw_big = chimera_graph(3, 3, 4)
    successes = 0
    for trial in range(60):
        num_vars = int(rng.integers(2, 13))
        p = float(rng.uniform(0.15, 0.5))
        edges = random_logical_graph(rng, num_vars, p)
        hw = hw_small if trial % 2 == 0 else hw_big
        emb = find_embedding(
            edges, hw, seed=int(rng.integers(0, 2**31)), num_vars=num_vars
        )
        if emb is None:
            continue
        successes += 1
        assert validate_embedding(edges, hw, emb).ok
        assert set(emb.chains) == set(range(num_vars))
        assert embedding_overhead(emb) >= 1.0
    assert successes >= 30


# ---------------------------------------------------------------------------
# validate_embedding diagnostics
# ---------------------------------------------------------------------------


def test_validator_reports_overlap():
    hw = chimera_graph(1, 1, 4)
    emb = Embedding(chains={0: (0,), 1: (0, 4)})
    verdict = validate_embedding([(0, 1)], hw, emb)
    assert not verdict.ok
    assert any("overlap" in d for d in verdict.diagnostics)


def test_validator_reports_disconnected_chain():
    hw = chimera_graph(2, 2, 4)
    emb = Embedding(chains={0: (0, 12)})  # 0 and 12 share no coupler
    verdict = validate_embedding([], hw, emb)
    assert not verdict.ok
    assert any("disconnected chain 0" in d for d in verdict.diagnostics)


def test_validator_reports_uncovered_edge():
    hw = chimera_graph(1, 1, 4)
    emb = Embedding(chains={0: (0,), 1: (1,)})  # same side, no coupler
    verdict = validate_embedding([(0, 1)], hw, emb)
    assert not verdict.ok
    assert any("uncovered logical edge (0, 1)" in d for d in verdict.diagnostics)


def test_validator_reports_missing_and_empty_chains():
    hw = chimera_graph(1, 1, 4)
    verdict = validate_embedding([(0, 1)], hw, Embedding(chains={0: (0,)}))
    assert any("missing chain for variable 1" in d for d in verdict.diagnostics)
    verdict = validate_embedding([], hw, Embedding(chains={0: ()}))
    assert any("empty chain" in d for d in verdict.diagnostics)
    verdict = validate_embedding([], hw, Embedding(chains={0: (99,)}))
    assert any("invalid qubit 99" in d for d in verdict.diagnostics)


def test_validator_accepts_good_embedding():
    hw = chimera_graph(1, 1, 4)
    emb = Embedding(chains={0: (0,), 1: (4,), 2: (1, 5)})
    verdict = validate_embedding([(0, 1), (1, 2), (0, 2)], hw, emb)
    assert verdict.ok
    assert verdict.diagnostics == ()


# ---------------------------------------------------------------------------
# overhead and chain strength
# ---------------------------------------------------------------------------


def test_embedding_overhead_values():
    identity = Embedding(chains={0: (0,), 1: (4,)})
    assert embedding_overhead(identity) == 1.0
    triangle = Embedding(chains={0: (0,), 1: (4,), 2: (1, 5)})
    assert embedding_overhead(triangle) == pytest.approx(4 / 3)
    with pytest.raises(ParameterError):
        embedding_overhead(Embedding(chains={}))


def test_chain_strength_worked_example():
    m = IsingModel(num_spins=2, h={}, J={(0, 1): 0.25})
    # RMS(J) = 0.25, mean degree = 2*1/2 = 1
    assert uniform_torque_chain_strength(m) == pytest.approx(0.3535, abs=1e-4)


def test_chain_strength_scales_linearly_with_couplings():
    rng = np.random.default_rng(5)
    J = {
        (i, j): float(rng.normal())
        for i, j in itertools.combinations(range(6), 2)
        if rng.random() < 0.6
    }
    m1 = IsingModel(num_spins=6, h={}, J=J)
    m2 = IsingModel(num_spins=6, h={}, J={k: 3.0 * v for k, v in J.items()})
    s1 = uniform_torque_chain_strength(m1)
    s2 = uniform_torque_chain_strength(m2)
    assert s2 == pytest.approx(3.0 * s1)


def test_chain_strength_explicit_degree():
    m = IsingModel(num_spins=4, h={}, J={(0, 1): 1.0, (2, 3): 1.0})
    got = uniform_torque_chain_strength(m, logical_degree_mean=4.0)
    assert got == pytest.approx(1.414 * 1.0 * 2.0)


def test_chain_strength_degenerate_models_warn():
    with pytest.warns(UserWarning, match="no couplers"):
        assert uniform_torque_chain_strength(IsingModel(2, {0: 1.0}, {})) == 1.0
    with pytest.warns(UserWarning, match="zero"):
        got = uniform_torque_chain_strength(IsingModel(2, {}, {(0, 1): 0.0}))
    assert got == 1e-6


# ---------------------------------------------------------------------------
# embed_ising
# ---------------------------------------------------------------------------


def worked_example():
    hw = chimera_graph(2, 2, 4)
    logical = IsingModel(num_spins=2, h={0: 0.5, 1: -0.5}, J={(0, 1): 0.25}, offset=0.75)
    emb = Embedding(chains={0: (4,), 1: (0, 16)})
    return hw, logical, emb


def test_embed_ising_worked_example():
    hw, logical, emb = worked_example()
    embedded = embed_ising(logical, emb, hw, chain_strength=1.0)
    assert embedded.qubit_order == (0, 4, 16)
    # compact ids: q0 -> 0, q4 -> 1, q16 -> 2
    assert embedded.model.h == {0: -0.25, 1: 0.5, 2: -0.25}
    assert embedded.model.J == {(0, 1): 0.25, (0, 2): -1.0}
    assert embedded.model.offset == 0.75
    assert embedded.chain_edges == ((0, 16),)
    assert embedded.chain_offset == pytest.approx(-1.0)
    assert embedded.clamped_count == 0


def test_embed_ising_energy_identity_worked_example():
    hw, logical, emb = worked_example()
    embedded = embed_ising(logical, emb, hw, chain_strength=1.0)
    for s0, s1 in itertools.product((-1, 1), repeat=2):
        phys = chain_consistent_state(emb, embedded.qubit_order, {0: s0, 1: s1})
        lhs = ising_energy(embedded.model, [int(v) for v in phys])
        rhs = ising_energy(logical, [s0, s1]) + embedded.chain_offset
        assert lhs == pytest.approx(rhs, abs=1e-12)


def test_embed_ising_energy_identity_random_models():
    hw = chimera_graph(2, 2, 4)
    rng = np.random.default_rng(99)
    for trial in range(10):
        n = int(rng.integers(2, 6))
        edges = random_logical_graph(rng, n, 0.6)
        h = {i: float(rng.uniform(-0.3, 0.3)) for i in range(n)}
        J = {e: float(rng.uniform(-0.2, 0.2)) for e in edges}
        logical = IsingModel(num_spins=n, h=h, J=J, offset=float(rng.normal()))
        emb = find_embedding(edges, hw, seed=trial, num_vars=n)
        assert emb is not None
        embedded = embed_ising(logical, emb, hw, chain_strength=0.9)
        for bits in itertools.product((-1, 1), repeat=n):
            phys = chain_consistent_state(
                emb, embedded.qubit_order, dict(enumerate(bits))
            )
            lhs = ising_energy(embedded.model, [int(v) for v in phys])
            rhs = ising_energy(logical, list(bits)) + embedded.chain_offset
            assert lhs == pytest.approx(rhs, abs=1e-9)


def test_embed_ising_identity_embedding_is_logical_model():
    hw = chimera_graph(1, 1, 4)
    logical = IsingModel(num_spins=2, h={0: 0.4, 1: -0.2}, J={(0, 1): 0.35}, offset=1.5)
    emb = Embedding(chains={0: (0,), 1: (4,)})
    embedded = embed_ising(logical, emb, hw, chain_strength=1.0)
    assert embedded.qubit_order == (0, 4)
    assert embedded.model == logical
    assert embedded.chain_edges == ()
    assert embedded.chain_offset == 0.0


def test_embed_ising_splits_coupling_over_parallel_couplers():
    hw = chimera_graph(1, 1, 4)
    logical = IsingModel(num_spins=2, h={}, J={(0, 1): 0.8})
    # chain 0 = {0, 1} (via? 0 and 1 are same side: not adjacent) -> use {0, 4}
    emb = Embedding(chains={0: (0, 4), 1: (1, 5)})
    embedded = embed_ising(logical, emb, hw, chain_strength=1.0)
    # couplers joining the chains: (0,5), (1,4) -> 0.4 each
    compact = {q: k for k, q in enumerate(embedded.qubit_order)}
    key_a = tuple(sorted((compact[0], compact[5])))
    key_b = tuple(sorted((compact[1], compact[4])))
    assert embedded.model.J[key_a] == pytest.approx(0.4)
    assert embedded.model.J[key_b] == pytest.approx(0.4)


def test_embed_ising_clamps_and_counts():
    hw, logical, emb = worked_example()
    embedded = embed_ising(logical, emb, hw, chain_strength=5.0)
    assert embedded.clamped_count == 1
    assert embedded.model.J[(0, 2)] == -2.0
    assert embedded.chain_offset == pytest.approx(-2.0)
    unclamped = embed_ising(logical, emb, hw, chain_strength=5.0, clamp=False)
    assert unclamped.clamped_count == 0
    assert unclamped.model.J[(0, 2)] == -5.0


def test_embed_ising_rejects_bad_inputs():
    hw, logical, emb = worked_example()
    with pytest.raises(ParameterError, match="positive"):
        embed_ising(logical, emb, hw, chain_strength=0.0)
    with pytest.raises(EmbeddingError, match="invalid embedding"):
        embed_ising(logical, Embedding(chains={0: (1,), 1: (2,)}), hw, 1.0)
    lonely = IsingModel(num_spins=3, h={2: 1.0}, J={(0, 1): 0.25})
    with pytest.raises(EmbeddingError, match="missing chain"):
        embed_ising(lonely, emb, hw, 1.0)


# ---------------------------------------------------------------------------
# unembed
# ---------------------------------------------------------------------------


def physical_sampleset(records, kind="spin"):
    shots = sum(occ for _, occ in records)
    recs = []
    for (assignment, energy), occ in records:
        recs.append(SampleRecord(assignment=assignment, energy=energy, occurrences=occ))
    recs.sort(key=lambda r: (r.energy, r.assignment))
    return SampleSet(
        records=tuple(recs),
        solver_id="manual",
        seed=0,
        shots=shots,
        kind=kind,
    )


def test_unembed_majority_tie_and_breaks():
    hw, logical, emb = worked_example()
    embedded = embed_ising(logical, emb, hw, chain_strength=1.0)
    # compact order (q0, q4, q16); chain 1 = {q0, q16} = slots 0, 2
    physical = physical_sampleset(
        [
            (((1, 1, -1), 0.0), 3),  # chain 1 tie -> -1, broken
            (((1, 1, 1), -1.0), 7),  # intact
        ]
    )
    logical_ss, stats = unembed(physical, embedded, logical)
    assert logical_ss.kind == "spin"
    assert logical_ss.shots == 10
    by_assignment = {r.assignment: r.occurrences for r in logical_ss.records}
    assert by_assignment == {(1, -1): 3, (1, 1): 7}
    # 3 broken (record, chain) pairs out of 10 shots x 2 chains
    assert stats.break_fraction == pytest.approx(3 / 20)
    assert stats.max_len == 2
    assert stats.mean_len == pytest.approx(1.5)
    assert stats.overhead_ratio == pytest.approx(1.5)


def test_unembed_majority_vote_three_long_chain():
    hw = chimera_graph(2, 2, 4)
    logical = IsingModel(num_spins=2, h={0: 0.1}, J={(0, 1): -0.5})
    emb = Embedding(chains={0: (0, 16, 20), 1: (4,)})
    embedded = embed_ising(logical, emb, hw, chain_strength=1.0)
    assert embedded.qubit_order == (0, 4, 16, 20)
    # chain 0 occupies slots 0, 2, 3
    physical = physical_sampleset(
        [
            (((1, 1, -1, -1), 0.0), 1),  # majority -1, broken
            (((1, 1, 1, -1), 0.0), 1),  # majority +1, broken
            (((-1, 1, -1, -1), 0.0), 1),  # intact -1
        ]
    )
    logical_ss, stats = unembed(physical, embedded, logical)
    by_assignment = {}
    for r in logical_ss.records:
        by_assignment[r.assignment] = by_assignment.get(r.assignment, 0) + r.occurrences
    assert by_assignment == {(-1, 1): 2, (1, 1): 1}
    assert stats.break_fraction == pytest.approx(2 / 6)


def test_unembed_recomputes_logical_energies():
    hw, logical, emb = worked_example()
    embedded = embed_ising(logical, emb, hw, chain_strength=1.0)
    physical = physical_sampleset([(((1, 1, 1), 123.0), 2), (((-1, -1, -1), 9.0), 1)])
    logical_ss, stats = unembed(physical, embedded, logical)
    for rec in logical_ss.records:
        assert rec.energy == pytest.approx(
            ising_energy(logical, list(rec.assignment))
        )
    assert stats.break_fraction == 0.0


def test_unembed_energy_identity_for_intact_chains():
    hw, logical, emb = worked_example()
    embedded = embed_ising(logical, emb, hw, chain_strength=1.0)
    for s0, s1 in itertools.product((-1, 1), repeat=2):
        phys = tuple(
            int(v)
            for v in chain_consistent_state(emb, embedded.qubit_order, {0: s0, 1: s1})
        )
        e_phys = ising_energy(embedded.model, list(phys))
        physical = physical_sampleset([((phys, e_phys), 1)])
        logical_ss, stats = unembed(physical, embedded, logical)
        assert stats.break_fraction == 0.0
        assert logical_ss.records[0].energy == pytest.approx(
            e_phys - embedded.chain_offset
        )


def test_unembed_end_to_end_with_sa():
    hw, logical, emb = worked_example()
    embedded = embed_ising(logical, emb, hw, chain_strength=1.0)
    physical = simulated_annealing(embedded.model, SaSchedule(), shots=50, seed=4)
    logical_ss, stats = unembed(physical, embedded, logical)
    assert logical_ss.kind == "spin"
    assert logical_ss.shots == 50
    assert logical_ss.solver_id.endswith("+unembed")
    assert sum(r.occurrences for r in logical_ss.records) == 50
    assert 0.0 <= stats.break_fraction <= 1.0
    # ground state of the logical model: s0=-1, s1=+1 -> 0.75-0.5-0.5-0.25
    assert logical_ss.best().assignment == (-1, 1)


def test_unembed_rejects_binary_samples():
    hw, logical, emb = worked_example()
    embedded = embed_ising(logical, emb, hw, chain_strength=1.0)
    physical = physical_sampleset([(((1, 1, 1), 0.0), 1)], kind="binary")
    with pytest.raises(ParameterError, match="spin"):
        unembed(physical, embedded, logical)


# ---------------------------------------------------------------------------
# embedding files
# ---------------------------------------------------------------------------


def test_embedding_json_round_trip(tmp_path):
    emb = Embedding(chains={0: (4,), 1: (0, 16), 2: (7,)})
    text = serialize_embedding(emb)
    assert parse_embedding(text) == emb
    path = str(tmp_path / "emb.json")
    save_embedding(emb, path)
    assert load_embedding(path) == emb


def test_parse_embedding_errors():
    with pytest.raises(ParseError, match="JSON"):
        parse_embedding("{not json")
    with pytest.raises(ParseError, match="object"):
        parse_embedding("[1, 2]")
    with pytest.raises(ParseError, match="chain"):
        parse_embedding('{"0": "abc"}')


def test_chain_stats_fields():
    stats = ChainStats(max_len=3, mean_len=2.0, break_fraction=0.25, overhead_ratio=2.0)
    assert stats.max_len == 3
    assert stats.break_fraction == 0.25
