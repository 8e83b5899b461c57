"""Hardware-compilation leg of the annealing workflow, simulated.

Covers topology graphs (a built-in Chimera generator plus file import),
heuristic minor embedding, ferromagnetic chain construction with a
uniform-torque-compensation strength policy, and majority-vote
unembedding with chain statistics.

The embedder follows the classic routing heuristic: variables are
inserted one at a time, each new chain grown along shortest paths to its
already-embedded neighbors where a qubit's traversal cost grows
exponentially with how many chains already occupy it; overfull qubits
are then resolved by repeatedly ripping up and re-routing the worst
variable.  Failure (after ``max_tries`` randomized restarts) is reported
as ``None``, never an exception — oversized inputs are an expected
outcome, not a crash.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import EmbeddingError, ParameterError, ParseError
from .kernels import batch_ising_energies, dijkstra_node_weighted
from .qubo import IsingModel
from .solvers import SampleSet, _records_from_states

__all__ = [
    "HardwareGraph",
    "Embedding",
    "EmbeddedIsing",
    "ChainStats",
    "EmbeddingVerdict",
    "chimera_graph",
    "save_hardware_graph",
    "load_hardware_graph",
    "find_embedding",
    "validate_embedding",
    "uniform_torque_chain_strength",
    "embed_ising",
    "unembed",
    "embedding_overhead",
    "serialize_embedding",
    "parse_embedding",
    "save_embedding",
    "load_embedding",
]

# occupancy pressure: traversal weight = OCC_BASE ** min(occupancy, OCC_CAP)
OCC_BASE = 8.0
OCC_CAP = 10
# hardware coupler range; values outside are clamped and counted
COUPLER_MIN = -2.0
COUPLER_MAX = 1.0


@dataclass(frozen=True)
class HardwareGraph:
    """Simple undirected physical-qubit graph with dense ids."""

    num_qubits: int
    edges: tuple[tuple[int, int], ...]
    topology_tag: str = "imported"


@dataclass(frozen=True)
class Embedding:
    """Map from logical variable to its chain of physical qubits."""

    chains: dict[int, tuple[int, ...]]

    def num_variables(self) -> int:
        return len(self.chains)

    def qubits_used(self) -> int:
        return sum(len(c) for c in self.chains.values())


@dataclass(frozen=True)
class EmbeddingVerdict:
    ok: bool
    diagnostics: tuple[str, ...] = ()


@dataclass(frozen=True)
class EmbeddedIsing:
    """Physical spin model over the used qubits, plus decode bookkeeping.

    ``qubit_order`` maps compact spin index -> physical qubit id; the
    physical model is defined over compact indices.  For any
    chain-consistent state, physical energy = logical energy +
    ``chain_offset``.
    """

    model: IsingModel
    embedding: Embedding
    qubit_order: tuple[int, ...]
    chain_strength: float
    chain_edges: tuple[tuple[int, int], ...]  # physical ids
    chain_offset: float
    clamped_count: int


@dataclass(frozen=True)
class ChainStats:
    max_len: int
    mean_len: float
    break_fraction: float
    overhead_ratio: float


# ---------------------------------------------------------------------------
# topologies
# ---------------------------------------------------------------------------


def chimera_graph(m: int, n: int, t: int) -> HardwareGraph:
    """Chimera C(m, n, t): an m×n grid of K_{t,t} cells.

    Qubit id = ((row·n)+col)·2t + side·t + k, side 0 = vertical,
    side 1 = horizontal.  Verticals couple to the next row's same
    (col, k); horizontals to the next column's same (row, k).
    """
    if m < 1 or n < 1 or t < 1:
        raise ParameterError("chimera parameters must be ≥ 1")
    edges: list[tuple[int, int]] = []
    for row in range(m):
        for col in range(n):
            base = ((row * n) + col) * 2 * t
            for k in range(t):
                for kk in range(t):
                    edges.append((base + k, base + t + kk))
            if row + 1 < m:
                for k in range(t):
                    edges.append((base + k, base + 2 * t * n + k))
            if col + 1 < n:
                for k in range(t):
                    edges.append((base + t + k, base + 2 * t + t + k))
    edges = sorted((min(u, v), max(u, v)) for u, v in edges)
    return HardwareGraph(
        num_qubits=2 * t * m * n,
        edges=tuple(edges),
        topology_tag=f"chimera-{m}-{n}-{t}",
    )


def save_hardware_graph(hw: HardwareGraph, path: str) -> None:
    """Text format: line 1 `num_qubits`, then `u v` per line, u<v ascending."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{hw.num_qubits}\n")
        for u, v in sorted(hw.edges):
            fh.write(f"{u} {v}\n")


def load_hardware_graph(path: str, topology_tag: str = "imported") -> HardwareGraph:
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ParseError("empty hardware graph file")
    try:
        num_qubits = int(lines[0])
    except ValueError:
        raise ParseError(f"line 1: expected qubit count, got {lines[0]!r}") from None
    if num_qubits < 1:
        raise ParseError("qubit count must be positive")
    seen: set[tuple[int, int]] = set()
    duplicates = 0
    for ln, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        parts = raw.split()
        if len(parts) != 2:
            raise ParseError(f"line {ln}: expected 'u v'")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise ParseError(f"line {ln}: {exc}") from None
        if u == v:
            raise ParseError(f"line {ln}: self loop {u}")
        if not (0 <= u < num_qubits and 0 <= v < num_qubits):
            raise ParseError(f"line {ln}: qubit id out of range")
        key = (min(u, v), max(u, v))
        if key in seen:
            duplicates += 1
            continue
        seen.add(key)
    if duplicates:
        warnings.warn(
            f"hardware graph file contains {duplicates} duplicate edge lines; deduplicated",
            stacklevel=2,
        )
    return HardwareGraph(
        num_qubits=num_qubits, edges=tuple(sorted(seen)), topology_tag=topology_tag
    )


def _hardware_csr(hw: HardwareGraph) -> tuple[np.ndarray, np.ndarray]:
    counts = np.zeros(hw.num_qubits + 1, dtype=np.int64)
    for u, v in hw.edges:
        counts[u + 1] += 1
        counts[v + 1] += 1
    indptr = np.cumsum(counts)
    indices = np.zeros(indptr[-1], dtype=np.int64)
    cur = indptr[:-1].copy()
    for u, v in sorted(hw.edges):
        indices[cur[u]] = v
        cur[u] += 1
        indices[cur[v]] = u
        cur[v] += 1
    return indptr, indices


def _adjacency_sets(hw: HardwareGraph) -> list[set[int]]:
    adj: list[set[int]] = [set() for _ in range(hw.num_qubits)]
    for u, v in hw.edges:
        adj[u].add(v)
        adj[v].add(u)
    return adj


# ---------------------------------------------------------------------------
# embedding search
# ---------------------------------------------------------------------------


def _normalize_logical(
    logical_edges, num_vars: int | None
) -> tuple[list[int], list[tuple[int, int]]]:
    edges = set()
    seen_vars = set()
    for u, v in logical_edges:
        u, v = int(u), int(v)
        if u == v:
            raise ParameterError(f"logical self loop on {u}")
        edges.add((min(u, v), max(u, v)))
        seen_vars.add(u)
        seen_vars.add(v)
    if num_vars is not None:
        if seen_vars and max(seen_vars) >= num_vars:
            raise ParameterError("logical edge references variable ≥ num_vars")
        variables = list(range(num_vars))
    else:
        variables = sorted(seen_vars)
    if not variables:
        raise ParameterError("logical graph is empty")
    return variables, sorted(edges)


def _route_variable(
    v: int,
    neighbors_embedded: list[int],
    chains: dict[int, set[int]],
    indptr: np.ndarray,
    indices: np.ndarray,
    occupancy: np.ndarray,
    history: np.ndarray,
    rng: np.random.Generator,
    use_numba: bool | None,
) -> set[int] | None:
    # congestion pricing with memory: the exponential term prices present
    # sharing, the history factor permanently marks qubits that keep
    # being contested so persistent knots get dispersed over the passes
    nodew = OCC_BASE ** np.minimum(occupancy, OCC_CAP).astype(np.float64)
    nodew *= 1.0 + history
    # tiny multiplicative jitter: breaks shortest-path ties differently on
    # every call, so repeated passes do not replay the same collisions
    nodew *= rng.uniform(1.0, 1.0 + 1e-3, nodew.shape[0])
    if not neighbors_embedded:
        # seed the chain anywhere cheap
        order = rng.permutation(nodew.shape[0])
        root = int(order[np.argmin(nodew[order])])
        return {root}
    dists = []
    parents = []
    for m in neighbors_embedded:
        src = np.fromiter(sorted(chains[m]), dtype=np.int64)
        dist, parent = dijkstra_node_weighted(
            indptr, indices, nodew, src, use_numba=use_numba
        )
        dists.append(dist)
        parents.append(parent)
    total = np.sum(dists, axis=0) - (len(neighbors_embedded) - 1) * nodew
    for m in neighbors_embedded:  # a root inside a neighbor chain is useless
        for q in chains[m]:
            total[q] = np.inf
    best = float(np.min(total))
    if not np.isfinite(best):
        return None
    # pick among the best few roots, not the single cheapest: restarts and
    # passes then explore genuinely different layouts
    k = min(4, int(np.isfinite(total).sum()))
    near_best = np.argpartition(total, k - 1)[:k]
    near_best = near_best[total[near_best] <= 4.0 * best + 1e-9]
    root = int(rng.choice(near_best)) if near_best.size else int(np.argmin(total))
    # grow a Steiner-style star: each leg enters the parent tree at the
    # cheapest node of the chain built so far, so legs share trunks
    # instead of each walking all the way from the root
    chain = {root}
    by_closeness = sorted(range(len(dists)), key=lambda i: dists[i][root])
    for i in by_closeness:
        dist, parent = dists[i], parents[i]
        entry = min(chain, key=lambda q: dist[q])
        if not np.isfinite(dist[entry]):
            return None
        node = entry
        while dist[node] > 0.0:
            node = int(parent[node])
            if node < 0:
                return None
            if dist[node] > 0.0:
                chain.add(node)
    return chain


def _trim_chain(
    v: int,
    chains: dict[int, set[int]],
    var_edges: dict[int, list[int]],
    adj: list[set[int]],
) -> None:
    """Drop removable qubits from chain(v): connectivity and coverage kept."""
    chain = chains[v]
    changed = True
    while changed and len(chain) > 1:
        changed = False
        for q in sorted(chain, reverse=True):
            rest = chain - {q}
            if not rest:
                continue
            if not _connected_subgraph(rest, adj):
                continue
            ok = True
            for m in var_edges[v]:
                if m in chains and not _touches(rest, chains[m], adj):
                    ok = False
                    break
            if ok:
                chain.discard(q)
                changed = True


def _connected_subgraph(nodes: set[int], adj: list[set[int]]) -> bool:
    it = iter(nodes)
    start = next(it)
    seen = {start}
    stack = [start]
    while stack:
        a = stack.pop()
        for b in adj[a] & nodes:
            if b not in seen:
                seen.add(b)
                stack.append(b)
    return len(seen) == len(nodes)


def _touches(chain_a: set[int], chain_b: set[int], adj: list[set[int]]) -> bool:
    for q in chain_a:
        if adj[q] & chain_b:
            return True
    return False


def _insertion_order(
    variables: list[int], var_edges: dict[int, list[int]], rng: np.random.Generator
) -> list[int]:
    """BFS over the logical graph so most insertions see embedded neighbors.

    Each component starts from a random high-degree variable: placing the
    most constrained variables while the hardware is still empty gives
    them central, short chains.
    """
    remaining = set(variables)
    order: list[int] = []
    while remaining:
        pool = sorted(remaining, key=lambda v: (-len(var_edges[v]), v))
        top = max(1, len(pool) // 4)
        start = pool[int(rng.integers(top))]
        remaining.discard(start)
        queue = [start]
        while queue:
            v = queue.pop(0)
            order.append(v)
            nbrs = sorted(m for m in var_edges[v] if m in remaining)
            if len(nbrs) > 1:
                nbrs = [nbrs[i] for i in rng.permutation(len(nbrs))]
            for m in nbrs:
                remaining.discard(m)
                queue.append(m)
    return order


def find_embedding(
    logical_edges,
    hw: HardwareGraph,
    max_tries: int = 10,
    seed: int = 0,
    num_vars: int | None = None,
    use_numba: bool | None = None,
    improve_passes: int = 12,
) -> Embedding | None:
    """Search for a minor embedding; ``None`` means no embedding found.

    Each try inserts variables in a randomized BFS order (overlaps
    allowed but priced exponentially), then repeatedly rips up and
    re-routes every variable until no qubit is shared.  The result is a
    pure function of (logical graph, hw, max_tries, seed).
    """
    variables, edges = _normalize_logical(logical_edges, num_vars)
    if len(variables) > hw.num_qubits:
        return None
    if max_tries < 1:
        raise ParameterError("max_tries must be ≥ 1")
    indptr, indices = _hardware_csr(hw)
    adj = _adjacency_sets(hw)
    var_edges: dict[int, list[int]] = {v: [] for v in variables}
    for u, v in edges:
        var_edges[u].append(v)
        var_edges[v].append(u)

    for attempt in range(max_tries):
        rng = np.random.default_rng([seed, attempt])
        order = _insertion_order(variables, var_edges, rng)
        chains: dict[int, set[int]] = {}
        occupancy = np.zeros(hw.num_qubits, dtype=np.int64)
        history = np.zeros(hw.num_qubits, dtype=np.float64)

        def occupy(chain: set[int], delta: int) -> None:
            for q in chain:
                occupancy[q] += delta

        def reroute(v: int) -> bool:
            embedded_near = [m for m in var_edges[v] if m in chains]
            chain = _route_variable(
                v, embedded_near, chains, indptr, indices, occupancy, history,
                rng, use_numba,
            )
            if chain is None:
                return False
            chains[v] = chain
            _trim_chain(v, chains, var_edges, adj)
            occupy(chains[v], +1)
            return True

        failed = False
        for v in order:
            if not reroute(v):
                failed = True
                break
        if failed:
            continue

        for _ in range(improve_passes):
            if not np.any(occupancy > 1):
                break
            history[occupancy > 1] += 1.0
            for i in rng.permutation(len(order)):
                v = order[int(i)]
                occupy(chains[v], -1)
                del chains[v]
                if not reroute(v):
                    failed = True
                    break
            if failed:
                break
        if failed or np.any(occupancy > 1):
            continue

        emb = Embedding(
            chains={v: tuple(sorted(chains[v])) for v in sorted(chains)}
        )
        if validate_embedding(edges, hw, emb).ok:
            return emb
    return None


def validate_embedding(logical_edges, hw: HardwareGraph, emb: Embedding) -> EmbeddingVerdict:
    """Check disjointness, chain connectivity, and logical-edge coverage."""
    diagnostics: list[str] = []
    adj = _adjacency_sets(hw)
    owner: dict[int, int] = {}
    for v in sorted(emb.chains):
        chain = emb.chains[v]
        if not chain:
            diagnostics.append(f"empty chain for variable {v}")
            continue
        for q in chain:
            if not (0 <= q < hw.num_qubits):
                diagnostics.append(f"invalid qubit {q} in chain {v}")
            elif q in owner:
                diagnostics.append(f"overlap: qubit {q} in chains {owner[q]} and {v}")
            else:
                owner[q] = v
        nodes = {q for q in chain if 0 <= q < hw.num_qubits}
        if nodes and not _connected_subgraph(nodes, adj):
            diagnostics.append(f"disconnected chain {v}")
    edges = {(min(int(u), int(v)), max(int(u), int(v))) for u, v in logical_edges}
    for u, v in sorted(edges):
        if u not in emb.chains:
            diagnostics.append(f"missing chain for variable {u}")
            continue
        if v not in emb.chains:
            diagnostics.append(f"missing chain for variable {v}")
            continue
        if not _touches(set(emb.chains[u]), set(emb.chains[v]), adj):
            diagnostics.append(f"uncovered logical edge ({u}, {v})")
    return EmbeddingVerdict(ok=not diagnostics, diagnostics=tuple(diagnostics))


def embedding_overhead(emb: Embedding) -> float:
    """(total physical qubits used) ÷ (logical variables)."""
    if not emb.chains:
        raise ParameterError("empty embedding")
    return emb.qubits_used() / emb.num_variables()


# ---------------------------------------------------------------------------
# chained physical models
# ---------------------------------------------------------------------------


def uniform_torque_chain_strength(
    m: IsingModel,
    logical_degree_mean: float | None = None,
    prefactor: float = 1.414,
) -> float:
    """prefactor · RMS(J) · sqrt(mean logical degree).

    Degenerate inputs do not fail: a model without couplers returns 1.0
    with a warning, and an all-zero J clamps to 1e-6 with a warning.
    """
    if not m.J:
        warnings.warn("model has no couplers; chain strength defaults to 1.0", stacklevel=2)
        return 1.0
    values = np.array(list(m.J.values()))
    rms = float(np.sqrt(np.mean(values**2)))
    if logical_degree_mean is None:
        logical_degree_mean = 2.0 * len(m.J) / m.num_spins
    strength = prefactor * rms * float(np.sqrt(logical_degree_mean))
    if strength <= 0.0:
        warnings.warn("all couplings are zero; chain strength clamped to 1e-6", stacklevel=2)
        return 1e-6
    return strength


def embed_ising(
    m: IsingModel,
    emb: Embedding,
    hw: HardwareGraph,
    chain_strength: float,
    clamp: bool = True,
) -> EmbeddedIsing:
    """Split fields over chains, couplings over inter-chain couplers.

    Each h_i is divided uniformly across chain(i); each J_ij is divided
    uniformly across every hardware coupler joining chain(i) to
    chain(j); every hardware edge inside a chain is set to
    −chain_strength.  With ``clamp``, physical couplings are limited to
    [−2, 1] (events counted).  For chain-consistent states the physical
    energy equals the logical energy plus ``chain_offset``.
    """
    if chain_strength <= 0:
        raise ParameterError("chain strength must be positive")
    logical_edges = sorted(m.J)
    verdict = validate_embedding(logical_edges, hw, emb)
    if not verdict.ok:
        raise EmbeddingError(
            "invalid embedding: " + "; ".join(verdict.diagnostics[:5])
        )
    for i in sorted(m.h):
        if i not in emb.chains:
            raise EmbeddingError(f"missing chain for variable {i}")
    adjsets = _adjacency_sets(hw)
    qubit_order = tuple(sorted(q for chain in emb.chains.values() for q in chain))
    compact = {q: k for k, q in enumerate(qubit_order)}

    h: dict[int, float] = {}
    J: dict[tuple[int, int], float] = {}
    for i in sorted(emb.chains):
        hi = m.h.get(i, 0.0)
        if hi != 0.0:
            share = hi / len(emb.chains[i])
            for q in emb.chains[i]:
                h[compact[q]] = h.get(compact[q], 0.0) + share
    for (a, b) in logical_edges:
        couplers = []
        for q in emb.chains[a]:
            for p in adjsets[q] & set(emb.chains[b]):
                couplers.append((min(compact[q], compact[p]), max(compact[q], compact[p])))
        couplers.sort()
        share = m.J[(a, b)] / len(couplers)
        for key in couplers:
            J[key] = J.get(key, 0.0) + share

    chain_edges: list[tuple[int, int]] = []
    for v in sorted(emb.chains):
        chain = emb.chains[v]
        for q in chain:
            for p in adjsets[q] & set(chain):
                if q < p:
                    chain_edges.append((q, p))
    chain_edges.sort()
    for q, p in chain_edges:
        key = (compact[q], compact[p])
        J[key] = J.get(key, 0.0) - chain_strength

    clamped = 0
    if clamp:
        for key, val in J.items():
            cl = min(max(val, COUPLER_MIN), COUPLER_MAX)
            if cl != val:
                clamped += 1
                J[key] = cl
    chain_offset = sum(J[(compact[q], compact[p])] for q, p in chain_edges)

    model = IsingModel(
        num_spins=len(qubit_order),
        h={k: v for k, v in sorted(h.items()) if v != 0.0},
        J={k: v for k, v in sorted(J.items()) if v != 0.0},
        offset=m.offset,
    )
    return EmbeddedIsing(
        model=model,
        embedding=emb,
        qubit_order=qubit_order,
        chain_strength=chain_strength,
        chain_edges=tuple(chain_edges),
        chain_offset=chain_offset,
        clamped_count=clamped,
    )


def unembed(
    physical: SampleSet, embedded: EmbeddedIsing, logical: IsingModel
) -> tuple[SampleSet, ChainStats]:
    """Majority-vote decode of physical samples back to logical spins.

    Per record and chain the logical spin is the sign of the chain's
    spin sum, ties to −1; a chain with non-uniform spins counts as
    broken.  Logical energies are recomputed from the logical model.
    """
    if physical.kind != "spin":
        raise ParameterError("physical sample set must hold spin assignments")
    emb = embedded.embedding
    compact = {q: k for k, q in enumerate(embedded.qubit_order)}
    variables = sorted(emb.chains)
    chain_idx = []
    for v in variables:
        try:
            chain_idx.append([compact[q] for q in emb.chains[v]])
        except KeyError as exc:
            raise ParameterError(f"chain qubit missing from physical model: {exc}") from None

    n_spins = embedded.model.num_spins
    lengths = np.array([len(c) for c in chain_idx])
    assignments = []
    broken_pairs = 0
    total_pairs = 0
    for rec in physical.records:
        if len(rec.assignment) != n_spins:
            raise ParameterError("record does not cover all chain qubits")
        s = np.asarray(rec.assignment)
        logical_spins = np.empty(len(variables), dtype=np.int8)
        for k, idx in enumerate(chain_idx):
            total = int(s[idx].sum())
            logical_spins[k] = 1 if total > 0 else -1
            if abs(total) != len(idx):
                broken_pairs += rec.occurrences
        total_pairs += rec.occurrences * len(variables)
        assignments.extend([logical_spins] * rec.occurrences)

    S = np.array(assignments, dtype=np.int8)
    energies = batch_ising_energies(logical, S)
    records = _records_from_states(S, energies)
    logical_ss = SampleSet(
        records=records,
        solver_id=physical.solver_id + "+unembed",
        seed=physical.seed,
        shots=physical.shots,
        kind="spin",
        wall_time_s=physical.wall_time_s,
        metadata={"chain_strength": embedded.chain_strength},
    )
    stats = ChainStats(
        max_len=int(lengths.max()),
        mean_len=float(lengths.mean()),
        break_fraction=broken_pairs / total_pairs if total_pairs else 0.0,
        overhead_ratio=embedding_overhead(emb),
    )
    return logical_ss, stats


# ---------------------------------------------------------------------------
# embedding serialization
# ---------------------------------------------------------------------------


def serialize_embedding(emb: Embedding) -> str:
    obj = {str(v): list(emb.chains[v]) for v in sorted(emb.chains)}
    return json.dumps(obj, separators=(", ", ": ")) + "\n"


def parse_embedding(text: str) -> Embedding:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise ParseError("embedding file must contain a JSON object")
    chains: dict[int, tuple[int, ...]] = {}
    try:
        for key, val in obj.items():
            chains[int(key)] = tuple(int(q) for q in val)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"malformed chain: {exc}") from None
    return Embedding(chains=chains)


def save_embedding(emb: Embedding, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_embedding(emb))


def load_embedding(path: str) -> Embedding:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_embedding(fh.read())
