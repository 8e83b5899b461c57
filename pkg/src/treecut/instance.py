"""Tree instances of the restricted vertex multicut problem.

An instance is an undirected tree on vertices 0..n-1 together with a
list of ordered terminal pairs (s, t).  A solution removes non-terminal
vertices so that every pair is disconnected; because the graph is a
tree, each pair has exactly one connecting path, which makes the
constraint set finite and explicit.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import GenerationError, InstanceError, ParameterError, ParseError

__all__ = [
    "TreeInstance",
    "TreePath",
    "generate_tree_instance",
    "unique_path",
    "enumerate_constraint_paths",
    "adjacency_lists",
    "terminal_vertices",
    "validate_instance",
    "serialize_instance",
    "parse_instance",
    "save_instance",
    "load_instance",
]


@dataclass(frozen=True)
class TreeInstance:
    """An undirected tree plus terminal pairs to disconnect.

    ``edges`` are stored with u < v in ascending order; ``terminal_pairs``
    keep generation order.  ``seed`` records the generator seed (0 for
    hand-built instances).  Instances are immutable once constructed.
    """

    num_vertices: int
    edges: tuple[tuple[int, int], ...]
    terminal_pairs: tuple[tuple[int, int], ...]
    seed: int = 0


@dataclass(frozen=True)
class TreePath:
    """An ordered vertex sequence between two terminals of a pair."""

    vertices: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def endpoints(self) -> tuple[int, int]:
        return (self.vertices[0], self.vertices[-1])


def adjacency_lists(instance: TreeInstance) -> list[list[int]]:
    """Neighbor lists, each sorted ascending."""
    adj: list[list[int]] = [[] for _ in range(instance.num_vertices)]
    for u, v in instance.edges:
        adj[u].append(v)
        adj[v].append(u)
    for lst in adj:
        lst.sort()
    return adj


def terminal_vertices(instance: TreeInstance) -> frozenset[int]:
    """The union of all terminal pair endpoints (never removable)."""
    verts: set[int] = set()
    for s, t in instance.terminal_pairs:
        verts.add(s)
        verts.add(t)
    return frozenset(verts)


def unique_path(instance: TreeInstance, u: int, v: int) -> TreePath:
    """The unique u-v path in the tree, endpoints included."""
    n = instance.num_vertices
    if not (0 <= u < n) or not (0 <= v < n):
        raise ParameterError(f"invalid vertex id in path query ({u}, {v})")
    if u == v:
        raise ParameterError("path endpoints must differ")
    adj = adjacency_lists(instance)
    return _path_between(adj, u, v)


def _path_between(adj: list[list[int]], u: int, v: int) -> TreePath:
    parent = {u: -1}
    queue = deque([u])
    while queue:
        a = queue.popleft()
        if a == v:
            break
        for b in adj[a]:
            if b not in parent:
                parent[b] = a
                queue.append(b)
    if v not in parent:
        raise InstanceError(f"vertices {u} and {v} are not connected")
    rev = [v]
    while rev[-1] != u:
        rev.append(parent[rev[-1]])
    return TreePath(tuple(reversed(rev)))


def enumerate_constraint_paths(instance: TreeInstance) -> list[TreePath]:
    """One path per terminal pair, in pair order."""
    adj = adjacency_lists(instance)
    return [_path_between(adj, s, t) for s, t in instance.terminal_pairs]


def _edges_from_prufer(seq: np.ndarray, n: int) -> list[tuple[int, int]]:
    # Linear-time decode; sequences of length n-2 over [0, n) hit every
    # labeled tree exactly once, so the draw is uniform.
    degree = [1] * n
    for x in seq:
        degree[int(x)] += 1
    edges: list[tuple[int, int]] = []
    ptr = 0
    while degree[ptr] != 1:
        ptr += 1
    leaf = ptr
    for x in seq:
        x = int(x)
        edges.append((min(leaf, x), max(leaf, x)))
        degree[x] -= 1
        if degree[x] == 1 and x < ptr:
            leaf = x
        else:
            ptr += 1
            while degree[ptr] != 1:
                ptr += 1
            leaf = ptr
    edges.append((min(leaf, n - 1), max(leaf, n - 1)))
    edges.sort()
    return edges


def _paths_have_removable_interior(
    paths: list[TreePath], terminals: set[int]
) -> bool:
    for path in paths:
        if not any(v not in terminals for v in path.vertices[1:-1]):
            return False
    return True


def generate_tree_instance(n: int, k: int, seed: int) -> TreeInstance:
    """Generate a uniform random labeled tree with k usable terminal pairs.

    Pairs are rejection-sampled: adjacent pairs, duplicate pairs and
    pairs that would leave any pair's path without a removable interior
    vertex are redrawn.  The draw budget is 1000*k candidate pairs;
    exhausting it raises :class:`GenerationError`.  Output is a pure
    function of (n, k, seed).
    """
    if n < 3:
        raise ParameterError("n must be ≥ 3")
    if k < 1:
        raise ParameterError("k must be ≥ 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    prufer = rng.integers(0, n, size=n - 2)
    edges = _edges_from_prufer(prufer, n)

    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    adjacent = {(min(u, v), max(u, v)) for u, v in edges}

    pairs: list[tuple[int, int]] = []
    paths: list[TreePath] = []
    terminals: set[int] = set()
    seen: set[tuple[int, int]] = set()
    budget = 1000 * k
    draws = 0
    while len(pairs) < k:
        if draws >= budget:
            raise GenerationError(
                f"could not place {k} terminal pairs on a {n}-vertex tree "
                f"within {budget} draws (seed {seed})"
            )
        draws += 1
        s, t = (int(x) for x in rng.integers(0, n, size=2))
        if s == t:
            continue
        key = (min(s, t), max(s, t))
        if key in adjacent or key in seen:
            continue
        candidate_path = _path_between(adj, s, t)
        new_terminals = terminals | {s, t}
        if not _paths_have_removable_interior(paths + [candidate_path], new_terminals):
            continue
        pairs.append((s, t))
        paths.append(candidate_path)
        terminals = new_terminals
        seen.add(key)

    instance = TreeInstance(
        num_vertices=n,
        edges=tuple(edges),
        terminal_pairs=tuple(pairs),
        seed=seed,
    )
    validate_instance(instance)
    return instance


def validate_instance(instance: TreeInstance) -> None:
    """Check every structural invariant; raise InstanceError on the first failure."""
    n = instance.num_vertices
    if n < 1:
        raise InstanceError("num_vertices must be positive")
    for u, v in instance.edges:
        if not (0 <= u < n) or not (0 <= v < n):
            raise InstanceError(f"edge ({u}, {v}) has an out-of-range vertex id")
        if u >= v:
            raise InstanceError(f"edge ({u}, {v}) must be stored with u < v")
    if len(set(instance.edges)) != len(instance.edges):
        raise InstanceError("duplicate edges")
    if len(instance.edges) != n - 1:
        raise InstanceError(
            f"not a tree: {len(instance.edges)} edges for {n} vertices"
        )
    adj = adjacency_lists(instance)
    seen = {0}
    queue = deque([0])
    while queue:
        a = queue.popleft()
        for b in adj[a]:
            if b not in seen:
                seen.add(b)
                queue.append(b)
    if len(seen) != n:
        raise InstanceError("not a tree: graph is disconnected")

    adjacent = {(u, v) for u, v in instance.edges}
    unordered: set[tuple[int, int]] = set()
    for s, t in instance.terminal_pairs:
        if not (0 <= s < n) or not (0 <= t < n):
            raise InstanceError(f"terminal pair ({s}, {t}) has an invalid vertex id")
        if s == t:
            raise InstanceError(f"terminal pair ({s}, {t}) repeats a vertex")
        key = (min(s, t), max(s, t))
        if key in unordered:
            raise InstanceError(f"duplicate terminal pair ({s}, {t})")
        unordered.add(key)
        if key in adjacent:
            raise InstanceError(f"adjacent terminals in pair ({s}, {t})")


def serialize_instance(instance: TreeInstance) -> str:
    """Canonical single-object JSON; byte-stable for equal instances."""
    obj = {
        "num_vertices": instance.num_vertices,
        "edges": [[u, v] for u, v in instance.edges],
        "terminal_pairs": [[s, t] for s, t in instance.terminal_pairs],
        "seed": instance.seed,
    }
    return json.dumps(obj, separators=(", ", ": ")) + "\n"


def parse_instance(text: str) -> TreeInstance:
    """Parse and fully validate the JSON instance format."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise ParseError("instance file must contain a JSON object")
    for field in ("num_vertices", "edges", "terminal_pairs"):
        if field not in obj:
            raise ParseError(f"missing field '{field}'")
    try:
        n = int(obj["num_vertices"])
        edges = tuple(
            (int(u), int(v)) for u, v in (tuple(e) for e in obj["edges"])
        )
        pairs = tuple(
            (int(s), int(t)) for s, t in (tuple(p) for p in obj["terminal_pairs"])
        )
        seed = int(obj.get("seed", 0))
    except (TypeError, ValueError) as exc:
        raise ParseError(f"malformed field: {exc}") from None
    instance = TreeInstance(
        num_vertices=n,
        edges=tuple(sorted((min(u, v), max(u, v)) for u, v in edges)),
        terminal_pairs=pairs,
        seed=seed,
    )
    try:
        validate_instance(instance)
    except InstanceError as exc:
        raise ParseError(str(exc)) from None
    return instance


def save_instance(instance: TreeInstance, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_instance(instance))


def load_instance(path: str) -> TreeInstance:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_instance(fh.read())
