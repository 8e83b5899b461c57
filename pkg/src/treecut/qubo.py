"""QUBO and Ising encodings of the tree vertex multicut problem.

Two encodings are built here.  The *penalty* form charges M2·(Σ_{v∈π}(1−x_v))²
per constraint path, which is minimized by removing *every* vertex of the
path — its ground states are routinely infeasible, and the encoding is kept
precisely to study that failure mode.  The *slack* form charges
M2·(Σ_{v∈π} x_v − Σ_j 2^j y_j − 1)² with ⌈log2 |π|⌉ binary slack bits per
path, which vanishes exactly when at least one path vertex is removed.

Both accept a ``fix_terminals`` presolve that eliminates terminal variables
(x_v = 0), enforcing the no-terminal-removal constraint structurally; the
quadratic M1 penalty over terminal variables is retained as an option.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParameterError, ParseError
from .instance import TreeInstance, enumerate_constraint_paths, terminal_vertices

__all__ = [
    "Qubo",
    "IsingModel",
    "Cutset",
    "FeasibilityVerdict",
    "build_penalty_qubo",
    "build_slack_qubo",
    "qubo_energy",
    "ising_energy",
    "to_ising",
    "extract_cutset",
    "check_feasibility",
    "default_penalties",
    "serialize_qubo",
    "serialize_labels",
    "parse_qubo",
    "save_qubo",
    "load_qubo",
]


@dataclass(frozen=True)
class Qubo:
    """Sparse quadratic binary model: offset + Σ u_i x_i + Σ_{i<j} w_ij x_i x_j.

    ``var_labels[i]`` records what variable i means: ``vertex:<id>`` or
    ``slack:<path>:<bit>``.  Zero coefficients are never stored.
    """

    num_vars: int
    var_labels: tuple[str, ...]
    linear: dict[int, float]
    quadratic: dict[tuple[int, int], float]
    offset: float = 0.0


@dataclass(frozen=True)
class IsingModel:
    """Sparse spin model: offset + Σ h_i s_i + Σ_{i<j} J_ij s_i s_j, s ∈ {−1,+1}."""

    num_spins: int
    h: dict[int, float]
    J: dict[tuple[int, int], float]
    offset: float = 0.0


@dataclass(frozen=True)
class Cutset:
    """The set of vertices selected for removal."""

    vertices: frozenset[int]

    def __len__(self) -> int:
        return len(self.vertices)


@dataclass(frozen=True)
class FeasibilityVerdict:
    """Outcome of checking a cutset against an instance.

    ``violation`` is None when feasible, else "C1" (a terminal was
    removed; witness = offending vertex) or "C2" (an uncovered pair
    path; witness = path index).
    """

    ok: bool
    violation: str | None = None
    witness: int | None = None


class _Accumulator:
    """Canonicalizing term collector (x² = x, constants → offset)."""

    def __init__(self) -> None:
        self.linear: dict[int, float] = {}
        self.quadratic: dict[tuple[int, int], float] = {}
        self.offset = 0.0

    def add_linear(self, i: int, coeff: float) -> None:
        self.linear[i] = self.linear.get(i, 0.0) + coeff

    def add_quadratic(self, i: int, j: int, coeff: float) -> None:
        if i == j:
            self.add_linear(i, coeff)
            return
        key = (i, j) if i < j else (j, i)
        self.quadratic[key] = self.quadratic.get(key, 0.0) + coeff

    def add_square(
        self, terms: list[tuple[int, float]], constant: float, weight: float
    ) -> None:
        """Accumulate weight·(Σ a_i z_i + c)² for binary z (z² = z)."""
        for pos, (i, a) in enumerate(terms):
            self.add_linear(i, weight * (a * a + 2.0 * constant * a))
            for j, b in terms[pos + 1 :]:
                self.add_quadratic(i, j, weight * 2.0 * a * b)
        self.offset += weight * constant * constant

    def build(self, labels: tuple[str, ...]) -> Qubo:
        linear = {i: v for i, v in sorted(self.linear.items()) if v != 0.0}
        quadratic = {k: v for k, v in sorted(self.quadratic.items()) if v != 0.0}
        return Qubo(
            num_vars=len(labels),
            var_labels=labels,
            linear=linear,
            quadratic=quadratic,
            offset=self.offset,
        )


def _vertex_variables(
    instance: TreeInstance, fix_terminals: bool
) -> tuple[dict[int, int], list[str]]:
    terms = terminal_vertices(instance)
    index: dict[int, int] = {}
    labels: list[str] = []
    for v in range(instance.num_vertices):
        if fix_terminals and v in terms:
            continue
        index[v] = len(labels)
        labels.append(f"vertex:{v}")
    return index, labels


def _check_penalties(M1: float, M2: float) -> None:
    if not (M1 > 0 and M2 > 0):
        raise ParameterError("penalty coefficients must be positive")


def _add_objective_and_c1(
    acc: _Accumulator,
    instance: TreeInstance,
    index: dict[int, int],
    M1: float,
    fix_terminals: bool,
) -> None:
    for v, i in index.items():
        acc.add_linear(i, 1.0)
    if not fix_terminals:
        vh = [(index[v], 1.0) for v in sorted(terminal_vertices(instance))]
        acc.add_square(vh, 0.0, M1)


def build_penalty_qubo(
    instance: TreeInstance, M1: float, M2: float, fix_terminals: bool = True
) -> Qubo:
    """Plain penalty encoding Σx_v + M1(Σ_{V_H}x_v)² + M2 Σ_π(Σ_{v∈π}(1−x_v))².

    The per-path term rewards removing *all* path vertices, so its ground
    states are generally infeasible; the encoding exists to reproduce that
    failure mode.  With ``fix_terminals`` the M1 term vanishes and terminal
    contributions to each path fold into constants.
    """
    _check_penalties(M1, M2)
    index, labels = _vertex_variables(instance, fix_terminals)
    acc = _Accumulator()
    _add_objective_and_c1(acc, instance, index, M1, fix_terminals)

    for path in enumerate_constraint_paths(instance):
        # Σ_{v∈π}(1−x_v) = c − Σ_{free v} x_v, where presolved vertices
        # each contribute a constant 1.
        free = [v for v in path.vertices if v in index]
        constant = float(len(path.vertices))
        terms = [(index[v], -1.0) for v in free]
        acc.add_square(terms, constant, M2)
    return acc.build(tuple(labels))


def slack_bits_for_path(path_len: int) -> int:
    """⌈log2 L⌉ slack bits for a path of L vertices."""
    if path_len < 2:
        raise ParameterError("constraint paths have at least 2 vertices")
    return (path_len - 1).bit_length()


def build_slack_qubo(
    instance: TreeInstance,
    M1: float,
    M2: float,
    fix_terminals: bool = True,
    slack_sign: str = "minus",
) -> Qubo:
    """Slack-corrected encoding: per path, M2·(Σ_{v∈π} x_v − Σ_j 2^j y_j − 1)².

    The subtracted slack register makes the square vanish exactly when
    Σ x_v ≥ 1, i.e. when the path is cut.  ``slack_sign="plus"`` flips the
    register to the additive variant (which wrongly also vanishes at
    Σ x_v = 0, slack = 1); it is kept only for comparison runs.
    """
    _check_penalties(M1, M2)
    if slack_sign not in ("minus", "plus"):
        raise ParameterError("slack_sign must be 'minus' or 'plus'")
    sigma = -1.0 if slack_sign == "minus" else 1.0
    index, labels = _vertex_variables(instance, fix_terminals)
    paths = enumerate_constraint_paths(instance)

    slack_index: list[list[int]] = []
    next_var = len(labels)
    for p, path in enumerate(paths):
        bits = slack_bits_for_path(len(path.vertices))
        ids = list(range(next_var, next_var + bits))
        slack_index.append(ids)
        for j in range(bits):
            labels.append(f"slack:{p}:{j}")
        next_var += bits

    acc = _Accumulator()
    _add_objective_and_c1(acc, instance, index, M1, fix_terminals)
    for p, path in enumerate(paths):
        terms = [(index[v], 1.0) for v in path.vertices if v in index]
        terms += [(y, sigma * float(2**j)) for j, y in enumerate(slack_index[p])]
        acc.add_square(terms, -1.0, M2)
    return acc.build(tuple(labels))


def qubo_energy(q: Qubo, x) -> float:
    """offset + Σ u_i x_i + Σ w_ij x_i x_j for a 0/1 assignment."""
    if len(x) != q.num_vars:
        raise ParameterError(
            f"assignment length {len(x)} != num_vars {q.num_vars}"
        )
    e = q.offset
    for i, u in q.linear.items():
        if x[i]:
            e += u
    for (i, j), w in q.quadratic.items():
        if x[i] and x[j]:
            e += w
    return e


def ising_energy(m: IsingModel, s) -> float:
    """offset + Σ h_i s_i + Σ J_ij s_i s_j for a ±1 spin vector."""
    if len(s) != m.num_spins:
        raise ParameterError(
            f"spin vector length {len(s)} != num_spins {m.num_spins}"
        )
    for v in s:
        if v not in (-1, 1):
            raise ParameterError(f"invalid spin value {v}")
    e = m.offset
    for i, h in m.h.items():
        e += h * s[i]
    for (i, j), J in m.J.items():
        e += J * s[i] * s[j]
    return e


def to_ising(q: Qubo) -> IsingModel:
    """Substitute x_i = (1+s_i)/2; energies match exactly on all assignments."""
    h: dict[int, float] = {}
    J: dict[tuple[int, int], float] = {}
    offset = q.offset
    for i, u in q.linear.items():
        h[i] = h.get(i, 0.0) + u / 2.0
        offset += u / 2.0
    for (i, j), w in q.quadratic.items():
        J[(i, j)] = J.get((i, j), 0.0) + w / 4.0
        h[i] = h.get(i, 0.0) + w / 4.0
        h[j] = h.get(j, 0.0) + w / 4.0
        offset += w / 4.0
    h = {i: v for i, v in sorted(h.items()) if v != 0.0}
    J = {k: v for k, v in sorted(J.items()) if v != 0.0}
    return IsingModel(num_spins=q.num_vars, h=h, J=J, offset=offset)


def extract_cutset(q: Qubo, x) -> Cutset:
    """Vertices whose variable is 1; slack variables are ignored."""
    if len(x) != q.num_vars:
        raise ParameterError(
            f"assignment length {len(x)} != num_vars {q.num_vars}"
        )
    verts = set()
    for i, label in enumerate(q.var_labels):
        if x[i] and label.startswith("vertex:"):
            verts.add(int(label.split(":", 1)[1]))
    return Cutset(frozenset(verts))


def check_feasibility(instance: TreeInstance, c: Cutset) -> FeasibilityVerdict:
    """ok iff no terminal is cut (C1) and every pair path is hit (C2)."""
    for v in c.vertices:
        if not (0 <= v < instance.num_vertices):
            raise ParameterError(f"cutset vertex {v} is out of range")
    terms = terminal_vertices(instance)
    for v in sorted(c.vertices):
        if v in terms:
            return FeasibilityVerdict(ok=False, violation="C1", witness=v)
    for p, path in enumerate(enumerate_constraint_paths(instance)):
        if not any(v in c.vertices for v in path.vertices):
            return FeasibilityVerdict(ok=False, violation="C2", witness=p)
    return FeasibilityVerdict(ok=True)


def default_penalties(instance: TreeInstance) -> tuple[float, float]:
    """(M1, M2) with M2 = |V|+1 and M1 = M2·(max path length in vertices)².

    M2 > |V| makes one unit of constraint violation cost more than
    removing every vertex, so slack-model ground states are feasible
    optima; M1 dominates the largest possible constraint relief.
    """
    M2 = float(instance.num_vertices + 1)
    longest = max(len(p.vertices) for p in enumerate_constraint_paths(instance))
    M1 = M2 * float(longest) ** 2
    return M1, M2


# ---------------------------------------------------------------------------
# Text round trip
# ---------------------------------------------------------------------------


def serialize_qubo(q: Qubo) -> str:
    """Text format: `n m offset`, then n `i u_i` lines, then m `i j w_ij` lines."""
    lines = [f"{q.num_vars} {len(q.quadratic)} {q.offset!r}"]
    for i in range(q.num_vars):
        lines.append(f"{i} {q.linear.get(i, 0.0)!r}")
    for (i, j), w in sorted(q.quadratic.items()):
        lines.append(f"{i} {j} {w!r}")
    return "\n".join(lines) + "\n"


def serialize_labels(q: Qubo) -> str:
    """Sidecar mapping `index label`, one per line."""
    return "".join(f"{i} {label}\n" for i, label in enumerate(q.var_labels))


def parse_qubo(text: str, labels_text: str | None = None) -> Qubo:
    """Parse the QUBO text format, with an optional label sidecar.

    Without a sidecar every index i is labeled ``vertex:<i>``; solving a
    slack model whose sidecar was dropped would therefore misread slack
    bits as vertices.
    """
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty QUBO file")
    head = lines[0].split()
    if len(head) != 3:
        raise ParseError(f"line 1: expected 'n m offset', got {lines[0]!r}")
    try:
        n, m, offset = int(head[0]), int(head[1]), float(head[2])
    except ValueError as exc:
        raise ParseError(f"line 1: {exc}") from None
    if len(lines) < 1 + n + m:
        raise ParseError(
            f"expected {1 + n + m} lines for n={n}, m={m}; got {len(lines)}"
        )
    linear: dict[int, float] = {}
    for row in range(1, 1 + n):
        parts = lines[row].split()
        if len(parts) != 2:
            raise ParseError(f"line {row + 1}: expected 'i u_i'")
        try:
            i, u = int(parts[0]), float(parts[1])
        except ValueError as exc:
            raise ParseError(f"line {row + 1}: {exc}") from None
        if i != row - 1:
            raise ParseError(f"line {row + 1}: expected index {row - 1}, got {i}")
        if u != 0.0:
            linear[i] = u
    quadratic: dict[tuple[int, int], float] = {}
    for row in range(1 + n, 1 + n + m):
        parts = lines[row].split()
        if len(parts) != 3:
            raise ParseError(f"line {row + 1}: expected 'i j w_ij'")
        try:
            i, j, w = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError as exc:
            raise ParseError(f"line {row + 1}: {exc}") from None
        if not (0 <= i < j < n):
            raise ParseError(f"line {row + 1}: indices must satisfy 0 ≤ i < j < n")
        if (i, j) in quadratic:
            raise ParseError(f"line {row + 1}: duplicate quadratic key ({i}, {j})")
        if w != 0.0:
            quadratic[(i, j)] = w

    if labels_text is not None:
        labels = [""] * n
        for ln, raw in enumerate(labels_text.splitlines(), start=1):
            if not raw.strip():
                continue
            parts = raw.split(maxsplit=1)
            if len(parts) != 2:
                raise ParseError(f"labels line {ln}: expected 'index label'")
            try:
                i = int(parts[0])
            except ValueError as exc:
                raise ParseError(f"labels line {ln}: {exc}") from None
            if not (0 <= i < n):
                raise ParseError(f"labels line {ln}: index {i} out of range")
            labels[i] = parts[1].strip()
        if any(not lab for lab in labels):
            raise ParseError("labels file does not cover every variable")
    else:
        labels = [f"vertex:{i}" for i in range(n)]
    return Qubo(
        num_vars=n,
        var_labels=tuple(labels),
        linear=dict(sorted(linear.items())),
        quadratic=dict(sorted(quadratic.items())),
        offset=offset,
    )


def save_qubo(q: Qubo, path: str, labels_path: str | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_qubo(q))
    if labels_path is not None:
        with open(labels_path, "w", encoding="utf-8") as fh:
            fh.write(serialize_labels(q))


def load_qubo(path: str, labels_path: str | None = None) -> Qubo:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    labels_text = None
    if labels_path is not None:
        with open(labels_path, "r", encoding="utf-8") as fh:
            labels_text = fh.read()
    return parse_qubo(text, labels_text)
