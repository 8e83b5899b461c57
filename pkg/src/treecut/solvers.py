"""Samplers and exact references for QUBO/Ising models.

``simulated_annealing`` is the workhorse sampler; ``exact_bruteforce``
and ``exact_multicut_bnb`` are the two independent exact routes (one on
the encoded model, one on the combinatorial problem) used to audit each
other.  ``racing_solve`` runs several solver configurations concurrently
under a shared wall-clock budget and merges their sample sets
deterministically.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InfeasibleInstanceError,
    ParameterError,
    ParseError,
    SearchBudgetError,
    TreecutError,
)
from .instance import TreeInstance, enumerate_constraint_paths, terminal_vertices
from .kernels import (
    batch_ising_energies,
    batch_qubo_energies,
    beta_schedule,
    brute_force_min,
    ising_bit_arrays,
    qubo_arrays,
    sa_sample_bits,
)
from .qubo import (
    Cutset,
    IsingModel,
    Qubo,
    build_penalty_qubo,
    build_slack_qubo,
    check_feasibility,
    extract_cutset,
)

__all__ = [
    "SaSchedule",
    "SampleRecord",
    "SampleSet",
    "sampleset_as_binary",
    "simulated_annealing",
    "exact_bruteforce",
    "exact_multicut_bnb",
    "SaConfig",
    "GridRow",
    "grid_search_penalties",
    "sampleset_cut_metrics",
    "SolverConfig",
    "racing_solve",
    "serialize_sampleset",
    "canonical_sampleset_bytes",
    "parse_sampleset",
    "save_sampleset",
    "load_sampleset",
]

# shots per deadline check in racing members
RACING_BATCH = 16
# memory cap for pre-generated uniforms, bytes
_SA_CHUNK_BYTES = 64 * 1024 * 1024


@dataclass(frozen=True)
class SaSchedule:
    """Annealing schedule: beta ladder kind and endpoints, sweep count."""

    kind: str = "geometric"
    beta_min: float = 0.1
    beta_max: float = 10.0
    sweeps: int = 200

    def betas(self) -> np.ndarray:
        return beta_schedule(self.kind, self.beta_min, self.beta_max, self.sweeps)


@dataclass(frozen=True)
class SampleRecord:
    """One distinct assignment with its energy and multiplicity."""

    assignment: tuple[int, ...]
    energy: float
    occurrences: int


@dataclass(frozen=True)
class SampleSet:
    """Sorted multiset of sampler output.

    Records are ordered by (energy, assignment); occurrences sum to
    ``shots``.  ``kind`` is "binary" for 0/1 assignments and "spin" for
    ±1 assignments.  ``wall_time_s`` is measurement, not identity: the
    canonical byte form used for determinism checks excludes it.
    """

    records: tuple[SampleRecord, ...]
    solver_id: str
    seed: int
    shots: int
    kind: str = "binary"
    wall_time_s: float = field(default=0.0, compare=False)
    metadata: dict = field(default_factory=dict, compare=False)

    def best(self) -> SampleRecord:
        if not self.records:
            raise ParameterError("empty sample set")
        return self.records[0]

    def best_energy(self) -> float:
        return self.best().energy


def _records_from_states(states: np.ndarray, energies: np.ndarray) -> tuple[SampleRecord, ...]:
    bucket: dict[tuple[int, ...], list] = {}
    for row, e in zip(states, energies):
        key = tuple(int(v) for v in row)
        item = bucket.get(key)
        if item is None:
            bucket[key] = [float(e), 1]
        else:
            item[1] += 1
    recs = [
        SampleRecord(assignment=k, energy=v[0], occurrences=v[1])
        for k, v in bucket.items()
    ]
    recs.sort(key=lambda r: (r.energy, r.assignment))
    return tuple(recs)


def sampleset_as_binary(ss: SampleSet) -> SampleSet:
    """View a spin sample set as 0/1 via x = (1+s)/2; binary passes through.

    Energies are kept as-is: they already agree across the two forms for
    sample sets produced by the affine QUBO↔Ising conversion.
    """
    if ss.kind == "binary":
        return ss
    if ss.kind != "spin":
        raise ParameterError(f"unknown sample kind {ss.kind!r}")
    recs = [
        SampleRecord(
            assignment=tuple((v + 1) // 2 for v in r.assignment),
            energy=r.energy,
            occurrences=r.occurrences,
        )
        for r in ss.records
    ]
    recs.sort(key=lambda r: (r.energy, r.assignment))
    return SampleSet(
        records=tuple(recs),
        solver_id=ss.solver_id,
        seed=ss.seed,
        shots=ss.shots,
        kind="binary",
        wall_time_s=ss.wall_time_s,
        metadata=ss.metadata,
    )


def _sa_states(
    model: Qubo | IsingModel,
    schedule: SaSchedule,
    shots: int,
    rng: np.random.Generator,
    use_numba: bool | None,
) -> tuple[np.ndarray, np.ndarray, str]:
    """Run `shots` SA shots off the generator's stream; returns
    (assignments, energies, kind)."""
    if isinstance(model, Qubo):
        arr = qubo_arrays(model)
        kind = "binary"
    elif isinstance(model, IsingModel):
        arr = ising_bit_arrays(model)
        kind = "spin"
    else:
        raise ParameterError(f"unsupported model type {type(model).__name__}")
    n = arr.n
    if n == 0:
        raise ParameterError("model has no variables")
    betas = schedule.betas()
    per_shot = (schedule.sweeps + 1) * n * 8
    chunk = max(1, min(shots, _SA_CHUNK_BYTES // max(per_shot, 1)))
    blocks = []
    done = 0
    while done < shots:
        b = min(chunk, shots - done)
        draws = rng.random((b, schedule.sweeps + 1, n))
        blocks.append(sa_sample_bits(arr, betas, draws, use_numba=use_numba))
        done += b
    X = np.concatenate(blocks, axis=0)
    if kind == "binary":
        energies = batch_qubo_energies(arr, X)
        states = X
    else:
        states = (2 * X.astype(np.int64) - 1).astype(np.int8)
        energies = batch_ising_energies(model, states)
    return states, energies, kind


def simulated_annealing(
    model: Qubo | IsingModel,
    schedule: SaSchedule,
    shots: int,
    seed: int,
    use_numba: bool | None = None,
    solver_id: str | None = None,
) -> SampleSet:
    """Sample a model with single-site Metropolis sweeps.

    Each shot starts from a uniformly random state and runs
    ``schedule.sweeps`` full passes over the variables in index order;
    the inverse temperature follows the schedule ladder.  Output is a
    pure function of (model, schedule, shots, seed); reported energies
    are recomputed from the model after sampling.  The studied grid uses
    betas within (0.1, 20.0], sweeps in {100, 200, 500} and shots in
    [10, 1000], but any positive values are accepted.
    """
    if shots < 1:
        raise ParameterError("shots must be ≥ 1")
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    states, energies, kind = _sa_states(model, schedule, shots, rng, use_numba)
    records = _records_from_states(states, energies)
    sid = solver_id or (
        f"sa[{schedule.kind},{schedule.beta_min:g},{schedule.beta_max:g},"
        f"{schedule.sweeps}]"
    )
    return SampleSet(
        records=records,
        solver_id=sid,
        seed=seed,
        shots=shots,
        kind=kind,
        wall_time_s=time.perf_counter() - t0,
        metadata={
            "sweeps": schedule.sweeps,
            "schedule": schedule.kind,
            "beta_min": schedule.beta_min,
            "beta_max": schedule.beta_max,
        },
    )


def exact_bruteforce(
    model: Qubo, use_numba: bool | None = None
) -> tuple[np.ndarray, float]:
    """Exhaustive global minimum for models with ≤ 25 variables.

    Ties resolve to the lexicographically smallest assignment.
    """
    arr = qubo_arrays(model)
    return brute_force_min(arr, use_numba=use_numba)


# ---------------------------------------------------------------------------
# exact combinatorial oracle
# ---------------------------------------------------------------------------


def exact_multicut_bnb(
    instance: TreeInstance, node_limit: int | None = None
) -> Cutset:
    """Minimum feasible cutset by branch and bound over the hitting-set view.

    Branches on each removable vertex of a shortest uncovered path;
    lower-bounds with a greedy family of uncovered paths whose removable
    sets are pairwise disjoint; explores vertices in ascending id order,
    so the result is deterministic.  ``node_limit`` caps expanded nodes.
    """
    terms = terminal_vertices(instance)
    paths = enumerate_constraint_paths(instance)
    removable: list[tuple[int, ...]] = []
    for p, path in enumerate(paths):
        cand = tuple(v for v in path.vertices if v not in terms)
        if not cand:
            raise InfeasibleInstanceError(
                f"path {p} has no removable (non-terminal) vertex"
            )
        removable.append(cand)
    npaths = len(paths)
    cand_sets = [frozenset(c) for c in removable]

    # vertex -> paths it hits, for incremental cover updates
    hits: dict[int, list[int]] = {}
    for p, cand in enumerate(removable):
        for v in cand:
            hits.setdefault(v, []).append(p)

    def greedy_cover() -> set[int]:
        uncovered = set(range(npaths))
        chosen: set[int] = set()
        while uncovered:
            best_v, best_gain = -1, -1
            for v in sorted(hits):
                gain = sum(1 for p in hits[v] if p in uncovered)
                if gain > best_gain:
                    best_v, best_gain = v, gain
            chosen.add(best_v)
            uncovered.difference_update(hits[best_v])
        return chosen

    incumbent = greedy_cover()

    def lower_bound(uncovered: list[int]) -> int:
        used: set[int] = set()
        count = 0
        for p in uncovered:
            if not (cand_sets[p] & used):
                used |= cand_sets[p]
                count += 1
        return count

    expanded = 0

    def recurse(chosen: set[int], cover_count: list[int]) -> None:
        nonlocal incumbent, expanded
        expanded += 1
        if node_limit is not None and expanded > node_limit:
            raise SearchBudgetError(
                f"branch-and-bound exceeded node limit {node_limit}"
            )
        uncovered = [p for p in range(npaths) if cover_count[p] == 0]
        if not uncovered:
            if len(chosen) < len(incumbent):
                incumbent = set(chosen)
            return
        if len(chosen) + lower_bound(uncovered) >= len(incumbent):
            return
        # shortest uncovered path, ties to the smallest index
        target = min(uncovered, key=lambda p: (len(paths[p].vertices), p))
        for v in removable[target]:
            if v in chosen:
                continue
            chosen.add(v)
            for p in hits[v]:
                cover_count[p] += 1
            recurse(chosen, cover_count)
            chosen.remove(v)
            for p in hits[v]:
                cover_count[p] -= 1

    recurse(set(), [0] * npaths)
    return Cutset(frozenset(incumbent))


# ---------------------------------------------------------------------------
# penalty grid search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SaConfig:
    """SA setup plus encoding choice used by the grid search."""

    schedule: SaSchedule = SaSchedule()
    shots: int = 100
    encoding: str = "slack"  # or "literal"
    fix_terminals: bool = True
    slack_sign: str = "minus"
    use_numba: bool | None = None


@dataclass(frozen=True)
class GridRow:
    M1: float
    M2: float
    feasibility_rate: float
    best_gap: float


def _build_encoding(instance: TreeInstance, M1: float, M2: float, cfg: SaConfig) -> Qubo:
    if cfg.encoding == "slack":
        return build_slack_qubo(
            instance, M1, M2, fix_terminals=cfg.fix_terminals, slack_sign=cfg.slack_sign
        )
    if cfg.encoding == "literal":
        return build_penalty_qubo(instance, M1, M2, fix_terminals=cfg.fix_terminals)
    raise ParameterError(f"unknown encoding {cfg.encoding!r}")


def sampleset_cut_metrics(
    instance: TreeInstance, q: Qubo, ss: SampleSet, optimum: int
) -> tuple[float, float]:
    """(occurrence-weighted feasibility rate, best feasible gap in %)."""
    feasible = 0
    best_cost = None
    for rec in ss.records:
        cut = extract_cutset(q, rec.assignment)
        if check_feasibility(instance, cut).ok:
            feasible += rec.occurrences
            if best_cost is None or len(cut) < best_cost:
                best_cost = len(cut)
    rate = feasible / ss.shots
    gap = math.inf if best_cost is None else 100.0 * (best_cost - optimum) / optimum
    return rate, gap


def grid_search_penalties(
    instance: TreeInstance,
    grid: list[tuple[float, float]],
    sa_config: SaConfig = SaConfig(),
    seed: int = 0,
    replicates: int = 1,
) -> list[GridRow]:
    """Evaluate penalty pairs by SA feasibility rate and best gap.

    Every (grid point, replicate) combination samples with an
    independent seed derived from ``seed``; ``replicates`` > 1 averages
    the feasibility rate and takes the best (smallest) gap, a plain
    Monte Carlo replication.
    """
    if not grid:
        raise ParameterError("penalty grid must be non-empty")
    if replicates < 1:
        raise ParameterError("replicates must be ≥ 1")
    optimum = len(exact_multicut_bnb(instance))
    rows = []
    for g, (M1, M2) in enumerate(grid):
        q = _build_encoding(instance, M1, M2, sa_config)
        rates = []
        best_gap = math.inf
        for r in range(replicates):
            sub = int(np.random.SeedSequence(entropy=(seed, g, r)).generate_state(1)[0])
            ss = simulated_annealing(
                q, sa_config.schedule, sa_config.shots, sub, use_numba=sa_config.use_numba
            )
            rate, gap = sampleset_cut_metrics(instance, q, ss, optimum)
            rates.append(rate)
            best_gap = min(best_gap, gap)
        rows.append(
            GridRow(
                M1=float(M1),
                M2=float(M2),
                feasibility_rate=float(np.mean(rates)),
                best_gap=best_gap,
            )
        )
    return rows


# ---------------------------------------------------------------------------
# racing meta-solver
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SolverConfig:
    """One racing member: an SA setup or the exact reference.

    With an explicit ``seed`` the member consumes exactly the stream a
    standalone ``simulated_annealing`` call with that seed would, so its
    records coincide with that run's (budget permitting); otherwise the
    member seed is derived from the racing seed and the member index.
    """

    kind: str = "sa"  # "sa" | "exact"
    schedule: SaSchedule = SaSchedule()
    shots: int = 100
    seed: int | None = None
    use_numba: bool | None = None
    solver_id: str | None = None

    def name(self, index: int) -> str:
        if self.solver_id:
            return self.solver_id
        if self.kind == "exact":
            return f"exact#{index}"
        # no comma: these names land in CSV cells
        return f"sa#{index}[{self.schedule.kind}:{self.schedule.sweeps}]"


def _run_racing_member(
    model: Qubo | IsingModel,
    cfg: SolverConfig,
    member_seed: int,
    deadline: float,
) -> tuple[np.ndarray | None, np.ndarray | None, str, int]:
    """Returns (states, energies, kind, shots_done) for one member."""
    if cfg.kind == "exact":
        if not isinstance(model, Qubo):
            raise ParameterError("exact racing member requires a Qubo model")
        x, e = exact_bruteforce(model, use_numba=cfg.use_numba)
        return x[None, :], np.array([e]), "binary", 1
    if cfg.kind != "sa":
        raise ParameterError(f"unknown solver kind {cfg.kind!r}")
    rng = np.random.default_rng(member_seed)
    chunks_s: list[np.ndarray] = []
    chunks_e: list[np.ndarray] = []
    kind = "binary"
    done = 0
    while done < cfg.shots:
        if done > 0 and time.monotonic() >= deadline:
            break
        batch = min(RACING_BATCH, cfg.shots - done)
        states, energies, kind = _sa_states(
            model, cfg.schedule, batch, rng, cfg.use_numba
        )
        chunks_s.append(states)
        chunks_e.append(energies)
        done += batch
    return (
        np.concatenate(chunks_s, axis=0),
        np.concatenate(chunks_e),
        kind,
        done,
    )


def racing_solve(
    model: Qubo | IsingModel,
    configs: list[SolverConfig],
    time_budget_s: float,
    seed: int = 0,
) -> SampleSet:
    """Run all members concurrently under one wall-clock budget and merge.

    Members check the deadline between shot batches (every
    ``RACING_BATCH`` shots) and always finish the batch in flight, so
    each completes at least one batch.  The merge unions records by
    assignment, sums occurrences, and re-sorts by (energy, assignment);
    it is therefore independent of completion *order*.  When the budget
    does not bind (all members finish their configured shots), the
    output is a pure function of (model, configs, seed).  Member
    failures are collected; only all members failing is an error.
    """
    if not configs:
        raise ParameterError("racing needs at least one solver config")
    if time_budget_s <= 0:
        raise ParameterError("time budget must be positive")
    t0 = time.perf_counter()
    deadline = time.monotonic() + time_budget_s
    member_seeds = [
        cfg.seed
        if cfg.seed is not None
        else int(np.random.SeedSequence(entropy=(seed, i)).generate_state(1)[0])
        for i, cfg in enumerate(configs)
    ]
    results: list[tuple | None] = [None] * len(configs)
    failures: list[str] = []
    with ThreadPoolExecutor(max_workers=len(configs)) as pool:
        futures = [
            pool.submit(_run_racing_member, model, cfg, member_seeds[i], deadline)
            for i, cfg in enumerate(configs)
        ]
        for i, fut in enumerate(futures):
            try:
                results[i] = fut.result()
            except TreecutError as exc:
                failures.append(f"{configs[i].name(i)}: {exc}")
    if all(r is None for r in results):
        raise TreecutError("all racing members failed: " + "; ".join(failures))

    bucket: dict[tuple[int, ...], list] = {}
    kinds = set()
    total_shots = 0
    for res in results:
        if res is None:
            continue
        states, energies, kind, done = res
        kinds.add(kind)
        total_shots += done
        for row, e in zip(states, energies):
            key = tuple(int(v) for v in row)
            item = bucket.get(key)
            if item is None:
                bucket[key] = [float(e), 1]
            else:
                item[1] += 1
    if len(kinds) != 1:
        raise ParameterError("racing members disagree on assignment kind")
    records = tuple(
        sorted(
            (
                SampleRecord(assignment=k, energy=v[0], occurrences=v[1])
                for k, v in bucket.items()
            ),
            key=lambda r: (r.energy, r.assignment),
        )
    )
    member_names = "+".join(cfg.name(i) for i, cfg in enumerate(configs))
    return SampleSet(
        records=records,
        solver_id=f"racing({member_names})",
        seed=seed,
        shots=total_shots,
        kind=kinds.pop(),
        wall_time_s=time.perf_counter() - t0,
        metadata={"members": len(configs), "failures": failures},
    )


# ---------------------------------------------------------------------------
# SampleSet serialization
# ---------------------------------------------------------------------------


def _bit(v: int, kind: str) -> str:
    if kind == "spin":
        return "1" if v == 1 else "0"
    return "1" if v else "0"


def _unbit(ch: str, kind: str) -> int:
    if kind == "spin":
        return 1 if ch == "1" else -1
    return 1 if ch == "1" else 0


def _sampleset_obj(ss: SampleSet, with_wall_time: bool) -> dict:
    obj = {
        "solver_id": ss.solver_id,
        "seed": ss.seed,
        "shots": ss.shots,
        "kind": ss.kind,
    }
    if with_wall_time:
        obj["wall_time_s"] = ss.wall_time_s
    obj["records"] = [
        {
            "x": "".join(_bit(v, ss.kind) for v in rec.assignment),
            "energy": rec.energy,
            "occurrences": rec.occurrences,
        }
        for rec in ss.records
    ]
    return obj


def serialize_sampleset(ss: SampleSet) -> str:
    return json.dumps(_sampleset_obj(ss, with_wall_time=True), separators=(", ", ": ")) + "\n"


def canonical_sampleset_bytes(ss: SampleSet) -> bytes:
    """Byte form for determinism checks: wall time (measurement) excluded."""
    return json.dumps(_sampleset_obj(ss, with_wall_time=False), separators=(", ", ": ")).encode()


def parse_sampleset(text: str) -> SampleSet:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise ParseError("sample set file must contain a JSON object")
    for fieldname in ("solver_id", "seed", "shots", "records"):
        if fieldname not in obj:
            raise ParseError(f"missing field '{fieldname}'")
    kind = obj.get("kind", "binary")
    if kind not in ("binary", "spin"):
        raise ParseError(f"unknown assignment kind {kind!r}")
    try:
        records = tuple(
            SampleRecord(
                assignment=tuple(_unbit(c, kind) for c in rec["x"]),
                energy=float(rec["energy"]),
                occurrences=int(rec["occurrences"]),
            )
            for rec in obj["records"]
        )
        ss = SampleSet(
            records=records,
            solver_id=str(obj["solver_id"]),
            seed=int(obj["seed"]),
            shots=int(obj["shots"]),
            kind=kind,
            wall_time_s=float(obj.get("wall_time_s", 0.0)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed record: {exc}") from None
    if sum(r.occurrences for r in ss.records) != ss.shots:
        raise ParseError("occurrences do not sum to shots")
    return ss


def save_sampleset(ss: SampleSet, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_sampleset(ss))


def load_sampleset(path: str) -> SampleSet:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_sampleset(fh.read())
