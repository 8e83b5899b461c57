"""Experimental protocol: instance suite, solver matrix, metrics, reports.

A suite cell is one generated instance; the harness crosses it with the
requested encodings, solvers, and repetition seeds, optionally pushing
each sampled model through the full hardware pipeline (embed → sample →
unembed).  Oversized cells fail honestly: the row stays in the report
with status ``embed_failed`` and no sampled metrics.

Wall-clock columns are measurements, not identity — determinism checks
go through :func:`canonical_csv_bytes`, which drops them.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .embedding import (
    chimera_graph,
    embed_ising,
    find_embedding,
    unembed,
    uniform_torque_chain_strength,
)
from .errors import ParameterError, ParseError, SearchBudgetError, SizeLimitError, TreecutError
from .instance import TreeInstance, generate_tree_instance
from .qubo import (
    Qubo,
    build_penalty_qubo,
    build_slack_qubo,
    check_feasibility,
    default_penalties,
    extract_cutset,
    to_ising,
)
from .solvers import (
    SampleSet,
    SaSchedule,
    SolverConfig,
    exact_bruteforce,
    exact_multicut_bnb,
    sampleset_as_binary,
    simulated_annealing,
)

__all__ = [
    "DEFAULT_SUITE",
    "CSV_COLUMNS",
    "TIMING_COLUMNS",
    "ExperimentSpec",
    "MetricsRecord",
    "default_experiment_spec",
    "validate_experiment_spec",
    "serialize_experiment_spec",
    "parse_experiment_spec",
    "save_experiment_spec",
    "load_experiment_spec",
    "optimality_gap",
    "feasibility_rate",
    "spearman",
    "run_suite",
    "records_to_csv",
    "records_to_json",
    "records_from_json",
    "canonical_csv_bytes",
    "strip_timing_columns",
    "emit_report",
]

# nine sizes interpolated geometrically from (24, 3) to (450, 100)
DEFAULT_SUITE = (
    (24, 3),
    (35, 5),
    (50, 7),
    (72, 11),
    (104, 17),
    (150, 27),
    (216, 42),
    (312, 65),
    (450, 100),
)

CSV_COLUMNS = (
    "instance_id",
    "V",
    "H",
    "encoding",
    "solver",
    "seed",
    "best_energy",
    "cutset_size",
    "feasible",
    "gap_percent",
    "build_s",
    "embed_s",
    "sample_s",
    "unembed_s",
    "chain_max",
    "chain_mean",
    "break_fraction",
    "overhead_ratio",
    "status",
)

TIMING_COLUMNS = ("build_s", "embed_s", "sample_s", "unembed_s")

ENCODINGS = ("literal", "slack")


@dataclass(frozen=True)
class ExperimentSpec:
    """Full description of one benchmark run.

    ``suite`` holds (num_vertices, num_pairs, seed) triples.  With
    ``pipeline`` enabled every SA solve goes through minor embedding
    onto the ``chimera`` target; ``chain_strength`` ``None`` means the
    uniform-torque value computed per model.  ``node_budget`` caps the
    exact oracle: cells whose branch-and-bound run would exceed it
    simply carry no optimality gap.
    """

    suite: tuple[tuple[int, int, int], ...]
    encodings: tuple[str, ...] = ENCODINGS
    solvers: tuple[SolverConfig, ...] = (SolverConfig(kind="sa"),)
    repetitions: int = 1
    pipeline: bool = True
    chimera: tuple[int, int, int] = (4, 4, 4)
    chain_strength: float | None = None
    embed_tries: int = 3
    node_budget: int = 10**7
    fix_terminals: bool = True
    slack_sign: str = "minus"


@dataclass(frozen=True)
class MetricsRecord:
    """One report row; field order matches the CSV column order."""

    instance_id: str
    V: int
    H: int
    encoding: str
    solver: str
    seed: int
    best_energy: float | None
    cutset_size: int | None
    feasible: bool | None
    gap_percent: float | None
    build_s: float
    embed_s: float
    sample_s: float
    unembed_s: float
    chain_max: int | None
    chain_mean: float | None
    break_fraction: float | None
    overhead_ratio: float | None
    status: str
    # not a CSV column; kept for plot-data (physical = overhead x logical)
    logical_vars: int | None = None


def default_experiment_spec() -> ExperimentSpec:
    """Nine instances of increasing size, both encodings, one SA solver."""
    suite = tuple((v, h, i + 1) for i, (v, h) in enumerate(DEFAULT_SUITE))
    return ExperimentSpec(suite=suite)


def validate_experiment_spec(spec: ExperimentSpec) -> list[str]:
    """Return field diagnostics; an empty list means the spec is usable."""
    problems: list[str] = []
    if not spec.suite:
        problems.append("suite: must be a non-empty list")
    for i, cell in enumerate(spec.suite):
        if len(cell) != 3:
            problems.append(f"suite[{i}]: expected (V, H, seed)")
            continue
        v, h, _ = cell
        if v < 3:
            problems.append(f"suite[{i}]: n must be ≥ 3")
        if h < 1:
            problems.append(f"suite[{i}]: k must be ≥ 1")
    if not spec.encodings:
        problems.append("encodings: must be non-empty")
    for enc in spec.encodings:
        if enc not in ENCODINGS:
            problems.append(f"encodings: unknown encoding {enc!r}")
    if not spec.solvers:
        problems.append("solvers: must be non-empty")
    for i, cfg in enumerate(spec.solvers):
        if cfg.kind not in ("sa", "exact"):
            problems.append(f"solvers[{i}].kind: unknown kind {cfg.kind!r}")
        if cfg.shots < 1:
            problems.append(f"solvers[{i}].shots: must be ≥ 1")
        if cfg.schedule.kind not in ("geometric", "linear"):
            problems.append(f"solvers[{i}].schedule.kind: unknown kind {cfg.schedule.kind!r}")
    if spec.repetitions < 1:
        problems.append("repetitions: must be ≥ 1")
    if len(spec.chimera) != 3 or any(d < 1 for d in spec.chimera):
        problems.append("chimera: expected three positive dimensions")
    if spec.chain_strength is not None and spec.chain_strength <= 0:
        problems.append("chain_strength: must be positive or auto")
    if spec.embed_tries < 1:
        problems.append("embed_tries: must be ≥ 1")
    if spec.node_budget < 0:
        problems.append("node_budget: must be ≥ 0")
    if spec.slack_sign not in ("minus", "plus"):
        problems.append(f"slack_sign: unknown value {spec.slack_sign!r}")
    return problems


# ---------------------------------------------------------------------------
# spec files
# ---------------------------------------------------------------------------


def serialize_experiment_spec(spec: ExperimentSpec) -> str:
    obj = {
        "suite": [list(cell) for cell in spec.suite],
        "encodings": list(spec.encodings),
        "solvers": [
            {
                "kind": cfg.kind,
                "schedule": {
                    "kind": cfg.schedule.kind,
                    "beta_min": cfg.schedule.beta_min,
                    "beta_max": cfg.schedule.beta_max,
                    "sweeps": cfg.schedule.sweeps,
                },
                "shots": cfg.shots,
            }
            for cfg in spec.solvers
        ],
        "repetitions": spec.repetitions,
        "pipeline": spec.pipeline,
        "chimera": list(spec.chimera),
        "chain_strength": "auto" if spec.chain_strength is None else spec.chain_strength,
        "embed_tries": spec.embed_tries,
        "node_budget": spec.node_budget,
        "fix_terminals": spec.fix_terminals,
        "slack_sign": spec.slack_sign,
    }
    return json.dumps(obj, indent=2) + "\n"


def _parse_solver_entry(obj, problems: list[str], where: str) -> SolverConfig:
    if not isinstance(obj, dict):
        problems.append(f"{where}: expected an object")
        return SolverConfig()
    sched_obj = obj.get("schedule", {})
    if not isinstance(sched_obj, dict):
        problems.append(f"{where}.schedule: expected an object")
        sched_obj = {}
    defaults = SaSchedule()
    try:
        schedule = SaSchedule(
            kind=str(sched_obj.get("kind", defaults.kind)),
            beta_min=float(sched_obj.get("beta_min", defaults.beta_min)),
            beta_max=float(sched_obj.get("beta_max", defaults.beta_max)),
            sweeps=int(sched_obj.get("sweeps", defaults.sweeps)),
        )
    except (TypeError, ValueError):
        problems.append(f"{where}.schedule: malformed fields")
        schedule = defaults
    try:
        return SolverConfig(
            kind=str(obj.get("kind", "sa")),
            schedule=schedule,
            shots=int(obj.get("shots", 100)),
        )
    except (TypeError, ValueError):
        problems.append(f"{where}: malformed fields")
        return SolverConfig()


def parse_experiment_spec(text: str) -> ExperimentSpec:
    """Parse a spec file, collecting every field problem before failing."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise ParseError("spec file must contain a JSON object")
    problems: list[str] = []
    defaults = default_experiment_spec()

    suite: list[tuple[int, int, int]] = []
    raw_suite = obj.get("suite")
    if raw_suite is None:
        suite = list(defaults.suite)
    elif not isinstance(raw_suite, list):
        problems.append("suite: expected a list of [V, H, seed]")
    else:
        for i, cell in enumerate(raw_suite):
            try:
                v, h, s = (int(x) for x in cell)
                suite.append((v, h, s))
            except (TypeError, ValueError):
                problems.append(f"suite[{i}]: expected [V, H, seed] integers")

    encodings = obj.get("encodings", list(ENCODINGS))
    if not isinstance(encodings, list) or not all(isinstance(e, str) for e in encodings):
        problems.append("encodings: expected a list of strings")
        encodings = list(ENCODINGS)

    raw_solvers = obj.get("solvers")
    if raw_solvers is None:
        solvers = list(defaults.solvers)
    elif not isinstance(raw_solvers, list):
        problems.append("solvers: expected a list")
        solvers = list(defaults.solvers)
    else:
        solvers = [
            _parse_solver_entry(entry, problems, f"solvers[{i}]")
            for i, entry in enumerate(raw_solvers)
        ]

    chain_strength = obj.get("chain_strength", "auto")
    if chain_strength == "auto":
        chain_strength = None
    elif not isinstance(chain_strength, (int, float)):
        problems.append("chain_strength: expected a number or \"auto\"")
        chain_strength = None

    def _int_field(name: str, fallback: int) -> int:
        val = obj.get(name, fallback)
        if not isinstance(val, int) or isinstance(val, bool):
            problems.append(f"{name}: expected an integer")
            return fallback
        return val

    def _bool_field(name: str, fallback: bool) -> bool:
        val = obj.get(name, fallback)
        if not isinstance(val, bool):
            problems.append(f"{name}: expected a boolean")
            return fallback
        return val

    chimera = obj.get("chimera", [4, 4, 4])
    try:
        chimera = tuple(int(d) for d in chimera)
    except (TypeError, ValueError):
        problems.append("chimera: expected [m, n, t]")
        chimera = (4, 4, 4)

    spec = ExperimentSpec(
        suite=tuple(suite),
        encodings=tuple(encodings),
        solvers=tuple(solvers),
        repetitions=_int_field("repetitions", 1),
        pipeline=_bool_field("pipeline", True),
        chimera=chimera,
        chain_strength=None if chain_strength is None else float(chain_strength),
        embed_tries=_int_field("embed_tries", 3),
        node_budget=_int_field("node_budget", 10**7),
        fix_terminals=_bool_field("fix_terminals", True),
        slack_sign=str(obj.get("slack_sign", "minus")),
    )
    problems.extend(validate_experiment_spec(spec))
    if problems:
        raise ParseError("spec field errors: " + "; ".join(problems))
    return spec


def save_experiment_spec(spec: ExperimentSpec, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_experiment_spec(spec))


def load_experiment_spec(path: str) -> ExperimentSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_experiment_spec(fh.read())


# ---------------------------------------------------------------------------
# metrics
# ---------------------------------------------------------------------------


def optimality_gap(found_cost: float, optimal_cost: float) -> float:
    """(found − optimal) / optimal × 100."""
    if optimal_cost <= 0:
        raise ParameterError("optimal cost must be positive")
    return 100.0 * (found_cost - optimal_cost) / optimal_cost


def feasibility_rate(samples: SampleSet, instance: TreeInstance, q: Qubo) -> float:
    """Occurrence-weighted fraction of records whose cutset is feasible."""
    binary = sampleset_as_binary(samples)
    good = 0
    for rec in binary.records:
        cut = extract_cutset(q, rec.assignment)
        if check_feasibility(instance, cut).ok:
            good += rec.occurrences
    return good / binary.shots


def _average_ranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=np.float64)
    sorted_vals = values[order]
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def spearman(x, y) -> float:
    """Rank correlation with average ranks on ties; NaN if either side is constant."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ParameterError("spearman expects two equally long vectors")
    if len(x) < 2:
        raise ParameterError("spearman needs at least two points")
    rx = _average_ranks(x) - (len(x) + 1) / 2.0
    ry = _average_ranks(y) - (len(y) + 1) / 2.0
    denom = math.sqrt(float((rx**2).sum()) * float((ry**2).sum()))
    if denom == 0.0:
        return math.nan
    return float((rx * ry).sum() / denom)


# ---------------------------------------------------------------------------
# suite execution
# ---------------------------------------------------------------------------


def _greedy_clique_lower_bound(q: Qubo) -> int:
    """Any clique the greedy finds is a valid lower bound on the max clique."""
    adj: dict[int, set[int]] = {}
    for (i, j), w in q.quadratic.items():
        if w == 0.0:
            continue
        adj.setdefault(i, set()).add(j)
        adj.setdefault(j, set()).add(i)
    if not adj:
        return 1 if q.num_vars else 0
    by_degree = sorted(adj, key=lambda v: (-len(adj[v]), v))
    best = 1
    for start in by_degree[:40]:
        clique = {start}
        for u in by_degree:
            if u not in clique and all(u in adj[c] for c in clique):
                clique.add(u)
        best = max(best, len(clique))
    return best


def _chimera_clique_capacity(m: int, n: int, t: int) -> int:
    """Largest complete graph that fits this chimera as a minor."""
    return t * min(m, n) + 1


def _build_cell_qubo(instance: TreeInstance, encoding: str, spec: ExperimentSpec) -> Qubo:
    m1, m2 = default_penalties(instance)
    if encoding == "slack":
        return build_slack_qubo(
            instance,
            m1,
            m2,
            fix_terminals=spec.fix_terminals,
            slack_sign=spec.slack_sign,
        )
    return build_penalty_qubo(instance, m1, m2, fix_terminals=spec.fix_terminals)


def _cut_columns(
    instance: TreeInstance, q: Qubo, binary: SampleSet, optimum: int | None
) -> tuple[float, int, bool, float | None]:
    """(best_energy, cutset_size, feasible, gap) from a binary sample set."""
    best = binary.best()
    best_cut = extract_cutset(q, best.assignment)
    feasible = check_feasibility(instance, best_cut).ok
    gap: float | None = None
    if optimum is not None:
        best_feasible: int | None = None
        for rec in binary.records:
            cut = extract_cutset(q, rec.assignment)
            if check_feasibility(instance, cut).ok:
                size = len(cut)
                if best_feasible is None or size < best_feasible:
                    best_feasible = size
        if best_feasible is not None:
            gap = optimality_gap(best_feasible, optimum)
    return best.energy, len(best_cut), feasible, gap


def _run_cell(
    spec: ExperimentSpec,
    cell: tuple[int, int, int],
    hw,
    capacity: int,
    use_numba: bool | None,
) -> list[MetricsRecord]:
    num_vertices, num_pairs, cell_seed = cell
    instance_id = f"v{num_vertices}-h{num_pairs}-s{cell_seed}"
    records: list[MetricsRecord] = []

    t0 = time.perf_counter()
    instance = generate_tree_instance(num_vertices, num_pairs, cell_seed)
    gen_s = time.perf_counter() - t0

    optimum: int | None = None
    if spec.node_budget > 0:
        try:
            optimum = len(exact_multicut_bnb(instance, node_limit=spec.node_budget))
        except SearchBudgetError:
            optimum = None

    for enc_i, encoding in enumerate(spec.encodings):
        t0 = time.perf_counter()
        q = _build_cell_qubo(instance, encoding, spec)
        build_s = gen_s + (time.perf_counter() - t0)
        for sol_i, cfg in enumerate(spec.solvers):
            solver_name = cfg.name(sol_i)
            for rep in range(spec.repetitions):
                rep_seed = int(
                    np.random.SeedSequence(
                        entropy=(cell_seed, enc_i, sol_i, rep)
                    ).generate_state(1)[0]
                )
                base = dict(
                    instance_id=instance_id,
                    V=num_vertices,
                    H=num_pairs,
                    encoding=encoding,
                    solver=solver_name,
                    seed=rep_seed,
                    best_energy=None,
                    cutset_size=None,
                    feasible=None,
                    gap_percent=None,
                    build_s=build_s,
                    embed_s=0.0,
                    sample_s=0.0,
                    unembed_s=0.0,
                    chain_max=None,
                    chain_mean=None,
                    break_fraction=None,
                    overhead_ratio=None,
                    status="ok",
                    logical_vars=q.num_vars,
                )
                try:
                    records.append(
                        _run_solve(
                            spec, instance, q, cfg, rep_seed, optimum,
                            hw, capacity, use_numba, base,
                        )
                    )
                except TreecutError as exc:
                    base["status"] = f"failed:{type(exc).__name__}"
                    records.append(MetricsRecord(**base))
    return records


def _run_solve(
    spec: ExperimentSpec,
    instance: TreeInstance,
    q: Qubo,
    cfg: SolverConfig,
    rep_seed: int,
    optimum: int | None,
    hw,
    capacity: int,
    use_numba: bool | None,
    base: dict,
) -> MetricsRecord:
    if cfg.kind == "exact":
        t0 = time.perf_counter()
        x, energy = exact_bruteforce(q, use_numba=use_numba)
        base["sample_s"] = time.perf_counter() - t0
        cut = extract_cutset(q, x)
        base["best_energy"] = float(energy)
        base["cutset_size"] = len(cut)
        base["feasible"] = check_feasibility(instance, cut).ok
        if optimum is not None and base["feasible"]:
            base["gap_percent"] = optimality_gap(len(cut), optimum)
        return MetricsRecord(**base)

    if spec.pipeline:
        t0 = time.perf_counter()
        ising = to_ising(q)
        logical_edges = sorted(ising.J)
        emb = None
        if q.num_vars <= hw.num_qubits and _greedy_clique_lower_bound(q) <= capacity:
            emb = find_embedding(
                logical_edges,
                hw,
                max_tries=spec.embed_tries,
                seed=rep_seed,
                num_vars=q.num_vars,
                use_numba=use_numba,
            )
        if emb is None:
            base["embed_s"] = time.perf_counter() - t0
            base["status"] = "embed_failed"
            return MetricsRecord(**base)
        strength = spec.chain_strength
        if strength is None:
            strength = uniform_torque_chain_strength(ising)
        embedded = embed_ising(ising, emb, hw, chain_strength=strength)
        base["embed_s"] = time.perf_counter() - t0

        t0 = time.perf_counter()
        physical = simulated_annealing(
            embedded.model, cfg.schedule, shots=cfg.shots, seed=rep_seed, use_numba=use_numba
        )
        base["sample_s"] = time.perf_counter() - t0

        t0 = time.perf_counter()
        logical_ss, stats = unembed(physical, embedded, ising)
        binary = sampleset_as_binary(logical_ss)
        base["unembed_s"] = time.perf_counter() - t0
        base["chain_max"] = stats.max_len
        base["chain_mean"] = stats.mean_len
        base["break_fraction"] = stats.break_fraction
        base["overhead_ratio"] = stats.overhead_ratio
    else:
        t0 = time.perf_counter()
        binary = simulated_annealing(
            q, cfg.schedule, shots=cfg.shots, seed=rep_seed, use_numba=use_numba
        )
        base["sample_s"] = time.perf_counter() - t0

    energy, size, feasible, gap = _cut_columns(instance, q, binary, optimum)
    base["best_energy"] = energy
    base["cutset_size"] = size
    base["feasible"] = feasible
    base["gap_percent"] = gap
    return MetricsRecord(**base)


def run_suite(
    spec: ExperimentSpec, use_numba: bool | None = None, workers: int = 1
) -> list[MetricsRecord]:
    """Execute the full cross-product; rows come back in canonical order.

    Canonical order is (suite position, encoding position, solver
    position, repetition) regardless of ``workers``, so parallel runs
    produce the same records as sequential ones (wall-times aside).
    """
    problems = validate_experiment_spec(spec)
    if problems:
        raise ParameterError("invalid experiment spec: " + "; ".join(problems))
    m, n, t = spec.chimera
    hw = chimera_graph(m, n, t)
    capacity = _chimera_clique_capacity(m, n, t)
    if workers < 1:
        raise ParameterError("workers must be ≥ 1")
    if workers == 1:
        per_cell = [_run_cell(spec, cell, hw, capacity, use_numba) for cell in spec.suite]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_run_cell, spec, cell, hw, capacity, use_numba)
                for cell in spec.suite
            ]
            per_cell = [f.result() for f in futures]
    return [rec for cell_rows in per_cell for rec in cell_rows]


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def records_to_csv(records, columns=CSV_COLUMNS) -> str:
    lines = [",".join(columns)]
    for rec in records:
        row = asdict(rec)
        lines.append(",".join(_format_cell(row[c]) for c in columns))
    return "\n".join(lines) + "\n"


def records_to_json(records) -> str:
    return json.dumps([asdict(rec) for rec in records], indent=2) + "\n"


def records_from_json(text: str) -> list[MetricsRecord]:
    """Inverse of :func:`records_to_json` (accepts missing optional fields)."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(data, list):
        raise ParseError("records file must contain a JSON list")
    records = []
    for i, row in enumerate(data):
        if not isinstance(row, dict):
            raise ParseError(f"records[{i}]: expected an object")
        unknown = set(row) - set(MetricsRecord.__dataclass_fields__)
        if unknown:
            raise ParseError(f"records[{i}]: unknown fields {sorted(unknown)}")
        try:
            records.append(MetricsRecord(**row))
        except TypeError as exc:
            raise ParseError(f"records[{i}]: {exc}") from None
    return records


def canonical_csv_bytes(records) -> bytes:
    """Report bytes with the wall-time columns dropped (determinism checks)."""
    columns = tuple(c for c in CSV_COLUMNS if c not in TIMING_COLUMNS)
    return records_to_csv(records, columns=columns).encode("utf-8")


def strip_timing_columns(csv_text: str) -> str:
    """Drop the wall-time columns from rendered CSV text by header name."""
    lines = csv_text.splitlines()
    if not lines:
        raise ParameterError("empty CSV")
    header = lines[0].split(",")
    keep = [i for i, name in enumerate(header) if name not in TIMING_COLUMNS]
    out = []
    for line in lines:
        parts = line.split(",")
        if len(parts) != len(header):
            raise ParameterError("CSV row width does not match header")
        out.append(",".join(parts[i] for i in keep))
    return "\n".join(out) + "\n"


def emit_report(
    records,
    out_dir: str,
    fmt: str = "csv",
    plotdata: bool = False,
    prefix: str = "bench",
) -> list[str]:
    """Write the report (and optional plot-data files); returns the paths."""
    if not records:
        raise ParameterError("no records to report")
    if fmt not in ("csv", "json"):
        raise ParameterError(f"unknown report format {fmt!r}")
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    main_path = os.path.join(out_dir, f"{prefix}.{fmt}")
    text = records_to_csv(records) if fmt == "csv" else records_to_json(records)
    with open(main_path, "w", encoding="utf-8") as fh:
        fh.write(text)
    paths.append(main_path)
    if not plotdata:
        return paths

    def write_plot(name: str, header: str, rows: list[str]) -> None:
        path = os.path.join(out_dir, f"{prefix}_{name}.csv")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(header + "\n")
            for row in rows:
                fh.write(row + "\n")
        paths.append(path)

    write_plot(
        "energy",
        "instance_id,V,encoding,solver,best_energy",
        [
            f"{r.instance_id},{r.V},{r.encoding},{r.solver},{_format_cell(r.best_energy)}"
            for r in records
            if r.best_energy is not None
        ],
    )
    write_plot(
        "cutset",
        "instance_id,V,encoding,solver,cutset_size,feasible",
        [
            f"{r.instance_id},{r.V},{r.encoding},{r.solver},{r.cutset_size},"
            f"{_format_cell(r.feasible)}"
            for r in records
            if r.cutset_size is not None
        ],
    )
    # overhead: one row per logical size, physical qubit count averaged
    by_size: dict[int, list[float]] = {}
    for r in records:
        if r.overhead_ratio is None or r.logical_vars is None:
            continue
        by_size.setdefault(r.logical_vars, []).append(r.overhead_ratio * r.logical_vars)
    overhead_rows = [
        f"{size},{_format_cell(float(np.mean(by_size[size])))}"
        for size in sorted(by_size)
    ]
    write_plot("overhead", "logical_vars,physical_qubits", overhead_rows)
    write_plot(
        "runtime",
        "instance_id,encoding,solver,build_s,embed_s,sample_s,unembed_s,status",
        [
            f"{r.instance_id},{r.encoding},{r.solver},{_format_cell(r.build_s)},"
            f"{_format_cell(r.embed_s)},{_format_cell(r.sample_s)},"
            f"{_format_cell(r.unembed_s)},{r.status}"
            for r in records
        ],
    )
    return paths
