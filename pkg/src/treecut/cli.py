"""Command-line surface tying the pipeline together.

Every subcommand reads and writes the file formats defined by the
library modules, so runs are self-describing and reproducible from the
flags alone.  Exit codes: 0 success, 2 usage/parse error, 3 size limit,
4 embedding failure, 1 any other runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .bench import (
    default_experiment_spec,
    emit_report,
    load_experiment_spec,
    records_from_json,
    records_to_json,
    run_suite,
)
from .embedding import (
    chimera_graph,
    embed_ising,
    embedding_overhead,
    find_embedding,
    load_embedding,
    load_hardware_graph,
    save_embedding,
    unembed,
    uniform_torque_chain_strength,
)
from .errors import (
    EmbeddingError,
    ParameterError,
    ParseError,
    SizeLimitError,
    TreecutError,
)
from .instance import generate_tree_instance, load_instance, save_instance
from .qubo import (
    build_penalty_qubo,
    build_slack_qubo,
    default_penalties,
    load_qubo,
    save_qubo,
    to_ising,
)
from .solvers import (
    SampleRecord,
    SampleSet,
    SaSchedule,
    SolverConfig,
    exact_bruteforce,
    racing_solve,
    sampleset_as_binary,
    save_sampleset,
    simulated_annealing,
)

__all__ = ["entry", "main"]

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_SIZE = 3
EXIT_EMBED = 4


def _positive_float(text: str) -> float:
    value = float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _chain_strength(text: str):
    if text == "auto":
        return None
    try:
        return _positive_float(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected a number or 'auto'") from None


def _add_sa_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--shots", type=int, default=100, help="samples to draw")
    p.add_argument("--sweeps", type=int, default=200, help="sweeps per sample")
    p.add_argument(
        "--schedule", choices=("geometric", "linear"), default="geometric",
        help="inverse-temperature ladder shape",
    )
    p.add_argument("--beta-min", type=_positive_float, default=0.1)
    p.add_argument("--beta-max", type=_positive_float, default=10.0)


def _schedule_from(args) -> SaSchedule:
    return SaSchedule(
        kind=args.schedule,
        beta_min=args.beta_min,
        beta_max=args.beta_max,
        sweeps=args.sweeps,
    )


def _load_hardware(args):
    if args.hardware is not None:
        return load_hardware_graph(args.hardware)
    m, n, t = args.chimera
    return chimera_graph(m, n, t)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treecut",
        description="Vertex multicut on trees via QUBO/Ising sampling pipelines.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a random tree instance")
    p.add_argument("--n", type=int, required=True, help="number of vertices")
    p.add_argument("--k", type=int, required=True, help="number of terminal pairs")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True, help="instance file to write")

    p = sub.add_parser("build", help="build a QUBO from an instance")
    p.add_argument("instance", help="instance file")
    p.add_argument("--encoding", choices=("literal", "slack"), default="slack")
    p.add_argument("--m1", type=float, default=None, help="C1 penalty (default: derived)")
    p.add_argument("--m2", type=float, default=None, help="C2 penalty (default: derived)")
    p.add_argument("--fix-terminals", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--slack-sign", choices=("plus", "minus"), default="minus")
    p.add_argument("--output", required=True, help="QUBO file to write")
    p.add_argument("--labels", default=None, help="variable-label file to write")

    p = sub.add_parser("solve", help="sample or exactly minimize a QUBO")
    p.add_argument("qubo", help="QUBO file")
    p.add_argument("--solver", choices=("sa", "exact", "race"), default="sa")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--time-budget", type=_positive_float, default=10.0,
                   help="racing wall-clock budget in seconds")
    _add_sa_flags(p)
    p.add_argument("--output", required=True, help="sample-set file to write")

    p = sub.add_parser("embed", help="minor-embed a QUBO onto hardware")
    p.add_argument("qubo", help="QUBO file")
    p.add_argument("--chimera", type=int, nargs=3, metavar=("M", "N", "T"),
                   default=(4, 4, 4))
    p.add_argument("--hardware", default=None, help="hardware graph file (overrides --chimera)")
    p.add_argument("--tries", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True, help="embedding file to write")

    p = sub.add_parser(
        "pipeline", help="embed, sample on hardware model, unembed"
    )
    p.add_argument("qubo", help="QUBO file")
    p.add_argument("--chimera", type=int, nargs=3, metavar=("M", "N", "T"),
                   default=(4, 4, 4))
    p.add_argument("--hardware", default=None, help="hardware graph file (overrides --chimera)")
    p.add_argument("--embedding", default=None, help="reuse a saved embedding file")
    p.add_argument("--tries", type=int, default=10)
    p.add_argument("--chain-strength", type=_chain_strength, default=None,
                   help="coupling magnitude inside chains, or 'auto'")
    p.add_argument("--seed", type=int, default=0)
    _add_sa_flags(p)
    p.add_argument("--output", required=True, help="logical sample-set file to write")
    p.add_argument("--stats", default=None, help="chain-stats JSON file to write")

    p = sub.add_parser("bench", help="run a benchmark suite")
    p.add_argument("--spec", default=None, help="experiment spec file (default: built-in suite)")
    p.add_argument("--out-dir", default=".", help="report directory")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--plotdata", action="store_true", help="also write per-figure data files")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--prefix", default="bench")

    p = sub.add_parser("report", help="re-render saved benchmark records")
    p.add_argument("records", help="records JSON file (bench --format json output)")
    p.add_argument("--out-dir", default=".", help="report directory")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--plotdata", action="store_true")
    p.add_argument("--prefix", default="bench")

    return parser


def _cmd_gen(args) -> int:
    instance = generate_tree_instance(args.n, args.k, args.seed)
    save_instance(instance, args.output)
    print(f"wrote {args.output}: |V|={instance.num_vertices}, "
          f"|H|={len(instance.terminal_pairs)}, seed={args.seed}")
    return EXIT_OK


def _cmd_build(args) -> int:
    instance = load_instance(args.instance)
    m1, m2 = default_penalties(instance)
    if args.m1 is not None:
        m1 = args.m1
    if args.m2 is not None:
        m2 = args.m2
    if args.encoding == "slack":
        q = build_slack_qubo(
            instance, m1, m2,
            fix_terminals=args.fix_terminals,
            slack_sign=args.slack_sign,
        )
    else:
        q = build_penalty_qubo(instance, m1, m2, fix_terminals=args.fix_terminals)
    save_qubo(q, args.output, labels_path=args.labels)
    wrote = args.output if args.labels is None else f"{args.output} + {args.labels}"
    print(f"wrote {wrote}: {q.num_vars} variables, "
          f"{len(q.quadratic)} couplings (M1={m1}, M2={m2})")
    return EXIT_OK


def _cmd_solve(args) -> int:
    q = load_qubo(args.qubo)
    if args.solver == "exact":
        x, energy = exact_bruteforce(q)
        ss = SampleSet(
            records=(SampleRecord(assignment=tuple(int(v) for v in x),
                                  energy=float(energy), occurrences=1),),
            solver_id="exact",
            seed=args.seed,
            shots=1,
            kind="binary",
        )
    elif args.solver == "race":
        schedule = _schedule_from(args)
        configs = [
            SolverConfig(kind="sa", schedule=schedule, shots=args.shots),
            SolverConfig(
                kind="sa",
                schedule=SaSchedule(
                    kind="linear", beta_min=args.beta_min,
                    beta_max=args.beta_max, sweeps=args.sweeps,
                ),
                shots=args.shots,
            ),
        ]
        ss = racing_solve(q, configs, time_budget_s=args.time_budget, seed=args.seed)
    else:
        ss = simulated_annealing(q, _schedule_from(args), shots=args.shots, seed=args.seed)
    save_sampleset(ss, args.output)
    print(f"wrote {args.output}: best energy {ss.best_energy()!r} "
          f"({ss.shots} shots, solver {ss.solver_id})")
    return EXIT_OK


def _cmd_embed(args) -> int:
    q = load_qubo(args.qubo)
    hw = _load_hardware(args)
    ising = to_ising(q)
    emb = find_embedding(
        sorted(ising.J), hw,
        max_tries=args.tries, seed=args.seed, num_vars=q.num_vars,
    )
    if emb is None:
        raise EmbeddingError("embedding failed")
    save_embedding(emb, args.output)
    overhead = embedding_overhead(emb)
    max_chain = max(len(c) for c in emb.chains.values())
    print(f"wrote {args.output}: {emb.qubits_used()} qubits for "
          f"{emb.num_variables()} variables (overhead {overhead:.3f}, "
          f"longest chain {max_chain})")
    return EXIT_OK


def _cmd_pipeline(args) -> int:
    q = load_qubo(args.qubo)
    hw = _load_hardware(args)
    ising = to_ising(q)
    if args.embedding is not None:
        emb = load_embedding(args.embedding)
    else:
        emb = find_embedding(
            sorted(ising.J), hw,
            max_tries=args.tries, seed=args.seed, num_vars=q.num_vars,
        )
        if emb is None:
            raise EmbeddingError("embedding failed")
    strength = args.chain_strength
    if strength is None:
        strength = uniform_torque_chain_strength(ising)
    embedded = embed_ising(ising, emb, hw, chain_strength=strength)
    physical = simulated_annealing(
        embedded.model, _schedule_from(args), shots=args.shots, seed=args.seed
    )
    logical, stats = unembed(physical, embedded, ising)
    binary = sampleset_as_binary(logical)
    save_sampleset(binary, args.output)
    stats_obj = {
        "chain_strength": strength,
        "chain_max": stats.max_len,
        "chain_mean": stats.mean_len,
        "break_fraction": stats.break_fraction,
        "overhead_ratio": stats.overhead_ratio,
        "clamped_couplings": embedded.clamped_count,
    }
    if args.stats is not None:
        with open(args.stats, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(stats_obj, indent=2) + "\n")
    print(f"wrote {args.output}: best energy {binary.best_energy()!r}")
    print(json.dumps(stats_obj))
    return EXIT_OK


def _cmd_bench(args) -> int:
    spec = default_experiment_spec() if args.spec is None else load_experiment_spec(args.spec)
    records = run_suite(spec, workers=args.workers)
    paths = emit_report(
        records, args.out_dir, fmt=args.format,
        plotdata=args.plotdata, prefix=args.prefix,
    )
    # keep a JSON copy alongside CSV so `report` can re-render later
    if args.format == "csv":
        json_path = paths[0][: -len(".csv")] + ".json"
        with open(json_path, "w", encoding="utf-8") as fh:
            fh.write(records_to_json(records))
        paths.append(json_path)
    statuses = [r.status for r in records]
    print(f"{len(records)} rows ({statuses.count('ok')} ok, "
          f"{statuses.count('embed_failed')} embed_failed, "
          f"{sum(1 for s in statuses if s.startswith('failed:'))} failed)")
    for path in paths:
        print(f"wrote {path}")
    return EXIT_OK


def _cmd_report(args) -> int:
    with open(args.records, "r", encoding="utf-8") as fh:
        records = records_from_json(fh.read())
    paths = emit_report(
        records, args.out_dir, fmt=args.format,
        plotdata=args.plotdata, prefix=args.prefix,
    )
    for path in paths:
        print(f"wrote {path}")
    return EXIT_OK


_COMMANDS = {
    "gen": _cmd_gen,
    "build": _cmd_build,
    "solve": _cmd_solve,
    "embed": _cmd_embed,
    "pipeline": _cmd_pipeline,
    "bench": _cmd_bench,
    "report": _cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except SizeLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SIZE
    except EmbeddingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EMBED
    except (ParameterError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TreecutError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
