"""Command-line front end.

Five subcommands: ``verify`` (the randomised relation gate, exit 1 on any
violation), ``profile`` (per-position predictability of one model),
``typology`` (the bundled verb-placement table), ``gen`` (model generators)
and ``sample`` (Monte Carlo draws).  All information values are nats in CSV
output; ``--bits`` converts printed summaries only.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .distributions import (
    HEAD,
    FactoredModel,
    HarmoniaError,
    ValidationError,
    VarSet,
    build_joint,
    check_factorization,
    dep_range,
)
from .estimation import next_element_score, sample
from .generators import (
    ModelSpec,
    copy_model,
    correlated_pair_counterexample,
    independent_model,
    random_model,
)
from .information import mutual_information, to_bits
from .modelio import load_any, load_model, save_joint, save_model
from .placement import Objective, Placement, optimal_head_position
from .sweep import (
    RunConfig,
    _row,
    checks_for_joint,
    run_sweep,
    theorem_battery,
    write_report,
    write_witnesses,
)
from .typology import load_typology, typology_report


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _fmt(value: float, bits: bool) -> str:
    if bits:
        return f"{value:.6f} nats ({to_bits(value):.6f} bits)"
    return f"{value:.6f} nats"


def _open_out(path: str | None):
    if path is None:
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    data: dict = {}
    if args.config:
        with open(args.config, "r", encoding="utf-8") as f:
            try:
                loaded = json.load(f)
            except json.JSONDecodeError as err:
                raise ValidationError(
                    f"{args.config}: not valid JSON (line {err.lineno}): {err.msg}"
                ) from None
        if not isinstance(loaded, dict):
            raise ValidationError(f"{args.config}: config must be a JSON object")
        data.update(loaded)
    overrides = {
        "tolerance": args.tol,
        "sweep_size": args.models,
        "n_values": args.n,
        "head_sizes": args.head_sizes,
        "dep_sizes": args.dep_sizes,
        "concentration": args.concentration,
        "seed": args.seed,
        "aggregate": args.aggregate,
        "out": args.out,
        "workers": args.workers,
    }
    for key, value in overrides.items():
        if value is not None:
            data[key] = value
    if args.no_timestamp:
        data["timestamp"] = False
    return RunConfig.from_dict(data)


def cmd_verify(args: argparse.Namespace) -> int:
    config = _config_from_args(args)

    if args.input:
        loaded = load_any(args.input)
        model_id = Path(args.input).stem
        if isinstance(loaded, FactoredModel):
            pairs = theorem_battery(loaded, tol=config.tolerance, aggregate=config.aggregate)
        else:
            pairs = checks_for_joint(loaded, config.tolerance)
        rows = [_row(model_id, theorem, check) for theorem, check in pairs]
        failures = [r for r in rows if not r.holds]
        out, close = _open_out(config.out)
        try:
            write_report(rows, out, timestamp=config.timestamp)
        finally:
            if close:
                out.close()
        print(
            f"checked 1 input ({model_id}): {len(rows)} relations, "
            f"{len(failures)} violation(s)",
            file=sys.stderr,
        )
        return 0 if not failures else 1

    result = run_sweep(config)
    out, close = _open_out(config.out)
    try:
        write_report(result.rows, out, timestamp=config.timestamp)
    finally:
        if close:
            out.close()
    if result.failures:
        directory = args.witness_dir or (str(Path(config.out).parent) if config.out else ".")
        written = write_witnesses(result, directory)
        print(
            f"FAIL: {len(result.failures)} of {len(result.rows)} relation checks "
            f"failed across {result.model_count} models; witnesses: "
            + ", ".join(str(p) for p in written),
            file=sys.stderr,
        )
        return 1
    print(
        f"OK: {result.model_count} models, {len(result.rows)} relation checks, "
        f"0 failures in {result.elapsed_seconds:.1f}s",
        file=sys.stderr,
    )
    return 0


# ---------------------------------------------------------------------------
# profile
# ---------------------------------------------------------------------------


def cmd_profile(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    objective = Objective(args.objective)
    result = optimal_head_position(
        model,
        objective,
        k=args.k,
        dependent_order=args.order or (),
        aggregate=args.aggregate or "min",
        tol=args.tol if args.tol is not None else 1e-9,
    )
    out, close = _open_out(args.out)
    try:
        out.write("head_position,k,measure,target,nats\n")
        for profile in result.profiles:
            pos = profile.placement.head_position
            for row in profile.rows:
                out.write(f"{pos},{row.k},remainder,,{row.remainder!r}\n")
                for variable, value in row.pending_elements:
                    out.write(f"{pos},{row.k},element,{variable.name},{value!r}\n")
    finally:
        if close:
            out.close()
    best = ", ".join(str(p) for p in result.best_positions)
    score = max(result.scores)
    print(
        f"objective {objective.value}: best head position(s) {best} "
        f"at {_fmt(score, args.bits)}",
        file=sys.stderr,
    )
    for position, value in enumerate(result.scores, start=1):
        print(f"  position {position}: {_fmt(value, args.bits)}", file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------
# typology
# ---------------------------------------------------------------------------


def cmd_typology(args: argparse.Namespace) -> int:
    rows = load_typology(args.data)
    report = typology_report(rows)
    out, close = _open_out(args.out)
    try:
        out.write(
            "source,unit,order_position,frequency,percentage,"
            "recomputed_percentage,consistent\n"
        )
        for group in report.groups:
            for row, recomputed, ok in zip(group.rows, group.recomputed, group.consistent):
                out.write(
                    f"{row.source},{row.unit},{row.order_position},{row.frequency},"
                    f"{row.percentage},{recomputed:.4f},{'true' if ok else 'false'}\n"
                )
    finally:
        if close:
            out.close()
    for group in report.groups:
        trend = "increasing" if group.counts_monotonic else "NOT increasing"
        print(
            f"{group.source}/{group.unit}: total {group.total}, "
            f"counts {'/'.join(str(r.frequency) for r in group.rows)} ({trend} with later head position)",
            file=sys.stderr,
        )
        for row, recomputed, ok in zip(group.rows, group.recomputed, group.consistent):
            flag = "" if ok else "  <- stored percentage disagrees with counts"
            print(
                f"  position {row.order_position}: {row.frequency} "
                f"({row.percentage}% stored, {recomputed:.2f}% recomputed){flag}",
                file=sys.stderr,
            )
    return 0


# ---------------------------------------------------------------------------
# gen
# ---------------------------------------------------------------------------


def _print_model_summary(model: FactoredModel, bits: bool) -> None:
    joint = build_joint(model)
    head = VarSet((HEAD,))
    for i in range(1, model.n + 1):
        value = mutual_information(joint, head, dep_range(i, i))
        print(f"I(head; dep{i}) = {_fmt(value, bits)}", file=sys.stderr)
    total = mutual_information(joint, head, dep_range(1, model.n))
    print(f"I(head; all dependents) = {_fmt(total, bits)}", file=sys.stderr)


def cmd_gen(args: argparse.Namespace) -> int:
    seed = args.seed if args.seed is not None else 0
    if args.kind == "copy":
        model = copy_model(n=args.n, size=args.size, noise=args.noise)
        meta = {"generator": "copy", "n": args.n, "size": args.size, "noise": args.noise}
    elif args.kind == "random":
        spec = ModelSpec(
            n=args.n,
            head_size=args.head_size,
            dep_sizes=args.dep_size,
            concentration=args.concentration if args.concentration is not None else 1.0,
            seed=seed,
            identical_channels=args.identical_channels,
        )
        model = random_model(spec)
        meta = {
            "generator": "random",
            "n": spec.n,
            "head_size": spec.head_size,
            "dep_sizes": list(spec.dep_sizes),
            "concentration": spec.concentration,
            "seed": spec.seed,
            "identical_channels": spec.identical_channels,
        }
    elif args.kind == "independent":
        model = independent_model(n=args.n, sizes=args.size)
        meta = {"generator": "independent", "n": args.n, "size": args.size}
    else:  # counterexample
        joint = correlated_pair_counterexample()
        report = check_factorization(joint)
        save_joint(
            joint,
            args.out,
            metadata={
                "generator": "counterexample",
                "factored": False,
                "factorization_max_violation": report.max_violation,
            },
        )
        head = VarSet((HEAD,))
        deps = dep_range(1, 2)
        print(f"wrote {args.out} (non-factored joint)", file=sys.stderr)
        print(
            f"I(head; dependents) = {_fmt(mutual_information(joint, head, deps), args.bits)}",
            file=sys.stderr,
        )
        print(
            "I(dep1; head+dep2) = "
            f"{_fmt(mutual_information(joint, dep_range(1, 1), head | dep_range(2, 2)), args.bits)}",
            file=sys.stderr,
        )
        print(f"max factorization violation = {report.max_violation:.6f}", file=sys.stderr)
        return 0
    save_model(model, args.out, metadata=meta)
    print(f"wrote {args.out}", file=sys.stderr)
    _print_model_summary(model, args.bits)
    return 0


# ---------------------------------------------------------------------------
# sample
# ---------------------------------------------------------------------------


def cmd_sample(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    placement = Placement(
        n=model.n,
        head_position=args.head_position if args.head_position is not None else 1,
        dependent_order=args.order or (),
    )
    seed = args.seed if args.seed is not None else 0
    samples = sample(model, placement, count=args.count, seed=seed)
    out, close = _open_out(args.out)
    try:
        samples.to_csv(out, labels=args.labels)
    finally:
        if close:
            out.close()
    if args.out:
        print(f"wrote {samples.count} rows to {args.out}", file=sys.stderr)
    if args.score_k is not None:
        score = next_element_score(model, placement, args.score_k, samples=samples)
        print(
            f"next element after k={args.score_k}: {score.target.name}; "
            f"exact Bayes accuracy {score.exact_bayes_accuracy:.4f}, "
            f"empirical-rule accuracy {score.empirical_accuracy:.4f}; "
            f"exact MI {_fmt(score.exact_mi, args.bits)}, "
            f"plug-in MI {_fmt(score.plug_in_mi, args.bits)}",
            file=sys.stderr,
        )
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="harmonia",
        description="Exact information-theoretic analysis of head placement.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="run the randomised relation checks")
    p_verify.add_argument("--config", help="JSON file with RunConfig fields")
    p_verify.add_argument("--models", type=int, default=None,
                          help="models per (n, head size, dep size) cell")
    p_verify.add_argument("--n", type=_int_list, default=None, help="comma-separated n values")
    p_verify.add_argument("--head-sizes", type=_int_list, default=None)
    p_verify.add_argument("--dep-sizes", type=_int_list, default=None)
    p_verify.add_argument("--concentration", type=float, default=None)
    p_verify.add_argument("--seed", type=int, default=None)
    p_verify.add_argument("--tol", type=float, default=None, help="tolerance in nats")
    p_verify.add_argument("--aggregate", choices=("min", "mean"), default=None)
    p_verify.add_argument("--out", default=None, help="report CSV path (default stdout)")
    p_verify.add_argument("--no-timestamp", action="store_true")
    p_verify.add_argument("--workers", type=int, default=None,
                          help="parallel workers (capped by HARMONIA_THREADS)")
    p_verify.add_argument("--input", default=None,
                          help="check one model/joint file instead of sweeping")
    p_verify.add_argument("--witness-dir", default=None)
    p_verify.set_defaults(func=cmd_verify)

    p_profile = sub.add_parser("profile", help="stage-by-stage predictability of a model")
    p_profile.add_argument("model")
    p_profile.add_argument("--objective", choices=[o.value for o in Objective],
                           default="head")
    p_profile.add_argument("--k", type=int, default=None, help="stage for the remainder objective")
    p_profile.add_argument("--order", type=_int_list, default=None)
    p_profile.add_argument("--aggregate", choices=("min", "mean"), default=None)
    p_profile.add_argument("--tol", type=float, default=None)
    p_profile.add_argument("--out", default=None)
    p_profile.add_argument("--bits", action="store_true", help="also print bits")
    p_profile.set_defaults(func=cmd_profile)

    p_typ = sub.add_parser("typology", help="verb-placement frequency table")
    p_typ.add_argument("data", nargs="?", default=None, help="CSV path (default: bundled)")
    p_typ.add_argument("--out", default=None)
    p_typ.set_defaults(func=cmd_typology)

    p_gen = sub.add_parser("gen", help="generate a model or counterexample file")
    gen_sub = p_gen.add_subparsers(dest="kind", required=True)
    g_copy = gen_sub.add_parser("copy", help="noisy-copy channels from a uniform head")
    g_copy.add_argument("--n", type=int, required=True)
    g_copy.add_argument("--size", type=int, default=2)
    g_copy.add_argument("--noise", type=float, default=0.0)
    g_random = gen_sub.add_parser("random", help="seeded Dirichlet tables")
    g_random.add_argument("--n", type=int, required=True)
    g_random.add_argument("--head-size", type=int, default=2)
    g_random.add_argument("--dep-size", type=int, default=2)
    g_random.add_argument("--concentration", type=float, default=None)
    g_random.add_argument("--seed", type=int, default=None)
    g_random.add_argument("--identical-channels", action="store_true")
    g_independent = gen_sub.add_parser("independent", help="no dependence anywhere")
    g_independent.add_argument("--n", type=int, required=True)
    g_independent.add_argument("--size", type=int, default=2)
    g_counter = gen_sub.add_parser(
        "counterexample", help="non-factored joint violating the remainder relations"
    )
    for g in (g_copy, g_random, g_independent, g_counter):
        g.add_argument("--out", required=True)
        g.add_argument("--bits", action="store_true")
        g.set_defaults(func=cmd_gen)
    g_copy.set_defaults(seed=None)
    g_independent.set_defaults(seed=None)
    g_counter.set_defaults(seed=None)

    p_sample = sub.add_parser("sample", help="draw i.i.d. sequences from a model")
    p_sample.add_argument("model")
    p_sample.add_argument("--count", type=int, required=True)
    p_sample.add_argument("--seed", type=int, default=None)
    p_sample.add_argument("--head-position", type=int, default=None)
    p_sample.add_argument("--order", type=_int_list, default=None)
    p_sample.add_argument("--out", default=None)
    p_sample.add_argument("--labels", action="store_true", help="write labels, not indices")
    p_sample.add_argument("--score-k", type=int, default=None,
                          help="also score next-element prediction at stage k")
    p_sample.add_argument("--bits", action="store_true")
    p_sample.set_defaults(func=cmd_sample)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except HarmoniaError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
