"""Command-line interface.

Subcommands: fit, predict, evaluate, curve, stats, synth, summarize,
export-milp, folds, convert.  Machine output is a single JSON document on
stdout (``--json``); errors are one-line diagnostics on stderr with stable
codes.  Exit status: 0 success, 1 validation/domain error, 2 usage error.

All randomness is seeded (default seed 42, echoed in every JSON output).
The only environment variable consulted is CUBEREC_LOG (log verbosity).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from fractions import Fraction

from . import evaluation
from .core import RatingScale, UserModel, Variant, as_fraction
from .data import (Dataset, SyntheticConfig, convert_csv_pair, dataset_to_dict,
                   generate_synthetic, load_dataset, load_predictions,
                   summarize, render_summary, to_fit_instance, write_dataset,
                   write_predictions)
from .errors import ValidationError
from .evaluation import (compare_methods, load_fold_plan, make_folds, predict,
                         run_cross_validation, run_training_curve,
                         write_curve_csv, write_fold_plan)
from .milp import export_milp
from .solver import Budget, solve

log = logging.getLogger("cuberec")

VARIANT_TOKENS = {"algo1": Variant.BINARY, "algo2": Variant.TERNARY}


def _emit_json(doc: dict) -> None:
    sys.stdout.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _parse_scale(text: str) -> RatingScale:
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValidationError("scale range must look like lo:hi:step")
        return RatingScale.from_range(*parts)
    return RatingScale(tuple(as_fraction(p.strip()) for p in text.split(",")))


def _resolve_budget(args, n: int) -> Budget | None:
    """Explicit budget flags, or the scale-dependent default wall clock."""
    ms = getattr(args, "time_budget_ms", None)
    iters = getattr(args, "iter_budget", None)
    if ms is None and iters is None:
        if getattr(args, "solver", "bnb") == "exact":
            return None
        default_ms = 1000.0 if n <= 200 else 2000.0
        return Budget(seconds=default_ms / 1000.0)
    return Budget(seconds=None if ms is None else ms / 1000.0, iterations=iters)


def _budget_echo(budget: Budget | None):
    if budget is None:
        return None
    return {"seconds": budget.seconds, "iterations": budget.iterations}


def _model_doc(dataset_user, result, solver_name, seed, budget) -> dict:
    return {
        "command": "fit",
        "user_id": dataset_user,
        "variant": str(result.model.variant),
        "n": result.model.n,
        "coords": list(result.model.coords),
        "objective": str(result.objective),
        "objective_float": float(result.objective),
        "status": str(result.status),
        "nodes_or_iters": result.nodes_or_iters,
        "solver": solver_name,
        "budget": _budget_echo(budget),
        "seed": seed,
    }


def _load_model_doc(path) -> UserModel:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    try:
        variant = Variant(doc["variant"])
        coords = tuple(int(c) for c in doc["coords"])
    except (KeyError, ValueError) as exc:
        raise ValidationError(f"bad model file {path}: {exc}") from exc
    return UserModel(variant, coords)


# ------------------------------------------------------------ subcommands

def _cmd_fit(args) -> int:
    dataset = load_dataset(args.data, keep_empty_attributes=args.keep_empty_attributes)
    inst = to_fit_instance(dataset)
    budget = _resolve_budget(args, dataset.space.n)
    result = solve(inst, VARIANT_TOKENS[args.variant], solver=args.solver,
                   budget=budget, seed=args.seed)
    doc = _model_doc(dataset.user_id, result, args.solver, args.seed, budget)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
    if args.json:
        _emit_json(doc)
    else:
        print(f"variant: {doc['variant']}   status: {doc['status']}   "
              f"seed: {args.seed}")
        print(f"objective: {doc['objective']} ({doc['objective_float']:.4f})")
        print(f"coords: {''.join(str(c) if c >= 0 else 'm' for c in doc['coords'])}")
    return 0


def _cmd_predict(args) -> int:
    dataset = load_dataset(args.data, keep_empty_attributes=args.keep_empty_attributes)
    model = _load_model_doc(args.model)
    by_id = dataset.items_by_id
    if args.items:
        wanted = [i.strip() for i in args.items.split(",") if i.strip()]
        for item_id in wanted:
            if item_id not in by_id:
                raise ValidationError(f"unknown item {item_id!r}")
    else:
        wanted = [item.id for item in dataset.items]
    rows = []
    for item_id in wanted:
        level = predict(model, by_id[item_id], dataset.space)
        raw = dataset.space.scale.raw_levels[level - 1]
        rows.append({"item_id": item_id, "level": level, "raw": float(raw)})
    doc = {"command": "predict", "user_id": dataset.user_id,
           "seed": args.seed, "predictions": rows}
    if args.json:
        _emit_json(doc)
    else:
        for row in rows:
            print(f"{row['item_id']}\t{row['level']}\t{row['raw']}")
    return 0


def _cmd_evaluate(args) -> int:
    dataset = load_dataset(args.data, keep_empty_attributes=args.keep_empty_attributes)
    budget = _resolve_budget(args, dataset.space.n)
    predictions = None
    if args.method == "baseline-file":
        if not args.predictions:
            raise ValidationError("--predictions is required with baseline-file")
        predictions = load_predictions(args.predictions, dataset.space.scale)
    fold_plan = load_fold_plan(args.fold_plan) if args.fold_plan else None
    report = run_cross_validation(
        dataset, args.method, solver=args.solver, budget=budget, k=args.k,
        seed=args.seed, strategy=args.fold_strategy, predictions=predictions,
        fold_plan=fold_plan, workers=args.workers)
    if args.export_fold_plan:
        plan = fold_plan if fold_plan is not None else make_folds(
            dataset, args.k, args.seed, args.fold_strategy)
        write_fold_plan(plan, args.export_fold_plan)
    if args.write_predictions:
        write_predictions(args.write_predictions, report.prediction_rows)
    if args.json:
        doc = report.to_dict()
        doc["command"] = "evaluate"
        _emit_json(doc)
    else:
        print(report.render_text())
    return 0


def _cmd_curve(args) -> int:
    dataset = load_dataset(args.data, keep_empty_attributes=args.keep_empty_attributes)
    budget = _resolve_budget(args, dataset.space.n)
    ells = None
    if args.ells:
        ells = tuple(int(e) for e in args.ells.split(","))
    report = run_training_curve(
        dataset, args.method, ells=ells, lmax=args.lmax, solver=args.solver,
        budget=budget, k=args.k, seed=args.seed, strategy=args.fold_strategy,
        nested=not args.independent_subsets, workers=args.workers)
    if args.csv:
        write_curve_csv(report, args.csv)
    if args.json:
        doc = report.to_dict()
        doc["command"] = "curve"
        _emit_json(doc)
    else:
        print(report.render_text())
    return 0


def _collect_errors(report_paths, values) -> list:
    errors = []
    for path in report_paths or []:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        if "per_fold_errors_exact" in doc:
            errors.extend(Fraction(e) for e in doc["per_fold_errors_exact"])
        elif "per_fold_errors" in doc:
            errors.extend(as_fraction(e) for e in doc["per_fold_errors"])
        else:
            raise ValidationError(f"{path} does not look like an evaluate report")
    if values:
        errors.extend(as_fraction(v.strip()) for v in values.split(","))
    if not errors:
        raise ValidationError("no error samples given (use --report-* or --values-*)")
    return errors


def _cmd_stats(args) -> int:
    sample_a = _collect_errors(args.report_a, args.values_a)
    sample_b = _collect_errors(args.report_b, args.values_b)
    result = compare_methods(sample_a, sample_b, alpha=args.alpha)
    if args.json:
        doc = result.to_dict()
        doc["command"] = "stats"
        doc["seed"] = args.seed
        _emit_json(doc)
    else:
        print(result.render_text())
    return 0


def _cmd_synth(args) -> int:
    scale = _parse_scale(args.scale) if args.scale else None
    config = SyntheticConfig(
        n=args.n, s=args.s if scale is None else scale.s,
        item_count=args.items, variant=Variant(args.variant), mode=args.mode,
        noise=args.noise, seed=args.seed, scale=scale)
    dataset, planted = generate_synthetic(config)
    write_dataset(dataset, args.output)
    if args.model_out:
        doc = {"command": "fit", "user_id": dataset.user_id,
               "variant": str(planted.variant), "n": planted.n,
               "coords": list(planted.coords), "objective": None,
               "objective_float": None, "status": "planted",
               "nodes_or_iters": 0, "solver": "planted", "budget": None,
               "seed": args.seed}
        with open(args.model_out, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
    doc = {
        "command": "synth",
        "path": str(args.output),
        "user_id": dataset.user_id,
        "n": config.n,
        "s": config.s,
        "items": config.item_count,
        "variant": str(config.variant),
        "mode": config.mode,
        "noise": config.noise,
        "seed": args.seed,
        "planted_coords": list(planted.coords),
    }
    if args.json:
        _emit_json(doc)
    else:
        print(f"wrote {args.output} (n={config.n}, items={config.item_count}, "
              f"mode={config.mode}, seed={args.seed})")
    return 0


def _cmd_summarize(args) -> int:
    dataset = load_dataset(args.data, keep_empty_attributes=args.keep_empty_attributes)
    summary = summarize(dataset)
    if args.json:
        doc = summary.to_dict()
        doc["command"] = "summarize"
        doc["seed"] = args.seed
        _emit_json(doc)
    else:
        print(render_summary(summary))
    return 0


def _cmd_export_milp(args) -> int:
    dataset = load_dataset(args.data, keep_empty_attributes=args.keep_empty_attributes)
    inst = to_fit_instance(dataset)
    text = export_milp(inst, VARIANT_TOKENS[args.variant])
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_folds(args) -> int:
    dataset = load_dataset(args.data, keep_empty_attributes=args.keep_empty_attributes)
    plan = make_folds(dataset, args.k, args.seed, args.fold_strategy)
    write_fold_plan(plan, args.output)
    doc = {"command": "folds", "path": str(args.output),
           "user_id": plan.user_id, "k": plan.k, "seed": plan.seed,
           "strategy": plan.strategy,
           "fold_sizes": [len(plan.fold_items(f)) for f in range(plan.k)]}
    if args.json:
        _emit_json(doc)
    else:
        print(f"wrote {args.output} (k={plan.k}, strategy={plan.strategy}, "
              f"seed={plan.seed})")
    return 0


def _cmd_convert(args) -> int:
    scale = _parse_scale(args.scale)
    dataset = convert_csv_pair(
        args.items, args.ratings, scale, args.user_id,
        cutoff=as_fraction(args.cutoff),
        keep_empty_attributes=args.keep_empty_attributes)
    write_dataset(dataset, args.output)
    doc = {"command": "convert", "path": str(args.output),
           "user_id": dataset.user_id, "n": dataset.space.n,
           "items": len(dataset.items), "ratings": len(dataset.ratings),
           "seed": args.seed}
    if args.json:
        _emit_json(doc)
    else:
        print(f"wrote {args.output} (n={dataset.space.n}, "
              f"items={len(dataset.items)}, ratings={len(dataset.ratings)})")
    return 0


# ------------------------------------------------------------- the parser

def _add_common(sub, data=True):
    if data:
        sub.add_argument("--data", required=True, help="dataset JSON path")
        sub.add_argument("--keep-empty-attributes", action="store_true",
                         help="keep attribute columns that no rated item has")
    sub.add_argument("--seed", type=int, default=42,
                     help="random seed (echoed in outputs; default 42)")
    sub.add_argument("--json", action="store_true",
                     help="write a single JSON document to stdout")


def _add_solver_flags(sub, default_solver="bnb"):
    sub.add_argument("--solver", choices=("exact", "bnb", "local"),
                     default=default_solver,
                     help="fitting route (default %(default)s)")
    sub.add_argument("--time-budget-ms", type=float, default=None,
                     help="wall-clock budget in milliseconds "
                          "(default 1000 for n<=200, else 2000)")
    sub.add_argument("--iter-budget", type=int, default=None,
                     help="iteration budget (deterministic runs)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cuberec",
        description="Fit hypercube-vertex preference models and reproduce "
                    "cold-start evaluation experiments.")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("fit", help="fit a model on all rated items")
    _add_common(p)
    p.add_argument("--variant", choices=sorted(VARIANT_TOKENS), required=True,
                   help="algo1 fits a binary model, algo2 a ternary one")
    _add_solver_flags(p)
    p.add_argument("-o", "--output", default=None, help="write the model JSON here")
    p.set_defaults(func=_cmd_fit)

    p = subs.add_parser("predict", help="predict levels with a fitted model")
    _add_common(p)
    p.add_argument("--model", required=True, help="model JSON from fit")
    p.add_argument("--items", default=None,
                   help="comma-separated item ids (default: all items)")
    p.set_defaults(func=_cmd_predict)

    p = subs.add_parser("evaluate", help="k-fold cross-validation")
    _add_common(p)
    p.add_argument("--method", choices=("algo1", "algo2", "baseline-file"),
                   required=True)
    _add_solver_flags(p)
    p.add_argument("--k", type=int, default=10, help="fold count (default 10)")
    p.add_argument("--fold-strategy", choices=("contiguous", "random"),
                   default="contiguous")
    p.add_argument("--fold-plan", default=None,
                   help="use this exported fold plan instead of recomputing")
    p.add_argument("--predictions", default=None,
                   help="predictions CSV (required for baseline-file)")
    p.add_argument("--write-predictions", default=None,
                   help="write this run's predictions CSV here")
    p.add_argument("--export-fold-plan", default=None,
                   help="write the fold plan JSON here")
    p.add_argument("--workers", type=int, default=1,
                   help="parallel fold evaluation (same results)")
    p.set_defaults(func=_cmd_evaluate)

    p = subs.add_parser("curve", help="training-size error curve")
    _add_common(p)
    p.add_argument("--method", choices=("algo1", "algo2"), required=True)
    _add_solver_flags(p, default_solver="local")
    p.add_argument("--lmax", type=int, default=None,
                   help="evaluate training sizes 1..lmax")
    p.add_argument("--ells", default=None,
                   help="comma-separated training sizes (overrides --lmax)")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--fold-strategy", choices=("contiguous", "random"),
                   default="contiguous")
    p.add_argument("--independent-subsets", action="store_true",
                   help="redraw the training subset per size instead of "
                        "nesting prefixes")
    p.add_argument("--csv", default=None,
                   help="write per-(fold, size) errors CSV here")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_curve)

    p = subs.add_parser("stats", help="F-gated two-sample t comparison")
    _add_common(p, data=False)
    p.add_argument("--report-a", action="append", default=None,
                   help="evaluate-report JSON (repeatable; pooled)")
    p.add_argument("--report-b", action="append", default=None)
    p.add_argument("--values-a", default=None, help="comma-separated errors")
    p.add_argument("--values-b", default=None)
    p.add_argument("--alpha", type=float, default=0.05)
    p.set_defaults(func=_cmd_stats)

    p = subs.add_parser("synth", help="generate a planted synthetic dataset")
    _add_common(p, data=False)
    p.add_argument("--n", type=int, required=True, help="attribute count")
    p.add_argument("--s", type=int, default=5, help="scale levels (default 5)")
    p.add_argument("--scale", default=None,
                   help="raw scale: 'lo:hi:step' or comma list (overrides --s)")
    p.add_argument("--items", type=int, default=100)
    p.add_argument("--variant", choices=("binary", "ternary"), default="binary",
                   help="planted model alphabet")
    p.add_argument("--mode", choices=("distance-exact", "star-rounded"),
                   default="distance-exact")
    p.add_argument("--noise", type=float, default=0.0,
                   help="probability of a +/-1-level perturbation")
    p.add_argument("-o", "--output", required=True, help="dataset JSON path")
    p.add_argument("--model-out", default=None,
                   help="write the planted model JSON here")
    p.set_defaults(func=_cmd_synth)

    p = subs.add_parser("summarize", help="dataset summary statistics")
    _add_common(p)
    p.set_defaults(func=_cmd_summarize)

    p = subs.add_parser("export-milp", help="write the fit as an LP file")
    _add_common(p)
    p.add_argument("--variant", choices=sorted(VARIANT_TOKENS), required=True)
    p.add_argument("-o", "--output", default=None,
                   help="LP file path (default: stdout)")
    p.set_defaults(func=_cmd_export_milp)

    p = subs.add_parser("folds", help="export a fold plan for external runners")
    _add_common(p)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--fold-strategy", choices=("contiguous", "random"),
                   default="contiguous")
    p.add_argument("-o", "--output", required=True, help="fold plan JSON path")
    p.set_defaults(func=_cmd_folds)

    p = subs.add_parser("convert",
                        help="adapt a generic items+ratings CSV pair")
    _add_common(p, data=False)
    p.add_argument("--items", required=True, help="items CSV (id + attribute scores)")
    p.add_argument("--ratings", required=True, help="ratings CSV (item_id, rating)")
    p.add_argument("--scale", required=True,
                   help="raw scale: 'lo:hi:step' or comma list")
    p.add_argument("--cutoff", default="0.5",
                   help="binarization threshold for attribute scores")
    p.add_argument("--user-id", default="user")
    p.add_argument("--keep-empty-attributes", action="store_true")
    p.add_argument("-o", "--output", required=True, help="dataset JSON path")
    p.set_defaults(func=_cmd_convert)

    return parser


def main(argv=None) -> int:
    level = os.environ.get("CUBEREC_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        stream=sys.stderr, format="%(levelname)s %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error[E_IO]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
