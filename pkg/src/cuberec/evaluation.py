"""Prediction, error metrics, cross-validation, training curves, and the
two-sample significance tests used to compare methods.

Per-fold errors are exact rationals (mean absolute level difference on the
held-out items); floats only appear in rendered reports.  Every experiment
is deterministic given its seed: per-fold solver seeds and subset-sampling
seeds are derived with a fixed 64-bit mixer, and folds may be evaluated in
parallel because results are merged in (fold, subset-size) index order.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .core import (AttributeSpace, ItemVector, UserModel, Variant, as_fraction,
                   drating_to_star, model_distance)
from .data import Dataset, PredictionRow, to_fit_instance
from .errors import (CoverageError, DatasetFormatError, ValidationError)
from .solver import Budget, solve
from .stats import f_sf_two_sided, t_sf_two_sided

METHOD_VARIANTS = {"algo1": Variant.BINARY, "algo2": Variant.TERNARY}
BASELINE_METHOD = "baseline-file"

_M64 = (1 << 64) - 1
_SUBSET_TAG = 0xA11CE
_INDEP_TAG = 0xB0B


def mix_seed(*parts: int) -> int:
    """Stable 64-bit seed mixer (splitmix64 over the parts)."""
    h = 0x9E3779B97F4A7C15
    for part in parts:
        h ^= int(part) & _M64
        h = (h + 0x9E3779B97F4A7C15) & _M64
        z = h
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
        h = z ^ (z >> 31)
    return h


def predict(model: UserModel, item: ItemVector, space: AttributeSpace) -> int:
    """Predicted star level for an item: distance mapped back to the scale."""
    return drating_to_star(Fraction(model_distance(item, model)), space)


def mean_absolute_error(predicted, actual) -> Fraction:
    """Mean absolute level difference, exact (in level units)."""
    predicted = list(predicted)
    actual = list(actual)
    if not predicted:
        raise ValidationError("cannot average an empty prediction list")
    if len(predicted) != len(actual):
        raise ValidationError("prediction and truth lists differ in length")
    total = sum(abs(int(p) - int(a)) for p, a in zip(predicted, actual))
    return Fraction(total, len(predicted))


# ------------------------------------------------------------------ folds

@dataclass(frozen=True)
class FoldPlan:
    """A partition of the rated items into k folds (sizes differ by <= 1)."""

    k: int
    seed: int
    strategy: str
    user_id: str
    assignments: tuple[tuple[str, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "assignments", tuple(
            (str(i), int(f)) for i, f in self.assignments))
        ids = [i for i, _ in self.assignments]
        if len(set(ids)) != len(ids):
            raise ValidationError("fold plan assigns an item twice")
        sizes = [0] * self.k
        for _, fold in self.assignments:
            if not 0 <= fold < self.k:
                raise ValidationError(f"fold index {fold} outside 0..{self.k - 1}")
            sizes[fold] += 1
        if not sizes or min(sizes) == 0:
            raise ValidationError("every fold must receive at least one item")
        if max(sizes) - min(sizes) > 1:
            raise ValidationError("fold sizes may differ by at most 1")

    def item_ids(self) -> tuple[str, ...]:
        return tuple(i for i, _ in self.assignments)

    def fold_items(self, fold: int) -> tuple[str, ...]:
        return tuple(i for i, f in self.assignments if f == fold)

    def train_items(self, fold: int) -> tuple[str, ...]:
        return tuple(i for i, f in self.assignments if f != fold)


def make_folds(dataset: Dataset, k: int, seed: int,
               strategy: str = "contiguous") -> FoldPlan:
    """Partition the rated items into k folds.

    The default carves contiguous blocks in dataset order (each test set is
    a different part of the dataset); ``strategy="random"`` shuffles first
    with the given seed.  Deterministic either way.
    """
    ids = list(dataset.rated_item_ids())
    if k < 2:
        raise ValidationError("need at least 2 folds")
    if k > len(ids):
        raise ValidationError(f"cannot split {len(ids)} rated items into {k} folds")
    if strategy == "random":
        rng = np.random.Generator(np.random.PCG64(mix_seed(seed)))
        ids = [ids[i] for i in rng.permutation(len(ids))]
    elif strategy != "contiguous":
        raise ValidationError("fold strategy must be 'contiguous' or 'random'")
    base, extra = divmod(len(ids), k)
    assignments = []
    pos = 0
    for fold in range(k):
        size = base + (1 if fold < extra else 0)
        for item_id in ids[pos:pos + size]:
            assignments.append((item_id, fold))
        pos += size
    if strategy == "random":
        # keep dataset order in the plan; only membership was shuffled
        by_id = dict(assignments)
        assignments = [(i, by_id[i]) for i in dataset.rated_item_ids()]
    return FoldPlan(k=k, seed=seed, strategy=strategy,
                    user_id=dataset.user_id, assignments=tuple(assignments))


def write_fold_plan(plan: FoldPlan, path) -> None:
    doc = {
        "user_id": plan.user_id,
        "k": plan.k,
        "seed": plan.seed,
        "strategy": plan.strategy,
        "assignments": {i: f for i, f in plan.assignments},
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def load_fold_plan(path) -> FoldPlan:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DatasetFormatError(f"malformed fold plan JSON: {exc.msg}",
                                 context=f"{path}: line {exc.lineno}") from exc
    try:
        return FoldPlan(k=int(doc["k"]), seed=int(doc["seed"]),
                        strategy=str(doc.get("strategy", "contiguous")),
                        user_id=str(doc.get("user_id", "user")),
                        assignments=tuple(doc["assignments"].items()))
    except KeyError as exc:
        raise DatasetFormatError(f"fold plan is missing field {exc}",
                                 context=str(path)) from None


# ------------------------------------------------------------- reports

@dataclass(frozen=True)
class EvalReport:
    """Per-fold and aggregate held-out prediction errors."""

    method: str
    user_id: str
    k: int
    seed: int
    per_fold_errors: tuple[Fraction, ...]
    per_fold_train_objective: tuple[Fraction | None, ...]
    raw_step: Fraction
    config: dict
    prediction_rows: tuple[PredictionRow, ...] = field(default=(), repr=False)

    @property
    def mean_error(self) -> Fraction:
        return sum(self.per_fold_errors, start=Fraction(0)) / len(self.per_fold_errors)

    def to_dict(self) -> dict:
        mean = self.mean_error
        return {
            "method": self.method,
            "user_id": self.user_id,
            "k": self.k,
            "seed": self.seed,
            "per_fold_errors": [float(e) for e in self.per_fold_errors],
            "per_fold_errors_exact": [str(e) for e in self.per_fold_errors],
            "per_fold_train_objective": [
                None if obj is None else str(obj)
                for obj in self.per_fold_train_objective],
            "mean_error": float(mean),
            "mean_error_exact": str(mean),
            "raw_step": float(self.raw_step),
            "mean_error_raw": float(mean * self.raw_step),
            "config": self.config,
        }

    def render_text(self) -> str:
        lines = [f"method: {self.method}   user: {self.user_id}   "
                 f"k: {self.k}   seed: {self.seed}",
                 f"{'fold':>4}  {'error':>10}  {'train objective':>16}"]
        for fold, err in enumerate(self.per_fold_errors):
            obj = self.per_fold_train_objective[fold]
            obj_s = "-" if obj is None else str(obj)
            lines.append(f"{fold:>4}  {float(err):>10.4f}  {obj_s:>16}")
        lines.append(f"mean error: {float(self.mean_error):.4f} levels "
                     f"({float(self.mean_error * self.raw_step):.4f} raw units)")
        return "\n".join(lines)


@dataclass(frozen=True)
class CurveCell:
    fold: int
    ell: int
    error: Fraction
    train_objective: Fraction | None


@dataclass(frozen=True)
class CurveReport:
    """Held-out error as a function of the training subset size."""

    method: str
    user_id: str
    k: int
    seed: int
    ells: tuple[int, ...]
    cells: tuple[CurveCell, ...]
    nested_subsets: bool
    raw_step: Fraction
    config: dict

    def mean_error_at(self, ell: int) -> Fraction:
        errs = [c.error for c in self.cells if c.ell == ell]
        return sum(errs, start=Fraction(0)) / len(errs)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "user_id": self.user_id,
            "k": self.k,
            "seed": self.seed,
            "ells": list(self.ells),
            "mean_errors": [float(self.mean_error_at(ell)) for ell in self.ells],
            "mean_errors_exact": [str(self.mean_error_at(ell)) for ell in self.ells],
            "nested_subsets": self.nested_subsets,
            "raw_step": float(self.raw_step),
            "cells": [{
                "fold": c.fold,
                "ell": c.ell,
                "error": float(c.error),
                "error_exact": str(c.error),
                "train_objective":
                    None if c.train_objective is None else str(c.train_objective),
            } for c in self.cells],
            "config": self.config,
        }

    def render_text(self) -> str:
        lines = [f"method: {self.method}   user: {self.user_id}   "
                 f"k: {self.k}   seed: {self.seed}",
                 f"{'ell':>6}  {'mean error':>11}"]
        for ell in self.ells:
            lines.append(f"{ell:>6}  {float(self.mean_error_at(ell)):>11.4f}")
        return "\n".join(lines)


def write_curve_csv(report: CurveReport, path) -> None:
    """Per-(user, fold, ell) errors for external plotting."""
    import csv

    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["user_id", "fold", "ell", "error", "method"])
        for cell in report.cells:
            writer.writerow([report.user_id, cell.fold, cell.ell,
                             float(cell.error), report.method])


# ------------------------------------------------------- cross-validation

def _map_ordered(fn, args, workers: int):
    if workers <= 1:
        return [fn(a) for a in args]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, args))


def _fit_and_predict(dataset, train_ids, test_ids, variant, solver, budget,
                     fit_seed):
    inst = to_fit_instance(dataset, train_ids)
    result = solve(inst, variant, solver=solver, budget=budget, seed=fit_seed)
    by_id = dataset.items_by_id
    preds = {tid: predict(result.model, by_id[tid], dataset.space)
             for tid in test_ids}
    return preds, result.objective


def _index_predictions(rows, dataset):
    indexed = {}
    for row in rows:
        if row.user_id != dataset.user_id:
            raise CoverageError(
                f"predictions are for user {row.user_id!r}, "
                f"dataset is {dataset.user_id!r}")
        indexed[(row.fold, row.item_id)] = row.predicted_level
    return indexed


def run_cross_validation(dataset: Dataset, method: str, solver: str = "bnb",
                         budget: Budget | None = None, k: int = 10,
                         seed: int = 42, strategy: str = "contiguous",
                         predictions=None, fold_plan: FoldPlan | None = None,
                         workers: int = 1) -> EvalReport:
    """k-fold cross-validation of a fitting method (or a predictions file).

    Native methods ("algo1" fits binary models, "algo2" ternary) refit on
    each training fold; "baseline-file" scores an externally produced
    predictions CSV on the same folds and fails loudly on any missing
    (fold, item) pair.
    """
    if method in METHOD_VARIANTS:
        variant = METHOD_VARIANTS[method]
    elif method == BASELINE_METHOD:
        variant = None
        if predictions is None:
            raise ValidationError("baseline-file method needs predictions rows")
    else:
        raise ValidationError(
            f"unknown method {method!r} (use algo1, algo2, or baseline-file)")
    plan = fold_plan if fold_plan is not None else make_folds(
        dataset, k, seed, strategy)
    if set(plan.item_ids()) != set(dataset.rated_item_ids()):
        raise CoverageError("fold plan does not cover the dataset's rated items")
    records = {rec.item_id: rec for rec in dataset.ratings}
    indexed = _index_predictions(predictions, dataset) if variant is None else None

    def eval_fold(fold: int):
        test_ids = plan.fold_items(fold)
        if variant is not None:
            preds, objective = _fit_and_predict(
                dataset, plan.train_items(fold), test_ids, variant, solver,
                budget, mix_seed(seed, fold))
        else:
            objective = None
            preds = {}
            for tid in test_ids:
                if (fold, tid) not in indexed:
                    raise CoverageError(
                        f"predictions file has no row for fold {fold}, "
                        f"item {tid!r}")
                level = indexed[(fold, tid)]
                if not 1 <= level <= dataset.space.scale.s:
                    raise ValidationError(
                        f"predicted level {level} outside the scale "
                        f"(fold {fold}, item {tid!r})")
                preds[tid] = level
        err = mean_absolute_error([preds[t] for t in test_ids],
                                  [records[t].level for t in test_ids])
        rows = tuple(PredictionRow(dataset.user_id, fold, tid, preds[tid],
                                   records[tid].level, method)
                     for tid in test_ids)
        return err, objective, rows

    outcomes = _map_ordered(eval_fold, range(plan.k), workers)
    return EvalReport(
        method=method,
        user_id=dataset.user_id,
        k=plan.k,
        seed=seed,
        per_fold_errors=tuple(err for err, _, _ in outcomes),
        per_fold_train_objective=tuple(obj for _, obj, _ in outcomes),
        raw_step=dataset.space.scale.raw_step,
        config=_solver_echo(method, solver, budget, plan.strategy),
        prediction_rows=tuple(row for _, _, rows in outcomes for row in rows),
    )


def _solver_echo(method, solver, budget, strategy) -> dict:
    # identical key structure for native and baseline-file reports
    native = method in METHOD_VARIANTS
    return {
        "strategy": strategy,
        "solver": solver if native else None,
        "budget": None if (budget is None or not native) else {
            "seconds": budget.seconds, "iterations": budget.iterations},
    }


# --------------------------------------------------------- training curve

def run_training_curve(dataset: Dataset, method: str, ells=None,
                       lmax: int | None = None, solver: str = "local",
                       budget: Budget | None = None, k: int = 10,
                       seed: int = 42, strategy: str = "contiguous",
                       nested: bool = True, workers: int = 1) -> CurveReport:
    """Held-out error for training subsets of increasing size.

    For each fold, subsets of the training items are drawn with a seeded
    permutation: nested mode (default) uses prefixes of one permutation per
    fold, so subsets grow monotonically; independent mode redraws per size.
    At the full training size this reproduces :func:`run_cross_validation`
    for the same seed.
    """
    if method not in METHOD_VARIANTS:
        raise ValidationError("training curves support the native methods only")
    variant = METHOD_VARIANTS[method]
    if ells is None:
        if lmax is None:
            raise ValidationError("give either ells or lmax")
        ells = tuple(range(1, lmax + 1))
    ells = tuple(int(e) for e in ells)
    plan = make_folds(dataset, k, seed, strategy)
    min_train = min(len(plan.train_items(f)) for f in range(plan.k))
    if not ells or min(ells) < 1 or max(ells) > min_train:
        raise ValidationError(
            f"subset sizes must lie in 1..{min_train} (smallest training fold)")
    records = {rec.item_id: rec for rec in dataset.ratings}

    def eval_cell(args):
        fold, ell = args
        train_ids = plan.train_items(fold)
        if nested:
            rng = np.random.Generator(np.random.PCG64(
                mix_seed(seed, fold, _SUBSET_TAG)))
            order = rng.permutation(len(train_ids))
        else:
            rng = np.random.Generator(np.random.PCG64(
                mix_seed(seed, fold, ell, _INDEP_TAG)))
            order = rng.permutation(len(train_ids))
        subset = tuple(train_ids[i] for i in order[:ell])
        test_ids = plan.fold_items(fold)
        preds, objective = _fit_and_predict(
            dataset, subset, test_ids, variant, solver, budget,
            mix_seed(seed, fold))
        err = mean_absolute_error([preds[t] for t in test_ids],
                                  [records[t].level for t in test_ids])
        return CurveCell(fold=fold, ell=ell, error=err,
                         train_objective=objective)

    grid = [(fold, ell) for fold in range(plan.k) for ell in ells]
    cells = _map_ordered(eval_cell, grid, workers)
    return CurveReport(
        method=method, user_id=dataset.user_id, k=plan.k, seed=seed,
        ells=ells, cells=tuple(cells), nested_subsets=nested,
        raw_step=dataset.space.scale.raw_step,
        config=_solver_echo(method, solver, budget, plan.strategy),
    )


# ----------------------------------------------------- significance tests

@dataclass(frozen=True)
class SignificanceResult:
    """F-test-gated two-sample t comparison of per-fold error lists."""

    f_statistic: float
    f_p_value: float
    t_statistic: float
    t_p_value: float
    t_df: float
    welch_used: bool
    significant: bool
    alpha: float
    mean_a: float
    mean_b: float
    n_a: int
    n_b: int

    def to_dict(self) -> dict:
        # non-finite statistics (degenerate fast path) serialize as strings
        # so the emitted document stays strict JSON
        def jf(v):
            return v if math.isfinite(v) else str(v)

        return {
            "f_statistic": jf(self.f_statistic),
            "f_p_value": self.f_p_value,
            "t_statistic": jf(self.t_statistic),
            "t_p_value": self.t_p_value,
            "t_df": self.t_df,
            "welch_used": self.welch_used,
            "significant": self.significant,
            "alpha": self.alpha,
            "mean_a": self.mean_a,
            "mean_b": self.mean_b,
            "n_a": self.n_a,
            "n_b": self.n_b,
        }

    def render_text(self) -> str:
        kind = "Welch" if self.welch_used else "pooled"
        verdict = "significant" if self.significant else "not significant"
        return "\n".join([
            f"samples: {self.n_a} vs {self.n_b}   "
            f"means: {self.mean_a:.4f} vs {self.mean_b:.4f}",
            f"F = {self.f_statistic:.6g} (p = {self.f_p_value:.6g})",
            f"t = {self.t_statistic:.6g} ({kind}, df = {self.t_df:.6g}, "
            f"p = {self.t_p_value:.6g})",
            f"{verdict} at alpha = {self.alpha}",
        ])


def _exact_mean_var(values):
    n = len(values)
    mean = sum(values, start=Fraction(0)) / n
    var = sum(((v - mean) ** 2 for v in values), start=Fraction(0)) / (n - 1)
    return mean, var


def compare_methods(errors_a, errors_b, alpha: float = 0.05) -> SignificanceResult:
    """Two-sided comparison of two per-fold error samples.

    An F-test decides whether the variances can be pooled; if it rejects at
    ``alpha``, Welch's t replaces the pooled Student t.  Zero-variance pairs
    short-circuit: equal constants are never significant, different
    constants always are (p reported as 0 by convention).
    """
    a = [as_fraction(v) for v in errors_a]
    b = [as_fraction(v) for v in errors_b]
    if len(a) < 2 or len(b) < 2:
        raise ValidationError("each sample needs at least 2 entries")
    n1, n2 = len(a), len(b)
    m1, v1 = _exact_mean_var(a)
    m2, v2 = _exact_mean_var(b)
    base = dict(alpha=alpha, mean_a=float(m1), mean_b=float(m2), n_a=n1, n_b=n2)
    if v1 == 0 and v2 == 0:
        equal = m1 == m2
        sign = 1.0 if m1 > m2 else -1.0
        return SignificanceResult(
            f_statistic=1.0, f_p_value=1.0,
            t_statistic=0.0 if equal else sign * math.inf,
            t_p_value=1.0 if equal else 0.0,
            t_df=float(n1 + n2 - 2), welch_used=False,
            significant=not equal, **base)
    f_stat = math.inf if v2 == 0 else float(v1 / v2)
    f_p = f_sf_two_sided(f_stat, n1 - 1, n2 - 1)
    welch = f_p < alpha
    diff = float(m1 - m2)
    if welch:
        se1, se2 = v1 / n1, v2 / n2
        se = math.sqrt(float(se1 + se2))
        df = float((se1 + se2) ** 2
                   / ((se1 ** 2) / (n1 - 1) + (se2 ** 2) / (n2 - 1)))
    else:
        pooled = ((n1 - 1) * v1 + (n2 - 1) * v2) / (n1 + n2 - 2)
        se = math.sqrt(float(pooled * (Fraction(1, n1) + Fraction(1, n2))))
        df = float(n1 + n2 - 2)
    t_stat = diff / se
    t_p = t_sf_two_sided(t_stat, df)
    return SignificanceResult(
        f_statistic=f_stat, f_p_value=f_p, t_statistic=t_stat, t_p_value=t_p,
        t_df=df, welch_used=welch, significant=t_p < alpha, **base)
