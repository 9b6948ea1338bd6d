"""Run a scikit-learn baseline over an exported fold plan.

Standalone bridge component: it reads the dataset JSON and fold-plan JSON
the main package publishes, trains one model per fold, and writes the
shared predictions CSV that `cuberec evaluate --method baseline-file`
scores.  Nothing here imports the main package; the three file formats are
the whole interface.

Methods: nb (Bernoulli naive Bayes classifier over levels), rf (random
forest regressor), svr (support vector regressor), dt (decision tree
regressor), nn (multilayer perceptron regressor).  Regressor outputs are
rounded half-up to the nearest level and clamped into the scale.
Hyperparameters are pinned in defaults.json and may be overridden with a
JSON file; runs are deterministic for a fixed seed.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np
from sklearn.ensemble import RandomForestRegressor
from sklearn.naive_bayes import BernoulliNB
from sklearn.neural_network import MLPRegressor
from sklearn.svm import SVR
from sklearn.tree import DecisionTreeRegressor

METHODS = ("nb", "rf", "svr", "dt", "nn")

PREDICTIONS_HEADER = ("user_id", "fold", "item_id", "predicted_level",
                      "actual_level", "method")


class BridgeError(ValueError):
    """Bad input file or a fold plan that does not cover the dataset."""


def _as_fraction(value) -> Fraction:
    if isinstance(value, str):
        return Fraction(value)
    return Fraction(str(value))


@dataclass
class LoadedDataset:
    user_id: str
    levels_count: int
    item_bits: dict          # item_id -> np.ndarray of 0/1
    rating_level: dict       # item_id -> 1-based level
    rated_order: tuple       # item ids in dataset rating order


def load_dataset(path) -> LoadedDataset:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise BridgeError(f"malformed dataset JSON: {exc}") from exc
    try:
        scale = [_as_fraction(v) for v in doc["scale"]]
        attributes = doc["attributes"]
        items = {entry["id"]: np.array([int(c) for c in entry["bits"]],
                                       dtype=np.float64)
                 for entry in doc["items"]}
        levels = {}
        order = []
        for entry in doc["ratings"]:
            raw = _as_fraction(entry["raw"])
            levels[entry["item_id"]] = scale.index(raw) + 1
            order.append(entry["item_id"])
    except (KeyError, ValueError) as exc:
        raise BridgeError(f"bad dataset document: {exc!r}") from exc
    n = len(attributes)
    for item_id, bits in items.items():
        if bits.shape[0] != n:
            raise BridgeError(f"item {item_id!r} has {bits.shape[0]} bits, "
                              f"expected {n}")
    for item_id in levels:
        if item_id not in items:
            raise BridgeError(f"rating references unknown item {item_id!r}")
    return LoadedDataset(user_id=str(doc["user_id"]), levels_count=len(scale),
                         item_bits=items, rating_level=levels,
                         rated_order=tuple(order))


def load_fold_plan(path):
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        k = int(doc["k"])
        assignments = {str(i): int(f) for i, f in doc["assignments"].items()}
    except (json.JSONDecodeError, KeyError, ValueError) as exc:
        raise BridgeError(f"bad fold plan: {exc!r}") from exc
    if any(not 0 <= f < k for f in assignments.values()):
        raise BridgeError("fold plan contains an out-of-range fold index")
    return k, assignments


@dataclass
class BaselineJob:
    dataset_path: str
    fold_plan_path: str
    method: str
    seed: int = 42
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in METHODS:
            raise BridgeError(f"unknown method {self.method!r} "
                              f"(choose from {', '.join(METHODS)})")


def default_params() -> dict:
    with resources.files("recbaselines").joinpath("defaults.json").open() as fh:
        return json.load(fh)


def _make_model(method: str, params: dict, seed: int):
    kwargs = dict(params.get(method, {}))
    if method == "nb":
        return BernoulliNB(**kwargs)
    if method == "rf":
        return RandomForestRegressor(random_state=seed, **kwargs)
    if method == "svr":
        return SVR(**kwargs)
    if method == "dt":
        return DecisionTreeRegressor(random_state=seed, **kwargs)
    if method == "nn":
        kwargs = dict(kwargs)
        if "hidden_layer_sizes" in kwargs:
            kwargs["hidden_layer_sizes"] = tuple(kwargs["hidden_layer_sizes"])
        return MLPRegressor(random_state=seed, **kwargs)
    raise BridgeError(f"unknown method {method!r}")


def _round_half_up(value: float) -> int:
    return int(math.floor(value + 0.5))


def run_baseline(job: BaselineJob):
    """Train per fold and return prediction rows (list of tuples)."""
    dataset = load_dataset(job.dataset_path)
    k, assignments = load_fold_plan(job.fold_plan_path)
    rated = set(dataset.rating_level)
    planned = set(assignments)
    if planned != rated:
        missing = sorted(rated - planned)[:3]
        extra = sorted(planned - rated)[:3]
        raise BridgeError("fold plan does not cover the dataset's rated items "
                          f"(missing {missing}, unknown {extra})")
    params = default_params()
    for method, overrides in job.params.items():
        params.setdefault(method, {}).update(overrides)
    s = dataset.levels_count
    rows = []
    for fold in range(k):
        train_ids = [i for i in dataset.rated_order if assignments[i] != fold]
        test_ids = [i for i in dataset.rated_order if assignments[i] == fold]
        if not train_ids or not test_ids:
            raise BridgeError(f"fold {fold} has an empty train or test side")
        x_train = np.stack([dataset.item_bits[i] for i in train_ids])
        y_train = np.array([dataset.rating_level[i] for i in train_ids],
                           dtype=np.float64)
        x_test = np.stack([dataset.item_bits[i] for i in test_ids])
        model = _make_model(job.method, params, job.seed)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            model.fit(x_train, y_train.astype(int)
                      if job.method == "nb" else y_train)
            raw_pred = model.predict(x_test)
        for item_id, value in zip(test_ids, raw_pred):
            level = _round_half_up(float(value))
            level = min(max(level, 1), s)
            rows.append((dataset.user_id, fold, item_id, level,
                         dataset.rating_level[item_id], job.method))
    return rows


def write_predictions(path, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PREDICTIONS_HEADER)
        writer.writerows(rows)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="recbaselines",
        description="Run a scikit-learn baseline over an exported fold plan "
                    "and emit the shared predictions CSV.")
    parser.add_argument("--data", required=True, help="dataset JSON")
    parser.add_argument("--fold-plan", required=True, help="fold plan JSON")
    parser.add_argument("--method", required=True, choices=METHODS)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--params", default=None,
                        help="JSON file with per-method hyperparameter overrides")
    parser.add_argument("-o", "--output", required=True,
                        help="predictions CSV path")
    args = parser.parse_args(argv)
    overrides = {}
    if args.params:
        overrides = json.loads(Path(args.params).read_text(encoding="utf-8"))
    try:
        rows = run_baseline(BaselineJob(dataset_path=args.data,
                                        fold_plan_path=args.fold_plan,
                                        method=args.method, seed=args.seed,
                                        params=overrides))
    except BridgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    write_predictions(args.output, rows)
    print(f"wrote {args.output} ({len(rows)} predictions, method={args.method}, "
          f"seed={args.seed})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
