"""Dataset ingestion, serialization, summaries, and synthetic generation.

A dataset is one user's rated item set: the attribute space, the item
vertices, and at most one rating per item.  The on-disk format is a
self-describing JSON document::

    {
      "user_id": "u1",
      "scale": [1, 2, 3, 4, 5],
      "attributes": ["italian", "cheap", ...],
      "items": [{"id": "r1", "bits": "0101..."}, ...],
      "ratings": [{"item_id": "r1", "raw": 4}, ...]
    }

Rating objects may carry an optional ``"drating": "7/2"`` entry holding an
exact rational fit target; the synthetic generator uses it so that
distance-supervised datasets survive a round trip through disk.  Scale and
raw values may be numbers or strings ("1/3") and are always exact rationals
in memory.

The predictions CSV (header ``user_id,fold,item_id,predicted_level,
actual_level,method``, UTF-8, LF) is the bridge format scored by the
evaluator; external baseline runners emit it without importing this
package.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .core import (AttributeSpace, ItemVector, RatingRecord, RatingScale,
                   UserModel, Variant, as_fraction, drating_to_star, hamming,
                   rating_to_level, star_to_drating, ternary_distance)
from .errors import CapacityError, DatasetFormatError, ValidationError
from .solver import FitInstance

PREDICTIONS_HEADER = ("user_id", "fold", "item_id", "predicted_level",
                      "actual_level", "method")


@dataclass(frozen=True)
class Dataset:
    """One user's items and ratings over a shared attribute space."""

    space: AttributeSpace
    items: tuple[ItemVector, ...]
    ratings: tuple[RatingRecord, ...]
    user_id: str = "user"

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        object.__setattr__(self, "ratings", tuple(self.ratings))
        if not self.items:
            raise ValidationError("dataset needs at least one item")
        n = self.space.n
        ids = [item.id for item in self.items]
        if len(set(ids)) != len(ids):
            raise DatasetFormatError("duplicate item id", context=_first_dup(ids))
        for item in self.items:
            if item.n != n:
                raise DatasetFormatError(
                    f"item has {item.n} bits, expected {n}", context=f"item {item.id!r}")
        known = set(ids)
        seen = set()
        for rec in self.ratings:
            if rec.item_id not in known:
                raise DatasetFormatError("rating references unknown item",
                                         context=f"item {rec.item_id!r}")
            if rec.item_id in seen:
                raise DatasetFormatError("more than one rating for item",
                                         context=f"item {rec.item_id!r}")
            seen.add(rec.item_id)
            if rating_to_level(rec.raw, self.space.scale) != rec.level:
                raise DatasetFormatError("rating level does not match raw value",
                                         context=f"item {rec.item_id!r}")

    @property
    def items_by_id(self) -> dict[str, ItemVector]:
        return {item.id: item for item in self.items}

    def rated_item_ids(self) -> tuple[str, ...]:
        return tuple(rec.item_id for rec in self.ratings)


def _first_dup(values):
    seen = set()
    for v in values:
        if v in seen:
            return f"item {v!r}"
        seen.add(v)
    return None


# ---------------------------------------------------------------- loading

def _require(mapping, key, where):
    if key not in mapping:
        raise DatasetFormatError(f"missing required field {key!r}", context=where)
    return mapping[key]


def dataset_from_dict(doc: dict, keep_empty_attributes: bool = False) -> Dataset:
    """Validate and build a dataset from a parsed JSON document.

    Attribute columns that are zero in every rated item are dropped unless
    ``keep_empty_attributes`` is set, matching the convention that a user's
    model space only contains attributes they have actually encountered.
    """
    if not isinstance(doc, dict):
        raise DatasetFormatError("dataset document must be a JSON object")
    user_id = str(_require(doc, "user_id", "top level"))
    try:
        scale = RatingScale(tuple(as_fraction(v) for v in
                                  _require(doc, "scale", "top level")))
    except ValidationError as exc:
        raise DatasetFormatError(f"bad scale: {exc}", context="field 'scale'") from exc
    names = tuple(str(v) for v in _require(doc, "attributes", "top level"))
    items = []
    for idx, entry in enumerate(_require(doc, "items", "top level")):
        where = f"items[{idx}]"
        item_id = str(_require(entry, "id", where))
        bits = _require(entry, "bits", where)
        if not isinstance(bits, str) or set(bits) - {"0", "1"}:
            raise DatasetFormatError("bits must be a 0/1 string",
                                     context=f"item {item_id!r}")
        if len(bits) != len(names):
            raise DatasetFormatError(
                f"bit string has length {len(bits)}, expected {len(names)}",
                context=f"item {item_id!r}")
        items.append((item_id, bits))
    ratings = []
    for idx, entry in enumerate(_require(doc, "ratings", "top level")):
        where = f"ratings[{idx}]"
        item_id = str(_require(entry, "item_id", where))
        raw = as_fraction(_require(entry, "raw", where))
        if raw not in scale.raw_levels:
            raise DatasetFormatError(
                f"rating {raw} is not an admissible scale level",
                context=f"item {item_id!r}")
        exact = entry.get("drating")
        ratings.append((item_id, raw, None if exact is None else as_fraction(exact)))

    rated = {r[0] for r in ratings} or {i[0] for i in items}
    if keep_empty_attributes:
        keep = list(range(len(names)))
    else:
        keep = [j for j in range(len(names))
                if any(bits[j] == "1" for item_id, bits in items if item_id in rated)]
        if not keep:
            raise DatasetFormatError(
                "every attribute column is zero in all rated items; "
                "nothing would remain (use keep_empty_attributes to override)")
    space = AttributeSpace(tuple(names[j] for j in keep), scale)
    item_vectors = tuple(
        ItemVector(item_id, tuple(int(bits[j]) for j in keep))
        for item_id, bits in items)
    records = tuple(
        RatingRecord(item_id, raw, rating_to_level(raw, scale), exact)
        for item_id, raw, exact in ratings)
    return Dataset(space=space, items=item_vectors, ratings=records,
                   user_id=user_id)


def load_dataset(path, keep_empty_attributes: bool = False) -> Dataset:
    """Load and validate a dataset JSON file."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DatasetFormatError(
            f"malformed JSON: {exc.msg}",
            context=f"{path}: line {exc.lineno}, column {exc.colno}") from exc
    return dataset_from_dict(doc, keep_empty_attributes=keep_empty_attributes)


def _json_rational(q: Fraction):
    if q.denominator == 1:
        return int(q)
    as_float = float(q)
    if Fraction(str(as_float)) == q:
        return as_float
    return str(q)


def dataset_to_dict(dataset: Dataset) -> dict:
    ratings = []
    for rec in dataset.ratings:
        entry = {"item_id": rec.item_id, "raw": _json_rational(rec.raw)}
        if rec.exact_drating is not None:
            entry["drating"] = str(rec.exact_drating)
        ratings.append(entry)
    return {
        "user_id": dataset.user_id,
        "scale": [_json_rational(v) for v in dataset.space.scale.raw_levels],
        "attributes": list(dataset.space.names),
        "items": [{"id": item.id, "bits": item.bit_string()}
                  for item in dataset.items],
        "ratings": ratings,
    }


def write_dataset(dataset: Dataset, path) -> None:
    Path(path).write_text(
        json.dumps(dataset_to_dict(dataset), indent=2, sort_keys=True) + "\n",
        encoding="utf-8")


def to_fit_instance(dataset: Dataset, item_ids=None) -> FitInstance:
    """Build the fit instance for a subset of rated items (default: all).

    Targets come from the carried exact d-rating when present, otherwise
    from the star level.
    """
    by_id = dataset.items_by_id
    records = {rec.item_id: rec for rec in dataset.ratings}
    if item_ids is None:
        item_ids = dataset.rated_item_ids()
    items = []
    targets = []
    for item_id in item_ids:
        if item_id not in records:
            raise ValidationError(f"item {item_id!r} has no rating")
        rec = records[item_id]
        items.append(by_id[item_id])
        if rec.exact_drating is not None:
            targets.append(rec.exact_drating)
        else:
            targets.append(star_to_drating(rec.level, dataset.space))
    return FitInstance(space=dataset.space, items=tuple(items),
                       dratings=tuple(targets))


# ---------------------------------------------------------------- summary

@dataclass(frozen=True)
class DatasetSummary:
    """Table-style description: dimension, per-level counts, mean, std."""

    user_id: str
    n: int
    item_count: int
    rating_count: int
    level_counts: tuple[int, ...]
    mean_rating: Fraction
    std_rating: float

    def to_dict(self) -> dict:
        return {
            "user_id": self.user_id,
            "n": self.n,
            "item_count": self.item_count,
            "rating_count": self.rating_count,
            "level_counts": list(self.level_counts),
            "mean_rating": float(self.mean_rating),
            "std_rating": self.std_rating,
        }


def summarize(dataset: Dataset) -> DatasetSummary:
    """Exact per-level counts plus mean and sample (n-1) standard deviation."""
    if not dataset.ratings:
        raise ValidationError("cannot summarize a dataset with no ratings")
    scale = dataset.space.scale
    counts = [0] * scale.s
    total = Fraction(0)
    for rec in dataset.ratings:
        counts[rec.level - 1] += 1
        total += rec.raw
    count = len(dataset.ratings)
    mean = total / count
    if count >= 2:
        var = sum(((rec.raw - mean) ** 2 for rec in dataset.ratings),
                  start=Fraction(0)) / (count - 1)
        std = math.sqrt(var)
    else:
        std = 0.0
    return DatasetSummary(user_id=dataset.user_id, n=dataset.space.n,
                          item_count=len(dataset.items), rating_count=count,
                          level_counts=tuple(counts), mean_rating=mean,
                          std_rating=std)


def render_summary(summary: DatasetSummary) -> str:
    scale_width = max(5, *(len(str(c)) for c in summary.level_counts))
    head = "  ".join(f"{'lvl ' + str(i + 1):>{scale_width}}"
                     for i in range(len(summary.level_counts)))
    row = "  ".join(f"{c:>{scale_width}}" for c in summary.level_counts)
    return "\n".join([
        f"user: {summary.user_id}",
        f"attributes (n): {summary.n}",
        f"items: {summary.item_count}   ratings: {summary.rating_count}",
        head,
        row,
        f"mean rating: {float(summary.mean_rating):.2f}   "
        f"std (sample): {summary.std_rating:.2f}",
    ])


# ---------------------------------------------------------------- synthetic

@dataclass(frozen=True)
class SyntheticConfig:
    """Recipe for a planted-model dataset.

    ``distance-exact`` supervision stores each item's true model distance as
    the fit target (so the planted vertex has objective zero by
    construction); ``star-rounded`` stores only the star level obtained by
    rounding that distance, optionally perturbed by one level with
    probability ``noise``.
    """

    n: int
    s: int = 5
    item_count: int = 100
    variant: Variant = Variant.BINARY
    mode: str = "distance-exact"
    noise: float = 0.0
    seed: int = 42
    scale: RatingScale | None = field(default=None)

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError("need n >= 1")
        if self.s < 2:
            raise ValidationError("need s >= 2")
        if self.item_count < 1:
            raise ValidationError("need at least one item")
        if self.mode not in ("distance-exact", "star-rounded"):
            raise ValidationError("mode must be distance-exact or star-rounded")
        if not 0.0 <= self.noise <= 1.0:
            raise ValidationError("noise must be in [0, 1]")
        if self.scale is not None and self.scale.s != self.s:
            raise ValidationError("scale level count does not match s")
        if self.n <= 62 and self.item_count > 2 ** self.n:
            raise CapacityError(
                f"cannot draw {self.item_count} distinct items from 2^{self.n} vertices")


def generate_synthetic(config: SyntheticConfig) -> tuple[Dataset, UserModel]:
    """Sample a dataset with a planted preference vertex (deterministic per seed)."""
    rng = np.random.Generator(np.random.PCG64(config.seed))
    n = config.n
    scale = config.scale or RatingScale.whole_stars(config.s)
    space = AttributeSpace(tuple(f"a{j + 1}" for j in range(n)), scale)
    seen = set()
    rows = []
    while len(rows) < config.item_count:
        row = rng.integers(0, 2, n, dtype=np.int8)
        key = row.tobytes()
        if key in seen:
            continue
        seen.add(key)
        rows.append(row)
    width = len(str(config.item_count))
    items = tuple(ItemVector(f"i{k + 1:0{width}d}", tuple(int(b) for b in row))
                  for k, row in enumerate(rows))
    if config.variant is Variant.BINARY:
        planted = UserModel.binary(tuple(int(b) for b in rng.integers(0, 2, n)))
        dist = lambda item: hamming(item, planted)
    else:
        planted = UserModel.ternary(tuple(int(b) for b in rng.integers(-1, 2, n)))
        dist = lambda item: ternary_distance(item, planted)
    records = []
    for item in items:
        delta = Fraction(dist(item))
        level = drating_to_star(delta, space)
        if config.mode == "distance-exact":
            records.append(RatingRecord(item.id, scale.raw_levels[level - 1],
                                        level, exact_drating=delta))
        else:
            if config.noise > 0 and rng.random() < config.noise:
                level += int(rng.choice((-1, 1)))
                level = min(max(level, 1), scale.s)
            records.append(RatingRecord(item.id, scale.raw_levels[level - 1], level))
    dataset = Dataset(space=space, items=items, ratings=tuple(records),
                      user_id=f"synthetic-{config.seed}")
    return dataset, planted


# ---------------------------------------------------------------- predictions

@dataclass(frozen=True)
class PredictionRow:
    """One scored prediction in the shared CSV bridge format."""

    user_id: str
    fold: int
    item_id: str
    predicted_level: int
    actual_level: int
    method: str


def write_predictions(path, rows) -> None:
    """Write prediction rows as CSV (UTF-8, LF line endings)."""
    rows = list(rows)
    for idx, row in enumerate(rows):
        if row.fold < 0:
            raise ValidationError(f"row {idx}: fold must be >= 0")
        if row.predicted_level < 1 or row.actual_level < 1:
            raise ValidationError(f"row {idx}: levels must be >= 1")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PREDICTIONS_HEADER)
        for row in rows:
            writer.writerow([row.user_id, row.fold, row.item_id,
                             row.predicted_level, row.actual_level, row.method])


def load_predictions(path, scale: RatingScale | None = None) -> list[PredictionRow]:
    """Load and validate a predictions CSV.

    Levels must be positive integers; if ``scale`` is given they must also
    sit inside the scale (out-of-range values are an error, never clamped).
    """
    rows = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetFormatError("predictions file is empty",
                                     context=str(path)) from None
        if tuple(header) != PREDICTIONS_HEADER:
            missing = set(PREDICTIONS_HEADER) - set(header)
            detail = f"missing column(s) {sorted(missing)}" if missing \
                else f"unexpected header {header}"
            raise DatasetFormatError(f"bad predictions header: {detail}",
                                     context="line 1")
        for lineno, rec in enumerate(reader, start=2):
            if len(rec) != len(PREDICTIONS_HEADER):
                raise DatasetFormatError(
                    f"expected {len(PREDICTIONS_HEADER)} columns, got {len(rec)}",
                    context=f"line {lineno}")
            user_id, fold_s, item_id, pred_s, actual_s, method = rec
            try:
                fold = int(fold_s)
                pred = int(pred_s)
                actual = int(actual_s)
            except ValueError:
                raise DatasetFormatError("fold and levels must be integers",
                                         context=f"line {lineno}") from None
            if fold < 0:
                raise DatasetFormatError("fold must be >= 0",
                                         context=f"line {lineno}")
            for label, level in (("predicted", pred), ("actual", actual)):
                if level < 1 or (scale is not None and level > scale.s):
                    top = scale.s if scale is not None else "s"
                    raise DatasetFormatError(
                        f"{label}_level {level} outside 1..{top}",
                        context=f"line {lineno}")
            rows.append(PredictionRow(user_id, fold, item_id, pred, actual, method))
    return rows


# ---------------------------------------------------------------- converter

def convert_csv_pair(items_csv, ratings_csv, scale: RatingScale, user_id: str,
                     cutoff=Fraction(1, 2),
                     keep_empty_attributes: bool = False) -> Dataset:
    """Adapt a generic (items CSV, ratings CSV) pair into a dataset.

    The items CSV has an id column followed by one numeric column per
    attribute; scores at or above ``cutoff`` binarize to 1.  The ratings CSV
    needs ``item_id`` and ``rating`` columns.  Only attributes present in at
    least one rated item survive, as with :func:`load_dataset`.
    """
    cutoff = as_fraction(cutoff)
    with open(items_csv, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetFormatError("items file is empty",
                                     context=str(items_csv)) from None
        if len(header) < 2:
            raise DatasetFormatError("items file needs an id column plus "
                                     "at least one attribute column",
                                     context="line 1")
        attr_names = [str(h) for h in header[1:]]
        item_entries = []
        for lineno, rec in enumerate(reader, start=2):
            if len(rec) != len(header):
                raise DatasetFormatError(
                    f"expected {len(header)} columns, got {len(rec)}",
                    context=f"line {lineno}")
            try:
                scores = [as_fraction(cell) if "/" in cell else
                          as_fraction(float(cell)) for cell in rec[1:]]
            except (ValueError, ValidationError):
                raise DatasetFormatError("attribute scores must be numeric",
                                         context=f"line {lineno}") from None
            bits = "".join("1" if score >= cutoff else "0" for score in scores)
            item_entries.append({"id": rec[0], "bits": bits})
    with open(ratings_csv, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        field_names = reader.fieldnames or []
        for needed in ("item_id", "rating"):
            if needed not in field_names:
                raise DatasetFormatError(f"ratings file is missing the "
                                         f"{needed!r} column", context="line 1")
        rating_entries = []
        for lineno, rec in enumerate(reader, start=2):
            try:
                raw = as_fraction(float(rec["rating"]))
            except (ValueError, TypeError, ValidationError):
                raise DatasetFormatError("rating must be numeric",
                                         context=f"line {lineno}") from None
            rating_entries.append({"item_id": rec["item_id"],
                                   "raw": _json_rational(raw)})
    doc = {
        "user_id": user_id,
        "scale": [_json_rational(v) for v in scale.raw_levels],
        "attributes": attr_names,
        "items": item_entries,
        "ratings": rating_entries,
    }
    return dataset_from_dict(doc, keep_empty_attributes=keep_empty_attributes)
