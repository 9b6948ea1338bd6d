"""Domain types and the distance machinery everything else builds on.

Items and user preference models live on the vertices of the boolean
hypercube over an ordered attribute set.  A star rating is converted into a
target distance (its "d-rating") on an exact-rational scale, models are
fitted so that realized vertex distances track those targets, and fitted
models predict new ratings by mapping distances back to stars.

All types here are immutable after construction and all functions are pure,
so values can be shared freely across threads.  No floating point is used
anywhere in this module: d-ratings are `fractions.Fraction` values and both
conversions are exact.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

from .errors import DimensionMismatchError, ValidationError

#: Exact rational target distance derived from a star rating.
DRating = Fraction

#: Anything accepted where an exact rational is expected.
RationalLike = Union[Fraction, int, str]


def as_fraction(value) -> Fraction:
    """Convert ints, strings ("7/2"), floats, and Fractions to Fraction.

    Floats are interpreted via their shortest decimal representation, so a
    JSON literal ``0.1`` becomes 1/10 rather than its binary expansion.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValidationError(f"not a rational value: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(str(value))
    if isinstance(value, str):
        return Fraction(value)
    raise ValidationError(f"not a rational value: {value!r}")


def round_half_up(value: Fraction) -> int:
    """Nearest integer, with exact halves rounded toward +infinity."""
    return (2 * value.numerator + value.denominator) // (2 * value.denominator)


class Variant(enum.Enum):
    """Which coordinate alphabet a user model uses."""

    BINARY = "binary"      # coordinates in {0, 1}
    TERNARY = "ternary"    # coordinates in {-1, 0, 1}; 0 means "don't care"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class RatingScale:
    """An ordered, uniformly spaced list of admissible raw rating values.

    The raw values only matter for I/O; all conversions below operate on the
    1-based *level* index, so a half-star 0.5..5.0 scale is simply a scale
    with ten levels.
    """

    raw_levels: tuple[Fraction, ...]

    def __post_init__(self):
        levels = tuple(as_fraction(v) for v in self.raw_levels)
        object.__setattr__(self, "raw_levels", levels)
        if len(levels) < 2:
            raise ValidationError("a rating scale needs at least 2 levels")
        steps = {b - a for a, b in zip(levels, levels[1:])}
        if any(step <= 0 for step in steps):
            raise ValidationError("scale raw values must strictly increase")
        if len(steps) != 1:
            raise ValidationError("unevenly spaced rating scales are not supported")

    @property
    def s(self) -> int:
        """Number of levels."""
        return len(self.raw_levels)

    @property
    def raw_step(self) -> Fraction:
        """Spacing between consecutive raw values (e.g. 1/2 for half stars)."""
        return self.raw_levels[1] - self.raw_levels[0]

    @classmethod
    def whole_stars(cls, s: int = 5) -> "RatingScale":
        return cls(tuple(Fraction(i) for i in range(1, s + 1)))

    @classmethod
    def half_stars(cls) -> "RatingScale":
        """The 0.5..5.0 half-star scale (ten levels)."""
        return cls(tuple(Fraction(i, 2) for i in range(1, 11)))

    @classmethod
    def from_range(cls, lo, hi, step) -> "RatingScale":
        lo, hi, step = as_fraction(lo), as_fraction(hi), as_fraction(step)
        if step <= 0 or hi <= lo:
            raise ValidationError("scale range needs lo < hi and step > 0")
        count = (hi - lo) / step
        if count.denominator != 1:
            raise ValidationError("scale range is not a whole number of steps")
        return cls(tuple(lo + k * step for k in range(int(count) + 1)))


@dataclass(frozen=True)
class AttributeSpace:
    """The ordered attribute set: dimension, labels, and the rating scale."""

    names: tuple[str, ...]
    scale: RatingScale

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        if len(self.names) < 1:
            raise ValidationError("attribute space needs at least 1 attribute")
        if len(set(self.names)) != len(self.names):
            raise ValidationError("attribute names must be unique")

    @property
    def n(self) -> int:
        return len(self.names)


def _check_bits(bits: Sequence[int], allowed: frozenset, what: str) -> tuple[int, ...]:
    out = tuple(int(b) for b in bits)
    if any(b not in allowed for b in out):
        raise ValidationError(f"{what} coordinates must be in {sorted(allowed)}")
    return out


@dataclass(frozen=True)
class ItemVector:
    """An item's attribute vector: one hypercube vertex."""

    id: str
    bits: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "bits", _check_bits(self.bits, frozenset((0, 1)), "item"))

    @property
    def n(self) -> int:
        return len(self.bits)

    @classmethod
    def from_string(cls, item_id: str, bit_string: str) -> "ItemVector":
        if set(bit_string) - {"0", "1"}:
            raise ValidationError(f"item {item_id!r}: bits must be a 0/1 string")
        return cls(item_id, tuple(int(c) for c in bit_string))

    def bit_string(self) -> str:
        return "".join(str(b) for b in self.bits)


@dataclass(frozen=True)
class UserModel:
    """A fitted preference vertex: binary, or ternary with don't-care zeros."""

    variant: Variant
    coords: tuple[int, ...]

    def __post_init__(self):
        allowed = frozenset((0, 1)) if self.variant is Variant.BINARY \
            else frozenset((-1, 0, 1))
        object.__setattr__(self, "coords", _check_bits(self.coords, allowed, "model"))

    @property
    def n(self) -> int:
        return len(self.coords)

    @classmethod
    def binary(cls, coords: Sequence[int]) -> "UserModel":
        return cls(Variant.BINARY, tuple(coords))

    @classmethod
    def ternary(cls, coords: Sequence[int]) -> "UserModel":
        return cls(Variant.TERNARY, tuple(coords))


@dataclass(frozen=True)
class RatingRecord:
    """One user rating: raw value plus its 1-based level index.

    ``exact_drating`` is normally None and the fit target is derived from
    ``level``; synthetic distance-supervised datasets set it so the exact
    rational target survives serialization.
    """

    item_id: str
    raw: Fraction
    level: int
    exact_drating: Fraction | None = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "raw", as_fraction(self.raw))
        if self.exact_drating is not None:
            object.__setattr__(self, "exact_drating", as_fraction(self.exact_drating))


def rating_to_level(raw, scale: RatingScale) -> int:
    """1-based index of a raw rating value on its scale."""
    raw = as_fraction(raw)
    try:
        return scale.raw_levels.index(raw) + 1
    except ValueError:
        admissible = ", ".join(str(v) for v in scale.raw_levels)
        raise ValidationError(
            f"rating {raw} is not an admissible level (scale: {admissible})"
        ) from None


def star_to_drating(level: int, space: AttributeSpace) -> DRating:
    """Map a star level to its target distance on [0, n].

    The map is linear and exact: the top level maps to distance 0, the
    bottom level to distance n.
    """
    s, n = space.scale.s, space.n
    if not 1 <= level <= s:
        raise ValidationError(f"level {level} outside 1..{s}")
    return Fraction(n) - Fraction(n * (level - 1), s - 1)


def drating_to_star(delta, space: AttributeSpace) -> int:
    """Map a distance in [0, n] back to the nearest star level.

    Inverse of :func:`star_to_drating` on its image; between image points the
    nearest level wins, with exact halves rounded half-up (which lands on the
    *lower* star, since larger distances mean worse ratings).
    """
    delta = as_fraction(delta)
    s, n = space.scale.s, space.n
    if not 0 <= delta <= n:
        raise ValidationError(f"distance {delta} outside [0, {n}]")
    return s - round_half_up(delta * (s - 1) / n)


def hamming(v: ItemVector, x: UserModel) -> int:
    """Number of coordinates where an item and a binary model differ."""
    if x.variant is not Variant.BINARY:
        raise ValidationError("hamming distance needs a binary model")
    if v.n != x.n:
        raise DimensionMismatchError(f"item has {v.n} coordinates, model {x.n}")
    return sum(a != b for a, b in zip(v.bits, x.coords))


def ternary_distance(v: ItemVector, x: UserModel) -> int:
    """Don't-care distance from an item to a ternary model.

    Counts coordinates with (item 1, model -1) or (item 0, model +1);
    model zeros never contribute.
    """
    if x.variant is not Variant.TERNARY:
        raise ValidationError("ternary distance needs a ternary model")
    if v.n != x.n:
        raise DimensionMismatchError(f"item has {v.n} coordinates, model {x.n}")
    return sum((b == 1 and c == -1) or (b == 0 and c == 1)
               for b, c in zip(v.bits, x.coords))


def model_distance(v: ItemVector, x: UserModel) -> int:
    """Distance appropriate to the model's variant."""
    if x.variant is Variant.BINARY:
        return hamming(v, x)
    return ternary_distance(v, x)
