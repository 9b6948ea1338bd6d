"""Fitting a preference vertex to rated items.

Given items with rational target distances, the solvers minimize the sum of
absolute deviations between realized vertex distances and those targets,
over {0,1}^n (binary models) or {-1,0,1}^n (ternary models with don't-care
zeros).  Three routes are provided:

* :func:`solve_brute_force` - exhaustive enumeration, the oracle;
* :func:`solve_branch_and_bound` - exact anytime search with an admissible
  interval bound and a local-search warm start;
* :func:`solve_local_search` - seeded anytime search for large dimensions:
  a threshold-decoded start, a steepest tabu walk, a first-improvement
  descent polish, and margin-guided plus uniform restarts.

Objective values are exact rationals throughout: targets are scaled to a
common denominator once, the kernels work on int64, and results are checked
against an independent pure-python recomputation before being returned.
A solve call runs on one thread; distinct calls share no mutable state.
"""

from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _kernels as kernels
from .core import (AttributeSpace, ItemVector, UserModel, Variant, as_fraction,
                   hamming, ternary_distance)
from .errors import (CapacityError, CubeRecError, DimensionMismatchError,
                     ValidationError)

#: Enumeration caps for the exhaustive solver.
BRUTE_FORCE_CAP_BINARY = 20
BRUTE_FORCE_CAP_TERNARY = 13

_BIG = 1 << 62
_WARM_START_SEED = 0x5EED


class SolveStatus(enum.Enum):
    OPTIMAL = "optimal"
    TIME_LIMIT_BEST = "time-limit-best"
    HEURISTIC_BEST = "heuristic-best"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Budget:
    """Solver effort limit: wall-clock seconds, candidate iterations, or both.

    Iteration budgets (candidate evaluations for local search, expanded
    nodes for branch and bound) make runs exactly reproducible; wall-clock
    budgets mirror production anytime use.
    """

    seconds: float | None = None
    iterations: int | None = None

    def __post_init__(self):
        if self.seconds is not None and self.seconds <= 0:
            raise ValidationError("budget seconds must be > 0")
        if self.iterations is not None and self.iterations < 0:
            raise ValidationError("budget iterations must be >= 0")

    @property
    def unlimited(self) -> bool:
        return self.seconds is None and self.iterations is None


@dataclass(frozen=True, eq=False)
class FitInstance:
    """A rated item set with exact rational target distances."""

    space: AttributeSpace
    items: tuple[ItemVector, ...]
    dratings: tuple[Fraction, ...]

    def __post_init__(self):
        items = tuple(self.items)
        dratings = tuple(as_fraction(d) for d in self.dratings)
        object.__setattr__(self, "items", items)
        object.__setattr__(self, "dratings", dratings)
        if len(items) == 0:
            raise ValidationError("a fit instance needs at least one rated item")
        if len(items) != len(dratings):
            raise ValidationError("items and d-ratings must align one to one")
        n = self.space.n
        for item in items:
            if item.n != n:
                raise DimensionMismatchError(
                    f"item {item.id!r} has {item.n} coordinates, space has {n}")
        for delta in dratings:
            if not 0 <= delta <= n:
                raise ValidationError(f"d-rating {delta} outside [0, {n}]")
        denom = math.lcm(*(d.denominator for d in dratings))
        if 2 * len(items) * n * denom >= _BIG:
            raise CapacityError(
                "d-rating denominators too large for exact int64 kernels")
        vmat = np.array([item.bits for item in items], dtype=np.int8)
        tgt = np.array([int(d * denom) for d in dratings], dtype=np.int64)
        object.__setattr__(self, "_vmat", vmat)
        object.__setattr__(self, "_tgt", tgt)
        object.__setattr__(self, "_denom", denom)

    @property
    def size(self) -> int:
        return len(self.items)

    def scaled(self):
        """(item matrix int8, scaled targets int64, denominator)."""
        return self._vmat, self._tgt, self._denom


@dataclass(frozen=True)
class FitResult:
    model: UserModel
    objective: Fraction
    status: SolveStatus
    nodes_or_iters: int
    elapsed: float


def objective_binary(inst: FitInstance, x: UserModel) -> Fraction:
    """Sum of |hamming distance - target| over the rated set, exactly."""
    if x.variant is not Variant.BINARY:
        raise ValidationError("binary objective needs a binary model")
    return sum((abs(Fraction(hamming(v, x)) - delta)
                for v, delta in zip(inst.items, inst.dratings)),
               start=Fraction(0))


def objective_ternary(inst: FitInstance, x: UserModel) -> Fraction:
    """Sum of |don't-care distance - target| over the rated set, exactly."""
    if x.variant is not Variant.TERNARY:
        raise ValidationError("ternary objective needs a ternary model")
    return sum((abs(Fraction(ternary_distance(v, x)) - delta)
                for v, delta in zip(inst.items, inst.dratings)),
               start=Fraction(0))


def objective(inst: FitInstance, x: UserModel) -> Fraction:
    if x.variant is Variant.BINARY:
        return objective_binary(inst, x)
    return objective_ternary(inst, x)


def node_lower_bound(inst: FitInstance, variant: Variant,
                     prefix: Sequence[int]) -> Fraction:
    """Admissible lower bound for completions of a coordinate prefix.

    With the first ``len(prefix)`` coordinates fixed, each item's final
    distance lies in [decided, decided + undecided]; the bound sums each
    target's distance to that interval.  Used by branch and bound (in its
    scaled-integer form) and by the bound-admissibility tests.
    """
    n = inst.space.n
    t = len(prefix)
    if t > n:
        raise ValidationError("prefix longer than the dimension")
    allowed = (0, 1) if variant is Variant.BINARY else (-1, 0, 1)
    if any(p not in allowed for p in prefix):
        raise ValidationError(f"prefix values must be in {allowed}")
    u = n - t
    total = Fraction(0)
    for item, delta in zip(inst.items, inst.dratings):
        if variant is Variant.BINARY:
            c = sum(b != p for b, p in zip(item.bits, prefix))
        else:
            c = sum((b == 1 and p == -1) or (b == 0 and p == 1)
                    for b, p in zip(item.bits, prefix))
        total += max(Fraction(0), delta - (c + u), Fraction(c) - delta)
    return total


def _model_from_coords(variant: Variant, coords) -> UserModel:
    seq = tuple(int(v) for v in coords)
    if variant is Variant.BINARY:
        return UserModel.binary(seq)
    return UserModel.ternary(tuple(c for c in seq))


def _finish(inst, variant, coords, scaled_val, status, iters, t0) -> FitResult:
    model = _model_from_coords(variant, coords)
    value = objective(inst, model)
    if value != Fraction(int(scaled_val), inst._denom):
        raise CubeRecError(
            f"solver self-check failed: kernel reported {scaled_val}/{inst._denom}, "
            f"recomputed {value}")
    return FitResult(model=model, objective=value, status=status,
                     nodes_or_iters=int(iters), elapsed=time.monotonic() - t0)


def solve_brute_force(inst: FitInstance, variant: Variant) -> FitResult:
    """Exhaustive enumeration; ties go to the lexicographically smallest vertex."""
    t0 = time.monotonic()
    n = inst.space.n
    vmat, tgt, denom = inst.scaled()
    if variant is Variant.BINARY:
        if n > BRUTE_FORCE_CAP_BINARY:
            raise CapacityError(
                f"brute force over 2^{n} binary vertices exceeds the "
                f"n <= {BRUTE_FORCE_CAP_BINARY} cap")
        coords, val = kernels.brute_force_binary(vmat, tgt, denom)
        visited = 1 << n
    else:
        if n > BRUTE_FORCE_CAP_TERNARY:
            raise CapacityError(
                f"brute force over 3^{n} ternary vertices exceeds the "
                f"n <= {BRUTE_FORCE_CAP_TERNARY} cap")
        coords, val = kernels.brute_force_ternary(vmat, tgt, denom)
        visited = 3 ** n
    return _finish(inst, variant, coords, val, SolveStatus.OPTIMAL, visited, t0)


def _random_start(rng, n: int, variant: Variant):
    if variant is Variant.BINARY:
        return rng.integers(0, 2, n).astype(np.uint8)
    return (rng.integers(0, 3, n) - 1).astype(np.int8)


def _decode_with_margins(inst: FitInstance, variant: Variant):
    """Threshold decoding plus a low-confidence-first coordinate ranking.

    An attribute the user likes pulls the targets of items carrying it down
    by one relative to items lacking it (symmetrically for dislikes), so
    comparing the two conditional target means recovers each coordinate;
    the margin to the decision boundary ranks how trustworthy each decoded
    coordinate is.  Exact integer arithmetic decides; floats only rank.
    """
    vmat, tgt, denom = inst.scaled()
    m, n = vmat.shape
    v64 = vmat.astype(np.int64)
    count_with = v64.sum(axis=0)
    count_without = m - count_with
    sum_with = (v64 * tgt[:, None]).sum(axis=0)
    sum_without = int(tgt.sum()) - sum_with
    if variant is Variant.BINARY:
        out = np.zeros(n, dtype=np.uint8)
    else:
        out = np.zeros(n, dtype=np.int8)
    margins = np.full(n, np.inf)
    for j in range(n):
        c1, c0 = int(count_with[j]), int(count_without[j])
        if c1 == 0 or c0 == 0:
            if variant is Variant.BINARY:
                out[j] = 1 if c0 == 0 else 0
            continue
        # diff = mean(target | with) - mean(target | without), scaled exactly
        diff = int(sum_with[j]) * c0 - int(sum_without[j]) * c1
        scale = c1 * c0 * denom
        if variant is Variant.BINARY:
            out[j] = 1 if diff < 0 else 0
            margins[j] = abs(diff) / scale
        else:
            if 2 * diff > scale:
                out[j] = -1
            elif 2 * diff < -scale:
                out[j] = 1
            margins[j] = min(abs(2 * diff - scale),
                             abs(2 * diff + scale)) / (2 * scale)
    return out, np.argsort(margins, kind="stable")


def decoded_start(inst: FitInstance, variant: Variant):
    """Threshold-decoded vertex (see ``_decode_with_margins``)."""
    return _decode_with_margins(inst, variant)[0]


def _tabu_params(n: int):
    tenure = min(max(7, n // 20), n - 1)
    patience = max(2 * n, 50)
    return tenure, patience


def solve_local_search(inst: FitInstance, variant: Variant, budget: Budget,
                       seed: int = 0) -> FitResult:
    """Anytime 1-flip local search under a budget.

    Each attempt runs a steepest tabu walk followed by a first-improvement
    descent polish; the first attempt starts from the threshold-decoded
    vertex, later ones alternate perturbed-decode and uniform random
    restarts.  The returned vertex is 1-flip locally optimal unless the
    budget expired mid-attempt.  Runs are deterministic for a given seed
    when the budget is iteration-based.
    """
    if budget is None or budget.unlimited:
        raise ValidationError("local search needs a time or iteration budget")
    t0 = time.monotonic()
    deadline = t0 + budget.seconds if budget.seconds is not None else -1.0
    evals_left = budget.iterations
    vmat, tgt, denom = inst.scaled()
    if variant is Variant.BINARY:
        tabu, descend = kernels.tabu_binary, kernels.descend_binary
    else:
        tabu, descend = kernels.tabu_ternary, kernels.descend_ternary
    rng = np.random.Generator(np.random.PCG64(seed))
    n = inst.space.n
    tenure, patience = _tabu_params(n)
    decoded, margin_rank = _decode_with_margins(inst, variant)
    pool = margin_rank[:max(1, min(n, (35 * n) // 100))]
    attempt_cap = 2500 * (n if variant is Variant.BINARY else 2 * n)
    best_coords = None
    best_val = None
    total = 0
    attempt = 0
    while True:
        if attempt == 0:
            x0 = decoded.copy()
        elif attempt % 2 == 1:
            # re-randomize some of the least trustworthy decoded coordinates
            x0 = decoded.copy()
            count = min(len(pool), 5 + 5 * n * ((attempt + 1) // 2) // 100)
            idx = rng.choice(pool, size=count, replace=False)
            if variant is Variant.BINARY:
                x0[idx] ^= 1
            else:
                shift = rng.integers(1, 3, count)
                x0[idx] = ((x0[idx] + 1 + shift) % 3 - 1).astype(np.int8)
        else:
            x0 = _random_start(rng, n, variant)
        cap = evals_left if evals_left is not None else _BIG
        obj, used = tabu(vmat, tgt, denom, x0, min(cap, attempt_cap),
                         deadline, tenure, patience)
        total += used
        if evals_left is not None:
            evals_left -= used
        if obj > 0:
            cap = evals_left if evals_left is not None else _BIG
            obj, used, _ = descend(vmat, tgt, denom, x0, cap, deadline)
            total += used
            if evals_left is not None:
                evals_left -= used
        if best_val is None or obj < best_val:
            best_val = obj
            best_coords = x0.copy()
        if best_val == 0:
            break
        if evals_left is not None and evals_left <= 0:
            break
        if deadline >= 0 and time.monotonic() >= deadline:
            break
        attempt += 1
    return _finish(inst, variant, best_coords, best_val,
                   SolveStatus.HEURISTIC_BEST, total, t0)


def _branch_orders(inst: FitInstance, variant: Variant):
    """Child exploration order per depth: majority vote of low-target items.

    Items whose target distance is at most n/2 sit close to the model
    vertex, so their attribute bits point toward it; exploring that side
    first finds zero-objective vertices quickly on consistent instances.
    """
    n = inst.space.n
    votes = np.zeros(n, dtype=np.int64)
    voters = 0
    half = Fraction(n, 2)
    for item, delta in zip(inst.items, inst.dratings):
        if delta <= half:
            votes += np.asarray(item.bits, dtype=np.int64)
            voters += 1
    if voters == 0:
        for item in inst.items:
            votes += np.asarray(item.bits, dtype=np.int64)
        voters = len(inst.items)
    majority = (2 * votes >= voters).astype(np.int8)
    if variant is Variant.BINARY:
        orders = np.empty((n, 2), dtype=np.int8)
        orders[:, 0] = majority
        orders[:, 1] = 1 - majority
    else:
        sign = np.where(majority == 1, 1, -1).astype(np.int8)
        orders = np.empty((n, 3), dtype=np.int8)
        orders[:, 0] = sign
        orders[:, 1] = 0
        orders[:, 2] = -sign
    return orders


def solve_branch_and_bound(inst: FitInstance, variant: Variant,
                           budget: Budget | None = None) -> FitResult:
    """Exact depth-first branch and bound with anytime behaviour.

    A short deterministic local search seeds the incumbent; nodes are
    explored majority-bit-first with the interval lower bound, pruning only
    strictly worse subtrees so the returned optimum is the
    lexicographically smallest one.  If the budget interrupts the search the
    incumbent so far is returned with TIME_LIMIT_BEST status.
    """
    t0 = time.monotonic()
    n = inst.space.n
    vmat, tgt, denom = inst.scaled()
    if budget is not None and budget.seconds is not None:
        deadline = t0 + budget.seconds
        warm_budget = Budget(seconds=budget.seconds,
                             iterations=min(20000, 50 * n + 200))
    else:
        deadline = -1.0
        warm_budget = Budget(iterations=min(20000, 50 * n + 200))
    warm = solve_local_search(inst, variant, warm_budget, seed=_WARM_START_SEED)
    inc_coords = np.asarray(warm.model.coords,
                            dtype=np.uint8 if variant is Variant.BINARY else np.int8)
    inc_val = int(warm.objective * denom)
    max_nodes = _BIG
    if budget is not None and budget.iterations is not None:
        max_nodes = budget.iterations
    orders = _branch_orders(inst, variant)
    bnb = kernels.bnb_binary if variant is Variant.BINARY else kernels.bnb_ternary
    coords, val, nodes, completed = bnb(vmat, tgt, denom, orders, inc_coords,
                                        inc_val, max_nodes, deadline)
    status = SolveStatus.OPTIMAL if completed else SolveStatus.TIME_LIMIT_BEST
    return _finish(inst, variant, coords, val, status, nodes, t0)


def solve(inst: FitInstance, variant: Variant, solver: str = "bnb",
          budget: Budget | None = None, seed: int = 0) -> FitResult:
    """Dispatch to a solver by name: "exact", "bnb", or "local"."""
    if solver == "exact":
        return solve_brute_force(inst, variant)
    if solver == "bnb":
        return solve_branch_and_bound(inst, variant, budget)
    if solver == "local":
        if budget is None:
            raise ValidationError("local search needs a budget")
        return solve_local_search(inst, variant, budget, seed)
    raise ValidationError(f"unknown solver {solver!r} (use exact, bnb, or local)")
