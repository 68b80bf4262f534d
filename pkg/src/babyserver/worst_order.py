"""Worst orderings of a fixed request multiset.

Two routes: an exhaustive scan over distinct arrangements, and the cruel
adversary, which keeps requesting the one point the algorithm leaves
uncovered.  For the lazy double-coverage family the adversary's sequence
has a closed form, see ``predicted_canonical_cost``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .algorithms import AlgorithmSpec, cost_kernel, initial_state, real_configuration, run, step
from .core import Point, ProblemParams, RequestMultiset, RationalLike, parse_rational
from .enumeration import DEFAULT_BUDGET, BudgetExceeded, EnumerationBudget, multinomial, walk_permutations


@dataclass(frozen=True)
class WorstOrderResult:
    cost: Fraction
    witness: tuple[Point, ...]
    method: str  # "brute_force" or "cruel_adversary"


@dataclass(frozen=True)
class CanonicalWorstOrdering:
    sequence: tuple[Point, ...]
    p: int
    tail: tuple[Point, ...]
    cost: Fraction


def brute_force_worst(
    spec: AlgorithmSpec,
    params: ProblemParams,
    m: RequestMultiset,
    budget: EnumerationBudget = DEFAULT_BUDGET,
) -> WorstOrderResult:
    """Exact maximum over all distinct arrangements of ``m``.

    Ties go to the lexicographically smallest arrangement.
    """
    best_cost, best_seq = None, None
    for seq, (cost,) in walk_permutations([cost_kernel(spec, params)], m, budget):
        if best_cost is None or cost > best_cost:
            best_cost, best_seq = cost, seq
    return WorstOrderResult(best_cost, best_seq, "brute_force")


def _require_compliant(spec: AlgorithmSpec) -> None:
    if not spec.compliant:
        raise ValueError(
            f"{spec.label()} may leave servers between points; the cruel adversary "
            "needs an algorithm whose servers always cover exactly two points"
        )


def _residue(supply: dict[Point, int]) -> list[Point]:
    out = []
    while supply[Point.A] and supply[Point.B]:
        out += [Point.B, Point.A]
        supply[Point.A] -= 1
        supply[Point.B] -= 1
    out += [Point.A] * supply[Point.A] + [Point.B] * supply[Point.B] + [Point.C] * supply[Point.C]
    return out


def cruel_adversary_sequence(
    spec: AlgorithmSpec, params: ProblemParams, m: RequestMultiset
) -> CanonicalWorstOrdering:
    """Canonical worst ordering of ``m`` for a compliant algorithm.

    The adversary requests the uncovered point until that point's supply
    runs out.  The leftovers follow in a fixed order: B/A pairs while both
    remain, then the remaining A's or B's, then the C's.  ``p`` counts the
    C's the adversary issued; ``tail`` is everything after the last one.
    """
    _require_compliant(spec)
    supply = {Point.A: m.n_A, Point.B: m.n_B, Point.C: m.n_C}
    state = initial_state(spec, params)
    seq: list[Point] = []
    cost = Fraction(0)
    while True:
        target = real_configuration(state.inner).uncovered()
        if not supply[target]:
            break
        supply[target] -= 1
        state, move = step(state, target)
        cost += move.distance
        seq.append(target)
    p = seq.count(Point.C)
    cut = len(seq) - seq[::-1].index(Point.C) if p else 0
    seq += _residue(supply)
    # leftovers land on covered points only, so the real servers never move again
    total = run(spec, params, seq).total
    assert total == cost
    return CanonicalWorstOrdering(tuple(seq), p, tuple(seq[cut:]), cost)


class NeverVacatesC(RuntimeError):
    """The cruel adversary never gets to request C against this algorithm."""


def adversary_prefix(
    spec: AlgorithmSpec, params: ProblemParams, blocks: int, limit: int = 10**6
) -> tuple[Point, ...]:
    """The cruel adversary's sequence with unlimited supply, cut right
    after its ``blocks``-th request to C."""
    _require_compliant(spec)
    state = initial_state(spec, params)
    seq: list[Point] = []
    issued = 0
    while issued < blocks:
        target = real_configuration(state.inner).uncovered()
        state, _ = step(state, target)
        seq.append(target)
        issued += target is Point.C
        if len(seq) > limit:
            raise NeverVacatesC(f"{spec.label()} never vacates C under the cruel adversary")
    return tuple(seq)


def adversary_run(spec: AlgorithmSpec, params: ProblemParams, length: int) -> tuple[Point, ...]:
    """The first ``length`` requests of the cruel adversary with unlimited supply."""
    _require_compliant(spec)
    state = initial_state(spec, params)
    seq: list[Point] = []
    for _ in range(length):
        target = real_configuration(state.inner).uncovered()
        state, _ = step(state, target)
        seq.append(target)
    return tuple(seq)


def predicted_canonical_cost(
    m: RequestMultiset, d: RationalLike, a: RationalLike
) -> tuple[int, Fraction, Fraction]:
    """Closed-form block count and cost bracket for a-LDC's canonical
    worst ordering: ``(p, lower, upper)``."""
    d, a = parse_rational(d), parse_rational(a)
    if not (0 < a <= d):
        raise ValueError("need 0 < a <= d")
    k = math.floor(d / a)
    p = min(m.n_A // k, m.n_B // (k + 1), m.n_C)
    lower = p * (2 * k + 2 * d)
    return p, lower, lower + 2 * k + d


def worst_cost(
    spec: AlgorithmSpec,
    params: ProblemParams,
    m: RequestMultiset,
    budget: EnumerationBudget = DEFAULT_BUDGET,
    method: str = "auto",
) -> WorstOrderResult:
    """Worst-order cost by brute force when the arrangement count fits the
    budget (or ``method="brute"``), by the cruel adversary otherwise."""
    if method not in ("auto", "brute", "cruel"):
        raise ValueError(f"unknown method {method!r}")
    if method == "brute" or (method == "auto" and multinomial(m) <= budget.max_permutations):
        return brute_force_worst(spec, params, m, budget)
    if not spec.compliant:
        raise BudgetExceeded(
            f"{multinomial(m)} arrangements exceed the budget and {spec.label()} has no cruel-adversary fallback"
        )
    canon = cruel_adversary_sequence(spec, params, m)
    return WorstOrderResult(canon.cost, canon.sequence, "cruel_adversary")
