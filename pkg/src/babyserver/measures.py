"""Quality measures: competitive ratio, Max/Max, random order, bijective,
average and relative worst order.

Limits and suprema cannot be computed, so every engine here works at a
finite length n (or family parameter p) and reports exact values there.
"""

from __future__ import annotations

import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .algorithms import OPT, AlgorithmSpec, cost_kernel
from .core import POINTS, Point, ProblemParams, RequestMultiset, as_sequence
from .enumeration import (
    DEFAULT_BUDGET,
    EnumerationBudget,
    cost_histogram,
    multinomial,
    sample_permutation,
    walk_permutations,
    walk_sequences,
)
from .worst_order import NeverVacatesC, WorstOrderResult, adversary_prefix, adversary_run, worst_cost


# a family's ratio series counts as unbounded when its last value is at
# least this factor above its value halfway through the p range
GROWTH_FACTOR = Fraction(3, 2)


# ---------------------------------------------------------------------------
# Competitive ratio
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CompetitiveResult:
    ratio: Fraction
    witness: tuple[Point, ...]
    n_max: int


def _better_witness(ratio, seq, best):
    if best is None:
        return True
    if ratio != best[0]:
        return ratio > best[0]
    return (len(seq), seq) < (len(best[1]), best[1])


def _competitive_part(spec, params, n_max, prefix, budget):
    best = None
    kernels = [cost_kernel(spec, params), cost_kernel(OPT, params)]
    for seq, (alg, opt) in walk_sequences(kernels, n_max, 1, prefix, budget):
        if opt == 0:
            continue
        ratio = alg / opt
        if _better_witness(ratio, seq, best):
            best = (ratio, seq)
    return best


def empirical_competitive(
    spec: AlgorithmSpec,
    params: ProblemParams,
    n_max: int,
    budget: EnumerationBudget = DEFAULT_BUDGET,
    jobs: int = 1,
) -> CompetitiveResult:
    """Largest ALG(I)/Opt(I) over all I with 1 <= |I| <= n_max and Opt(I) > 0.

    The witness is the shortest maximizer, lexicographically first among
    equals, so the result does not depend on ``jobs``.
    """
    budget.check_sequences(n_max)
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    if jobs > 1:
        prefixes = [(p,) for p in POINTS]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(
                _competitive_part,
                [spec] * 3, [params] * 3, [n_max] * 3, prefixes, [budget] * 3,
            ))
    else:
        parts = [_competitive_part(spec, params, n_max, (), budget)]
    best = None
    for part in parts:
        if part is not None and _better_witness(part[0], part[1], best):
            best = part
    if best is None:
        raise ValueError("no sequence with positive optimal cost in range")
    return CompetitiveResult(best[0], best[1], n_max)


# ---------------------------------------------------------------------------
# Max/Max
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MaxMaxResult:
    n: int
    M_value: Fraction
    ratio_vs_opt: Fraction
    max_cost: Fraction
    opt_max_cost: Fraction


def max_cost(spec: AlgorithmSpec, params: ProblemParams, n: int,
             budget: EnumerationBudget = DEFAULT_BUDGET) -> Fraction:
    return max(cost_histogram(cost_kernel(spec, params), n, budget))


def maxmax(spec: AlgorithmSpec, params: ProblemParams, n: int,
           budget: EnumerationBudget = DEFAULT_BUDGET) -> MaxMaxResult:
    """Worst cost per request at length n, and its ratio to Opt's."""
    if n <= 0:
        raise ValueError("Max/Max needs n >= 1")
    worst = max_cost(spec, params, n, budget)
    opt_worst = max_cost(OPT, params, n, budget)
    return MaxMaxResult(n, worst / n, worst / opt_worst, worst, opt_worst)


# ---------------------------------------------------------------------------
# Random order
# ---------------------------------------------------------------------------

RATIO_OF_EXPECTATIONS = "ratio_of_expectations"
EXPECTATION_OF_RATIO = "expectation_of_ratio"


@dataclass(frozen=True)
class RandomOrderResult:
    mode: str
    value: Fraction
    exact: bool
    expected_alg: Fraction
    expected_opt: Fraction
    arrangements: int
    samples: int | None = None
    seed: int | None = None


def random_order_ratio(
    spec: AlgorithmSpec,
    params: ProblemParams,
    seq,
    mode: str = RATIO_OF_EXPECTATIONS,
    budget: EnumerationBudget = DEFAULT_BUDGET,
    samples: int = 10_000,
    seed: int | None = None,
) -> RandomOrderResult:
    """Expected cost over random orderings of ``seq`` normalized by Opt.

    Exact (equal weight on each distinct arrangement) when the arrangement
    count fits ``budget.max_permutations``; otherwise a Monte Carlo mean
    over ``samples`` seeded shuffles, still in exact arithmetic.
    """
    if mode not in (RATIO_OF_EXPECTATIONS, EXPECTATION_OF_RATIO):
        raise ValueError(f"unknown mode {mode!r}")
    m = RequestMultiset.of(as_sequence(seq))
    if m.n_B == 0:
        # no B means every arrangement is free for Opt
        raise ValueError("random order ratio undefined: Opt is zero on every arrangement")
    count = multinomial(m)
    exact = count <= budget.max_permutations
    seed = budget.rng_seed if seed is None else seed

    if exact:
        kernels = [cost_kernel(spec, params), cost_kernel(OPT, params)]
        pairs = (costs for _, costs in walk_permutations(kernels, m, budget))
        n_used = count
    else:
        rng = random.Random(seed)
        draws = [sample_permutation(m, rng.getrandbits(64)) for _ in range(samples)]
        pairs = ((_cost(spec, params, s), _cost(OPT, params, s)) for s in draws)
        n_used = samples

    sum_alg = sum_opt = sum_ratio = Fraction(0)
    for alg, opt in pairs:
        sum_alg += alg
        sum_opt += opt
        sum_ratio += alg / opt
    e_alg, e_opt = sum_alg / n_used, sum_opt / n_used
    value = e_alg / e_opt if mode == RATIO_OF_EXPECTATIONS else sum_ratio / n_used
    return RandomOrderResult(
        mode, value, exact, e_alg, e_opt, count,
        samples=None if exact else samples, seed=None if exact else seed,
    )


def _cost(spec, params, seq):
    start, advance = cost_kernel(spec, params)
    total = Fraction(0)
    for p in seq:
        start, inc = advance(start, p)
        total += inc
    return total


# ---------------------------------------------------------------------------
# Bijective and average analysis
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BijectiveComparison:
    n: int
    verdict: str  # A_better, B_better, equivalent, incomparable
    strict: bool
    witness_pairing: tuple[tuple[Fraction, Fraction, int], ...]


def sorted_costs(spec: AlgorithmSpec, params: ProblemParams, n: int,
                 budget: EnumerationBudget = DEFAULT_BUDGET) -> list[Fraction]:
    """Ascending costs of ``spec`` over all 3^n sequences."""
    return sorted(cost_histogram(cost_kernel(spec, params), n, budget).elements())


def compare_sorted(a: Sequence[Fraction], b: Sequence[Fraction]) -> tuple[str, bool]:
    if len(a) != len(b):
        raise ValueError("cost vectors differ in length")
    a_le = all(x <= y for x, y in zip(a, b))
    b_le = all(y <= x for x, y in zip(a, b))
    if a_le and b_le:
        return "equivalent", False
    if a_le:
        return "A_better", True
    if b_le:
        return "B_better", True
    return "incomparable", False


def _pairing(a, b):
    runs: list[list] = []
    for x, y in zip(a, b):
        if runs and runs[-1][0] == x and runs[-1][1] == y:
            runs[-1][2] += 1
        else:
            runs.append([x, y, 1])
    return tuple(tuple(r) for r in runs)


def bijective_compare(
    spec_a: AlgorithmSpec,
    spec_b: AlgorithmSpec,
    params: ProblemParams,
    n: int,
    budget: EnumerationBudget = DEFAULT_BUDGET,
) -> BijectiveComparison:
    """Decide whether a bijection f on length-n inputs with A(I) <= B(f(I))
    exists.

    It exists exactly when the k-th smallest A cost is at most the k-th
    smallest B cost for every k: pairing sorted vectors is such a
    bijection, and if some k fails, the k cheapest A inputs would need k
    distinct B partners among fewer than k candidates.
    """
    a = sorted_costs(spec_a, params, n, budget)
    b = sorted_costs(spec_b, params, n, budget)
    verdict, strict = compare_sorted(a, b)
    return BijectiveComparison(n, verdict, strict, _pairing(a, b))


@dataclass(frozen=True)
class AverageComparison:
    n: int
    sum_a: Fraction
    sum_b: Fraction
    verdict: str  # A_better, B_better, equivalent


def average_compare(
    spec_a: AlgorithmSpec,
    spec_b: AlgorithmSpec,
    params: ProblemParams,
    n: int,
    budget: EnumerationBudget = DEFAULT_BUDGET,
) -> AverageComparison:
    def total(spec):
        hist = cost_histogram(cost_kernel(spec, params), n, budget)
        return sum((c * k for c, k in hist.items()), Fraction(0))

    sa, sb = total(spec_a), total(spec_b)
    verdict = "equivalent" if sa == sb else ("A_better" if sa < sb else "B_better")
    return AverageComparison(n, sa, sb, verdict)


# ---------------------------------------------------------------------------
# Relative worst order
# ---------------------------------------------------------------------------

def _ratio(x: Fraction, y: Fraction) -> Fraction | None:
    """x / y, with 0/0 read as 1 and x/0 as unbounded (None)."""
    if y == 0:
        return Fraction(1) if x == 0 else None
    return x / y


@dataclass(frozen=True)
class RwoPair:
    multiset: RequestMultiset
    worst_a: WorstOrderResult
    worst_b: WorstOrderResult
    ratio_ab: Fraction | None
    ratio_ba: Fraction | None


def rwo_pair_on_multiset(
    spec_a: AlgorithmSpec,
    spec_b: AlgorithmSpec,
    params: ProblemParams,
    m: RequestMultiset,
    budget: EnumerationBudget = DEFAULT_BUDGET,
    method: str = "auto",
) -> RwoPair:
    wa = worst_cost(spec_a, params, m, budget, method)
    wb = worst_cost(spec_b, params, m, budget, method)
    return RwoPair(m, wa, wb, _ratio(wa.cost, wb.cost), _ratio(wb.cost, wa.cost))


@dataclass(frozen=True)
class Family:
    """A parametrized set of multisets, e.g. the contents of (BABABC)^p."""

    name: str
    build: Callable[[int], RequestMultiset]
    p_values: tuple[int, ...]


def sequence_family(pattern: str, p_values: Sequence[int]) -> Family:
    base = RequestMultiset.of(pattern)
    return Family(
        f"({pattern})^p",
        lambda p: RequestMultiset(base.n_A * p, base.n_B * p, base.n_C * p),
        tuple(p_values),
    )


def canonical_family(d, a, p_values: Sequence[int]) -> Family:
    """Contents of p full cruel-adversary blocks against a-LDC."""
    k = math.floor(Fraction(d) / Fraction(a))
    return Family(
        f"canonical[a={a}]",
        lambda p: RequestMultiset(p * k, p * (k + 1), p),
        tuple(p_values),
    )


def adversary_family(spec: AlgorithmSpec, params: ProblemParams, p_values: Sequence[int]) -> Family:
    """Contents of the cruel adversary's first p blocks against ``spec``."""
    return Family(
        f"adversary[{spec.label()}]",
        lambda p: RequestMultiset.of(adversary_prefix(spec, params, p)),
        tuple(p_values),
    )


def canonical_worst_family(spec: AlgorithmSpec, params: ProblemParams, p_values: Sequence[int]) -> Family:
    """Multisets behind ``spec``'s canonical worst orderings, indexed by p.

    LDC variants get their closed-form block family.  Other compliant
    algorithms get the contents of the cruel adversary's first p blocks;
    when the adversary never reaches C (Greedy just bounces between A and
    B) a block is two requests instead.
    """
    if spec.name in ("ldc", "a-ldc"):
        return canonical_family(params.d, spec.speed or 1, p_values)
    try:
        adversary_prefix(spec, params, 1, limit=1000)
    except NeverVacatesC:
        return Family(
            f"adversary[{spec.label()}]",
            lambda p: RequestMultiset.of(adversary_run(spec, params, 2 * p)),
            tuple(p_values),
        )
    return adversary_family(spec, params, p_values)


@dataclass(frozen=True)
class SeriesPoint:
    family: str
    p: int
    multiset: RequestMultiset
    worst_a: Fraction
    worst_b: Fraction
    ratio_ab: Fraction | None
    ratio_ba: Fraction | None
    method_a: str
    method_b: str


@dataclass(frozen=True)
class RelatednessEstimate:
    series: tuple[SeriesPoint, ...]
    c_u_ab: Fraction | None  # None: unbounded
    c_u_ba: Fraction | None
    tail_ab: Fraction | None  # largest last-p ratio over the families
    tail_ba: Fraction | None
    verdict: str
    slack: Fraction
    empirical: bool = field(default=True)


def _fit_c(series, slack, get):
    """Smallest c with worst_x <= c * worst_y + slack over the whole series;
    None when some point has worst_y = 0 but worst_x > slack."""
    c = Fraction(0)
    for wx, wy in (get(pt) for pt in series):
        excess = wx - slack
        if excess <= 0:
            continue
        if wy == 0:
            return None
        c = max(c, excess / wy)
    return c


def _grows(points, key) -> bool:
    vals = [key(pt) for pt in points]
    if len(vals) < 4 or any(v is None for v in vals):
        return any(v is None for v in vals)
    mid, last = vals[len(vals) // 2], vals[-1]
    rising = all(x <= y for x, y in zip(vals[len(vals) // 2:], vals[len(vals) // 2 + 1:]))
    return rising and mid > 0 and last >= GROWTH_FACTOR * mid


def relatedness_verdict(c_ab: Fraction | None, c_ba: Fraction | None) -> str:
    """Classify from upper-ratio estimates in both directions (None = unbounded)."""
    a_ok = c_ab is not None and c_ab <= 1
    b_ok = c_ba is not None and c_ba <= 1
    if a_ok and b_ok:
        return "equivalent"
    if a_ok:
        return "comparable_A_favor"
    if b_ok:
        return "comparable_B_favor"
    if c_ab is not None and c_ba is None:
        return "weakly_comparable_A_favor"
    if c_ba is not None and c_ab is None:
        return "weakly_comparable_B_favor"
    return "incomparable"


def rwo_relatedness(
    spec_a: AlgorithmSpec,
    spec_b: AlgorithmSpec,
    params: ProblemParams,
    families: Sequence[Family],
    slack: Fraction | None = None,
    budget: EnumerationBudget = DEFAULT_BUDGET,
    method: str = "auto",
) -> RelatednessEstimate:
    """Empirical relative worst order relation between A and B.

    For each family member the worst-order costs of both algorithms are
    computed.  ``c_u(A,B)`` is estimated as the least c with
    worst_A <= c * worst_B + slack on every member seen; a direction whose
    ratio keeps climbing across a family (see ``GROWTH_FACTOR``) is
    reported as unbounded.  Default slack is 3d.
    """
    slack = 3 * params.d if slack is None else Fraction(slack)
    series: list[SeriesPoint] = []
    tails_ab, tails_ba = [], []
    unbounded_ab = unbounded_ba = False
    for fam in families:
        pts = []
        for p in fam.p_values:
            m = fam.build(p)
            pair = rwo_pair_on_multiset(spec_a, spec_b, params, m, budget, method)
            pts.append(SeriesPoint(
                fam.name, p, m, pair.worst_a.cost, pair.worst_b.cost,
                pair.ratio_ab, pair.ratio_ba, pair.worst_a.method, pair.worst_b.method,
            ))
        series.extend(pts)
        if pts:
            tails_ab.append(pts[-1].ratio_ab)
            tails_ba.append(pts[-1].ratio_ba)
        unbounded_ab |= _grows(pts, lambda pt: pt.ratio_ab)
        unbounded_ba |= _grows(pts, lambda pt: pt.ratio_ba)

    c_ab = None if unbounded_ab else _fit_c(series, slack, lambda pt: (pt.worst_a, pt.worst_b))
    c_ba = None if unbounded_ba else _fit_c(series, slack, lambda pt: (pt.worst_b, pt.worst_a))

    def tail(vals):
        if not vals:
            return None
        return None if any(v is None for v in vals) else max(vals)

    return RelatednessEstimate(
        tuple(series), c_ab, c_ba, tail(tails_ab), tail(tails_ba),
        relatedness_verdict(c_ab, c_ba), slack,
    )
