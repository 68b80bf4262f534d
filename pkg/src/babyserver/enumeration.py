"""Exhaustive and sampled request streams, with hard budgets.

Streams are deterministic and restartable.  The walkers below evaluate
cost kernels along a prefix tree so that a sequence of length n costs
one step on top of its parent, instead of n steps from scratch.
"""

from __future__ import annotations

import itertools
import math
import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .algorithms import Kernel
from .core import POINTS, Point, RequestMultiset


class BudgetExceeded(RuntimeError):
    """An exhaustive scan would exceed its configured cap."""


@dataclass(frozen=True)
class EnumerationBudget:
    max_sequences: int = 3**13
    max_permutations: int = 10**6
    rng_seed: int = 0

    def check_sequences(self, n: int) -> None:
        if n < 0:
            raise ValueError("length must be nonnegative")
        if 3**n > self.max_sequences:
            raise BudgetExceeded(f"3^{n} sequences exceed max_sequences={self.max_sequences}")

    def check_permutations(self, m: RequestMultiset) -> None:
        count = multinomial(m)
        if count > self.max_permutations:
            raise BudgetExceeded(
                f"{count} arrangements of {m} exceed max_permutations={self.max_permutations}"
            )


DEFAULT_BUDGET = EnumerationBudget()


def multinomial(m: RequestMultiset) -> int:
    return math.factorial(m.n) // (
        math.factorial(m.n_A) * math.factorial(m.n_B) * math.factorial(m.n_C)
    )


def all_sequences(n: int, budget: EnumerationBudget = DEFAULT_BUDGET) -> Iterator[tuple[Point, ...]]:
    """All 3^n sequences of length n in lexicographic order."""
    budget.check_sequences(n)
    return itertools.product(POINTS, repeat=n)


def distinct_permutations(
    m: RequestMultiset, budget: EnumerationBudget = DEFAULT_BUDGET
) -> Iterator[tuple[Point, ...]]:
    """Each distinct arrangement of the multiset once, lexicographically."""
    budget.check_permutations(m)
    counts = list(m.as_tuple())
    prefix: list[Point] = []

    def rec():
        if len(prefix) == m.n:
            yield tuple(prefix)
            return
        for i, p in enumerate(POINTS):
            if counts[i]:
                counts[i] -= 1
                prefix.append(p)
                yield from rec()
                prefix.pop()
                counts[i] += 1

    return rec()


def expand(m: RequestMultiset) -> list[Point]:
    return [Point.A] * m.n_A + [Point.B] * m.n_B + [Point.C] * m.n_C


def sample_permutation(m: RequestMultiset, seed: int) -> tuple[Point, ...]:
    """Uniform random arrangement of ``m``.

    Fisher-Yates shuffle of the expanded multiset driven by Python's
    Mersenne Twister (``random.Random(seed)``).  Every one of the n!
    orderings is equally likely, so every distinct arrangement is too.
    """
    items = expand(m)
    random.Random(seed).shuffle(items)
    return tuple(items)


def count_runs(seq: Sequence[Point]) -> int:
    """Number of maximal blocks of equal consecutive requests."""
    return sum(1 for _ in itertools.groupby(seq))


# ---------------------------------------------------------------------------
# Prefix-tree walkers
# ---------------------------------------------------------------------------

def walk_sequences(
    kernels: Sequence[Kernel],
    n_max: int,
    min_len: int = 1,
    prefix: Sequence[Point] = (),
    budget: EnumerationBudget = DEFAULT_BUDGET,
) -> Iterator[tuple[tuple[Point, ...], tuple[Fraction, ...]]]:
    """Yield ``(sequence, totals)`` for every sequence starting with
    ``prefix`` whose length lies in ``[min_len, n_max]``; ``totals[i]`` is
    the cost under ``kernels[i]``.  Shorter sequences precede their
    extensions, siblings come in A, B, C order.
    """
    budget.check_sequences(n_max)
    states = [k[0] for k in kernels]
    totals = [Fraction(0)] * len(kernels)
    for p in prefix:
        for i, (_, adv) in enumerate(kernels):
            states[i], inc = adv(states[i], p)
            totals[i] += inc
    path = list(prefix)

    def rec(states, totals):
        if len(path) >= min_len:
            yield tuple(path), tuple(totals)
        if len(path) == n_max:
            return
        for p in POINTS:
            new_states, new_totals = [], []
            for (_, adv), s, t in zip(kernels, states, totals):
                s2, inc = adv(s, p)
                new_states.append(s2)
                new_totals.append(t + inc)
            path.append(p)
            yield from rec(new_states, new_totals)
            path.pop()

    if len(path) > n_max:
        return iter(())
    return rec(states, totals)


def walk_permutations(
    kernels: Sequence[Kernel],
    m: RequestMultiset,
    budget: EnumerationBudget = DEFAULT_BUDGET,
) -> Iterator[tuple[tuple[Point, ...], tuple[Fraction, ...]]]:
    """Like ``distinct_permutations`` but yields each arrangement with its
    costs under every kernel."""
    budget.check_permutations(m)
    counts = list(m.as_tuple())
    path: list[Point] = []

    def rec(states, totals):
        if len(path) == m.n:
            yield tuple(path), tuple(totals)
            return
        for i, p in enumerate(POINTS):
            if not counts[i]:
                continue
            new_states, new_totals = [], []
            for (_, adv), s, t in zip(kernels, states, totals):
                s2, inc = adv(s, p)
                new_states.append(s2)
                new_totals.append(t + inc)
            counts[i] -= 1
            path.append(p)
            yield from rec(new_states, new_totals)
            path.pop()
            counts[i] += 1

    return rec([k[0] for k in kernels], [Fraction(0)] * len(kernels))


def cost_histogram(
    kernel: Kernel, n: int, budget: EnumerationBudget = DEFAULT_BUDGET
) -> Counter:
    """Exact multiset of costs over all 3^n sequences, as ``{cost: count}``.

    Sequences reaching the same engine state are merged, so the work is
    proportional to (distinct states) x (distinct costs) per length
    rather than to 3^n.
    """
    budget.check_sequences(n)
    start, advance = kernel
    layer: dict = {start: Counter({Fraction(0): 1})}
    for _ in range(n):
        nxt: dict = {}
        for state, costs in layer.items():
            for p in POINTS:
                s2, inc = advance(state, p)
                bucket = nxt.setdefault(s2, Counter())
                for c, k in costs.items():
                    bucket[c + inc] += k
        layer = nxt
    total: Counter = Counter()
    for costs in layer.values():
        total.update(costs)
    return total
