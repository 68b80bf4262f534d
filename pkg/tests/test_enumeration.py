import itertools
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from babyserver.algorithms import GREEDY, LDC, OPT, cost_kernel, run
from babyserver.core import Point, ProblemParams, RequestMultiset
from babyserver.enumeration import (
    BudgetExceeded,
    EnumerationBudget,
    all_sequences,
    cost_histogram,
    count_runs,
    distinct_permutations,
    multinomial,
    sample_permutation,
    walk_permutations,
    walk_sequences,
)

import oracles

small = st.builds(RequestMultiset, st.integers(0, 3), st.integers(0, 3), st.integers(0, 3))


def test_all_sequences_is_lexicographic_and_complete():
    seqs = list(all_sequences(3))
    assert len(seqs) == 27 and seqs == sorted(seqs) and len(set(seqs)) == 27


@given(small)
def test_distinct_permutations_match_itertools(m):
    mine = list(distinct_permutations(m))
    ref = sorted(set(itertools.permutations([Point.A] * m.n_A + [Point.B] * m.n_B + [Point.C] * m.n_C)))
    assert mine == ref
    assert len(mine) == multinomial(m)


def test_budgets():
    tight = EnumerationBudget(max_sequences=3**4, max_permutations=10)
    list(all_sequences(4, tight))
    with pytest.raises(BudgetExceeded):
        all_sequences(5, tight)
    with pytest.raises(BudgetExceeded):
        distinct_permutations(RequestMultiset(2, 2, 1), tight)  # 30 arrangements
    with pytest.raises(BudgetExceeded):
        cost_histogram(cost_kernel(GREEDY, ProblemParams(2)), 5, tight)


@pytest.mark.parametrize("d", [Fraction(2), Fraction(5, 2)])
def test_walker_matches_direct_runs(d):
    params = ProblemParams(d)
    kernels = [cost_kernel(s, params) for s in (GREEDY, LDC, OPT)]
    seen = []
    for seq, totals in walk_sequences(kernels, 6, min_len=0):
        seen.append(seq)
        assert totals == (oracles.greedy(seq, d), oracles.ldc(seq, d), oracles.brute_opt(seq, d))
    assert len(seen) == sum(3**k for k in range(7))
    # shorter before longer along each branch: every prefix shows up earlier
    index = {s: i for i, s in enumerate(seen)}
    assert all(index[s[:-1]] < index[s] for s in seen if s)


def test_walker_with_prefix():
    params = ProblemParams(2)
    out = list(walk_sequences([cost_kernel(LDC, params)], 4, 4, prefix=(Point.B, Point.A)))
    assert len(out) == 9
    assert all(s[:2] == (Point.B, Point.A) for s, _ in out)


@given(small)
@settings(deadline=None)
def test_walk_permutations_match_runs(m):
    params = ProblemParams(Fraction(5, 2))
    for seq, (c,) in walk_permutations([cost_kernel(LDC, params)], m):
        assert c == run(LDC, params, seq).total


@pytest.mark.parametrize("spec", [GREEDY, LDC, OPT], ids=["greedy", "ldc", "opt"])
@pytest.mark.parametrize("n", [0, 1, 4, 6])
def test_histogram_matches_brute_force(spec, n):
    params = ProblemParams(Fraction(5, 2))
    hist = cost_histogram(cost_kernel(spec, params), n)
    ref = Counter(run(spec, params, s).total for s in all_sequences(n))
    assert hist == ref


def test_sample_permutation_is_deterministic_and_valid():
    m = RequestMultiset(3, 4, 2)
    s1, s2 = sample_permutation(m, 7), sample_permutation(m, 7)
    assert s1 == s2
    assert RequestMultiset.of(s1) == m


def test_sample_permutation_is_roughly_uniform():
    m = RequestMultiset(1, 1, 1)
    counts = Counter(sample_permutation(m, seed) for seed in range(6000))
    assert len(counts) == 6
    assert all(800 < c < 1200 for c in counts.values())


def test_count_runs():
    assert count_runs("") == 0
    assert count_runs("AABBBA") == 3
    assert count_runs("ABAB") == 4
