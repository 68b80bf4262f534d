from fractions import Fraction

import numpy as np
import pytest
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from babyserver.algorithms import BAL, DC, DUMMY, GREEDY, LDC, OPT, a_ldc, run
from babyserver.core import ProblemParams, RequestMultiset
from babyserver.enumeration import EnumerationBudget, all_sequences, count_runs
from babyserver.measures import (
    EXPECTATION_OF_RATIO,
    average_compare,
    bijective_compare,
    canonical_family,
    canonical_worst_family,
    compare_sorted,
    empirical_competitive,
    maxmax,
    random_order_ratio,
    relatedness_verdict,
    rwo_pair_on_multiset,
    rwo_relatedness,
    sequence_family,
    sorted_costs,
)

import oracles

D2 = ProblemParams(2)


def test_competitive_small():
    res = empirical_competitive(LDC, D2, 6)
    assert res.ratio == 3 and "".join(res.witness) == "BABAB"
    assert empirical_competitive(GREEDY, D2, 6).ratio == 3
    assert empirical_competitive(OPT, D2, 5).ratio == 1


def test_competitive_independent_of_jobs():
    one = empirical_competitive(BAL, ProblemParams(Fraction(5, 2)), 6)
    many = empirical_competitive(BAL, ProblemParams(Fraction(5, 2)), 6, jobs=3)
    assert one == many


def test_competitive_against_brute_force():
    d = Fraction(5, 2)
    best = max(
        (oracles.ldc(s, d) / oracles.brute_opt(s, d), -len(s))
        for n in range(1, 6) for s in all_sequences(n) if oracles.brute_opt(s, d) > 0
    )
    assert empirical_competitive(LDC, ProblemParams(d), 5).ratio == best[0]


def test_maxmax_examples():
    g = maxmax(GREEDY, D2, 6)
    assert g.M_value == 1 and g.max_cost == 6
    l = maxmax(LDC, D2, 6)
    assert l.M_value == Fraction(4, 3) and l.max_cost == 8 and l.opt_max_cost == 5
    with pytest.raises(ValueError):
        maxmax(GREEDY, D2, 0)


def test_maxmax_against_brute_force():
    d = Fraction(5, 2)
    for n in range(1, 6):
        worst = max(oracles.bal(s, d) for s in all_sequences(n))
        assert maxmax(BAL, ProblemParams(d), n).max_cost == worst


def test_random_order_examples():
    r = random_order_ratio(GREEDY, D2, "(BA)^2")
    assert r.exact and r.value == Fraction(15, 11)
    assert r.expected_alg == Fraction(5, 2) and r.expected_opt == Fraction(11, 6)
    assert random_order_ratio(GREEDY, D2, "(BA)^4").expected_alg == Fraction(9, 2)
    assert random_order_ratio(LDC, D2, "(BA)^2").value == Fraction(15, 11)
    assert random_order_ratio(LDC, D2, "(BA)^2", EXPECTATION_OF_RATIO).value == Fraction(4, 3)


def test_random_order_against_itertools():
    d = Fraction(5, 2)
    arr = oracles.distinct_arrangements("AABBBC")
    e_alg = sum(oracles.ldc(s, d) for s in arr) / len(arr)
    e_opt = sum(oracles.brute_opt(s, d) for s in arr) / len(arr)
    r = random_order_ratio(LDC, ProblemParams(d), "AABBBC")
    assert (r.expected_alg, r.expected_opt, r.value) == (e_alg, e_opt, e_alg / e_opt)
    assert r.arrangements == len(arr)


def test_random_order_sampling_is_seeded():
    budget = EnumerationBudget(max_permutations=10)
    a = random_order_ratio(GREEDY, D2, "(BA)^4", budget=budget, samples=200, seed=5)
    b = random_order_ratio(GREEDY, D2, "(BA)^4", budget=budget, samples=200, seed=5)
    c = random_order_ratio(GREEDY, D2, "(BA)^4", budget=budget, samples=200, seed=6)
    assert a == b and not a.exact and a.samples == 200 and a.seed == 5
    assert a.value != c.value
    exact = random_order_ratio(GREEDY, D2, "(BA)^4").value
    assert abs(float(a.value) - float(exact)) < 0.15


def test_random_order_needs_a_b():
    with pytest.raises(ValueError):
        random_order_ratio(GREEDY, D2, "AACC")
    with pytest.raises(ValueError):
        random_order_ratio(GREEDY, D2, "AB", mode="median")


@pytest.mark.parametrize("h,t", [(h, t) for h in range(1, 7) for t in range(1, 7)])
def test_expected_runs_formula(h, t):
    arr = oracles.distinct_arrangements("A" * h + "B" * t)
    mean = Fraction(sum(count_runs(s) for s in arr), len(arr))
    assert mean == 1 + Fraction(2 * h * t, h + t)


def _matching_exists(ca, cb):
    """A perfect matching with ca[i] <= cb[j] on every edge, by scipy."""
    rows, cols = [], []
    for i, x in enumerate(ca):
        for j, y in enumerate(cb):
            if x <= y:
                rows.append(i)
                cols.append(j)
    graph = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(len(ca), len(cb)))
    match = maximum_bipartite_matching(graph, perm_type="column")
    return bool((match >= 0).all())


@pytest.mark.parametrize("pair", [(GREEDY, LDC), (LDC, GREEDY), (DUMMY, BAL), (BAL, LDC), (LDC, DC)],
                         ids=["greedy-ldc", "ldc-greedy", "dummy-bal", "bal-ldc", "ldc-dc"])
@pytest.mark.parametrize("n", [2, 4, 6])
def test_bijective_matches_matching_oracle(pair, n):
    params = ProblemParams(Fraction(5, 2))
    a, b = pair
    ca = [run(a, params, s).total for s in all_sequences(n)]
    cb = [run(b, params, s).total for s in all_sequences(n)]
    res = bijective_compare(a, b, params, n)
    assert (res.verdict in ("A_better", "equivalent")) == _matching_exists(ca, cb)
    assert (res.verdict in ("B_better", "equivalent")) == _matching_exists(cb, ca)


def test_bijective_examples():
    assert bijective_compare(GREEDY, LDC, D2, 1).verdict == "equivalent"
    r = bijective_compare(GREEDY, LDC, D2, 5)
    assert r.verdict == "A_better" and r.strict
    assert sum(k for _, _, k in r.witness_pairing) == 3**5
    r = bijective_compare(DUMMY, GREEDY, D2, 3)
    assert r.verdict == "B_better" and r.strict


def test_compare_sorted():
    F = Fraction
    assert compare_sorted([F(1), F(2)], [F(1), F(2)]) == ("equivalent", False)
    assert compare_sorted([F(0), F(2)], [F(1), F(2)]) == ("A_better", True)
    assert compare_sorted([F(0), F(3)], [F(1), F(2)]) == ("incomparable", False)
    with pytest.raises(ValueError):
        compare_sorted([F(0)], [])


def test_sorted_costs_are_sorted():
    c = sorted_costs(LDC, D2, 4)
    assert c == sorted(c) and len(c) == 81


def test_average_examples():
    r = average_compare(GREEDY, LDC, D2, 5)
    assert (r.sum_a, r.sum_b, r.verdict) == (405, 406, "A_better")
    r = average_compare(a_ldc(Fraction(1, 2)), LDC, D2, 6)
    assert (r.sum_a, r.sum_b) == (1458, 1472)
    assert average_compare(LDC, LDC, D2, 3).verdict == "equivalent"


def test_average_against_brute_force():
    d = Fraction(5, 2)
    total = sum(oracles.bal(s, d) for s in all_sequences(5))
    assert average_compare(BAL, GREEDY, ProblemParams(d), 5).sum_a == total


def test_rwo_pairs():
    r = rwo_pair_on_multiset(LDC, GREEDY, D2, RequestMultiset(2, 3, 1))
    assert (r.worst_a.cost, r.worst_b.cost, r.ratio_ab) == (8, 5, Fraction(8, 5))
    r = rwo_pair_on_multiset(LDC, DC, D2, RequestMultiset(2, 1, 1))
    assert r.ratio_ab == Fraction(1, 2)
    r = rwo_pair_on_multiset(LDC, GREEDY, D2, RequestMultiset(3, 0, 2))
    assert r.ratio_ab == 1  # both zero


def test_relatedness_verdicts():
    F = Fraction
    assert relatedness_verdict(F(1), F(1)) == "equivalent"
    assert relatedness_verdict(F(1, 2), F(3)) == "comparable_A_favor"
    assert relatedness_verdict(F(3), F(1, 2)) == "comparable_B_favor"
    assert relatedness_verdict(F(2), None) == "weakly_comparable_A_favor"
    assert relatedness_verdict(None, F(2)) == "weakly_comparable_B_favor"
    assert relatedness_verdict(F(2), F(3)) == "incomparable"
    assert relatedness_verdict(None, None) == "incomparable"


def test_ldc_greedy_relatedness():
    fams = [sequence_family("BABABC", range(1, 13)), sequence_family("BA", range(1, 25))]
    est = rwo_relatedness(LDC, GREEDY, D2, fams, budget=EnumerationBudget(max_permutations=2000))
    assert est.c_u_ba is None and est.c_u_ab is not None
    assert est.verdict == "weakly_comparable_A_favor"
    assert est.slack == 6


def test_families():
    fam = canonical_family(Fraction(5, 2), Fraction(1, 2), [1, 2])
    assert fam.build(2) == RequestMultiset(10, 12, 2)
    assert canonical_worst_family(LDC, D2, [3]).build(3) == RequestMultiset(6, 9, 3)
    assert canonical_worst_family(GREEDY, D2, [3]).build(3) == RequestMultiset(3, 3, 0)
    assert canonical_worst_family(BAL, D2, [1]).build(1) == RequestMultiset.of("BABC")


def test_bal_and_ldc_are_incomparable_off_the_canonical_family():
    params = ProblemParams(Fraction(5, 2))
    r = rwo_pair_on_multiset(BAL, LDC, params, RequestMultiset(37, 3, 0), method="cruel")
    assert (r.worst_a.cost, r.worst_b.cost) == (Fraction(9, 2), Fraction(13, 2))
    r = rwo_pair_on_multiset(BAL, LDC, params, RequestMultiset(4, 6, 2), method="cruel")
    assert r.worst_a.cost > r.worst_b.cost


@pytest.mark.parametrize("d", [Fraction(3, 2), Fraction(2), Fraction(5, 2)])
def test_maxmax_per_request_cost_at_most_d(d):
    params = ProblemParams(d)
    # a compliant algorithm moves one server by at most d per request; DC
    # moves both, 1 + 1 on a B request, which beats d when d < 2
    for spec, bound in ((GREEDY, d), (LDC, d), (BAL, d), (DUMMY, d), (DC, max(d, 2))):
        for n in (1, 4, 7):
            res = maxmax(spec, params, n)
            assert res.M_value <= bound
            assert res.ratio_vs_opt == res.M_value / (res.opt_max_cost / n)
    assert maxmax(DC, ProblemParams(Fraction(3, 2)), 1).M_value == 2


@pytest.mark.parametrize("d", [Fraction(2), Fraction(5, 2)])
def test_lazy_bijective_dominance(d):
    params = ProblemParams(d)
    for n in range(1, 9):
        assert bijective_compare(LDC, DC, params, n).verdict in ("A_better", "equivalent")


@pytest.mark.parametrize("d", [Fraction(2), Fraction(3)])
def test_bal_ldc_bounded_difference_at_integer_d(d):
    params = ProblemParams(d)
    k = int(d)
    diffs = [
        rwo_pair_on_multiset(BAL, LDC, params, RequestMultiset(k * p, (k + 1) * p, p), method="cruel")
        for p in range(1, 16)
    ]
    assert max(abs(r.worst_a.cost - r.worst_b.cost) for r in diffs) <= 3 * d
    for m in (m for n in range(10) for m in
              (RequestMultiset(a, b, n - a - b) for a in range(n + 1) for b in range(n + 1 - a))):
        r = rwo_pair_on_multiset(BAL, LDC, params, m)
        assert abs(r.worst_a.cost - r.worst_b.cost) <= 3 * d


@pytest.mark.parametrize("n", [6, 8, 10, 12])
def test_random_order_greedy_exceeds_ldc(n):
    seq = "BA" * (n // 2)
    g = random_order_ratio(GREEDY, D2, seq).value
    l = random_order_ratio(LDC, D2, seq).value
    assert g > l, f"n={n}: Greedy {g} vs LDC {l}"
