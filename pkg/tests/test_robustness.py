import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from morop.core import BatchEvaluation, Evaluation, NoiseSpec, ProblemDef, evaluate_batch
from morop.problems import numerical_problem
from morop.robustness import (
    ObjectiveExtremes,
    RobustnessError,
    RobustnessRecord,
    ScenarioSet,
    ZeroRangeError,
    assess,
    bin_normal,
    evaluate_scenarios,
    i_f,
    i_rl,
    i_rs,
    large_variation,
    max_deviation,
    rf_space,
    robust_pareto_filter,
)
from morop.sampling import apply_noise, lhs

EXTREMES = ObjectiveExtremes((7.5, 16.0), (3.5, 0.0))


def oracle_irs(x, p=5.0, w=0.1, span=(4.0, 16.0)):
    """Closed-form moments of f1 = x + p/2 and f2 = (x - p)^2 under x + U(-w, w)."""
    d = x - p
    s1 = w / math.sqrt(3)
    s2 = math.sqrt(4 * d * d * w * w / 3 + 4 * w**4 / 45)
    bias2 = w * w / 3
    return math.hypot(s1 / span[0], (s2 + bias2) / span[1])


def sampled_irs(x, w=0.1, n=1000, seed=0):
    prob = numerical_problem(w)
    u = lhs(n, 1, seed)
    X = apply_noise([x], [NoiseSpec.uniform(w)], u)
    ev = evaluate_batch(prob, X, [5.0])
    return i_rs(ev.F, [x + 2.5, (x - 5.0) ** 2], EXTREMES)[0]


# exact rationals from the ranking at p = 3 (A..C rank 1, D rank 3, E rank 5)
EXPECTED_IRL = {"A": 1.0, "B": 0.0, "C": 0.0, "D": 2 / 15, "E": 4 / 25}


def test_oracle_values():
    assert oracle_irs(5.0) == pytest.approx(0.01444, abs=5e-5)
    assert oracle_irs(1.0) == pytest.approx(0.0325, abs=5e-5)


@pytest.mark.parametrize("x", [1.0, 2.0, 3.0, 4.0, 5.0])
def test_irs_matches_oracle(x):
    assert sampled_irs(x) == pytest.approx(oracle_irs(x), rel=0.05)


def test_irs_zero_without_spread():
    f0 = (4.5, 9.0)
    value, stats = i_rs([f0] * 10, f0, EXTREMES)
    assert value == 0.0
    np.testing.assert_array_equal(stats.sigma, 0.0)


def test_irs_accepts_evaluations():
    evs = [Evaluation((4.5 + d, 9.0), (0.0,)) for d in (-0.1, 0.0, 0.1)]
    v, _ = i_rs(evs, Evaluation((4.5, 9.0), (0.0,)), EXTREMES)
    assert v == pytest.approx(0.1 / 4.0)


def test_irs_zero_range_fails_loudly():
    with pytest.raises(ZeroRangeError):
        i_rs([(1.0, 2.0), (1.1, 2.0)], (1.0, 2.0), ObjectiveExtremes((1.0, 3.0), (1.0, 0.0)))


def test_irs_affine_invariance():
    rng = np.random.default_rng(0)
    F = rng.normal(size=(200, 2)) * [0.3, 2.0] + [5.0, 9.0]
    f0 = np.array([5.0, 9.0])
    base = i_rs(F, f0, EXTREMES)[0]
    a, b = np.array([3.0, 0.25]), np.array([-7.0, 100.0])
    ext = ObjectiveExtremes(tuple(a * EXTREMES.fmax + b), tuple(a * EXTREMES.fmin + b))
    assert i_rs(F * a + b, f0 * a + b, ext)[0] == pytest.approx(base, rel=1e-12)


def test_irs_weights():
    F = np.array([[4.4, 9.0], [4.6, 9.0]])
    v1 = i_rs(F, (4.5, 9.0), EXTREMES)[0]
    v2 = i_rs(F, (4.5, 9.0), EXTREMES, weights=(2.0, 1.0))[0]
    assert v2 == pytest.approx(2 * v1)


def test_irs_monotone_in_noise_width():
    for x in (1.0, 3.0, 5.0):
        widths = [0.02, 0.05, 0.1, 0.2, 0.4]
        oracle = [oracle_irs(x, w=w) for w in widths]
        assert oracle == sorted(oracle)
        sampled = [sampled_irs(x, w=w, seed=3) for w in widths]
        assert sampled == sorted(sampled)


def test_max_deviation_examples():
    assert max_deviation([(1.0, 2.0)], (1.0, 2.0)).tolist() == [0.0, 0.0]
    for x, want in ((5.0, [1.5, 9.0]), (1.0, [1.5, 33.0])):
        F = [(x + p / 2, (x - p) ** 2) for p in (3.0, 5.0, 8.0)]
        assert max_deviation(F, (x + 2.5, (x - 5.0) ** 2)).tolist() == want


def test_i_f_examples(num_problem, num_scenarios):
    assert i_f([1.0], num_problem, num_scenarios) == 0
    assert i_f([2.0], num_problem, num_scenarios) == 1


def test_i_f_unconstrained():
    prob = ProblemDef("free", ("x",), ((0, 1),), ("p",), (0.0,), ("a", "b"), (),
                      lambda X, P: (np.column_stack([X[:, 0], P[:, 0] - X[:, 0]]), np.zeros((len(X), 0))))
    sc = ScenarioSet(((-5.0,), (0.0,), (5.0,)), (0.25, 0.5, 0.25))
    assert i_f([0.3], prob, sc) == 1


def test_i_rl_table(num_problem, num_scenarios, five):
    ids, X = five
    for i, sid in enumerate(ids):
        _, value = i_rl(i, X, num_problem, num_scenarios)
        assert value == pytest.approx(EXPECTED_IRL[sid], abs=1e-12)


def test_i_p_decomposition(num_problem, num_scenarios, five):
    _, X = five
    ip_d, irl_d = i_rl(3, X, num_problem, num_scenarios)
    assert ip_d == (1 / 3, 1.0, 1.0)
    assert Fraction(1) - (Fraction(2, 10) / 3 + Fraction(5, 10) + Fraction(3, 10)) == Fraction(2, 15)
    assert irl_d == pytest.approx(2 / 15, abs=1e-15)
    ip_e, _ = i_rl(4, X, num_problem, num_scenarios)
    assert ip_e == (0.2, 1.0, 1.0)


def test_single_initial_scenario_gives_zero(num_problem):
    X = np.array([[1.0], [2.0], [3.0], [4.0], [5.0]])
    sc = ScenarioSet(((5.0,),), (1.0,))
    for i in range(5):
        assert i_rl(i, X, num_problem, sc)[1] == 0.0


def test_zero_probability_scenario_changes_nothing(num_problem, num_scenarios, five):
    _, X = five
    extra = ScenarioSet(num_scenarios.points + ((0.0,),), num_scenarios.probabilities + (0.0,))
    base = large_variation(evaluate_scenarios(num_problem, X, num_scenarios), num_scenarios.probabilities)
    more = large_variation(evaluate_scenarios(num_problem, X, extra), extra.probabilities)
    # a zero-weight scenario may still flip I_F, so compare only members feasible there too
    keep = more.i_f == 1
    np.testing.assert_array_equal(base.i_rl[keep], more.i_rl[keep])


@st.composite
def random_rankings(draw):
    k = draw(st.integers(1, 30))
    n_sc = draw(st.integers(1, 6))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    h = rng.random(n_sc) + 1e-3
    h /= math.fsum(h)
    h[-1] = 1.0 - math.fsum(h[:-1])
    evs = []
    for _ in range(n_sc):
        F = rng.integers(0, 6, size=(k, 2)).astype(float)
        G = rng.choice([-1.0, 1.0], p=[0.85, 0.15], size=(k, 1))
        evs.append(BatchEvaluation(F, G, np.ones(k, dtype=bool), (None,) * k))
    return evs, h


@settings(max_examples=100, deadline=None)
@given(random_rankings())
def test_irl_invariants(data):
    evs, h = data
    res = large_variation(evs, h)
    assert np.all((res.i_rl >= 0) & (res.i_rl <= 1))
    for s in range(len(res.i_rl)):
        assert (res.i_rl[s] == 1.0) == (res.i_f[s] == 0)
        all_top = res.i_f[s] == 1 and np.all(res.ranks[s] == 1)
        assert (res.i_rl[s] == 0.0) == all_top
        assert np.all(res.i_p[s] == 1.0 / res.ranks[s])


def test_probabilities_validated():
    with pytest.raises(RobustnessError):
        ScenarioSet(((1.0,), (2.0,)), (0.5, 0.6))
    with pytest.raises(RobustnessError):
        ScenarioSet(((1.0,), (2.0,)), (1.2, -0.2))
    ScenarioSet(((1.0,), (2.0,)), (0.5, 0.5 + 5e-10))


def test_initial_scenario_is_argmax(num_scenarios):
    assert num_scenarios.initial == (5.0,)
    tie = ScenarioSet(((1.0,), (2.0,), (3.0,)), (0.4, 0.4, 0.2))
    assert tie.initial_index == 0


def test_rf_space():
    r = RobustnessRecord(id="a", x=(0.0,), f0=(0.0,), i_rs=0.01, i_f=1, i_p=(1.0,), ranks=(1,), i_rl=0.2)
    assert rf_space([r]) == [(0.01, 0.2)]
    assert rf_space([]) == []


def test_filter_examples():
    assert robust_pareto_filter({"a": (0.1, 0.1), "b": (0.1, 0.1)}) == {"a", "b"}
    assert robust_pareto_filter([("a", 0, 1), ("b", 1, 0), ("c", 0.5, 0.5)]) == {"a", "b", "c"}
    assert robust_pareto_filter({"a": (0.0, 0.0), "b": (math.nan, 0.0)}) == {"a"}


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5)), min_size=1, max_size=40))
def test_filter_brute_force(pts):
    d = {i: (float(a), float(b)) for i, (a, b) in enumerate(pts)}
    want = {i for i, p in d.items()
            if not any(q[0] <= p[0] and q[1] <= p[1] and q != p for q in d.values())}
    assert robust_pareto_filter(d) == want


def test_assess_numerical(num_problem, num_scenarios, five):
    ids, X = five
    records, _ = assess(num_problem, X, ids, num_scenarios, n_samples=1000, seed=7)
    by_id = {r.id: r for r in records}
    for sid, want in EXPECTED_IRL.items():
        assert by_id[sid].i_rl == pytest.approx(want, abs=1e-12)
    order = sorted(ids, key=lambda s: by_id[s].i_rs)
    assert order == ["E", "D", "C", "B", "A"]
    for sid, x in zip(ids, X[:, 0]):
        assert by_id[sid].i_rs == pytest.approx(oracle_irs(x), rel=0.05)
    assert robust_pareto_filter({r.id: r.rf_point for r in records}) == {"C", "D", "E"}
    assert list(by_id["E"].df_large) == [1.5, 9.0]
    assert list(by_id["A"].df_large) == [1.5, 33.0]
    assert by_id["A"].i_f == 0


def test_assess_threads_match_serial(num_problem, num_scenarios, five):
    ids, X = five
    a, _ = assess(num_problem, X, ids, num_scenarios, n_samples=200, seed=1)
    b, _ = assess(num_problem, X, ids, num_scenarios, n_samples=200, seed=1, threads=4)
    assert [r.i_rs for r in a] == [r.i_rs for r in b]


def test_assess_empty(num_problem, num_scenarios):
    with pytest.raises(RobustnessError, match="empty-archive"):
        assess(num_problem, np.zeros((0, 1)), [], num_scenarios)


def test_bin_normal_matches_wind_table():
    centres, h = bin_normal(10.0, 2.0, 6.0, 14.0)
    assert centres.tolist() == [6.0, 7, 8, 9, 10, 11, 12, 13, 14]
    table = [0.028, 0.066, 0.124, 0.180, 0.204, 0.180, 0.124, 0.066, 0.028]
    np.testing.assert_allclose(h, table, atol=5e-4)
    assert math.fsum(h) == pytest.approx(1.0, abs=1e-12)
    _, mass = bin_normal(10.0, 2.0, 6.0, 14.0, method="mass")
    assert math.fsum(mass) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(RobustnessError):
        bin_normal(10.0, 2.0, 6.0, 14.5)
