import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from morop.pareto import ObjectivePoint, dominates, nondominated_mask, pareto_front, rank_individuals

P3 = {"A": (2.5, 4.0), "B": (3.5, 1.0), "C": (4.5, 0.0), "D": (5.5, 1.0), "E": (6.5, 4.0)}


def brute_dominates(a, b):
    better = False
    for x, y in zip(a, b):
        if x > y:
            return False
        if x < y:
            better = True
    return better


def brute_ranks(F, feasible=None, include_infeasible=True):
    out = []
    for j in range(len(F)):
        c = 0
        for i in range(len(F)):
            if not include_infeasible and not feasible[i]:
                continue
            if brute_dominates(F[i], F[j]):
                c += 1
        out.append(c + 1)
    return out


def test_examples():
    assert dominates((3.5, 1), (5.5, 1))
    assert not dominates((1.0, 2.0), (1.0, 2.0))
    assert dominates((2.5, 4), (6.5, 4))
    assert dominates(ObjectivePoint("a", (0, 0)), ObjectivePoint("b", (0, 1)))


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        dominates((1, 2), (1, 2, 3))


def test_single_point_rank():
    assert rank_individuals([ObjectivePoint("only", (3.0, 1.0))])["only"] == 1


def test_ranks_at_p3_include_infeasible():
    pts = [ObjectivePoint(k, f, feasible=(k != "A")) for k, f in P3.items()]
    r = rank_individuals(pts, include_infeasible=True)
    assert r.ranks == {"A": 1, "B": 1, "C": 1, "D": 3, "E": 5}
    assert r.performance_index("D") == 1 / 3
    assert r.performance_index("E") == 1 / 5


def test_ranks_at_p3_excluding_infeasible():
    # without A, E is dominated by B, C and D only
    pts = [ObjectivePoint(k, f, feasible=(k != "A")) for k, f in P3.items()]
    r = rank_individuals(pts, include_infeasible=False)
    assert r.ranks == {"A": 1, "B": 1, "C": 1, "D": 3, "E": 4}


def test_all_rank_one_at_p8():
    pts = [ObjectivePoint(k, (x + 4.0, (x - 8.0) ** 2)) for k, x in zip("ABCDE", range(1, 6))]
    assert set(rank_individuals(pts).ranks.values()) == {1}


def test_front_at_p5():
    pts = [ObjectivePoint(k, (x + 2.5, (x - 5.0) ** 2)) for k, x in zip("ABCDE", range(1, 6))]
    assert pareto_front(pts) == set("ABCDE")


def test_front_of_decreasing_curve():
    pts = [ObjectivePoint(i, (float(i), 10.0 - i)) for i in range(10)]
    assert pareto_front(pts) == set(range(10))


def test_dominated_excluded():
    assert pareto_front([ObjectivePoint("a", (1, 1)), ObjectivePoint("b", (2, 2))]) == {"a"}


def test_front_ignores_infeasible_dominators():
    pts = [ObjectivePoint("a", (0, 0), feasible=False), ObjectivePoint("b", (1, 1))]
    assert pareto_front(pts) == {"b"}


def test_duplicates_keep_rank_one():
    r = rank_individuals([ObjectivePoint("a", (1, 1)), ObjectivePoint("b", (1, 1))])
    assert r.ranks == {"a": 1, "b": 1}


vec = st.lists(st.integers(-3, 3).map(float), min_size=3, max_size=3)


@given(vec, vec, vec)
def test_antisymmetry_and_transitivity(a, b, c):
    if dominates(a, b):
        assert not dominates(b, a)
    if dominates(a, b) and dominates(b, c):
        assert dominates(a, c)


@st.composite
def instances(draw):
    n = draw(st.integers(1, 200))
    m = draw(st.sampled_from([2, 3]))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    # coarse grid makes ties and duplicates common
    F = rng.integers(0, draw(st.sampled_from([4, 20, 1000])), size=(n, m)).astype(float)
    feas = rng.random(n) < 0.8
    return F, feas


@settings(max_examples=100, deadline=None)
@given(instances(), st.booleans())
def test_rank_matches_brute_force(inst, include_infeasible):
    F, feas = inst
    pts = [ObjectivePoint(i, F[i], bool(feas[i])) for i in range(len(F))]
    got = rank_individuals(pts, include_infeasible)
    want = brute_ranks(F.tolist(), feas, include_infeasible)
    assert [got[i] for i in range(len(F))] == want


@settings(max_examples=50, deadline=None)
@given(instances())
def test_front_matches_definition(inst):
    F, feas = inst
    pts = [ObjectivePoint(i, F[i], bool(feas[i])) for i in range(len(F))]
    want = {s for s in range(len(F)) if feas[s]
            and not any(feas[t] and brute_dominates(F[t], F[s]) for t in range(len(F)))}
    assert pareto_front(pts) == want
    np.testing.assert_array_equal(nondominated_mask(F), [r == 1 for r in brute_ranks(F.tolist())])
