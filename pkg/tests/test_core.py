import numpy as np
import pytest

from morop.core import (
    Evaluation,
    ModelError,
    NoiseSpec,
    ProblemDef,
    evaluate,
    evaluate_batch,
    feasible_rows,
    is_feasible,
    total_violation,
)


def test_numerical_row_b(num_problem):
    e = evaluate(num_problem, [2.0], [5.0])
    assert e.f == (4.5, 9.0)
    assert e.g == (-1.5,)
    assert e.ok


def test_numerical_row_e(num_problem):
    assert evaluate(num_problem, [5.0], [5.0]).f == (7.5, 0.0)


@pytest.mark.parametrize("p", [-3.0, 0.0, 2.5, 5.0, 8.0, 11.25])
def test_f2_vanishes_at_x_equal_p(num_problem, p):
    assert evaluate(num_problem, [p], [p]).f[1] == 0.0


def test_infeasible_a_at_p3(num_problem):
    e = evaluate(num_problem, [1.0], [3.0])
    assert e.f[0] == 2.5 and e.g == (0.5,)
    assert not is_feasible(e)


def test_feasible_a_at_p5(num_problem):
    e = evaluate(num_problem, [1.0], [5.0])
    assert e.f[0] == 3.5
    assert is_feasible(e)


def test_boundary_counts_as_feasible():
    assert is_feasible(Evaluation((1.0, 1.0), (0.0, 0.0)))


def test_failed_evaluation_has_no_feasibility():
    with pytest.raises(ModelError):
        is_feasible(Evaluation((np.nan,), (0.0,), status="model-failure"))


def test_determinism(num_problem):
    a = evaluate(num_problem, [2.345678901], [4.2])
    b = evaluate(num_problem, [2.345678901], [4.2])
    assert a == b
    assert np.asarray(a.f).tobytes() == np.asarray(b.f).tobytes()


def test_feasibility_monotone_in_g():
    rng = np.random.default_rng(3)
    G = rng.normal(size=(500, 3))
    before = feasible_rows(G)
    after = feasible_rows(G - rng.random((500, 3)))
    assert np.all(after[before])


def _nan_problem():
    def ev(X, P):
        F = np.column_stack([X[:, 0], np.where(X[:, 0] > 0.5, np.nan, X[:, 0])])
        return F, np.zeros((len(X), 0)), None

    return ProblemDef("nan", ("x",), ((0.0, 1.0),), ("p",), (0.0,), ("a", "b"), (), ev)


def test_non_finite_output_is_error_status():
    e = evaluate(_nan_problem(), [0.9], [0.0])
    assert not e.ok
    assert e.status != "ok"
    good = evaluate(_nan_problem(), [0.1], [0.0])
    assert good.ok and is_feasible(good)  # q = 0 is always feasible


def test_batch_broadcasts_environment(num_problem):
    b = evaluate_batch(num_problem, [[1.0], [2.0], [3.0]], [5.0])
    np.testing.assert_array_equal(b.F[:, 0], [3.5, 4.5, 5.5])
    assert b.ok.all()


def test_shape_errors(num_problem):
    with pytest.raises(ModelError):
        evaluate(num_problem, [1.0, 2.0], [5.0])
    with pytest.raises(ModelError):
        evaluate_batch(num_problem, [[1.0]], [[5.0, 1.0]])


def test_problem_validation():
    ev = lambda X, P: (X, np.zeros((len(X), 0)))  # noqa: E731
    with pytest.raises(ModelError):
        ProblemDef("bad", ("x",), ((2.0, 1.0),), (), (), ("f",), (), ev)
    with pytest.raises(ModelError):
        ProblemDef("bad", ("x",), ((0.0, 1.0),), ("p",), (), ("f",), (), ev)


def test_noise_spec_roundtrip():
    for spec in (NoiseSpec.uniform(0.5), NoiseSpec.normal(2.0), NoiseSpec()):
        assert NoiseSpec.from_dict(spec.to_dict()) == spec
    with pytest.raises(ModelError):
        NoiseSpec.uniform(-1.0)


def test_total_violation():
    G = np.array([[-1.0, 2.0], [0.0, 0.0], [3.0, 1.0]])
    np.testing.assert_array_equal(total_violation(G), [2.0, 0.0, 4.0])
