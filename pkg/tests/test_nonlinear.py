import numpy as np
import pytest

from rwbvp.nonlinear import (GridState, NonlinearProblem, Status, StopRule, cubic_problem,
                             detect_divergence, initial_state, relaxed_iteration,
                             rescale_variable, solve_cubic, solve_nonlinear, stopping_test,
                             sweep_iteration, validation_problem, within_envelope,
                             zero_problem)
from rwbvp.oracles import GOLDEN


def _state(values):
    values = np.asarray(values, dtype=float)
    return GridState(1.0, values, np.zeros(len(values), dtype=np.int64))


def test_zero_source_converges_to_line():
    rep = solve_nonlinear(zero_problem(), 10, 10**5, stop=StopRule("none", miter=3), seed=1)
    assert np.max(np.abs(rep.state.values - rep.state.x)) <= 0.02


def test_single_node_closed_form():
    c = 0.3
    prob = NonlinearProblem(lambda x, u: np.full_like(u, c), 1.0, 1.0)
    st = sweep_iteration(initial_state(prob, 2), prob, 1000, 1)
    # the walk from the middle node visits it once, then is absorbed
    assert st.values[1] == pytest.approx(1.0 + 0.25 * c, rel=1e-14)
    prob2 = NonlinearProblem(lambda x, u: np.full_like(u, c), 0.0, 2.0)
    st = sweep_iteration(initial_state(prob2, 2), prob2, 40000, 1)
    assert abs(st.values[1] - (1.0 + 0.25 * c)) < 4 * 1 / np.sqrt(40000)


def test_sweep_reads_updated_values():
    seen = []

    def source(x, u):
        seen.append(u.copy())
        return np.zeros_like(u)

    prob = NonlinearProblem(source, 0.0, 1.0)
    st = sweep_iteration(initial_state(prob, 6, 5.0), prob, 200, 3)
    assert len(seen) == 5
    for j, u in enumerate(seen, start=1):
        # node j sees nodes 1..j-1 already replaced, nodes j.. still at 5
        assert np.array_equal(u[1:j], st.values[1:j])
        assert np.all(u[j:-1] == 5.0)


def test_relaxed_first_update_is_fresh():
    prob = zero_problem(2.0, 2.0)
    st = relaxed_iteration(initial_state(prob, 8, 5.0), prob, 100, 4)
    m = int(np.argmax(st.weights))
    assert st.values[m] == 2.0 and st.weights[m] == 1 and st.updates == 1


def test_relaxed_blend():
    prob = zero_problem(2.0, 2.0)
    st = initial_state(prob, 8, 5.0)
    st.weights[1:-1] = 3
    new = relaxed_iteration(st, prob, 100, 4)
    m = int(np.argmax(new.weights))
    assert new.values[m] == pytest.approx((2.0 + 3 * 5.0) / 4)


def test_relaxed_fixed_point():
    prob = zero_problem(2.0, 2.0)
    st = initial_state(prob, 4, 2.0)
    for _ in range(20):
        st = relaxed_iteration(st, prob, 50, 9)
    assert np.all(st.values == 2.0)


def test_envelope_examples():
    prob = cubic_problem(1.0)
    x = np.linspace(0, 1, 11)
    assert within_envelope(_state(x), prob) and stopping_test(_state(x), prob)
    assert not stopping_test(_state(x**2), prob)
    assert 0.25 < 0.5**GOLDEN
    bumpy = x.copy()
    bumpy[5] = bumpy[4]
    assert not stopping_test(_state(bumpy), prob)


def test_divergence_detection():
    assert not detect_divergence(_state([0, 0.5, -1, 1]), 1e3)
    assert detect_divergence(_state([0, np.inf, 1]), 1e3)
    assert detect_divergence(_state([0, np.nan, 1]), 1e3)
    assert detect_divergence(_state([0, 2e3, 1]), 1e3)


def test_validation_small():
    rep = solve_nonlinear(validation_problem(), 20, 2000, stop=StopRule("none", miter=6), seed=2)
    x = rep.state.x
    ref = (1 + x) * (1 - np.log1p(x))
    assert np.max(np.abs(rep.state.values - ref) / ref) < 0.05
    assert rep.state.status is Status.ITERATION_CAP


def test_deterministic():
    a = solve_cubic(1.0, 10, 300, stop=StopRule("none", miter=3), seed=5)
    b = solve_cubic(1.0, 10, 300, stop=StopRule("none", miter=3), seed=5)
    assert np.array_equal(a.state.values, b.state.values)
    c = solve_cubic(-1.0, 10, 300, mode="relaxed", stop=StopRule("none", miter=3), seed=5)
    d = solve_cubic(-1.0, 10, 300, mode="relaxed", stop=StopRule("none", miter=3), seed=5)
    assert np.array_equal(c.state.values, d.state.values)


def test_strongly_negative_a_terminates():
    rep = solve_cubic(-5.0, 10, 200, stop=StopRule("auto", miter=30), seed=1)
    assert rep.state.status in (Status.DIVERGED, Status.ITERATION_CAP, Status.CONVERGED)


def test_probe_from_fd_diverges():
    from rwbvp.oracles import fd_solve_cubic, initial_guess

    fd = fd_solve_cubic(-6.0, 200, initial_guess("trough"))
    rep = solve_cubic(-6.0, 20, 2000, stop=StopRule("max-update"), seed=20_240_607, initial=fd.u)
    assert rep.state.status is Status.DIVERGED


def test_stop_rules():
    with pytest.raises(ValueError):
        StopRule("envelope").resolved(cubic_problem(2.0))
    assert StopRule().resolved(cubic_problem(1.0)) == "envelope"
    assert StopRule().resolved(cubic_problem(2.0)) == "max-update"


def test_initial_state_interpolates():
    prob = zero_problem()
    st = initial_state(prob, 4, np.linspace(0, 2, 9))
    assert np.allclose(st.values, [0, 0.5, 1, 1.5, 1])
    with pytest.raises(ValueError):
        initial_state(prob, 1)


def test_rescale():
    r = rescale_variable(4.0)
    assert r.k == 2.0 and r.v_right == 2.0
    assert rescale_variable(-4.0).v_right == -2.0
    u = np.linspace(0, 1, 21) ** 1.3
    assert np.allclose(r.to_u(r.to_v(u)), u, atol=1e-15, rtol=0)
    with pytest.raises(ValueError):
        rescale_variable(0.0)
