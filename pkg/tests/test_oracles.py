import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rwbvp import oracles as o
from rwbvp.errors import BracketError


def test_annulus_exact():
    assert o.annulus_exact((1, 0)) == 4.0
    assert o.annulus_exact((3, 0)) == pytest.approx(6.0)
    assert round(o.annulus_exact((2, 0)), 5) == 5.26186
    with pytest.raises(ValueError):
        o.annulus_exact((0.5, 0))


def test_validation_exact():
    assert o.validation_exact(0.0) == 1.0
    assert o.validation_exact(1.0) == pytest.approx(2 * (1 - math.log(2)))
    assert round(float(o.validation_exact(0.5)), 4) == 0.8918


def test_ball_hitting_exact():
    assert o.ball_hitting_exact((0, 0), 1, 2) == 0.5
    assert o.ball_hitting_exact((1, 0), 1, 2) == 0.0
    assert o.ball_hitting_exact((2, 0), 3, 2) == 2.5
    with pytest.raises(ValueError):
        o.ball_hitting_exact((2, 0), 1, 2)


def test_discrete_linear_examples():
    assert np.allclose(o.discrete_linear_oracle(5, 0.0, 1.0, 3.0, 0.1), 1 + 2 * np.arange(6) / 5)
    k = np.arange(9)
    assert np.allclose(o.discrete_linear_oracle(8, 1.0, 0.0, 0.0, 1.0), k * (8 - k))
    assert o.discrete_linear_oracle(2, 0.7, 1.0, 2.0, 0.5)[1] == pytest.approx(1.5 + 0.35)


@given(st.integers(2, 40), st.floats(-2, 2), st.floats(-2, 2), st.floats(0.01, 1))
def test_discrete_linear_recurrence(maxpt, gl, gr, dt):
    f = np.sin(np.arange(1, maxpt))
    u = o.discrete_linear_oracle(maxpt, f, gl, gr, dt)
    assert u[0] == gl and u[-1] == gr
    assert np.allclose(u[1:-1], 0.5 * (u[:-2] + u[2:]) + dt * f, atol=1e-9)


def test_fd_linear_case():
    sol = o.fd_solve_cubic(0.0, 50, initial=0.3)
    assert sol.converged and sol.newton_iterations == 1
    assert np.allclose(sol.u, sol.x, atol=1e-12)


def test_fd_a1_envelope():
    sol = o.fd_solve_cubic(1.0, 200)
    x = sol.x
    assert sol.converged
    assert np.all(x ** o.GOLDEN <= sol.u + 1e-12) and np.all(sol.u <= x + 1e-12)


def _extrema(u):
    return int(np.count_nonzero(np.diff(np.sign(np.diff(u)))))


def test_fd_branches_at_minus_three():
    f1 = o.fd_solve_cubic(-3, 200, 0.5)
    assert f1.converged and np.all(np.diff(f1.u) > 0) and np.all(np.diff(f1.u, 2) < 0)
    f2 = o.fd_solve_cubic(-3, 200, o.initial_guess("hump"))
    assert f2.converged and _extrema(f2.u) == 1 and f2.u.max() > 1
    f3 = o.fd_solve_cubic(-3, 200, o.initial_guess("trough"))
    assert f3.converged and _extrema(f3.u) == 1 and f3.u.min() < 0


def test_initial_guess():
    assert o.initial_guess("3") == 3.0
    with pytest.raises(ValueError):
        o.initial_guess("wiggle")


def test_slope_root_zero():
    assert o.find_a_for_slope(0.0, (-4, -3), 400) == pytest.approx(-3.4376, abs=1e-3)


def test_slope_root_at_bracket_end():
    s = o.fd_branch(-3.5, 100).slope_right
    assert o.find_a_for_slope(s, (-3.5, -3.0), 100) == -3.5


def test_slope_root_same_sign():
    with pytest.raises(BracketError):
        o.find_a_for_slope(0.0, (-2, -1), 100)


def test_branch_ends_at_fold():
    assert o.fd_branch(-4.3, 200).converged
    assert not o.fd_branch(-4.5, 200).converged


@pytest.mark.slow
def test_slope_root_fold():
    assert o.find_a_for_slope(-1.0, (-5, -4), 400) == pytest.approx(-4.3356, abs=1e-2)


def test_energy_identity_linear():
    x = np.linspace(0, 1, 51)
    assert o.energy_identity_residual(x, 0.0, 0.02) < 1e-12


@pytest.mark.parametrize("a", [1.0, -1.0, 4.0])
def test_energy_identity_second_order(a):
    r = [o.energy_identity_residual(o.fd_solve_cubic(a, n).u, a, 1 / n) for n in (200, 400)]
    assert r[1] <= 0.3 * r[0]


def test_boundary_energy_gap():
    gaps = [abs(o.boundary_energy_gap(o.fd_solve_cubic(1.0, n).u, 1.0, 1 / n)) for n in (100, 200)]
    assert gaps[1] < 1e-3 and gaps[1] < 0.4 * gaps[0]


def test_taylor_check():
    assert o.taylor_near_zero_check(np.linspace(0, 1, 51), 0.0, 0.02) == 0.0
    assert o.taylor_near_zero_check(o.fd_solve_cubic(1.0, 400).u, 1.0, 1 / 400) <= 1e-4


def test_to_v_variable():
    v, s = o.to_v_variable([0.0, 0.5, 1.0], 4.0)
    assert np.allclose(v, [0, 1, 2]) and s == 1.0
    v, s = o.to_v_variable([1.0], -4.0)
    assert v[0] == -2.0 and s == -1.0
