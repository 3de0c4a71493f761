import numpy as np
import pytest

from rwbvp.geometry import Ball2D, Boundary, CircularAnnulus, Interval1D, RectAnnulus
from rwbvp.linear import estimate_point, estimate_profile
from rwbvp.oracles import discrete_linear_oracle
from rwbvp.walk import StepScheme, WalkParams

ANNULUS_G = lambda label, *c: np.where(label == Boundary.INNER, 4.0, 6.0)


@pytest.mark.parametrize("domain,x", [
    (CircularAnnulus(1, 3), (2, 0)), (RectAnnulus(1, 3), (0, 2)), (Ball2D(1), (0.2, 0.1)),
])
def test_constant_boundary_is_exact(domain, x):
    est = estimate_point(domain, None, lambda l, *c: 6.0, x, 500, WalkParams(0.1), 3)
    assert est.mean == 6.0 and est.std_error == 0.0


def test_symmetric_interval():
    g = lambda label, x: np.where(label == Boundary.RIGHT, 1.0, 0.0)
    est = estimate_point(Interval1D(1), None, g, 0.5, 20000, WalkParams(0.1), 1)
    assert abs(est.mean - 0.5) <= 3 * est.std_error


def test_small_discrete_oracle():
    f = lambda x: np.sin(np.pi * x)
    params = WalkParams(1 / 8)
    ests = estimate_profile(Interval1D(1), f, lambda l, x: 0.0, [k / 8 for k in range(1, 8)],
                            20000, params, 2)
    ref = discrete_linear_oracle(8, f(np.arange(1, 8) / 8), 0, 0, params.dt(1))
    for k, e in enumerate(ests, start=1):
        assert abs(e.mean - ref[k]) <= 4 * e.std_error


def test_full_form_halves_source():
    f = lambda x: np.ones_like(x)
    half = estimate_point(Interval1D(1), f, lambda l, x: 0.0, 0.5, 4000, WalkParams(0.1), 1)
    full = estimate_point(Interval1D(1), f, lambda l, x: 0.0, 0.5, 4000, WalkParams(0.1), 1,
                          form="full")
    assert full.mean == pytest.approx(half.mean / 2)


def test_outside_start_rejected():
    with pytest.raises(ValueError):
        estimate_point(CircularAnnulus(1, 3), None, ANNULUS_G, (0, 0), 10, WalkParams(0.1), 1)


def test_profile_streams_are_disjoint():
    ests = estimate_profile(CircularAnnulus(1, 3), None, ANNULUS_G, [(2, 0), (2, 0)], 2000,
                            WalkParams(0.1), 4)
    assert ests[0].mean != ests[1].mean
    assert estimate_profile(CircularAnnulus(1, 3), None, ANNULUS_G, [], 10, WalkParams(0.1), 4) == []


def test_profile_reproducible():
    run = lambda: estimate_profile(CircularAnnulus(1, 3), None, ANNULUS_G, [(1.5, 0), (2.5, 0)],
                                   1000, WalkParams(0.1, StepScheme.DIAGONAL), 8)
    assert run() == run()
