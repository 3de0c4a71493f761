import numpy as np
import pytest
from hypothesis import given, strategies as st

from rwbvp.geometry import (Ball2D, Boundary, CircularAnnulus, Interval1D, RectAnnulus,
                            classify_exit, contains, make_domain)

coord = st.floats(-4, 4, allow_nan=False)


def test_contains_examples():
    assert contains(CircularAnnulus(1, 3), (2, 0))
    assert not contains(Interval1D(1), 0)
    assert contains(RectAnnulus(1, 3), (2.5, 2.5))
    assert not contains(Ball2D(1), (1, 0))


def test_classify_examples():
    assert classify_exit(CircularAnnulus(1, 3), (0.95, 0)) == Boundary.INNER
    assert classify_exit(Interval1D(1), 1.0) == Boundary.RIGHT
    assert classify_exit(Interval1D(1), -0.2) == Boundary.LEFT
    assert classify_exit(RectAnnulus(1, 3), (3.05, 0)) == Boundary.OUTER
    assert classify_exit(Ball2D(1), (0, 1.1)) == Boundary.SPHERE


def test_classify_interior_raises():
    with pytest.raises(ValueError):
        classify_exit(CircularAnnulus(1, 3), (2, 0))


def test_boundary_points_are_outside():
    assert not contains(CircularAnnulus(1, 3), (1, 0))
    assert classify_exit(CircularAnnulus(1, 3), (1, 0)) == Boundary.INNER
    assert classify_exit(CircularAnnulus(1, 3), (3, 0)) == Boundary.OUTER


@given(coord, coord)
def test_annulus_partition(x, y):
    d = CircularAnnulus(1, 3)
    if not contains(d, (x, y)):
        r = np.hypot(x, y)
        expected = Boundary.INNER if r <= 1 else Boundary.OUTER
        assert classify_exit(d, (x, y)) == expected


@given(coord, coord)
def test_rect_annulus_sup_norm(x, y):
    d = RectAnnulus(1, 3)
    m = max(abs(x), abs(y))
    assert contains(d, (x, y)) == (1 < m < 3)


def test_invalid_parameters():
    with pytest.raises(ValueError):
        CircularAnnulus(3, 1)
    with pytest.raises(ValueError):
        Interval1D(0)
    with pytest.raises(ValueError):
        make_domain("triangle", [1])


def test_make_domain():
    assert make_domain("circular-annulus", [1, 3]) == CircularAnnulus(1.0, 3.0)
    assert make_domain("interval", [2]).dim == 1
