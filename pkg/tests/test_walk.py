import numpy as np
import pytest
from scipy import stats

from rwbvp.errors import WalkTruncatedError
from rwbvp.geometry import Ball2D, Boundary, CircularAnnulus, Interval1D, RectAnnulus
from rwbvp.rng import RngStream
from rwbvp.walk import (StepScheme, WalkOutcome, WalkParams, elementary_step, payoff,
                        run_walks, simulate_walk)

AXIS = WalkParams(0.1)


def test_axis_step_1d():
    seen = {elementary_step(RngStream(3, i), StepScheme.AXIS, 0.5, 0.5) for i in range(200)}
    assert seen == {(0.0,), (1.0,)}


def test_axis_step_2d():
    seen = {elementary_step(RngStream(3, i), StepScheme.AXIS, 0.1, (2, 0)) for i in range(400)}
    expected = {(2.1, 0.0), (1.9, 0.0), (2.0, 0.1), (2.0, -0.1)}
    assert {tuple(round(c, 12) for c in p) for p in seen} == expected


def test_step_lengths():
    p = elementary_step(RngStream(1), StepScheme.DIAGONAL, 0.1, (0, 0))
    assert np.isclose(np.hypot(*p), 0.1 * np.sqrt(2))
    p = elementary_step(RngStream(1), StepScheme.AXIS, 0.1, (0, 0))
    assert np.isclose(np.hypot(*p), 0.1)


@pytest.mark.parametrize("scheme", [StepScheme.AXIS, StepScheme.DIAGONAL])
def test_first_step_uniform(scheme):
    # a ball smaller than one step: every walk exits after exactly one move
    batch = run_walks(Ball2D(0.05), (0, 0), WalkParams(0.1, scheme), seed=11, nt=10**6)
    assert np.all(batch.steps == 1)
    _, counts = np.unique(np.round(batch.exit_points, 9), axis=0, return_counts=True)
    assert len(counts) == 4
    assert np.all(np.abs(counts / 1e6 - 0.25) <= 3 * np.sqrt(0.25 * 0.75 / 1e6))
    assert stats.chisquare(counts).pvalue > 1e-3


def test_diagonal_dt():
    assert WalkParams(0.1, StepScheme.AXIS).dt(2) == pytest.approx(0.005)
    assert WalkParams(0.1, StepScheme.DIAGONAL).dt(2) == pytest.approx(0.01)
    assert WalkParams(0.1, diffusion=4.0).spacing == pytest.approx(0.2)


def test_neighbours_absorbing():
    batch = run_walks(Interval1D(1), 0.5, WalkParams(0.5), seed=1, nt=1000)
    assert np.all(batch.steps == 1)
    assert set(np.round(batch.exit_points[:, 0], 12)) == {0.0, 1.0}


def test_start_outside():
    out = simulate_walk(CircularAnnulus(1, 3), (0.5, 0), AXIS, RngStream(1), lambda x, y: 1.0)
    assert out.steps == 0 and out.source_sum == 0
    assert out.label == Boundary.INNER
    batch = run_walks(CircularAnnulus(1, 3), (4, 0), AXIS, 1, 5, source=lambda x, y: 1.0 + 0 * x)
    assert np.all(batch.steps == 0) and np.all(batch.source_sum == 0)


def test_discrete_expected_time():
    params = WalkParams(0.25)
    batch = run_walks(Interval1D(1), 0.25, params, seed=5, nt=10**5,
                      source=lambda x: np.ones_like(x))
    samples = batch.source_sum * params.dt(1)
    se = samples.std(ddof=1) / np.sqrt(len(samples))
    assert abs(samples.mean() - 3 * params.dt(1)) <= 4 * se


@pytest.mark.parametrize("domain,start,scheme", [
    (CircularAnnulus(1, 3), (2, 0), StepScheme.AXIS),
    (RectAnnulus(1, 3), (2, 0.5), StepScheme.DIAGONAL),
    (Interval1D(1), 0.3, StepScheme.AXIS),
])
def test_reference_and_compiled_paths_agree(domain, start, scheme):
    params = WalkParams(0.2, scheme)
    src = (lambda x: x * x) if domain.dim == 1 else (lambda x, y: x * x + y)
    batch = run_walks(domain, start, params, seed=42, nt=50, stream_offset=7, source=src)
    for i in range(50):
        ref = simulate_walk(domain, start, params, RngStream(42, 7 + i), src)
        got = batch.outcome(i)
        assert ref.steps == got.steps
        assert ref.label == got.label
        assert np.allclose(ref.exit_point, got.exit_point, atol=1e-12)
        assert ref.source_sum == pytest.approx(got.source_sum, rel=1e-12)


def test_batches_reproducible_and_offset_consistent():
    d, p = CircularAnnulus(1, 3), WalkParams(0.1)
    a = run_walks(d, (2, 0), p, 9, 100)
    b = run_walks(d, (2, 0), p, 9, 100)
    tail = run_walks(d, (2, 0), p, 9, 50, stream_offset=50)
    assert np.array_equal(a.steps, b.steps)
    assert np.array_equal(a.steps[50:], tail.steps)


def test_truncation():
    with pytest.raises(WalkTruncatedError) as info:
        run_walks(CircularAnnulus(1, 3), (2, 0), WalkParams(0.01, max_steps=5), 1, 10)
    assert len(info.value.partial) == 10
    with pytest.raises(WalkTruncatedError):
        simulate_walk(CircularAnnulus(1, 3), (2, 0), WalkParams(0.01, max_steps=5), RngStream(1))


def test_payoff():
    out = WalkOutcome((0.9, 0.0), Boundary.INNER, 10, 2.0, 0.05)
    g = lambda label, x, y: 4.0 if label == Boundary.INNER else 6.0
    assert payoff(out, 0.005, g) == pytest.approx(0.01 + 4.0)
    assert payoff(WalkOutcome((0.0,), Boundary.LEFT, 0, 0.0, 0.0), 0.1, lambda l, x: 7.0) == 7.0


def test_invalid_params():
    with pytest.raises(ValueError):
        WalkParams(0)
    with pytest.raises(ValueError):
        WalkParams(0.1, diffusion=-1)
