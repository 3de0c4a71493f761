"""Grid solver for ``-u''/2 = f(x, u)`` on ]0, L[ driven by index random walks.

Two iteration styles are provided:

* ``sweep``: visit interior nodes in increasing order; each node is replaced by
  the average payoff of ``nt`` walks reading the live array, so nodes already
  updated in this sweep are seen with their new values (Gauss-Seidel order).
* ``relaxed``: pick one interior node at random, estimate it from ``nt`` walks
  that read a per-node cache of source values, and blend the estimate into a
  running average weighted by the node's update count.

``solve_cubic`` specialises to ``u'' = a u**3``, ``u(0) = 0``, ``u(1) = 1``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .oracles import GOLDEN
from .reduction import pairwise_sum
from .rng import RngStream
from .walk import index_walks

DEFAULT_M_DIV = 1e3
DEFAULT_MITER = 500

# stream-index blocks; keeps sweep, relaxed and node-choice draws apart
_RELAXED_STREAMS = 1 << 60
_CHOICE_STREAM = (1 << 62) + 1


class Status(str, enum.Enum):
    RUNNING = "running"
    CONVERGED = "converged"
    DIVERGED = "diverged"
    ITERATION_CAP = "iteration-cap"


@dataclass
class NonlinearProblem:
    source: Callable            # f(x, u), vectorised
    g_left: float
    g_right: float
    length: float = 1.0
    bounds: Optional[tuple] = None   # (lower(x), upper(x)) envelope
    name: str = "custom"


@dataclass
class GridState:
    length: float
    values: np.ndarray
    weights: np.ndarray
    iteration: int = 0
    status: Status = Status.RUNNING
    source_cache: Optional[np.ndarray] = None
    updates: int = 0

    @property
    def maxpt(self) -> int:
        return len(self.values) - 1

    @property
    def h(self) -> float:
        return self.length / self.maxpt

    @property
    def x(self) -> np.ndarray:
        return self.h * np.arange(self.maxpt + 1)

    def copy(self) -> "GridState":
        return replace(
            self,
            values=self.values.copy(),
            weights=self.weights.copy(),
            source_cache=None if self.source_cache is None else self.source_cache.copy(),
        )


@dataclass
class StopRule:
    """When to stop iterating.

    ``envelope`` uses the problem's bounds (with ``slack``) plus strict
    monotonicity; ``max-update`` stops once a full sweep moves no node by more
    than ``tol``; ``none`` runs the whole budget.
    """

    kind: str = "auto"
    tol: float = 1e-3
    slack: float = 0.0
    miter: int = DEFAULT_MITER

    def resolved(self, problem: NonlinearProblem) -> str:
        if self.kind == "auto":
            return "envelope" if problem.bounds is not None else "max-update"
        if self.kind not in ("envelope", "max-update", "none"):
            raise ValueError(f"unknown stop rule {self.kind!r}")
        if self.kind == "envelope" and problem.bounds is None:
            raise ValueError("envelope stop rule needs problem bounds")
        return self.kind


@dataclass
class SolveReport:
    state: GridState
    problem: NonlinearProblem
    snapshots: list = field(default_factory=list)   # (iteration, values)
    stop_rule: str = "none"

    @property
    def envelope_ok(self) -> Optional[bool]:
        if self.problem.bounds is None:
            return None
        return within_envelope(self.state, self.problem)

    @property
    def monotone(self) -> bool:
        return bool(np.all(np.diff(self.state.values) > 0))


def initial_state(problem: NonlinearProblem, maxpt: int, initial=None) -> GridState:
    """Grid with pinned ends; the interior is zero unless ``initial`` is given.

    ``initial`` may be a scalar, a callable of ``x``, or node values (any length;
    other grids are interpolated linearly).
    """
    if maxpt < 2:
        raise ValueError("maxpt must be at least 2")
    x = problem.length * np.arange(maxpt + 1) / maxpt
    if initial is None:
        u = np.zeros(maxpt + 1)
    elif callable(initial):
        u = np.broadcast_to(np.asarray(initial(x), dtype=float), x.shape).copy()
    else:
        arr = np.asarray(initial, dtype=float)
        if arr.ndim == 0:
            u = np.full(maxpt + 1, float(arr))
        elif len(arr) == maxpt + 1:
            u = arr.copy()
        else:
            u = np.interp(x, np.linspace(0, problem.length, len(arr)), arr)
    u[0], u[-1] = problem.g_left, problem.g_right
    return GridState(problem.length, u, np.zeros(maxpt + 1, dtype=np.int64))


def _source_values(problem, x, u):
    vals = np.broadcast_to(np.asarray(problem.source(x, u), dtype=float), u.shape).copy()
    vals[0] = vals[-1] = 0.0
    return vals


def _node_estimate(state, problem, node, src, nt, seed, offset):
    ys, right = index_walks(src, node, seed, nt, offset)
    n_right = int(np.count_nonzero(right))
    dir_total = problem.g_right * n_right + problem.g_left * (nt - n_right)
    return (state.h ** 2 * pairwise_sum(ys) + dir_total) / nt


def detect_divergence(state: GridState, m_div: float = DEFAULT_M_DIV) -> bool:
    u = state.values
    return bool(not np.all(np.isfinite(u)) or np.any(np.abs(u) > m_div))


def sweep_iteration(state: GridState, problem: NonlinearProblem, nt: int, seed: int,
                    m_div: float = DEFAULT_M_DIV) -> GridState:
    """One Gauss-Seidel sweep over the interior nodes (walks read the live array)."""
    if state.status is not Status.RUNNING:
        raise ValueError(f"cannot iterate a state with status {state.status.value}")
    new = state.copy()
    x = new.x
    n = new.maxpt
    for j in range(1, n):
        src = _source_values(problem, x, new.values)
        offset = ((new.iteration * (n + 1)) + j) * nt
        new.values[j] = _node_estimate(new, problem, j, src, nt, seed, offset)
        new.weights[j] += 1
        new.updates += 1
        if detect_divergence(new, m_div):
            new.status = Status.DIVERGED
            break
    new.iteration += 1
    return new


def relaxed_iteration(state: GridState, problem: NonlinearProblem, nt: int, seed: int,
                      m_div: float = DEFAULT_M_DIV) -> GridState:
    """One randomly placed, progressively averaged single-node update.

    Walks read ``source_cache``, which holds ``f`` at each node as of that
    node's own last update, and is refreshed only at the updated node.
    """
    if state.status is not Status.RUNNING:
        raise ValueError(f"cannot iterate a state with status {state.status.value}")
    new = state.copy()
    x = new.x
    n = new.maxpt
    if new.source_cache is None:
        new.source_cache = _source_values(problem, x, new.values)
    choice = RngStream(seed, _CHOICE_STREAM)
    choice.counter = new.updates
    m = 1 + choice.integers(n - 1)
    offset = _RELAXED_STREAMS + new.updates * nt
    fresh = _node_estimate(new, problem, m, new.source_cache, nt, seed, offset)
    b = new.weights[m]
    new.values[m] = (fresh + b * new.values[m]) / (b + 1)
    new.source_cache[m] = float(
        np.asarray(problem.source(x[m:m + 1], new.values[m:m + 1]), dtype=float).ravel()[0])
    new.weights[m] = b + 1
    new.updates += 1
    new.iteration += 1
    if detect_divergence(new, m_div):
        new.status = Status.DIVERGED
    return new


def within_envelope(state: GridState, problem: NonlinearProblem, slack: float = 0.0) -> bool:
    lower, upper = problem.bounds
    x = state.x[1:-1]
    u = state.values[1:-1]
    return bool(np.all(lower(x) - slack <= u) and np.all(u <= upper(x) + slack))


def stopping_test(state: GridState, problem: NonlinearProblem, slack: float = 0.0) -> bool:
    """Envelope containment at every interior node and strict monotonicity."""
    if problem.bounds is None:
        raise ValueError("stopping_test needs problem bounds")
    return within_envelope(state, problem, slack) and bool(np.all(np.diff(state.values) > 0))


def solve_nonlinear(problem: NonlinearProblem, maxpt: int, nt: int, mode: str = "sweep",
                    stop: Optional[StopRule] = None, seed: int = 0, initial=None,
                    m_div: float = DEFAULT_M_DIV, snapshot_every: int = 0,
                    callback: Optional[Callable] = None) -> SolveReport:
    """Iterate until the stop rule holds, the state diverges or the budget ends.

    The budget is ``stop.miter`` sweeps in sweep mode and ``stop.miter * maxpt``
    single-node updates in relaxed mode.  Stop rules are checked after every
    sweep, or every ``maxpt - 1`` relaxed updates.
    """
    if nt < 1:
        raise ValueError("nt must be at least 1")
    if mode not in ("sweep", "relaxed"):
        raise ValueError(f"mode must be 'sweep' or 'relaxed', got {mode!r}")
    stop = stop or StopRule()
    rule = stop.resolved(problem)
    state = initial_state(problem, maxpt, initial)
    report = SolveReport(state, problem, stop_rule=rule)
    if detect_divergence(state, m_div):
        state.status = Status.DIVERGED
        return report
    if mode == "sweep":
        budget, check_every, step = stop.miter, 1, sweep_iteration
    else:
        budget, check_every, step = stop.miter * maxpt, maxpt - 1, relaxed_iteration
    previous = state.values.copy()
    if snapshot_every:
        report.snapshots.append((0, state.values.copy()))
    while state.iteration < budget:
        state = step(state, problem, nt, seed, m_div)
        report.state = state
        if snapshot_every and (state.iteration % snapshot_every == 0
                               or state.status is not Status.RUNNING):
            report.snapshots.append((state.iteration, state.values.copy()))
        if callback is not None:
            callback(state)
        if state.status is not Status.RUNNING:
            break
        if state.iteration % check_every:
            continue
        if rule == "envelope" and stopping_test(state, problem, stop.slack):
            state.status = Status.CONVERGED
        elif rule == "max-update" and np.max(np.abs(state.values - previous)) < stop.tol:
            state.status = Status.CONVERGED
        previous = state.values.copy()
        if state.status is not Status.RUNNING:
            break
    if state.status is Status.RUNNING:
        state.status = Status.ITERATION_CAP
    return report


def cubic_problem(a: float) -> NonlinearProblem:
    """``u'' = a u**3`` on ]0, 1[ with u(0) = 0, u(1) = 1, in walker form."""
    a = float(a)

    def source(x, u):
        return -0.5 * a * u ** 3

    bounds = None
    if a == 1.0:
        bounds = (lambda x: x ** GOLDEN, lambda x: x)
    return NonlinearProblem(source, 0.0, 1.0, 1.0, bounds, name=f"cubic(a={a:g})")


def validation_problem(length: float = 1.0) -> NonlinearProblem:
    """Exponential test source whose exact solution is ``(1+x)(1-ln(1+x))``."""

    def source(x, u):
        return 0.5 * np.exp(u / (1 + x) - 1)

    right = (1 + length) * (1 - math.log1p(length))
    return NonlinearProblem(source, 1.0, right, length, None, name="validation-exp")


def zero_problem(g_left: float = 0.0, g_right: float = 1.0, length: float = 1.0):
    return NonlinearProblem(lambda x, u: np.zeros_like(u), g_left, g_right, length,
                            None, name="zero")


def solve_cubic(a: float, maxpt: int, nt: int, mode: str = "sweep",
                stop: Optional[StopRule] = None, seed: int = 0, initial=None,
                m_div: float = DEFAULT_M_DIV, snapshot_every: int = 0) -> SolveReport:
    return solve_nonlinear(cubic_problem(a), maxpt, nt, mode, stop, seed, initial,
                           m_div, snapshot_every)


@dataclass(frozen=True)
class RescaledCubic:
    """``v = k u`` with ``k = sgn(a) sqrt|a|`` turns ``u'' = a u^3`` into ``v'' = sgn(a) v^3``."""

    a: float
    k: float
    sign: float

    @property
    def v_right(self) -> float:
        return self.k

    def problem(self) -> NonlinearProblem:
        s = self.sign
        return NonlinearProblem(lambda x, v: -0.5 * s * v ** 3, 0.0, self.k, 1.0, None,
                                name=f"rescaled(a={self.a:g})")

    def to_v(self, u):
        return self.k * np.asarray(u, dtype=float)

    def to_u(self, v):
        return np.asarray(v, dtype=float) / self.k


def rescale_variable(a: float) -> RescaledCubic:
    if a == 0:
        raise ValueError("a = 0 needs no rescaling (the problem is already u'' = 0)")
    k = math.copysign(math.sqrt(abs(a)), a)
    return RescaledCubic(float(a), k, math.copysign(1.0, a))
