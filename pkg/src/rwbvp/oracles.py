"""Deterministic reference values for the stochastic solvers.

Closed forms, the exact expectation of the 1-D lattice estimator, and a damped
Newton finite-difference solver for ``u'' = a u**3``, ``u(0) = 0``, ``u(1) = 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded
from scipy.optimize import bisect

from .errors import BracketError

LN3 = math.log(3.0)
GOLDEN = (1 + math.sqrt(5)) / 2


def annulus_exact(p, r_in: float = 1.0, r_out: float = 3.0) -> float:
    """Harmonic function equal to 4 on |p| = 1 and 6 on |p| = 3."""
    rho = math.hypot(*np.atleast_1d(np.asarray(p, dtype=float)))
    if not r_in <= rho <= r_out:
        raise ValueError(f"|p| = {rho} outside [{r_in}, {r_out}]")
    return 4.0 + 2.0 * math.log(rho) / LN3


def validation_exact(x):
    """Exact solution ``(1 + x)(1 - ln(1 + x))`` of the exponential test problem."""
    x = np.asarray(x, dtype=float)
    return (1 + x) * (1 - np.log1p(x))


def ball_hitting_exact(x, r: float, d: int, D: float = 1.0) -> float:
    if D <= 0:
        raise ValueError("diffusion coefficient must be positive")
    sq = float(np.sum(np.square(np.atleast_1d(np.asarray(x, dtype=float)))))
    if sq > r * r:
        raise ValueError("point outside the ball")
    return (r * r - sq) / (d * D)


def discrete_linear_oracle(maxpt: int, f_nodes, g_left: float, g_right: float,
                           dt: float) -> np.ndarray:
    """Solve ``u_k = (u_{k-1} + u_{k+1}) / 2 + dt f_k`` with pinned ends.

    ``f_nodes`` holds the values at the interior nodes ``1..maxpt-1`` (a scalar
    is broadcast).  Returns all ``maxpt + 1`` node values.
    """
    if maxpt < 2:
        raise ValueError("maxpt must be at least 2")
    m = maxpt - 1
    f = np.broadcast_to(np.asarray(f_nodes, dtype=float), (m,))
    ab = np.zeros((3, m))
    ab[0, 1:] = -0.5
    ab[1, :] = 1.0
    ab[2, :-1] = -0.5
    rhs = dt * f.copy()
    rhs[0] += 0.5 * g_left
    rhs[-1] += 0.5 * g_right
    u = np.empty(maxpt + 1)
    u[0], u[-1] = g_left, g_right
    u[1:-1] = solve_banded((1, 1), ab, rhs)
    return u


@dataclass
class FDSolution:
    x: np.ndarray
    u: np.ndarray
    a: float
    slope_left: float
    slope_right: float
    newton_iterations: int
    converged: bool
    residual: float

    @property
    def h(self) -> float:
        return float(self.x[1] - self.x[0])


def _cubic_residual(u, a, h2):
    return u[:-2] - 2 * u[1:-1] + u[2:] - h2 * a * u[1:-1] ** 3


def one_sided_slopes(u, h):
    """Second-order one-sided derivative estimates at both ends."""
    left = (-3 * u[0] + 4 * u[1] - u[2]) / (2 * h)
    right = (3 * u[-1] - 4 * u[-2] + u[-3]) / (2 * h)
    return float(left), float(right)


def _initial_profile(initial, x):
    if initial is None:
        return x.copy()
    if callable(initial):
        return np.broadcast_to(np.asarray(initial(x), dtype=float), x.shape).copy()
    arr = np.asarray(initial, dtype=float)
    if arr.ndim == 0:
        return np.full_like(x, float(arr))
    if arr.shape == x.shape:
        return arr.copy()
    # profile given on another grid, e.g. a coarse stochastic run
    xs = np.linspace(0.0, 1.0, len(arr))
    return np.interp(x, xs, arr)


def fd_solve_cubic(a: float, n: int, initial=None, tol: float = 1e-10,
                   max_iter: int = 200) -> FDSolution:
    """Damped Newton on the central-difference form of ``u'' = a u^3``.

    ``initial`` selects the branch: ``None`` (the line ``u = x``), a scalar, a
    callable of ``x`` or an array of node values.  The step is halved until the
    residual max-norm decreases.
    """
    if n < 4:
        raise ValueError("n must be at least 4")
    x = np.linspace(0.0, 1.0, n + 1)
    h = 1.0 / n
    h2 = h * h
    u = _initial_profile(initial, x)
    u[0], u[-1] = 0.0, 1.0
    res = _cubic_residual(u, a, h2)
    rnorm = float(np.max(np.abs(res)))
    it = 0
    converged = rnorm < tol
    while not converged and it < max_iter:
        it += 1
        ab = np.zeros((3, n - 1))
        ab[0, 1:] = 1.0
        ab[1, :] = -2.0 - 3.0 * h2 * a * u[1:-1] ** 2
        ab[2, :-1] = 1.0
        try:
            step = solve_banded((1, 1), ab, -res)
        except np.linalg.LinAlgError:
            break
        lam = 1.0
        improved = False
        for _ in range(40):
            trial = u.copy()
            trial[1:-1] += lam * step
            tres = _cubic_residual(trial, a, h2)
            tnorm = float(np.max(np.abs(tres)))
            if np.isfinite(tnorm) and tnorm < rnorm:
                improved = True
                break
            lam *= 0.5
        if not improved:
            break
        u, res, rnorm = trial, tres, tnorm
        converged = rnorm < tol
    left, right = one_sided_slopes(u, h)
    return FDSolution(x, u, float(a), left, right, it, bool(converged), rnorm)


GUESSES = {
    "line": lambda x: x,
    "hump": lambda x: x + 2 * np.sin(np.pi * x),
    "trough": lambda x: x - 2 * np.sin(np.pi * x),
}


def initial_guess(name: str):
    """Named starting profiles for :func:`fd_solve_cubic`; a number means a constant."""
    if name in GUESSES:
        return GUESSES[name]
    try:
        return float(name)
    except ValueError:
        raise ValueError(f"unknown initial guess {name!r}; expected one of "
                         f"{sorted(GUESSES)} or a number") from None


def fd_branch(a: float, n: int, start: tuple = (0.0, None), da: float = 0.25,
              min_da: float = 1e-4) -> FDSolution:
    """Follow the solution branch through ``u = x`` (at a = 0) out to ``a``.

    Natural continuation in ``a``: each solve starts from the previous
    solution, and the step shrinks when Newton fails.  ``start`` may give a
    known ``(a0, u0)`` on the branch to continue from.  Past a fold the last
    solve is returned with ``converged`` false.
    """
    a0, u = start
    if u is None:
        a0, u = 0.0, np.linspace(0.0, 1.0, n + 1)
    sol = fd_solve_cubic(a0, n, u)
    step = math.copysign(da, a - a0) if a != a0 else 0.0
    while sol.converged and sol.a != a:
        trial_a = a if abs(a - sol.a) <= abs(step) else sol.a + step
        trial = fd_solve_cubic(trial_a, n, sol.u)
        if trial.converged:
            sol = trial
        elif abs(step) / 2 >= min_da:
            step /= 2
        else:
            return trial
    return sol


def find_a_for_slope(target_slope: float, bracket=(-4.0, -3.0), n: int = 400,
                     initial=None, xtol: float = 1e-6) -> float:
    """Find ``a`` with ``u'(1) = target_slope`` by bisection on the FD slope.

    Without ``initial`` the solves follow the branch through ``u = x``.  That
    branch ends at a fold (near a = -4.3355, where u'(1) = -1); a bracket end
    beyond the fold has no solution and counts as lying past the target, so
    the bisection then locates the fold itself.
    """
    solved = {}

    def solve(a):
        if initial is not None:
            return fd_solve_cubic(a, n, initial)
        near = min(solved, key=lambda b: abs(b - a), default=None)
        if near is not None and solved[near] is not None:
            return fd_branch(a, n, (near, solved[near].u))
        return fd_branch(a, n)

    def gap(a):
        sol = solve(a)
        solved[a] = sol if sol.converged else None
        if sol.converged:
            return sol.slope_right - target_slope
        return None

    lo, hi = float(bracket[0]), float(bracket[1])
    g_lo, g_hi = gap(lo), gap(hi)
    if g_lo is None and g_hi is None:
        raise BracketError(f"no converged solution at either end of {bracket}")
    if g_lo == 0.0:
        return lo
    if g_hi == 0.0:
        return hi
    # an end without a solution takes the sign opposite to the other end
    s_lo = -np.sign(g_hi) if g_lo is None else np.sign(g_lo)
    s_hi = -np.sign(g_lo) if g_hi is None else np.sign(g_hi)
    if s_lo == s_hi:
        raise BracketError(
            f"u'(1) - target has the same sign at a={lo} ({g_lo:+.3g}) and a={hi} ({g_hi:+.3g})")

    def signed(a):
        g = gap(a)
        return float(s_lo) if g is None else g

    return float(bisect(signed, lo, hi, xtol=xtol))


def to_v_variable(u, a: float) -> tuple[np.ndarray, float]:
    """Map ``u`` to ``v = k u`` with ``k = sgn(a) sqrt|a|``; returns ``(v, sgn(a))``."""
    u = np.asarray(u, dtype=float)
    if a == 0:
        return u.copy(), 0.0
    k = math.copysign(math.sqrt(abs(a)), a)
    return k * u, math.copysign(1.0, a)


def energy_identity_residual(u, a: float, h: float) -> float:
    """Spread of ``(v')**2 - sgn(a) v**4 / 2`` across the grid (zero for exact v)."""
    v, sgn = to_v_variable(u, a)
    dv = (v[2:] - v[:-2]) / (2 * h)
    c = dv ** 2 - 0.5 * sgn * v[1:-1] ** 4
    return float(np.max(np.abs(c - c.mean())))


def boundary_energy_gap(u, a: float, h: float) -> float:
    """``v'(1)**2 - v'(0)**2 - sgn(a) a**2 / 2``; zero for the exact solution."""
    v, sgn = to_v_variable(u, a)
    left, right = one_sided_slopes(v, h)
    return right ** 2 - left ** 2 - 0.5 * sgn * a * a


def taylor_near_zero_check(u, a: float, h: float, x_max: float = 0.1) -> float:
    """Largest gap between v and ``x v'(0) + sgn(a) v'(0)**3 x**5 / 20`` for x <= x_max."""
    v, sgn = to_v_variable(u, a)
    slope, _ = one_sided_slopes(v, h)
    x = h * np.arange(len(v))
    sel = (x > 0) & (x <= x_max + 1e-12)
    model = x[sel] * slope + sgn * slope ** 3 * x[sel] ** 5 / 20
    return float(np.max(np.abs(v[sel] - model))) if sel.any() else 0.0
