"""Pointwise Monte Carlo estimates for ``-Δu/2 = f`` in G, ``u = g`` on ∂G."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .geometry import Domain, as_point, contains
from .reduction import mean_and_stderr, pairwise_sum
from .walk import WalkParams, run_walks

LAPLACIAN_FORMS = ("half", "full")


@dataclass(frozen=True)
class PointEstimate:
    point: tuple
    mean: float
    std_error: float
    nt: int
    mean_steps: float


def _scaled_source(f, form):
    if form not in LAPLACIAN_FORMS:
        raise ValueError(f"laplacian form must be one of {LAPLACIAN_FORMS}, got {form!r}")
    if f is None or form == "half":
        return f
    # -Δu = f is the same problem as -Δu/2 = f/2
    return lambda *c: 0.5 * f(*c)


def estimate_point(domain: Domain, f: Optional[Callable], g: Callable, x, nt: int,
                   params: WalkParams, seed: int, stream_offset: int = 0,
                   form: str = "half") -> PointEstimate:
    """Average of ``nt`` payoffs ``dt * sum f(X_k) + g(X_N)`` from ``x``.

    Walk ``i`` uses random stream ``stream_offset + i``.  ``f=None`` means no
    source.  ``form="full"`` reads the equation as ``-Δu = f`` instead.
    """
    p = as_point(domain, x)
    if nt < 1:
        raise ValueError("nt must be at least 1")
    if not contains(domain, p):
        raise ValueError(f"start point {tuple(p)} is not inside the domain")
    batch = run_walks(domain, p, params, seed, nt, stream_offset, _scaled_source(f, form))
    mean, se = mean_and_stderr(batch.payoffs(g))
    return PointEstimate(tuple(p.tolist()), mean, se, nt, pairwise_sum(batch.steps) / nt)


def estimate_profile(domain: Domain, f, g, points: Sequence, nt: int, params: WalkParams,
                     seed: int, form: str = "half") -> list[PointEstimate]:
    """Estimates at several points; point ``i`` owns streams ``[i*nt, (i+1)*nt)``."""
    return [estimate_point(domain, f, g, p, nt, params, seed, i * nt, form)
            for i, p in enumerate(points)]
