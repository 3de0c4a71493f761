"""Exit-time statistics of lattice walks, split by absorbing boundary piece."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .geometry import Boundary, Domain, as_point
from .reduction import pairwise_sum
from .walk import WalkParams, run_walks

# labels counted as "inner" absorption; everything else is "outer"
INNER_LABELS = (Boundary.INNER, Boundary.LEFT)


@dataclass(frozen=True)
class HittingTimeStats:
    start: tuple
    nt: int
    n_inner: int
    total_time: float
    inner_time: float
    outer_time: float

    @property
    def n_outer(self) -> int:
        return self.nt - self.n_inner

    @property
    def mean_time(self) -> float:
        return self.total_time / self.nt

    @property
    def inner_fraction(self) -> float:
        return self.n_inner / self.nt

    @property
    def inner_mean_time(self) -> Optional[float]:
        """Mean exit time of inner-absorbed walks, ``None`` if there were none."""
        return self.inner_time / self.n_inner if self.n_inner else None

    @property
    def outer_mean_time(self) -> Optional[float]:
        return self.outer_time / self.n_outer if self.n_outer else None

    @property
    def radius(self) -> float:
        return math.hypot(*self.start)


def estimate_hitting(domain: Domain, starts: Sequence, nt: int, params: WalkParams,
                     seed: int) -> list[HittingTimeStats]:
    """Exit times from each start; start ``i`` owns streams ``[i*nt, (i+1)*nt)``.

    Times are pseudo-times ``steps * dt``.  Starts on or outside the boundary
    give zero times with every walk attributed to the piece the start lies on.
    """
    if nt < 1:
        raise ValueError("nt must be at least 1")
    out = []
    for i, s in enumerate(starts):
        p = as_point(domain, s)
        batch = run_walks(domain, p, params, seed, nt, i * nt)
        t = batch.elapsed
        inner = np.isin(batch.labels, [int(b) for b in INNER_LABELS])
        # total is the sum of the two parts so the split adds up exactly
        t_in = pairwise_sum(t[inner])
        t_out = pairwise_sum(t[~inner])
        out.append(HittingTimeStats(tuple(p.tolist()), nt, int(inner.sum()),
                                    t_in + t_out, t_in, t_out))
    return out


@dataclass(frozen=True)
class HittingAggregate:
    """Pooled statistics over every walk of every start.

    ``E = f1 T1 + (1 - f1) T2`` holds with ``T1``/``T2`` the pooled conditional
    means.  ``E1``/``E2`` are the unweighted averages over starts of the
    per-start conditional means (starts without such walks are skipped).
    """

    n_walks: int
    n_starts: int
    E: float
    f1: float
    T1: Optional[float]
    T2: Optional[float]
    E1: Optional[float]
    E2: Optional[float]

    def decomposition(self) -> float:
        """Right-hand side ``f1 T1 + (1 - f1) T2``."""
        t1 = self.T1 if self.T1 is not None else 0.0
        t2 = self.T2 if self.T2 is not None else 0.0
        return self.f1 * t1 + (1 - self.f1) * t2


def aggregate_hitting(stats: Sequence[HittingTimeStats]) -> HittingAggregate:
    if not stats:
        raise ValueError("aggregate_hitting needs at least one start")
    n = sum(s.nt for s in stats)
    n_in = sum(s.n_inner for s in stats)
    t_in = pairwise_sum([s.inner_time for s in stats])
    t_out = pairwise_sum([s.outer_time for s in stats])
    per_in = [s.inner_mean_time for s in stats if s.n_inner]
    per_out = [s.outer_mean_time for s in stats if s.n_outer]
    return HittingAggregate(
        n_walks=n,
        n_starts=len(stats),
        E=(t_in + t_out) / n,
        f1=n_in / n,
        T1=t_in / n_in if n_in else None,
        T2=t_out / (n - n_in) if n > n_in else None,
        E1=pairwise_sum(per_in) / len(per_in) if per_in else None,
        E2=pairwise_sum(per_out) / len(per_out) if per_out else None,
    )
