"""Lattice random walks approximating Brownian motion.

A walk started at ``x`` lives on the lattice ``x + s * Z^d`` with spacing
``s = h * sqrt(D)``; each step advances pseudo-time by ``dt`` (``h**2 / d`` for
axis steps).  Source terms are collected at every visited interior point,
start included, exit point excluded.

Functions passed in follow two conventions used throughout the package:

* a source is called as ``f(*coords)`` and must broadcast over numpy arrays;
* boundary data is called as ``g(label, *coords)`` with a :class:`Boundary`.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import _kernels
from .errors import WalkTruncatedError
from .geometry import Boundary, Domain, as_point
from .rng import RngStream, seed_key

MAX_LATTICE_CELLS = 200_000_000


class StepScheme(str, enum.Enum):
    AXIS = "axis"
    DIAGONAL = "diagonal"


_MOVES = {
    (StepScheme.AXIS, 1): np.array([[1, 0], [-1, 0]], dtype=np.int64),
    (StepScheme.AXIS, 2): np.array([[1, 0], [-1, 0], [0, 1], [0, -1]], dtype=np.int64),
    (StepScheme.DIAGONAL, 2): np.array([[1, 1], [-1, 1], [1, -1], [-1, -1]], dtype=np.int64),
}


def _moves(scheme: StepScheme, dim: int) -> np.ndarray:
    scheme = StepScheme(scheme)
    try:
        return _MOVES[(scheme, dim)]
    except KeyError:
        raise ValueError(f"{scheme.value} steps are not defined in dimension {dim}") from None


@dataclass(frozen=True)
class WalkParams:
    h: float
    scheme: StepScheme = StepScheme.AXIS
    diffusion: float = 1.0
    max_steps: int = 10**8

    def __post_init__(self):
        if not (self.h > 0 and math.isfinite(self.h)):
            raise ValueError(f"step h must be positive, got {self.h}")
        if not self.diffusion > 0:
            raise ValueError(f"diffusion must be positive, got {self.diffusion}")
        if int(self.max_steps) < 1:
            raise ValueError("max_steps must be at least 1")
        object.__setattr__(self, "scheme", StepScheme(self.scheme))

    @property
    def spacing(self) -> float:
        """Lattice spacing actually walked, ``h * sqrt(D)``."""
        if self.diffusion == 1.0:
            return self.h
        return self.h * math.sqrt(self.diffusion)

    def dt(self, dim: int) -> float:
        """Pseudo-time per step: squared step length over the dimension.

        For axis steps this is ``h**2 / d``; a diagonal step has length
        ``h * sqrt(2)`` and so advances time by ``h**2``.
        """
        if self.scheme is StepScheme.DIAGONAL:
            _moves(self.scheme, dim)
            return self.h * self.h
        return self.h * self.h / dim


@dataclass(frozen=True)
class WalkOutcome:
    exit_point: tuple
    label: Boundary
    steps: int
    source_sum: float
    elapsed: float


def elementary_step(rng: RngStream, scheme: StepScheme, h: float, p):
    """One random move of ``p``: ``+-h`` along an axis, or ``(+-h, +-h)``."""
    arr = np.atleast_1d(np.asarray(p, dtype=np.float64))
    moves = _moves(scheme, arr.shape[0])
    c = rng.next_u64() >> (64 - (len(moves) - 1).bit_length())
    out = arr + h * moves[c, : arr.shape[0]]
    return tuple(float(v) for v in out)


def _eval_source(source, pts: np.ndarray) -> np.ndarray:
    vals = source(*pts.T)
    return np.broadcast_to(np.asarray(vals, dtype=np.float64), (len(pts),)).copy()


def evaluate_boundary(g, points: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Evaluate ``g(label, *coords)`` for every exit, grouped by label."""
    out = np.empty(len(points), dtype=np.float64)
    for lbl in np.unique(labels):
        sel = labels == lbl
        vals = g(Boundary(int(lbl)), *points[sel].T)
        out[sel] = np.broadcast_to(np.asarray(vals, dtype=np.float64), (int(sel.sum()),))
    return out


def simulate_walk(domain: Domain, start, params: WalkParams, rng: RngStream,
                  source: Optional[Callable] = None) -> WalkOutcome:
    """Run a single walk until it first leaves the open domain.

    This is the reference (pure Python) path; :func:`run_walks` runs the same
    walks in compiled code and produces identical trajectories.
    """
    x0 = as_point(domain, start)
    d = domain.dim
    moves = _moves(params.scheme, d)
    bits = (len(moves) - 1).bit_length()
    s = params.spacing
    dt = params.dt(d)
    k = np.zeros(2, dtype=np.int64)
    point = x0.copy()
    n = 0
    acc = 0.0
    while domain.contains_many(point[None, :])[0]:
        if n >= params.max_steps:
            partial = WalkOutcome(tuple(point.tolist()), None, n, acc, n * dt)
            raise WalkTruncatedError(
                f"walk from {tuple(x0)} still inside after {n} steps", partial)
        if source is not None:
            acc += float(source(*point))
        n += 1
        c = rng.next_u64() >> (64 - bits)
        k += moves[c]
        point = x0 + s * k[:d]
    label = Boundary(int(domain.classify_many(point[None, :])[0]))
    return WalkOutcome(tuple(point.tolist()), label, n, acc, n * dt)


def payoff(outcome: WalkOutcome, dt: float, g: Callable) -> float:
    """``dt * source_sum + g(exit)``: one sample of the solution value."""
    bval = g(outcome.label, *outcome.exit_point)
    return dt * outcome.source_sum + float(bval)


@dataclass
class Lattice:
    interior: np.ndarray     # (nx, ny) bool
    source: np.ndarray       # (nx, ny) float, zero outside
    origin: tuple            # start cell indices
    start: np.ndarray
    spacing: float
    dim: int

    def points(self, ii: np.ndarray, jj: np.ndarray) -> np.ndarray:
        k = np.stack([ii - self.origin[0], jj - self.origin[1]], axis=1)[:, : self.dim]
        return self.start[None, :] + self.spacing * k


def build_lattice(domain: Domain, start, spacing: float, source=None) -> Lattice:
    x0 = as_point(domain, start)
    lo, hi = domain.bounds()
    d = domain.dim
    ranges = []
    for c in range(d):
        kmin = math.floor((lo[c] - x0[c]) / spacing) - 1
        kmax = math.ceil((hi[c] - x0[c]) / spacing) + 1
        ranges.append(np.arange(min(kmin, -1), max(kmax, 1) + 1, dtype=np.int64))
    if d == 1:
        ranges.append(np.zeros(1, dtype=np.int64))
    shape = (len(ranges[0]), len(ranges[1]))
    if shape[0] * shape[1] > MAX_LATTICE_CELLS:
        raise ValueError(f"lattice of {shape} cells is too large; increase h")
    ki, kj = np.meshgrid(ranges[0], ranges[1], indexing="ij")
    k = np.stack([ki.ravel(), kj.ravel()], axis=1)[:, :d]
    pts = x0[None, :] + spacing * k
    interior = domain.contains_many(pts)
    src = np.zeros(len(pts))
    if source is not None and interior.any():
        src[interior] = _eval_source(source, pts[interior])
    origin = (int(-ranges[0][0]), int(-ranges[1][0]))
    return Lattice(interior.reshape(shape), src.reshape(shape), origin, x0, spacing, d)


@dataclass
class WalkBatch:
    """Outcomes of ``nt`` walks from one start, as parallel arrays."""

    steps: np.ndarray
    source_sum: np.ndarray
    exit_points: np.ndarray
    labels: np.ndarray
    dt: float

    @property
    def elapsed(self) -> np.ndarray:
        return self.steps * self.dt

    def __len__(self):
        return len(self.steps)

    def outcome(self, i: int) -> WalkOutcome:
        return WalkOutcome(tuple(self.exit_points[i].tolist()), Boundary(int(self.labels[i])),
                           int(self.steps[i]), float(self.source_sum[i]), float(self.elapsed[i]))

    def payoffs(self, g) -> np.ndarray:
        return self.dt * self.source_sum + evaluate_boundary(g, self.exit_points, self.labels)


def run_walks(domain: Domain, start, params: WalkParams, seed: int, nt: int,
              stream_offset: int = 0, source=None) -> WalkBatch:
    """Run ``nt`` walks from ``start``; walk ``i`` uses stream ``stream_offset + i``."""
    if nt < 0:
        raise ValueError("nt must be non-negative")
    moves = _moves(params.scheme, domain.dim)
    lat = build_lattice(domain, start, params.spacing, source)
    steps, ssum, ei, ej, trunc = _kernels.walk_batch(
        lat.interior, lat.source, lat.origin[0], lat.origin[1],
        np.uint64(seed_key(seed)), np.int64(stream_offset), np.int64(nt), moves,
        np.uint64((len(moves) - 1).bit_length()), np.int64(params.max_steps),
        source is not None)
    pts = lat.points(ei, ej)
    labels = np.full(nt, -1, dtype=np.int8)
    done = ~trunc
    if done.any():
        labels[done] = domain.classify_many(pts[done])
    batch = WalkBatch(steps, ssum, pts, labels, params.dt(domain.dim))
    if trunc.any():
        raise WalkTruncatedError(
            f"{int(trunc.sum())} of {nt} walks exceeded max_steps={params.max_steps}", batch)
    return batch


def index_walks(source_values: np.ndarray, node: int, seed: int, nt: int,
                stream_offset: int = 0):
    """Walks on grid indices ``0..N`` stepping +-1, absorbed at 0 and N.

    ``source_values[m]`` is added at every visit of interior node ``m``.
    Returns per-walk source sums and a boolean array "absorbed at N".
    """
    n_last = len(source_values) - 1
    interior = np.zeros((n_last + 1, 1), dtype=np.bool_)
    interior[1:n_last, 0] = True
    src = np.ascontiguousarray(np.asarray(source_values, dtype=np.float64)[:, None])
    steps, ssum, ei, _, trunc = _kernels.walk_batch(
        interior, src, int(node), 0, np.uint64(seed_key(seed)), np.int64(stream_offset),
        np.int64(nt), _MOVES[(StepScheme.AXIS, 1)], np.uint64(1), np.int64(2**62), True)
    return ssum, ei == n_last
