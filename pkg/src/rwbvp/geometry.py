"""Domains of the experiments: membership and boundary classification.

Points are plain sequences of floats (length 1 or 2).  Every domain also has a
vectorised form working on an ``(n, d)`` array, which the lattice builder in
:mod:`rwbvp.walk` uses; the scalar functions route through it so both paths
classify a point identically, bit for bit.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np


class Boundary(enum.IntEnum):
    LEFT = 0
    RIGHT = 1
    INNER = 2
    OUTER = 3
    SPHERE = 4


@dataclass(frozen=True)
class Interval1D:
    """Open interval ]0, L[."""

    L: float = 1.0

    def __post_init__(self):
        if not self.L > 0:
            raise ValueError(f"Interval1D needs L > 0, got {self.L}")

    dim = 1

    def bounds(self):
        return np.array([0.0]), np.array([self.L])

    def contains_many(self, pts: np.ndarray) -> np.ndarray:
        x = pts[:, 0]
        return (x > 0.0) & (x < self.L)

    def classify_many(self, pts: np.ndarray) -> np.ndarray:
        x = pts[:, 0]
        # ties are impossible: contains is false so x <= 0 or x >= L
        return np.where(x <= 0.0, Boundary.LEFT, Boundary.RIGHT).astype(np.int8)


@dataclass(frozen=True)
class Ball2D:
    """Open disc of radius r centred at the origin."""

    r: float = 1.0

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError(f"Ball2D needs r > 0, got {self.r}")

    dim = 2

    def bounds(self):
        return np.array([-self.r, -self.r]), np.array([self.r, self.r])

    def contains_many(self, pts: np.ndarray) -> np.ndarray:
        return np.hypot(pts[:, 0], pts[:, 1]) < self.r

    def classify_many(self, pts: np.ndarray) -> np.ndarray:
        return np.full(len(pts), Boundary.SPHERE, dtype=np.int8)


@dataclass(frozen=True)
class CircularAnnulus:
    """``r_in < |p| < r_out`` in the Euclidean norm."""

    r_in: float = 1.0
    r_out: float = 3.0

    def __post_init__(self):
        if not 0 < self.r_in < self.r_out:
            raise ValueError(f"need 0 < r_in < r_out, got {self.r_in}, {self.r_out}")

    dim = 2

    def bounds(self):
        return np.array([-self.r_out, -self.r_out]), np.array([self.r_out, self.r_out])

    def contains_many(self, pts: np.ndarray) -> np.ndarray:
        rho = np.hypot(pts[:, 0], pts[:, 1])
        return (rho > self.r_in) & (rho < self.r_out)

    def classify_many(self, pts: np.ndarray) -> np.ndarray:
        rho = np.hypot(pts[:, 0], pts[:, 1])
        return np.where(rho <= self.r_in, Boundary.INNER, Boundary.OUTER).astype(np.int8)


@dataclass(frozen=True)
class RectAnnulus:
    """``half_in < max(|x|, |y|) < half_out`` (square shells)."""

    half_in: float = 1.0
    half_out: float = 3.0

    def __post_init__(self):
        if not 0 < self.half_in < self.half_out:
            raise ValueError(
                f"need 0 < half_in < half_out, got {self.half_in}, {self.half_out}"
            )

    dim = 2

    def bounds(self):
        return (np.array([-self.half_out, -self.half_out]),
                np.array([self.half_out, self.half_out]))

    def contains_many(self, pts: np.ndarray) -> np.ndarray:
        s = np.maximum(np.abs(pts[:, 0]), np.abs(pts[:, 1]))
        return (s > self.half_in) & (s < self.half_out)

    def classify_many(self, pts: np.ndarray) -> np.ndarray:
        s = np.maximum(np.abs(pts[:, 0]), np.abs(pts[:, 1]))
        return np.where(s <= self.half_in, Boundary.INNER, Boundary.OUTER).astype(np.int8)


Domain = Union[Interval1D, Ball2D, CircularAnnulus, RectAnnulus]

DOMAIN_KINDS = {
    "interval": Interval1D,
    "ball": Ball2D,
    "circular-annulus": CircularAnnulus,
    "rect-annulus": RectAnnulus,
}


def as_point(domain: Domain, p) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(p, dtype=np.float64))
    if arr.ndim != 1 or arr.shape[0] != domain.dim:
        raise ValueError(
            f"{type(domain).__name__} is {domain.dim}-D, got point {p!r}"
        )
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"point has non-finite coordinates: {p!r}")
    return arr


def contains(domain: Domain, p: Sequence[float] | float) -> bool:
    """True iff ``p`` lies in the open domain; boundary points are absorbed."""
    arr = as_point(domain, p)
    return bool(domain.contains_many(arr[None, :])[0])


def classify_exit(domain: Domain, p: Sequence[float] | float) -> Boundary:
    arr = as_point(domain, p)
    if domain.contains_many(arr[None, :])[0]:
        raise ValueError(f"classify_exit called on interior point {p!r}")
    return Boundary(int(domain.classify_many(arr[None, :])[0]))


def make_domain(kind: str, params: Sequence[float]) -> Domain:
    """Build a domain from a config entry such as ``("circular-annulus", [1, 3])``."""
    try:
        cls = DOMAIN_KINDS[kind]
    except KeyError:
        raise ValueError(
            f"unknown domain {kind!r}; expected one of {sorted(DOMAIN_KINDS)}"
        ) from None
    return cls(*[float(v) for v in params])
