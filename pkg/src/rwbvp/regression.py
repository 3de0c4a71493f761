"""Least-squares fits of solver output to the experiment model families."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import SingularFitError

MODELS = {
    "quadratic": ("p1", "p2", "p3"),
    "log-annulus": ("a", "b"),
}


@dataclass(frozen=True)
class FitResult:
    model: str
    coefficients: tuple
    ci95: tuple          # half-widths; nan when there are no degrees of freedom
    rss: float
    n_points: int

    @property
    def dof(self) -> int:
        return self.n_points - len(self.coefficients)

    @property
    def names(self) -> tuple:
        return MODELS[self.model]

    def predict(self, x):
        return _design(self.model, np.asarray(x, dtype=float)) @ np.asarray(self.coefficients)

    def interval(self, i: int) -> tuple:
        c, w = self.coefficients[i], self.ci95[i]
        return c - w, c + w


def _design(model: str, x: np.ndarray) -> np.ndarray:
    if model == "quadratic":
        return np.column_stack([x * x, x, np.ones_like(x)])
    if model == "log-annulus":
        return np.column_stack([np.ones_like(x), np.log(x) / math.log(3.0)])
    raise ValueError(f"unknown model {model!r}")


def _fit(model: str, xs, ys) -> FitResult:
    x = np.asarray(xs, dtype=float).ravel()
    y = np.asarray(ys, dtype=float).ravel()
    if x.shape != y.shape:
        raise ValueError("xs and ys differ in length")
    A = _design(model, x)
    p = A.shape[1]
    if len(x) < p or np.linalg.matrix_rank(A) < p:
        raise SingularFitError(f"{model} fit needs {p} distinct abscissae, got {len(np.unique(x))}")
    coef, _, _, _ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    rss = float(resid @ resid)
    dof = len(x) - p
    if dof > 0:
        # covariance from the R factor avoids forming (A^T A)^-1 explicitly
        r = np.linalg.qr(A, mode="r")
        rinv = np.linalg.inv(r)
        cov = (rss / dof) * (rinv @ rinv.T)
        half = stats.t.ppf(0.975, dof) * np.sqrt(np.diag(cov))
    else:
        half = np.full(p, np.nan)
    return FitResult(model, tuple(float(c) for c in coef), tuple(float(h) for h in half),
                     rss, len(x))


def fit_quadratic(xs, ys) -> FitResult:
    """``y = p1 x^2 + p2 x + p3``."""
    return _fit("quadratic", xs, ys)


def fit_log_annulus(xs, ys) -> FitResult:
    """``y = a + b ln(x) / ln 3`` (the radial harmonic profile of the annulus)."""
    x = np.asarray(xs, dtype=float)
    if np.any(x <= 0):
        raise ValueError("log model needs strictly positive abscissae")
    return _fit("log-annulus", x, ys)


def fit(model: str, xs, ys) -> FitResult:
    if model == "quadratic":
        return fit_quadratic(xs, ys)
    if model in ("log-annulus", "log"):
        return fit_log_annulus(xs, ys)
    raise ValueError(f"unknown model {model!r}; expected one of {sorted(MODELS)}")
