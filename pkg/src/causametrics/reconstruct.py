"""Recover |alpha_i| and d of a harmonic clean model from its capacity profiles.

The forward entanglement capacity is zero exactly for eps <= (3/4)(1 - p1),
so the onset of a positive capacity gives p1. The backward profile gives p2
the same way, and the capacity at large eps gives log d.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from . import capacity as cap
from .harmonic import HarmonicModel

EPS_FLOOR = 1e-12
EPS_CEIL = 0.75 - 1e-9
BRACKET_FACTOR = 1e-8
MONOTONE_GRID = 33


class InconsistentProfiles(ValueError):
    pass


class NonMonotoneProfile(ValueError):
    pass


@dataclass(frozen=True)
class CapacityProfile:
    """Entanglement capacity as a function of eps, from a callable or from samples.

    Sampled profiles are read as step functions: the value at eps is the
    sample at the largest sampled eps not above it (the first sample below
    the grid).
    """

    direction: str
    query: Callable[[float], float] | None = None
    eps: np.ndarray | None = None
    values: np.ndarray | None = None

    def __post_init__(self):
        if (self.query is None) == (self.eps is None):
            raise ValueError("give either a callable or samples")
        if self.eps is not None:
            eps = np.asarray(self.eps, dtype=float).reshape(-1)
            values = np.asarray(self.values, dtype=float).reshape(-1)
            if eps.size != values.size or eps.size == 0:
                raise ValueError("samples need matching, non-empty eps and values")
            order = np.argsort(eps)
            object.__setattr__(self, "eps", eps[order])
            object.__setattr__(self, "values", values[order])

    @classmethod
    def from_model(cls, model: HarmonicModel, direction: str = "fwd") -> "CapacityProfile":
        p1, p2, _ = model.p
        p = p1 if direction == "fwd" else p2
        return cls(direction, query=lambda e: cap.q_ent_value(p, model.d, e))

    @classmethod
    def from_samples(cls, direction: str, eps, values) -> "CapacityProfile":
        return cls(direction, eps=eps, values=values)

    @property
    def sampled(self) -> bool:
        return self.eps is not None

    def __call__(self, e: float) -> float:
        if self.query is not None:
            return float(self.query(e))
        i = max(0, int(np.searchsorted(self.eps, e, side="right")) - 1)
        return float(self.values[i])

    def top_value(self) -> float:
        """Capacity in the eps -> 1 limit (the last sample for sampled profiles)."""
        return float(self.values[-1]) if self.sampled else None

    def check_monotone(self, tol: float = 1e-12) -> None:
        if self.sampled:
            vals = self.values
        else:
            vals = np.array([self(e) for e in np.linspace(EPS_FLOOR, 1 - 1e-9, MONOTONE_GRID)])
        if np.any(np.diff(vals) < -tol):
            raise NonMonotoneProfile(f"{self.direction} capacity profile decreases in eps")


def find_zero_threshold(profile: CapacityProfile, tol_eps: float = 1e-4) -> float:
    """Smallest eps with positive capacity, found by bisection.

    Returns 0 when the capacity is already positive at the smallest probed
    eps, and 1 when it stays zero up to eps = 3/4.
    """
    if tol_eps <= 0:
        raise ValueError("tol_eps must be positive")
    profile.check_monotone()
    lo, hi = EPS_FLOOR, EPS_CEIL
    if profile(lo) > 0:
        return 0.0
    if profile(hi) <= 0:
        return 1.0
    target = tol_eps * BRACKET_FACTOR
    while hi - lo > target:
        mid = 0.5 * (lo + hi)
        if profile(mid) > 0:
            hi = mid
        else:
            lo = mid
    return hi


def _p_from_threshold(eps_star: float) -> float:
    if eps_star <= 0:
        return 1.0
    if eps_star >= 1:
        return 0.0
    return min(1.0, max(0.0, 1 - 4 * eps_star / 3))


@dataclass
class ReconstructionResult:
    alpha_abs: tuple[float, float, float]
    dim: int | None
    thresholds: tuple[float, float]
    diagnostics: dict = field(default_factory=dict)

    @property
    def p(self) -> tuple[float, float, float]:
        return tuple(a * a for a in self.alpha_abs)

    def to_json(self) -> dict:
        return {"alpha_abs": list(self.alpha_abs), "dim": self.dim,
                "thresholds": list(self.thresholds), "diagnostics": self.diagnostics}


def recover(forward: CapacityProfile, backward: CapacityProfile, tol_eps: float = 1e-4) -> ReconstructionResult:
    """Estimate (|alpha_1|, |alpha_2|, |alpha_3|) and d.

    d is read where the larger-p profile has saturated; it is ``None`` when
    neither profile ever becomes positive (|alpha_3| = 1).
    """
    t1 = find_zero_threshold(forward, tol_eps)
    t2 = find_zero_threshold(backward, tol_eps)
    p1, p2 = _p_from_threshold(t1), _p_from_threshold(t2)
    slack = 8 * tol_eps / 3
    if p1 + p2 > 1 + slack:
        raise InconsistentProfiles(f"p1 + p2 = {p1 + p2:.6g} exceeds 1")
    raw3 = 1 - p1 - p2
    p3 = max(0.0, raw3)
    if raw3 < 0:
        p1, p2 = p1 / (p1 + p2), p2 / (p1 + p2)

    dim = None
    read_at = None
    if max(p1, p2) > 0:
        profile, p = (forward, p1) if p1 >= p2 else (backward, p2)
        if profile.sampled:
            q = profile.top_value()
            read_at = float(profile.eps[-1])
            if read_at < 1 - p:
                raise InconsistentProfiles("samples stop before the capacity saturates")
        else:
            read_at = 1 - p / 2
            q = profile(read_at)
        dim = int(round(2 ** q))

    alpha_abs = tuple(math.sqrt(x) for x in (p1, p2, p3))
    diagnostics = {"p3_residual": float(min(0.0, raw3)), "dim_read_at": read_at,
                   "bracket": tol_eps * BRACKET_FACTOR,
                   "indeterminate_dim": dim is None}
    return ReconstructionResult(alpha_abs, dim, (t1, t2), diagnostics)


def recover_model(model: HarmonicModel, tol_eps: float = 1e-4) -> ReconstructionResult:
    return recover(CapacityProfile.from_model(model, "fwd"),
                   CapacityProfile.from_model(model, "bwd"), tol_eps)


class HarmonicReconstructor(BaseEstimator):
    """Estimator wrapper: fit on sampled (eps, [q_fwd, q_bwd]) capacity profiles.

    Parameters
    ----------
    tol_eps : float
        Resolution of the threshold search.
    """

    def __init__(self, tol_eps: float = 1e-4):
        self.tol_eps = tol_eps

    def fit(self, X, y):
        X, y = check_X_y(X, y, multi_output=True, y_numeric=True)
        if X.shape[1] != 1 or y.ndim != 2 or y.shape[1] != 2:
            raise ValueError("X must be one eps column and y two capacity columns")
        eps = X[:, 0]
        fwd = CapacityProfile.from_samples("fwd", eps, y[:, 0])
        bwd = CapacityProfile.from_samples("bwd", eps, y[:, 1])
        result = recover(fwd, bwd, self.tol_eps)
        self.result_ = result
        self.alpha_abs_ = np.array(result.alpha_abs)
        self.dim_ = result.dim
        self.thresholds_ = np.array(result.thresholds)
        self.n_features_in_ = 1
        return self

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "alpha_abs_")
        X = check_array(X)
        p1, p2, _ = self.alpha_abs_ ** 2
        if self.dim_ is None:
            return np.zeros((X.shape[0], 2))
        return np.array([[cap.q_ent_value(min(p1, 1.0), self.dim_, float(e)),
                          cap.q_ent_value(min(p2, 1.0), self.dim_, float(e))] for e in X[:, 0]])

    def score(self, X, y) -> float:
        """Fraction of sampled capacities reproduced exactly."""
        y = np.asarray(y, dtype=float)
        return float(np.mean(np.isclose(self.predict(X), y, atol=1e-9)))


__all__ = ["CapacityProfile", "ReconstructionResult", "InconsistentProfiles", "NonMonotoneProfile",
           "find_zero_threshold", "recover", "recover_model", "HarmonicReconstructor"]
