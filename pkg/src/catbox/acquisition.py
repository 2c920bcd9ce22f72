"""Acquisition functions over the GP posterior.

All three acquisitions (expected improvement, upper confidence bound,
probability of improvement) are written for maximization: a more promising
posterior always scores higher, and minimization problems are negated at the
objective boundary before they reach this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .gp import Posterior

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

ACQ_KINDS = ("ei", "ucb", "pi")


@dataclass(frozen=True)
class AcqSpec:
    kind: str = "ei"
    xi: float = 0.01
    beta: float = 2.0
    best_y: float = 0.0  # incumbent in standardized units

    def __post_init__(self) -> None:
        if self.kind not in ACQ_KINDS:
            raise ValueError(f"unknown acquisition kind {self.kind!r}")
        if self.xi < 0 or self.beta < 0:
            raise ValueError("xi and beta must be nonnegative")


def gaussian_pdf(z):
    """Standard normal density; accepts scalars or arrays."""
    z = np.asarray(z, dtype=float)
    out = _INV_SQRT_2PI * np.exp(-0.5 * z * z)
    return float(out) if out.ndim == 0 else out


def gaussian_cdf(z):
    """Standard normal CDF via the erf route; accepts scalars or arrays."""
    z = np.asarray(z, dtype=float)
    out = ndtr(z)
    return float(out) if out.ndim == 0 else out


def score_arrays(acq: AcqSpec, mean: np.ndarray, var: np.ndarray) -> np.ndarray:
    """Vectorized acquisition values for batches of posterior moments."""
    mean = np.asarray(mean, dtype=float)
    sigma = np.sqrt(np.maximum(np.asarray(var, dtype=float), 0.0))
    if acq.kind == "ucb":
        return mean + acq.beta * sigma
    gap = mean - acq.best_y - acq.xi
    zero = sigma <= 0.0
    safe_sigma = np.where(zero, 1.0, sigma)
    z = gap / safe_sigma
    if acq.kind == "ei":
        vals = gap * gaussian_cdf(z) + sigma * gaussian_pdf(z)
        return np.where(zero, np.maximum(gap, 0.0), vals)
    # pi
    vals = gaussian_cdf(z)
    return np.where(zero, (gap > 0.0).astype(float), vals)


def score(acq: AcqSpec, post: Posterior) -> float:
    """Acquisition value of one posterior (standardized units)."""
    out = score_arrays(acq, np.array([post.mean]), np.array([post.var]))
    return float(out[0])
