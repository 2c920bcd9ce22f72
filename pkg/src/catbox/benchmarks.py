"""Synthetic objectives for mixed-variable optimization studies.

All four functions are minimization problems in their standard published
forms; the engine always maximizes, so `MixedObjective` exposes the negated
value. Categorical variables are grafted onto a continuous function by
mapping level indices onto an evenly spaced grid over the function's box,
occupying the function's first coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .space import (
    CategoricalVar,
    ContinuousVar,
    MixedPoint,
    SearchSpace,
    encode_categorical_for_benchmark,
)

FN_DOMAINS = {
    "ackley": (-32.768, 32.768),
    "griewank": (-600.0, 600.0),
    "rosenbrock": (-5.0, 10.0),
    "schwefel": (-500.0, 500.0),
}


class BenchmarkError(ValueError):
    pass


@dataclass(frozen=True)
class SyntheticFn:
    kind: str
    dim: int
    a: float = 20.0
    b: float = 0.2
    c: float = 2.0 * math.pi

    def __post_init__(self) -> None:
        if self.kind not in FN_DOMAINS:
            raise BenchmarkError(f"unknown function {self.kind!r}")
        if self.dim < 1:
            raise BenchmarkError("dim must be >= 1")
        if self.kind == "rosenbrock" and self.dim < 2:
            raise BenchmarkError("rosenbrock needs dim >= 2")

    @property
    def domain(self) -> tuple[float, float]:
        return FN_DOMAINS[self.kind]

    @property
    def optimum_value(self) -> float:
        return 0.0

    @property
    def optimizer(self) -> np.ndarray:
        if self.kind == "rosenbrock":
            return np.ones(self.dim)
        if self.kind == "schwefel":
            return np.full(self.dim, 420.9687)
        return np.zeros(self.dim)


def eval_synthetic(fn: SyntheticFn, z) -> float:
    """Exact (minimization) value of the function at z; out-of-domain input faults."""
    z = np.asarray(z, dtype=float)
    if z.shape != (fn.dim,):
        raise BenchmarkError(f"expected {fn.dim} coordinates, got shape {z.shape}")
    lo, hi = fn.domain
    if np.any(z < lo) or np.any(z > hi):
        raise BenchmarkError(f"input outside the {fn.kind} domain [{lo}, {hi}]")
    if fn.kind == "ackley":
        rms = math.sqrt(float(np.mean(z * z)))
        return float(-fn.a * math.exp(-fn.b * rms) - math.exp(float(np.mean(np.cos(fn.c * z)))) + fn.a + math.e)
    if fn.kind == "griewank":
        idx = np.arange(1, fn.dim + 1, dtype=float)
        return float(np.sum(z * z) / 4000.0 - np.prod(np.cos(z / np.sqrt(idx))) + 1.0)
    if fn.kind == "rosenbrock":
        return float(np.sum(100.0 * (z[1:] - z[:-1] ** 2) ** 2 + (1.0 - z[:-1]) ** 2))
    # schwefel
    return float(418.9829 * fn.dim - np.sum(z * np.sin(np.sqrt(np.abs(z)))))


@dataclass(frozen=True)
class MixedObjective:
    """Engine-facing (maximization) objective over a mixed space built from a synthetic function."""

    fn: SyntheticFn
    space: SearchSpace

    def encode(self, point: MixedPoint) -> np.ndarray:
        lo, hi = self.fn.domain
        cats = encode_categorical_for_benchmark(self.space, point, lo, hi)
        return np.array(list(cats) + list(point.con), dtype=float)

    def true_minimum_value(self, point: MixedPoint) -> float:
        return eval_synthetic(self.fn, self.encode(point))

    def __call__(self, point: MixedPoint) -> float:
        return -self.true_minimum_value(point)


def mixed_wrap(fn: SyntheticFn, n_cat: int, levels_per_cat: int, n_con: int) -> MixedObjective:
    """Split the function's coordinates into n_cat grid-encoded categoricals and n_con box variables."""
    if n_cat + n_con != fn.dim:
        raise BenchmarkError("n_cat + n_con must equal the function dimension")
    if n_cat > 0 and levels_per_cat < 2:
        raise BenchmarkError("levels_per_cat must be >= 2")
    lo, hi = fn.domain
    cats = tuple(
        CategoricalVar(name=f"cat{i + 1}", levels=tuple(f"L{j}" for j in range(levels_per_cat)))
        for i in range(n_cat)
    )
    cons = tuple(ContinuousVar(name=f"con{i + 1}", lower=lo, upper=hi) for i in range(n_con))
    return MixedObjective(fn=fn, space=SearchSpace(categoricals=cats, continuous=cons))


@dataclass(frozen=True)
class NoiseSpec:
    kind: str = "none"
    sigma: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in ("none", "gaussian"):
            raise BenchmarkError(f"unknown noise kind {self.kind!r}")
        if self.sigma < 0:
            raise BenchmarkError("sigma must be nonnegative")


def add_noise(y: float, spec: NoiseSpec, draw_index: int) -> float:
    """y plus sigma times a standard normal draw from a counter-seeded stream.

    Each draw index opens its own derived stream, so draws are independent,
    order-free, and reproducible across processes.
    """
    if spec.kind == "none" or spec.sigma == 0.0:
        return y
    g = float(np.random.default_rng([spec.seed, draw_index]).standard_normal())
    return y + spec.sigma * g
