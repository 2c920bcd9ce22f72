"""Exact Gaussian-process regression over the composite mixed kernel.

Targets are standardized (zero mean, unit variance over the raw observations)
before fitting; the Gram matrix is factorized with an adaptive jitter ladder.
Hyperparameters are fit by multi-start quasi-Newton ascent of the marginal
log likelihood on the unconstrained parameter vector, using analytic
gradients (dL/dtheta = 0.5 * tr((alpha alpha^T - K^-1) dK/dtheta)).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg
import scipy.optimize

from . import kernels
from .kernels import KernelParams, ParamStructure
from .space import MixedPoint, NormalizedPoint, SearchSpace, normalize

Observation = tuple[MixedPoint, float]

JITTER_ESCALATIONS = 6
_LOG_2PI = math.log(2.0 * math.pi)


class GramNotPositiveDefiniteError(RuntimeError):
    """Factorization failed even after the jitter ladder was exhausted."""

    def __init__(self, final_jitter: float):
        super().__init__(f"gram not PD (final jitter {final_jitter:g})")
        self.final_jitter = final_jitter


@dataclass(frozen=True)
class TrainingSet:
    points: tuple[NormalizedPoint, ...]
    y: np.ndarray  # standardized targets
    y_mean: float
    y_std: float


@dataclass(frozen=True)
class GpModel:
    space: SearchSpace
    train: TrainingSet
    params: KernelParams
    chol: np.ndarray  # lower-triangular factor of the jittered Gram
    alpha: np.ndarray  # Gram^-1 y via the factor
    jitter: float


@dataclass(frozen=True)
class Posterior:
    mean: float  # standardized units
    var: float  # standardized units, clamped at 0
    y_mean: float
    y_std: float

    @property
    def std(self) -> float:
        return math.sqrt(self.var)

    @property
    def raw_mean(self) -> float:
        return self.y_mean + self.y_std * self.mean

    @property
    def raw_std(self) -> float:
        return self.y_std * self.std


def build_training_set(space: SearchSpace, observations: Sequence[Observation]) -> TrainingSet:
    if len(observations) < 1:
        raise ValueError("need at least one observation")
    points = tuple(normalize(space, p) for p, _ in observations)
    raw = np.array([y for _, y in observations], dtype=float)
    if not np.isfinite(raw).all():
        raise ValueError("targets must be finite")
    y_mean = float(np.mean(raw))
    y_std = float(np.std(raw))
    if y_std < 1e-12:
        y_std = 1.0
    return TrainingSet(points=points, y=(raw - y_mean) / y_std, y_mean=y_mean, y_std=y_std)


def _base_jitter(K: np.ndarray) -> float:
    return 1e-8 * float(np.trace(K)) / K.shape[0]


def _cholesky_with_escalation(build, n: int) -> tuple[np.ndarray, np.ndarray, float]:
    """Factor K(jitter) escalating jitter tenfold on failure, at most 6 times."""
    K0 = build(0.0)
    base = _base_jitter(K0)
    jitter = base
    for attempt in range(JITTER_ESCALATIONS + 1):
        K = K0 + jitter * np.eye(n)
        try:
            L = np.linalg.cholesky(K)
            return K, L, jitter
        except np.linalg.LinAlgError:
            jitter *= 10.0
    raise GramNotPositiveDefiniteError(final_jitter=jitter / 10.0)


def fit(space: SearchSpace, observations: Sequence[Observation], params: KernelParams) -> GpModel:
    """Fit the exact GP: standardize targets, factor the Gram matrix, solve for alpha."""
    train = build_training_set(space, observations)
    points = list(train.points)
    K, L, jitter = _cholesky_with_escalation(lambda j: kernels.gram(params, points, jitter=j), len(points))
    alpha = scipy.linalg.cho_solve((L, True), train.y)
    return GpModel(space=space, train=train, params=params, chol=L, alpha=alpha, jitter=jitter)


def predict_normalized(model: GpModel, queries: Sequence[NormalizedPoint]) -> tuple[np.ndarray, np.ndarray]:
    """Posterior mean and variance (standardized units) at a batch of normalized points."""
    ks = kernels.cross_gram(model.params, list(model.train.points), list(queries))
    mean = ks.T @ model.alpha
    v = scipy.linalg.solve_triangular(model.chol, ks, lower=True)
    k0 = kernels.kernel_diag_value(model.params, model.space.n_con, model.space.n_cat)
    var = np.maximum(k0 - np.sum(v * v, axis=0), 0.0)
    return mean, var


def predict(model: GpModel, x: MixedPoint) -> Posterior:
    q = normalize(model.space, x)
    mean, var = predict_normalized(model, [q])
    return Posterior(mean=float(mean[0]), var=float(var[0]), y_mean=model.train.y_mean, y_std=model.train.y_std)


def _mll_from_factor(L: np.ndarray, y: np.ndarray, alpha: np.ndarray) -> float:
    n = len(y)
    return float(-0.5 * y @ alpha - np.sum(np.log(np.diag(L))) - 0.5 * n * _LOG_2PI)


def mll(space: SearchSpace, observations: Sequence[Observation], params: KernelParams) -> float:
    """Marginal log likelihood of the standardized targets under the GP prior."""
    train = build_training_set(space, observations)
    points = list(train.points)
    _, L, _ = _cholesky_with_escalation(lambda j: kernels.gram(params, points, jitter=j), len(points))
    alpha = scipy.linalg.cho_solve((L, True), train.y)
    return _mll_from_factor(L, train.y, alpha)


# ---------------------------------------------------------------------------
# hyperparameter optimization

# Search-region bounds for the unconstrained coordinates (L-BFGS-B boxes).
# Frequencies stay inside a Nyquist-style band; bandwidths and scales are kept
# between effective lengthscales of 2.0 and 0.05 normalized units so a single
# spectral line cannot collapse the Gram matrix to low rank.
_LEN_MAX, _LEN_MIN = 2.0, 0.05
_LOG_W_BOUNDS = (math.log(1e-6), math.log(1e2))
_LOG_S2_BOUNDS = (2.0 * math.log(1.0 / (2.0 * math.pi * _LEN_MAX)), 2.0 * math.log(1.0 / (2.0 * math.pi * _LEN_MIN)))
_LOG_GAMMA_BOUNDS = (math.log(1.0 / (2.0 * math.pi * _LEN_MAX)), math.log(1.0 / (2.0 * math.pi * _LEN_MIN)))
_LOG_ELL_BOUNDS = (math.log(1e-6), math.log(10.0))
_LAMBDA_RAW_BOUNDS = (-8.0, 8.0)
_LOG_NOISE_BOUNDS = (math.log(1e-8), math.log(4.0))


def nyquist_cap(n_obs: int) -> float:
    """Frequency cap n/(2*range) in normalized units (range = 1)."""
    return max(n_obs / 2.0, 1.0)


def _bounds_scales_freqmask(structure: ParamStructure, n_obs: int):
    """Per-coordinate (lo, hi) boxes, restart perturbation scales, frequency mask."""
    nu_max = nyquist_cap(n_obs)
    bounds: list[tuple[float, float]] = []
    scales: list[float] = []
    freq_mask: list[bool] = []

    def add(b: tuple[float, float], s: float, is_freq: bool = False) -> None:
        bounds.append(b)
        scales.append(s)
        freq_mask.append(is_freq)

    d = structure.d
    for _ in range(structure.q_gsm):
        add(_LOG_W_BOUNDS, 1.0)
        for _ in range(d):
            add((-nu_max, nu_max), nu_max / 2.0, is_freq=True)
        for _ in range(d):
            add(_LOG_S2_BOUNDS, 1.5)
    for _ in range(structure.q_csm):
        add(_LOG_W_BOUNDS, 1.0)
        for _ in range(d):
            add((-nu_max, nu_max), nu_max / 2.0, is_freq=True)
        for _ in range(d):
            add(_LOG_GAMMA_BOUNDS, 1.5)
    for _ in range(structure.u):
        add(_LOG_ELL_BOUNDS, 0.7)
    if structure.has_lambda:
        add(_LAMBDA_RAW_BOUNDS, 1.0)
    add(_LOG_NOISE_BOUNDS, 1.0)
    return bounds, np.asarray(scales), np.asarray(freq_mask), nu_max


def _nll_and_grad(vec: np.ndarray, structure: ParamStructure, X: np.ndarray, C: np.ndarray, y: np.ndarray):
    """Negative MLL and its gradient in the unconstrained parameterization."""
    n = len(y)
    try:
        params = kernels.unpack(vec, structure)
    except (OverflowError, kernels.KernelError):
        return 1e25, np.zeros_like(vec)
    K, dK = kernels.composite_and_grads(params, structure, X, C, jitter=0.0)
    jitter = _base_jitter(K)
    K[np.diag_indices_from(K)] += jitter
    try:
        L = np.linalg.cholesky(K)
    except np.linalg.LinAlgError:
        return 1e25, np.zeros_like(vec)
    alpha = scipy.linalg.cho_solve((L, True), y)
    nll = -_mll_from_factor(L, y, alpha)
    if not math.isfinite(nll):
        return 1e25, np.zeros_like(vec)
    Kinv = scipy.linalg.cho_solve((L, True), np.eye(n))
    A = np.outer(alpha, alpha) - Kinv
    grad = -0.5 * np.einsum("ij,pij->p", A, dK)
    if not np.isfinite(grad).all():
        return 1e25, np.zeros_like(vec)
    return nll, grad


def default_init_params(
    space: SearchSpace,
    observations: Sequence[Observation],
    rng: np.random.Generator,
    q_gsm: int = 2,
    q_csm: int = 2,
    hamming_unit_diag: bool = False,
) -> KernelParams:
    """Data-driven starting hyperparameters.

    Frequencies are drawn uniformly below a Nyquist-style cap n/2 (normalized
    units); bandwidths and scales come from the reciprocal of the median
    pairwise distance per dimension; weights split unit mass evenly.
    """
    d, u = space.n_con, space.n_cat
    n = len(observations)
    gsm: tuple[kernels.GsmComponent, ...] = ()
    csm: tuple[kernels.CsmComponent, ...] = ()
    if d >= 1:
        X = np.array([normalize(space, p).con01 for p, _ in observations], dtype=float).reshape(n, -1)
        med = np.ones(d) * 0.3
        if n >= 2:
            for j in range(d):
                diffs = np.abs(X[:, None, j] - X[None, :, j])
                vals = diffs[np.triu_indices(n, 1)]
                vals = vals[vals > 1e-12]
                if vals.size:
                    med[j] = float(np.median(vals))
        nu_max = max(n / 2.0, 1.0)
        n_comp = q_gsm + q_csm
        w0 = 1.0 / max(n_comp, 1)
        sig2 = (1.0 / (2.0 * math.pi * med)) ** 2
        gam = 1.0 / (2.0 * math.pi * med)
        gsm = tuple(
            kernels.GsmComponent(weight=w0, mean=tuple(rng.uniform(0.0, nu_max, d)), var=tuple(sig2))
            for _ in range(q_gsm)
        )
        csm = tuple(
            kernels.CsmComponent(weight=w0, eta=tuple(rng.uniform(0.0, nu_max, d)), gamma=tuple(gam))
            for _ in range(q_csm)
        )
    return KernelParams(
        gsm=gsm,
        csm=csm,
        hamming=kernels.HammingParams(lengthscales=(1.0,) * u),
        lam=0.5,
        noise_var=1e-2,
        hamming_unit_diag=hamming_unit_diag,
    )


def optimize_hyperparams(
    space: SearchSpace,
    observations: Sequence[Observation],
    init: KernelParams,
    budget: int = 8,
    seed=0,
    maxiter: int = 60,
) -> KernelParams:
    """Multi-start bound-constrained L-BFGS ascent of the MLL from `init`.

    The first start is `init` itself (clipped into the search boxes); the
    remaining budget-1 starts perturb it in the unconstrained space, except
    that frequency coordinates are redrawn uniformly in scaled Nyquist bands
    (cycling 0.05/0.25/1.0 of the cap) because the likelihood in frequency is
    too multimodal for a Gaussian perturbation around a high-frequency start
    to ever reach the smooth basin. The returned parameters never score below
    MLL(init): `init` always stays in the candidate set.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    train = build_training_set(space, observations)
    X = np.array([p.con01 for p in train.points], dtype=float).reshape(len(train.points), -1)
    C = np.array([p.cat for p in train.points], dtype=int).reshape(len(train.points), -1)
    structure = kernels.structure_of(init, space.n_con, space.n_cat)
    v0 = kernels.pack(init, structure)
    bounds, scales, freq_mask, nu_max = _bounds_scales_freqmask(structure, len(observations))
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])
    v0_in = np.clip(v0, lo, hi)
    rng = np.random.default_rng(seed)
    pert_mult = (0.25, 0.5, 1.0)
    freq_band = (0.05, 0.25, 1.0)

    candidates: list[np.ndarray] = []
    for start in range(budget):
        if start == 0:
            x0 = v0_in
        else:
            x0 = v0_in + pert_mult[(start - 1) % 3] * scales * rng.standard_normal(v0.size)
            if freq_mask.any():
                band = freq_band[(start - 1) % 3] * nu_max
                x0[freq_mask] = rng.uniform(0.0, band, int(freq_mask.sum()))
            x0 = np.clip(x0, lo, hi)
        res = scipy.optimize.minimize(
            _nll_and_grad,
            x0,
            args=(structure, X, C, train.y),
            jac=True,
            method="L-BFGS-B",
            bounds=bounds,
            options={"maxiter": maxiter},
        )
        if np.isfinite(res.fun) and res.fun < 1e24:
            candidates.append(res.x)

    def score(vec: np.ndarray) -> float:
        val, _ = _nll_and_grad(vec, structure, X, C, train.y)
        return -val

    best_vec, best_val = v0, score(v0)
    any_ok = math.isfinite(best_val) and best_val > -1e24
    for vec in candidates:
        val = score(vec)
        if val > best_val:
            best_vec, best_val = vec, val
    if not candidates and not any_ok:
        warnings.warn("all hyperparameter starts failed factorization; keeping initial parameters")
        return init
    if np.array_equal(best_vec, v0):
        return init
    return kernels.unpack(best_vec, structure)
