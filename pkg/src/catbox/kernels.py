"""Covariance functions for the mixed-space Gaussian process surrogate.

Continuous similarity comes from a spectral mixture kernel whose spectral
density is a symmetrized mixture of Gaussian and Cauchy components. Each
Gaussian component contributes

    w * exp(-2 pi^2 sum_j s2_j tau_j^2) * cos(2 pi tau . mu)

an infinitely smooth term, and each Cauchy component contributes

    w * exp(-2 pi sum_j gamma_j |tau_j|) * cos(2 pi tau . eta)

a heavy-tailed term that is continuous but not differentiable at tau = 0, so
the sum can model both gradual trends and sharp transitions. Categorical
similarity is a weighted exponentiated Hamming kernel

    exp((1/U) sum_i ell_i * [a_i == b_i])

and the full mixed kernel is the convex combination

    k = lam * (k_gc * k_u) + (1 - lam) * (k_gc + k_u).

When the space has no continuous part the composite collapses to k_u, and
with no categorical part it collapses to k_gc (the additive constant that
would remain only shifts the GP prior and is absorbed by output
standardization).

All hyperparameters are optimized through an unconstrained vector: positive
quantities (weights, bandwidths, scales, noise) are log-transformed and the
trade-off lam goes through a logistic transform. `pack`/`unpack` convert
between KernelParams and that vector, and `composite_and_grads` returns the
Gram matrix together with its derivative with respect to every unconstrained
coordinate (used for marginal-likelihood ascent).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Any, Sequence

import numpy as np

from .space import NormalizedPoint

NOISE_FLOOR = 1e-8

_TWO_PI = 2.0 * math.pi
_TWO_PI_SQ = 2.0 * math.pi**2


class KernelError(ValueError):
    """Raised on invalid kernel hyperparameters or non-finite kernel values."""


@dataclass(frozen=True)
class GsmComponent:
    """One Gaussian spectral component: weight, frequency mean, diagonal variance."""

    weight: float
    mean: tuple[float, ...]
    var: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "mean", tuple(float(x) for x in self.mean))
        object.__setattr__(self, "var", tuple(float(x) for x in self.var))
        if self.weight < 0:
            raise KernelError("GSM component weight must be nonnegative")
        if len(self.mean) != len(self.var):
            raise KernelError("GSM mean and var must have the same length")
        if any(v <= 0 for v in self.var):
            raise KernelError("GSM spectral variances must be positive")


@dataclass(frozen=True)
class CsmComponent:
    """One Cauchy spectral component: weight, central frequency, scale."""

    weight: float
    eta: tuple[float, ...]
    gamma: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "eta", tuple(float(x) for x in self.eta))
        object.__setattr__(self, "gamma", tuple(float(x) for x in self.gamma))
        if self.weight < 0:
            raise KernelError("CSM component weight must be nonnegative")
        if len(self.eta) != len(self.gamma):
            raise KernelError("CSM eta and gamma must have the same length")
        if any(g <= 0 for g in self.gamma):
            raise KernelError("CSM scales must be positive")


@dataclass(frozen=True)
class HammingParams:
    """Per-variable lengthscales of the exponentiated Hamming kernel."""

    lengthscales: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "lengthscales", tuple(float(x) for x in self.lengthscales))
        if any(l < 0 for l in self.lengthscales):
            raise KernelError("Hamming lengthscales must be nonnegative")


@dataclass(frozen=True)
class KernelParams:
    gsm: tuple[GsmComponent, ...] = ()
    csm: tuple[CsmComponent, ...] = ()
    hamming: HammingParams = HammingParams()
    lam: float = 0.5
    noise_var: float = 1e-2
    # Open flag: rescale the Hamming kernel to unit diagonal instead of the
    # printed form whose diagonal is exp(mean lengthscale).
    hamming_unit_diag: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "gsm", tuple(self.gsm))
        object.__setattr__(self, "csm", tuple(self.csm))
        if not 0.0 <= self.lam <= 1.0:
            raise KernelError("lambda must lie in [0, 1]")
        if self.noise_var < NOISE_FLOOR:
            raise KernelError(f"noise variance must be >= {NOISE_FLOOR}")
        if (self.gsm or self.csm) and self.total_weight() <= 0:
            raise KernelError("total spectral weight must be positive")
        dims = {len(c.mean) for c in self.gsm} | {len(c.eta) for c in self.csm}
        if len(dims) > 1:
            raise KernelError("all spectral components must share the same dimension")

    def total_weight(self) -> float:
        return float(sum(c.weight for c in self.gsm) + sum(c.weight for c in self.csm))

    def to_json(self) -> dict[str, Any]:
        return {
            "gsm": [{"weight": c.weight, "mean": list(c.mean), "var": list(c.var)} for c in self.gsm],
            "csm": [{"weight": c.weight, "eta": list(c.eta), "gamma": list(c.gamma)} for c in self.csm],
            "hamming_lengthscales": list(self.hamming.lengthscales),
            "lambda": self.lam,
            "noise_var": self.noise_var,
            "hamming_unit_diag": self.hamming_unit_diag,
        }

    @staticmethod
    def from_json(doc: dict[str, Any]) -> "KernelParams":
        return KernelParams(
            gsm=tuple(
                GsmComponent(weight=float(c["weight"]), mean=tuple(c["mean"]), var=tuple(c["var"]))
                for c in doc.get("gsm", [])
            ),
            csm=tuple(
                CsmComponent(weight=float(c["weight"]), eta=tuple(c["eta"]), gamma=tuple(c["gamma"]))
                for c in doc.get("csm", [])
            ),
            hamming=HammingParams(lengthscales=tuple(doc.get("hamming_lengthscales", []))),
            lam=float(doc["lambda"]),
            noise_var=float(doc["noise_var"]),
            hamming_unit_diag=bool(doc.get("hamming_unit_diag", False)),
        )


# ---------------------------------------------------------------------------
# stacked-array views used by the vectorized paths


def _gsm_arrays(params: KernelParams) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    w = np.array([c.weight for c in params.gsm], dtype=float)
    mu = np.array([c.mean for c in params.gsm], dtype=float).reshape(len(params.gsm), -1)
    s2 = np.array([c.var for c in params.gsm], dtype=float).reshape(len(params.gsm), -1)
    return w, mu, s2


def _csm_arrays(params: KernelParams) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    w = np.array([c.weight for c in params.csm], dtype=float)
    eta = np.array([c.eta for c in params.csm], dtype=float).reshape(len(params.csm), -1)
    gam = np.array([c.gamma for c in params.csm], dtype=float).reshape(len(params.csm), -1)
    return w, eta, gam


def _ell(params: KernelParams) -> np.ndarray:
    return np.asarray(params.hamming.lengthscales, dtype=float)


# ---------------------------------------------------------------------------
# pointwise kernel evaluations


def k_gsm(params: KernelParams, tau: Sequence[float] | np.ndarray) -> float:
    """Gaussian spectral mixture kernel at lag tau."""
    t = np.atleast_1d(np.asarray(tau, dtype=float))
    w, mu, s2 = _gsm_arrays(params)
    env = np.exp(-_TWO_PI_SQ * (s2 @ (t * t)))
    osc = np.cos(_TWO_PI * (mu @ t))
    return float(np.dot(w, env * osc))


def k_csm(params: KernelParams, tau: Sequence[float] | np.ndarray) -> float:
    """Cauchy spectral mixture kernel at lag tau (elementwise |tau| in the decay)."""
    t = np.atleast_1d(np.asarray(tau, dtype=float))
    w, eta, gam = _csm_arrays(params)
    env = np.exp(-_TWO_PI * (gam @ np.abs(t)))
    osc = np.cos(_TWO_PI * (eta @ t))
    return float(np.dot(w, env * osc))


def k_gc(params: KernelParams, tau: Sequence[float] | np.ndarray) -> float:
    """Combined continuous kernel: Gaussian plus Cauchy spectral mixtures."""
    return k_gsm(params, tau) + k_csm(params, tau)


def k_hamming(params: KernelParams, a: Sequence[int], b: Sequence[int]) -> float:
    """Weighted exponentiated Hamming similarity between two index vectors."""
    if len(a) != len(b) or len(a) == 0:
        raise KernelError("categorical inputs must share a positive length")
    ell = _ell(params)
    if len(ell) != len(a):
        raise KernelError("lengthscale count does not match categorical length")
    matches = np.fromiter((1.0 if x == y else 0.0 for x, y in zip(a, b)), dtype=float, count=len(a))
    value = math.exp(float(np.dot(ell, matches)) / len(a))
    if params.hamming_unit_diag:
        value /= math.exp(float(np.sum(ell)) / len(a))
    return value


def k_composite(params: KernelParams, x: NormalizedPoint, x2: NormalizedPoint) -> float:
    """Mixed kernel between two normalized points.

    Convex combination lam * (k_gc * k_u) + (1 - lam) * (k_gc + k_u); collapses
    to the surviving factor when the space has no continuous or no categorical
    part.
    """
    d = len(x.con01)
    u = len(x.cat)
    if d == 0:
        return k_hamming(params, x.cat, x2.cat)
    tau = np.asarray(x.con01, dtype=float) - np.asarray(x2.con01, dtype=float)
    if u == 0:
        return k_gc(params, tau)
    kc = k_gc(params, tau)
    ku = k_hamming(params, x.cat, x2.cat)
    return params.lam * (kc * ku) + (1.0 - params.lam) * (kc + ku)


# ---------------------------------------------------------------------------
# vectorized Gram assembly


def _split_points(points: Sequence[NormalizedPoint]) -> tuple[np.ndarray, np.ndarray]:
    X = np.array([p.con01 for p in points], dtype=float).reshape(len(points), -1)
    C = np.array([p.cat for p in points], dtype=int).reshape(len(points), -1)
    return X, C


def _kgc_matrix(params: KernelParams, TAU: np.ndarray) -> np.ndarray:
    """Continuous kernel over a lag tensor of shape (..., d)."""
    out = np.zeros(TAU.shape[:-1], dtype=float)
    w, mu, s2 = _gsm_arrays(params)
    for q in range(len(w)):
        env = np.exp(-_TWO_PI_SQ * (TAU * TAU) @ s2[q])
        out += w[q] * env * np.cos(_TWO_PI * (TAU @ mu[q]))
    wc, eta, gam = _csm_arrays(params)
    ABS = np.abs(TAU)
    for q in range(len(wc)):
        env = np.exp(-_TWO_PI * ABS @ gam[q])
        out += wc[q] * env * np.cos(_TWO_PI * (TAU @ eta[q]))
    return out


def _ku_matrix(params: KernelParams, MATCH: np.ndarray) -> np.ndarray:
    """Hamming kernel over a boolean match tensor of shape (..., U)."""
    u = MATCH.shape[-1]
    ell = _ell(params)
    out = np.exp((MATCH @ ell) / u)
    if params.hamming_unit_diag:
        out /= math.exp(float(np.sum(ell)) / u)
    return out


def _composite_matrix(params: KernelParams, X1: np.ndarray, C1: np.ndarray, X2: np.ndarray, C2: np.ndarray) -> np.ndarray:
    d = X1.shape[1]
    u = C1.shape[1]
    if d > 0:
        TAU = X1[:, None, :] - X2[None, :, :]
        Kgc = _kgc_matrix(params, TAU)
    if u > 0:
        MATCH = (C1[:, None, :] == C2[None, :, :]).astype(float)
        Ku = _ku_matrix(params, MATCH)
    if d == 0:
        return Ku
    if u == 0:
        return Kgc
    return params.lam * (Kgc * Ku) + (1.0 - params.lam) * (Kgc + Ku)


def _check_compatible(params: KernelParams, d: int, u: int) -> None:
    if d >= 1 and (len(params.gsm) < 1 or len(params.csm) < 1):
        raise KernelError("continuous space requires at least one GSM and one CSM component")
    for c in params.gsm:
        if len(c.mean) != d:
            raise KernelError(f"GSM component dimension {len(c.mean)} does not match space dimension {d}")
    for c in params.csm:
        if len(c.eta) != d:
            raise KernelError(f"CSM component dimension {len(c.eta)} does not match space dimension {d}")
    if len(params.hamming.lengthscales) != u:
        raise KernelError(
            f"Hamming lengthscale count {len(params.hamming.lengthscales)} does not match categorical count {u}"
        )


def gram(params: KernelParams, points: Sequence[NormalizedPoint], jitter: float = 0.0) -> np.ndarray:
    """Kernel matrix over a point set with noise variance plus jitter on the diagonal.

    Exactly symmetric by construction: the strict upper triangle is computed
    once and mirrored.
    """
    if len(points) < 1:
        raise KernelError("gram needs at least one point")
    if jitter < 0:
        raise KernelError("jitter must be nonnegative")
    X, C = _split_points(points)
    _check_compatible(params, X.shape[1], C.shape[1])
    K = _composite_matrix(params, X, C, X, C)
    if not np.isfinite(K).all():
        i, j = np.argwhere(~np.isfinite(K))[0]
        raise KernelError(f"non-finite kernel value between points {i} and {j}")
    K = np.triu(K) + np.triu(K, 1).T
    K[np.diag_indices_from(K)] += params.noise_var + jitter
    return K


def cross_gram(params: KernelParams, points: Sequence[NormalizedPoint], queries: Sequence[NormalizedPoint]) -> np.ndarray:
    """Noise-free kernel matrix between a training set (rows) and queries (columns)."""
    X1, C1 = _split_points(points)
    X2, C2 = _split_points(queries)
    _check_compatible(params, X1.shape[1], C1.shape[1])
    K = _composite_matrix(params, X1, C1, X2, C2)
    if not np.isfinite(K).all():
        i, j = np.argwhere(~np.isfinite(K))[0]
        raise KernelError(f"non-finite kernel value between training point {i} and query {j}")
    return K


def kernel_diag_value(params: KernelParams, d: int, u: int) -> float:
    """k(x, x) for the composite kernel; constant across the space."""
    kc0 = params.total_weight()
    if u == 0:
        return kc0
    ell = _ell(params)
    ku0 = 1.0 if params.hamming_unit_diag else math.exp(float(np.sum(ell)) / u)
    if d == 0:
        return ku0
    return params.lam * kc0 * ku0 + (1.0 - params.lam) * (kc0 + ku0)


# ---------------------------------------------------------------------------
# unconstrained parameter vector


@dataclass(frozen=True)
class ParamStructure:
    """Shape of the unconstrained hyperparameter vector for a given space."""

    q_gsm: int
    q_csm: int
    d: int
    u: int
    hamming_unit_diag: bool = False

    @property
    def has_lambda(self) -> bool:
        return self.d >= 1 and self.u >= 1

    @property
    def size(self) -> int:
        n = self.q_gsm * (2 * self.d + 1) + self.q_csm * (2 * self.d + 1) + self.u
        return n + (1 if self.has_lambda else 0) + 1


def structure_of(params: KernelParams, d: int, u: int) -> ParamStructure:
    return ParamStructure(q_gsm=len(params.gsm), q_csm=len(params.csm), d=d, u=u, hamming_unit_diag=params.hamming_unit_diag)


def _safe_log(x: float) -> float:
    return math.log(max(x, 1e-12))


def pack(params: KernelParams, structure: ParamStructure) -> np.ndarray:
    """KernelParams -> unconstrained vector (log weights/bandwidths, raw frequencies, logit lambda)."""
    vec: list[float] = []
    for c in params.gsm:
        vec.append(_safe_log(c.weight))
        vec.extend(c.mean)
        vec.extend(_safe_log(v) for v in c.var)
    for c in params.csm:
        vec.append(_safe_log(c.weight))
        vec.extend(c.eta)
        vec.extend(_safe_log(g) for g in c.gamma)
    vec.extend(_safe_log(l) for l in params.hamming.lengthscales)
    if structure.has_lambda:
        lam = min(max(params.lam, 1e-9), 1.0 - 1e-9)
        vec.append(math.log(lam / (1.0 - lam)))
    vec.append(_safe_log(params.noise_var - NOISE_FLOOR))
    out = np.asarray(vec, dtype=float)
    if out.size != structure.size:
        raise KernelError("parameter vector size mismatch")
    return out


def unpack(vec: np.ndarray, structure: ParamStructure) -> KernelParams:
    """Unconstrained vector -> KernelParams. Noise is floored smoothly at NOISE_FLOOR."""
    vec = np.asarray(vec, dtype=float)
    if vec.size != structure.size:
        raise KernelError("parameter vector size mismatch")
    i = 0
    d = structure.d
    gsm = []
    for _ in range(structure.q_gsm):
        w = math.exp(vec[i]); i += 1
        mu = tuple(vec[i : i + d]); i += d
        s2 = tuple(math.exp(v) for v in vec[i : i + d]); i += d
        gsm.append(GsmComponent(weight=w, mean=mu, var=s2))
    csm = []
    for _ in range(structure.q_csm):
        w = math.exp(vec[i]); i += 1
        eta = tuple(vec[i : i + d]); i += d
        gam = tuple(math.exp(v) for v in vec[i : i + d]); i += d
        csm.append(CsmComponent(weight=w, eta=eta, gamma=gam))
    ell = tuple(math.exp(v) for v in vec[i : i + structure.u]); i += structure.u
    if structure.has_lambda:
        lam = 1.0 / (1.0 + math.exp(-vec[i])); i += 1
    else:
        lam = 0.5
    noise = NOISE_FLOOR + math.exp(vec[i]); i += 1
    return KernelParams(
        gsm=tuple(gsm),
        csm=tuple(csm),
        hamming=HammingParams(lengthscales=ell),
        lam=lam,
        noise_var=noise,
        hamming_unit_diag=structure.hamming_unit_diag,
    )


def composite_and_grads(
    params: KernelParams, structure: ParamStructure, X: np.ndarray, C: np.ndarray, jitter: float
) -> tuple[np.ndarray, np.ndarray]:
    """Gram matrix and its derivatives with respect to every unconstrained coordinate.

    Returns (K, dK) where K has shape (n, n) and dK has shape (p, n, n) with p
    the structure size. Derivatives are taken in the unconstrained
    parameterization (chain rule through exp/logistic included).
    """
    n = X.shape[0]
    d, u = structure.d, structure.u
    p = structure.size
    dK = np.zeros((p, n, n), dtype=float)

    if d > 0:
        TAU = X[:, None, :] - X[None, :, :]
        TAU2 = TAU * TAU
        ABS = np.abs(TAU)
    MATCH = (C[:, None, :] == C[None, :, :]).astype(float) if u > 0 else None

    # Per-part values and raw-parameter derivative stacks.
    Kgc = np.zeros((n, n)) if d > 0 else None
    idx = 0
    if d > 0:
        w, mu, s2 = _gsm_arrays(params)
        for q in range(structure.q_gsm):
            env = np.exp(-_TWO_PI_SQ * TAU2 @ s2[q])
            phase = _TWO_PI * (TAU @ mu[q])
            cosp = np.cos(phase)
            comp = w[q] * env * cosp
            Kgc += comp
            dK[idx] = comp  # d/d log w
            base = idx
            for j in range(d):
                dK[base + 1 + j] = -w[q] * env * np.sin(phase) * (_TWO_PI * TAU[..., j])
                dK[base + 1 + d + j] = comp * (-_TWO_PI_SQ * TAU2[..., j] * s2[q, j])
            idx += 2 * d + 1
        wc, eta, gam = _csm_arrays(params)
        for q in range(structure.q_csm):
            env = np.exp(-_TWO_PI * ABS @ gam[q])
            phase = _TWO_PI * (TAU @ eta[q])
            cosp = np.cos(phase)
            comp = wc[q] * env * cosp
            Kgc += comp
            dK[idx] = comp
            base = idx
            for j in range(d):
                dK[base + 1 + j] = -wc[q] * env * np.sin(phase) * (_TWO_PI * TAU[..., j])
                dK[base + 1 + d + j] = comp * (-_TWO_PI * ABS[..., j] * gam[q, j])
            idx += 2 * d + 1

    Ku = None
    ell_base = idx
    if u > 0:
        ell = _ell(params)
        Ku = _ku_matrix(params, MATCH)
        for i in range(u):
            grad_part = Ku * (ell[i] * MATCH[..., i] / u)
            if params.hamming_unit_diag:
                grad_part -= Ku * (ell[i] / u)
            dK[ell_base + i] = grad_part
        idx += u

    # Combine the two parts through the convex mixture; scale part-derivatives
    # by the mixture weight they see.
    if d == 0:
        K = Ku.copy()
    elif u == 0:
        K = Kgc.copy()
    else:
        lam = params.lam
        K = lam * (Kgc * Ku) + (1.0 - lam) * (Kgc + Ku)
        n_cont = (structure.q_gsm + structure.q_csm) * (2 * d + 1)
        cont_scale = lam * Ku + (1.0 - lam)
        dK[:n_cont] *= cont_scale[None, :, :]
        cat_scale = lam * Kgc + (1.0 - lam)
        dK[ell_base : ell_base + u] *= cat_scale[None, :, :]
        dlam = lam * (1.0 - lam)  # chain rule through the logistic transform
        dK[idx] = (Kgc * Ku - Kgc - Ku) * dlam
        idx += 1

    K = np.triu(K) + np.triu(K, 1).T
    K[np.diag_indices_from(K)] += params.noise_var + jitter
    dK[idx] = (params.noise_var - NOISE_FLOOR) * np.eye(n)  # d noise/d raw = exp(raw)
    return K, dK


def with_noise_floor(params: KernelParams) -> KernelParams:
    if params.noise_var < NOISE_FLOOR:
        return replace(params, noise_var=NOISE_FLOOR)
    return params
