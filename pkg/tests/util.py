"""Shared helpers: random spaces/params and the spectral quadrature oracle."""

from __future__ import annotations

import numpy as np
from scipy.integrate import quad

from catbox import (
    CategoricalVar,
    ContinuousVar,
    CsmComponent,
    GsmComponent,
    HammingParams,
    KernelParams,
    MixedPoint,
    SearchSpace,
)


def make_space(rng: np.random.Generator, n_cat: int | None = None, n_con: int | None = None) -> SearchSpace:
    if n_cat is None:
        n_cat = int(rng.integers(0, 4))
    if n_con is None:
        n_con = int(rng.integers(0, 4))
    if n_cat + n_con == 0:
        n_con = 1
    cats = tuple(
        CategoricalVar(name=f"c{i}", levels=tuple(f"l{j}" for j in range(int(rng.integers(2, 6)))))
        for i in range(n_cat)
    )
    cons = []
    for i in range(n_con):
        lo = float(rng.uniform(-10, 5))
        cons.append(ContinuousVar(name=f"x{i}", lower=lo, upper=lo + float(rng.uniform(0.5, 20))))
    return SearchSpace(categoricals=cats, continuous=tuple(cons))


def make_params(
    rng: np.random.Generator,
    d: int,
    u: int,
    q_gsm: int = 2,
    q_csm: int = 2,
    lam: float | None = None,
) -> KernelParams:
    gsm = tuple(
        GsmComponent(
            weight=float(rng.uniform(0.05, 1.5)),
            mean=tuple(rng.uniform(0, 3, d)),
            var=tuple(rng.uniform(0.02, 3, d)),
        )
        for _ in range(q_gsm if d else 0)
    )
    csm = tuple(
        CsmComponent(
            weight=float(rng.uniform(0.05, 1.5)),
            eta=tuple(rng.uniform(0, 3, d)),
            gamma=tuple(rng.uniform(0.02, 2, d)),
        )
        for _ in range(q_csm if d else 0)
    )
    return KernelParams(
        gsm=gsm,
        csm=csm,
        hamming=HammingParams(lengthscales=tuple(rng.uniform(0, 3, u))),
        lam=float(rng.uniform(0, 1)) if lam is None else lam,
        noise_var=float(rng.uniform(1e-6, 0.1)),
    )


def sample_points(rng: np.random.Generator, space: SearchSpace, n: int) -> list[MixedPoint]:
    return [space.sample(rng) for _ in range(n)]


# ---------------------------------------------------------------------------
# inverse-Fourier quadrature oracle (1-d), independent of the kernel code path


def _gsm_density(s: float, w, mu, s2) -> float:
    z = 0.0
    for wq, mq, vq in zip(w, mu, s2):
        norm = 1.0 / np.sqrt(2.0 * np.pi * vq)
        z += wq * 0.5 * norm * (np.exp(-((s - mq) ** 2) / (2 * vq)) + np.exp(-((s + mq) ** 2) / (2 * vq)))
    return z


def _csm_density(s: float, w, eta, gam) -> float:
    z = 0.0
    for wq, eq, gq in zip(w, eta, gam):
        z += wq * 0.5 * (gq / ((s - eq) ** 2 + gq**2) + gq / ((s + eq) ** 2 + gq**2)) / np.pi
    return z


def _fourier_quad(density, args, tau: float) -> float:
    if abs(tau) < 1e-14:
        val, _ = quad(density, -np.inf, np.inf, args=args, limit=400)
        return val
    val, _ = quad(density, 0.0, np.inf, args=args, weight="cos", wvar=2.0 * np.pi * tau, limit=400)
    return 2.0 * val


def gsm_quadrature(params: KernelParams, tau: float) -> float:
    w = [c.weight for c in params.gsm]
    mu = [c.mean[0] for c in params.gsm]
    s2 = [c.var[0] for c in params.gsm]
    return _fourier_quad(_gsm_density, (w, mu, s2), tau)


def csm_quadrature(params: KernelParams, tau: float) -> float:
    w = [c.weight for c in params.csm]
    eta = [c.eta[0] for c in params.csm]
    gam = [c.gamma[0] for c in params.csm]
    return _fourier_quad(_csm_density, (w, eta, gam), tau)
