"""Shapes of the mixed-space covariance functions.

The continuous kernel blends two spectral families: Gaussian components give
a smooth squared-exponential-style envelope, Cauchy components give an
exponential envelope with a kink at zero lag, so their sum can track both
gradual trends and sharp transitions. The plot writes kernels_demo.png.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from catbox import CsmComponent, GsmComponent, HammingParams, KernelParams, k_csm, k_gc, k_gsm, k_hamming

params = KernelParams(
    gsm=(GsmComponent(weight=0.5, mean=(0.0,), var=(0.15,)),),
    csm=(CsmComponent(weight=0.5, eta=(0.0,), gamma=(0.25,)),),
)

taus = np.linspace(-2.5, 2.5, 601)
fig, axes = plt.subplots(1, 3, figsize=(13, 3.6))

axes[0].plot(taus, [k_gsm(params, [t]) for t in taus], label="Gaussian part")
axes[0].plot(taus, [k_csm(params, [t]) for t in taus], label="Cauchy part")
axes[0].plot(taus, [k_gc(params, [t]) for t in taus], "k--", label="sum")
axes[0].set_title("stationary continuous kernel k(tau)")
axes[0].set_xlabel("tau")
axes[0].legend()

# an oscillatory component: nonzero central frequency
osc = KernelParams(
    gsm=(GsmComponent(weight=1.0, mean=(1.5,), var=(0.05,)),),
    csm=(CsmComponent(weight=0.0, eta=(0.0,), gamma=(1.0,)),),
)
axes[1].plot(taus, [k_gsm(osc, [t]) for t in taus])
axes[1].set_title("component at frequency 1.5 cycles/unit")
axes[1].set_xlabel("tau")

# Hamming kernel over 3 categorical variables as a function of match count
ham = KernelParams(hamming=HammingParams(lengthscales=(0.4, 1.2, 2.5)))
a = (0, 0, 0)
others = [(1, 1, 1), (0, 1, 1), (0, 0, 1), (0, 0, 0)]
values = [k_hamming(ham, a, b) for b in others]
axes[2].bar(range(4), values, tick_label=["0 match", "1 match", "2 match", "3 match"])
axes[2].set_title("weighted exponentiated Hamming kernel")

fig.tight_layout()
fig.savefig("kernels_demo.png", dpi=120)
print("wrote kernels_demo.png")
print("k_gc(0) =", k_gc(params, [0.0]), "(total spectral weight)")
