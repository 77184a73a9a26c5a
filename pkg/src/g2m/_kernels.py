"""Fused numba kernels for the float32 probe training path.

These mirror the numpy reference math in probe.py exactly (same formulas,
same float32 rounding points); probe tests assert the two paths agree.
Each kernel writes every output element independently, so parallel
execution stays deterministic.
"""

import math

import numpy as np
from numba import njit, prange

_SQRT1_2 = 0.7071067811865476
_INV_SQRT_2PI = 0.3989422804014327


@njit(parallel=True, cache=True)
def norm_gelu_forward(y1, mu, istd, gamma, beta, xhat, phi, act):
    """xhat = (y1 - mu) * istd; z = gamma*xhat + beta; act = z * Phi(z)."""
    n, h = y1.shape
    for i in prange(n):
        for j in range(h):
            xh = (y1[i, j] - mu[j]) * istd[j]
            z = gamma[j] * xh + beta[j]
            p = np.float32(0.5) * (np.float32(1.0) + np.float32(math.erf(z * _SQRT1_2)))
            xhat[i, j] = xh
            phi[i, j] = p
            act[i, j] = z * p


@njit(parallel=True, cache=True)
def gelu_backward(dact, xhat, phi, gamma, beta, dz):
    """dz = dact * (Phi(z) + z * pdf(z)), with z rebuilt from xhat."""
    n, h = dact.shape
    for i in prange(n):
        for j in range(h):
            z = gamma[j] * xhat[i, j] + beta[j]
            pdf = np.float32(math.exp(-0.5 * z * z) * _INV_SQRT_2PI)
            dz[i, j] = dact[i, j] * (phi[i, j] + z * pdf)


@njit(parallel=True, cache=True)
def bn_input_backward(dz, xhat, gamma, istd, mean_dxhat, mean_dxhat_xhat, dy1):
    """dy1 = istd * (dz*gamma - mean(dxhat) - xhat * mean(dxhat*xhat))."""
    n, h = dz.shape
    for i in prange(n):
        for j in range(h):
            dxh = dz[i, j] * gamma[j]
            dy1[i, j] = istd[j] * (dxh - mean_dxhat[j] - xhat[i, j] * mean_dxhat_xhat[j])


@njit(parallel=True, cache=True)
def norm_gelu_eval(y1, mu, istd, gamma, beta, act):
    """Eval-path fusion: normalize with running stats and apply GELU."""
    n, h = y1.shape
    for i in prange(n):
        for j in range(h):
            z = gamma[j] * (y1[i, j] - mu[j]) * istd[j] + beta[j]
            p = np.float32(0.5) * (np.float32(1.0) + np.float32(math.erf(z * _SQRT1_2)))
            act[i, j] = z * p
