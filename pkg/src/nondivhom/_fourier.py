"""Spectral helpers on the rfft layout of an N^n grid.

Coefficients are normalized so that ``coeffs[0, ..., 0]`` is the mean.  Only
modes with every |k_i| <= N/2 - 1 are ever kept; Nyquist planes are zero.
"""

from functools import lru_cache

import numpy as np
import scipy.fft as sfft


def is_power_of_two(n):
    return n >= 2 and (n & (n - 1)) == 0


def next_power_of_two(n):
    p = 2
    while p < n:
        p *= 2
    return p


@lru_cache(maxsize=64)
def wavenumbers(N, n):
    """Integer wavenumbers per axis, broadcastable to the rfft layout."""
    ks = []
    for axis in range(n):
        if axis == n - 1:
            k = np.arange(N // 2 + 1)
        else:
            k = np.fft.fftfreq(N, 1.0 / N).round().astype(int)
        shape = [1] * n
        shape[axis] = k.size
        ks.append(k.reshape(shape))
    return tuple(ks)


@lru_cache(maxsize=64)
def kept_mask(N, n):
    """Boolean mask of retained modes (|k_i| <= N/2 - 1 on every axis)."""
    mask = np.ones((N,) * (n - 1) + (N // 2 + 1,), dtype=bool)
    for k in wavenumbers(N, n):
        mask &= np.abs(k) <= N // 2 - 1
    return mask


@lru_cache(maxsize=64)
def grid(N, n):
    """Coordinate arrays of the uniform N^n grid, 'ij' indexing."""
    y = np.arange(N) / N
    return tuple(np.meshgrid(*([y] * n), indexing="ij"))


def forward(values):
    """Normalized, truncated rfft coefficients of grid values."""
    N = values.shape[0]
    n = values.ndim
    c = sfft.rfftn(values) / N**n
    c[~kept_mask(N, n)] = 0.0
    return c


def backward(coeffs, N):
    n = coeffs.ndim
    return sfft.irfftn(coeffs * N**n, s=(N,) * n)


def resample(coeffs, N, M):
    """Move coefficients from the N layout to the M layout.

    Modes outside |k_i| <= min(N, M)/2 - 1 are dropped.
    """
    if N == M:
        return coeffs.copy()
    n = coeffs.ndim
    K = min(N, M) // 2 - 1
    out = np.zeros((M,) * (n - 1) + (M // 2 + 1,), dtype=complex)
    src, dst = [], []
    for axis in range(n):
        if axis == n - 1:
            src.append(np.arange(K + 1))
            dst.append(np.arange(K + 1))
        else:
            src.append(np.concatenate([np.arange(K + 1), np.arange(N - K, N)]))
            dst.append(np.concatenate([np.arange(K + 1), np.arange(M - K, M)]))
    out[np.ix_(*dst)] = coeffs[np.ix_(*src)]
    return out


def derivative_multiplier(N, n, axes):
    """Fourier multiplier of the derivative along the given axes."""
    ks = wavenumbers(N, n)
    mult = np.ones((N,) * (n - 1) + (N // 2 + 1,), dtype=complex)
    for axis in axes:
        mult = mult * (2j * np.pi * ks[axis])
    return mult


def inner(c1, c2):
    """Mean of the product of two real fields given by rfft coefficients."""
    w = np.full(c1.shape[-1], 2.0)
    w[0] = 1.0
    # last-axis modes k > 0 stand for both k and -k (Hermitian symmetry);
    # the Nyquist plane is always zero, so it needs no special weight.
    return float(np.sum(w * (c1 * np.conj(c2)).real))
