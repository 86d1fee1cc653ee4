"""Spectral helpers on the uniform periodic grid theta_i = 2*pi*i/P.

All routines act along axis 0 of real-valued sample arrays.  The Nyquist
mode is handled with the cosine convention, so interpolation and
differentiation agree at the grid nodes.
"""

from __future__ import annotations

import numpy as np


def nodes(P: int) -> np.ndarray:
    """Grid nodes theta_i = 2*pi*i/P."""
    return 2.0 * np.pi * np.arange(P) / P


def diff(values: np.ndarray, order: int = 1) -> np.ndarray:
    """Spectral derivative of periodic samples (d/dtheta)^order."""
    v = np.asarray(values, dtype=float)
    P = v.shape[0]
    c = np.fft.rfft(v, axis=0)
    k = np.arange(P // 2 + 1, dtype=float)
    mult = (1j * k) ** order
    if order % 2 == 1:
        mult[-1] = 0.0  # cosine convention: odd derivatives of the Nyquist mode vanish at nodes
    shape = (-1,) + (1,) * (v.ndim - 1)
    return np.fft.irfft(c * mult.reshape(shape), n=P, axis=0)


def truncate(values: np.ndarray, kmax: int) -> np.ndarray:
    """Zero all Fourier modes with |k| > kmax."""
    v = np.asarray(values, dtype=float)
    P = v.shape[0]
    c = np.fft.rfft(v, axis=0)
    c[kmax + 1:] = 0.0
    return np.fft.irfft(c, n=P, axis=0)


def coeffs(values: np.ndarray) -> np.ndarray:
    """rfft coefficients, for repeated interpolation via interp_coeffs."""
    return np.fft.rfft(np.asarray(values, dtype=float), axis=0)


def interp_coeffs(c: np.ndarray, P: int, t, order: int = 0) -> np.ndarray:
    """Evaluate the trigonometric interpolant (or its derivative) at points t.

    c are rfft coefficients of P real samples; t may be scalar or 1-d.
    Returns shape (len(t),) for 1-d data or (len(t), m) for (P, m) data.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    K = P // 2 + 1
    k = np.arange(K, dtype=float)
    w = np.full(K, 2.0)
    w[0] = 1.0
    if P % 2 == 0:
        w[-1] = 1.0
    mult = w * (1j * k) ** order if order else w.astype(complex)
    E = np.exp(1j * t[:, None] * k[None, :])
    if c.ndim == 1:
        return (E @ (mult * c)).real / P
    return (E @ (mult[:, None] * c)).real / P


def interp(values: np.ndarray, t, order: int = 0) -> np.ndarray:
    """One-shot trigonometric interpolation of periodic samples at points t."""
    v = np.asarray(values, dtype=float)
    return interp_coeffs(np.fft.rfft(v, axis=0), v.shape[0], t, order)


def antiderivative_coeffs(values: np.ndarray) -> tuple[float, np.ndarray]:
    """Split the antiderivative of periodic samples into mean slope + periodic part.

    Returns (mean, c) where the antiderivative is  mean * theta + q(theta)
    with q periodic, q given by rfft coefficients c (q has zero mean).
    """
    v = np.asarray(values, dtype=float)
    P = v.shape[0]
    c = np.fft.rfft(v, axis=0)
    mean = c[0].real / P
    k = np.arange(P // 2 + 1, dtype=float)
    out = np.zeros_like(c)
    out[1:] = c[1:] / (1j * k[1:])
    if P % 2 == 0:
        out[-1] = 0.0  # Nyquist: sin term integrates to zero-mean part already dropped
    return mean, out
