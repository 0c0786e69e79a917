"""Three-parameter loss-profile fitting.

Each channel's numerically computed power evolution P(z) is reduced to the
triple (alpha0, alpha1, sigma) of the exponential-decay loss model

    ln P(z) = ln P(0) - 2 alpha0 z - (2 alpha1 / sigma) (1 - exp(-sigma z))

alpha0/alpha1 come from a closed-form 2x2 linear least-squares solve for a
given sigma; sigma itself is found by golden-section search on the ln-domain
sum of squares.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .types import FitError

DB_PER_NEPER_POWER = 10.0 / np.log(10.0)    # ln-power -> dB

SIGMA_LO = 1e-4    # 1/km, search lower bound
SIGMA_HI = 2.0     # 1/km, search upper bound
ALPHA1_NEGLIGIBLE = 1e-6    # below this, sigma is unidentifiable

_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ChannelFit:
    alpha0: float            # 1/km, field
    alpha1: float            # 1/km, field
    sigma: float             # 1/km
    residual_db: float       # max |dB deviation| over z
    unidentifiable: bool = False


@dataclass(frozen=True)
class SpanFit:
    """Per-channel fitted loss triples for one span."""

    channels: tuple          # (ChannelFit, ...)

    @property
    def alpha0(self) -> np.ndarray:
        return np.array([c.alpha0 for c in self.channels])

    @property
    def alpha1(self) -> np.ndarray:
        return np.array([c.alpha1 for c in self.channels])

    @property
    def sigma(self) -> np.ndarray:
        return np.array([c.sigma for c in self.channels])

    @property
    def residual_db(self) -> np.ndarray:
        return np.array([c.residual_db for c in self.channels])


def _model_ln(z, alpha0, alpha1, sigma):
    return -2.0 * alpha0 * z - (2.0 * alpha1 / sigma) * (1.0 - np.exp(-sigma * z))


def fit_alpha_given_sigma(z_km, powers_w, sigma):
    """Closed-form least-squares (alpha0, alpha1) for a fixed sigma.

    Solves the 2x2 normal equations of the ln-domain linear model; the
    profile's own first sample anchors ln P(0), which makes the fit invariant
    under uniform scaling of the profile.
    """
    z = np.asarray(z_km, dtype=float)
    p = np.asarray(powers_w, dtype=float)
    if z.size < 3:
        raise FitError("at least 3 profile samples are required")
    if np.any(p <= 0):
        raise FitError("profile powers must all be positive")
    if sigma <= 0:
        raise FitError("sigma must be positive")
    y = np.log(p) - np.log(p[0])
    b1 = -2.0 * z
    b2 = -(2.0 / sigma) * (1.0 - np.exp(-sigma * z))
    g11 = b1 @ b1
    g12 = b1 @ b2
    g22 = b2 @ b2
    det = g11 * g22 - g12 * g12
    scale = g11 * g22
    if scale == 0.0 or det <= scale * 1e-28:
        raise FitError("degenerate normal matrix: profile cannot resolve alpha0/alpha1")
    r1 = b1 @ y
    r2 = b2 @ y
    alpha0 = (g22 * r1 - g12 * r2) / det
    alpha1 = (g11 * r2 - g12 * r1) / det
    return alpha0, alpha1


def _sse(z, y, sigma):
    alpha0, alpha1 = _fit_raw(z, y, sigma)
    resid = y - _model_ln(z, alpha0, alpha1, sigma)
    return float(resid @ resid), alpha0, alpha1


def _fit_raw(z, y, sigma):
    b1 = -2.0 * z
    b2 = -(2.0 / sigma) * (1.0 - np.exp(-sigma * z))
    g11 = b1 @ b1
    g12 = b1 @ b2
    g22 = b2 @ b2
    det = g11 * g22 - g12 * g12
    if det == 0.0:
        raise FitError("degenerate normal matrix during sigma search")
    r1 = b1 @ y
    r2 = b2 @ y
    return ((g22 * r1 - g12 * r2) / det, (g11 * r2 - g12 * r1) / det)


def optimize_sigma(z_km, powers_w, *, lo: float = SIGMA_LO, hi: float = SIGMA_HI,
                   tol: float = 1e-6, max_samples: int = 0) -> ChannelFit:
    """Best-fit (alpha0, alpha1, sigma) for one channel profile.

    Golden-section search on sigma to absolute tolerance `tol`; residual is
    the max |dB| deviation of the fitted profile from the input.  When the
    fitted |alpha1| is negligible, sigma is unidentifiable: it is reported at
    the lower search bound with alpha1 forced to zero and the fit flagged.
    """
    z = np.asarray(z_km, dtype=float)
    p = np.asarray(powers_w, dtype=float)
    if z.size < 3:
        raise FitError("at least 3 profile samples are required")
    if np.any(p <= 0):
        raise FitError("profile powers must all be positive")
    if max_samples and z.size > max_samples:
        idx = np.linspace(0, z.size - 1, max_samples).round().astype(int)
        z = z[idx]
        p = p[idx]
    y = np.log(p) - np.log(p[0])

    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, _, _ = _sse(z, y, c)
    fd, _, _ = _sse(z, y, d)
    while (b - a) > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc, _, _ = _sse(z, y, c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd, _, _ = _sse(z, y, d)
    sigma = 0.5 * (a + b)
    alpha0, alpha1 = fit_alpha_given_sigma(z, p, sigma)

    if abs(alpha1) < ALPHA1_NEGLIGIBLE:
        sigma = lo
        # pure single-exponential decay: 1-parameter slope fit
        alpha0 = -(y @ z) / (2.0 * (z @ z))
        alpha1 = 0.0
        resid = y - (-2.0 * alpha0 * z)
        return ChannelFit(alpha0=float(alpha0), alpha1=0.0, sigma=float(sigma),
                          residual_db=float(np.max(np.abs(resid)) * DB_PER_NEPER_POWER),
                          unidentifiable=True)

    resid = y - _model_ln(z, alpha0, alpha1, sigma)
    return ChannelFit(alpha0=float(alpha0), alpha1=float(alpha1), sigma=float(sigma),
                      residual_db=float(np.max(np.abs(resid)) * DB_PER_NEPER_POWER))


def fit_span(profile, *, fit_samples: int = 1001) -> SpanFit:
    """Fit every channel of a span profile; channels with zero power get a
    flat placeholder fit (they generate no NLI)."""
    fits = []
    for j in range(profile.powers_w.shape[1]):
        p = profile.powers_w[:, j]
        if np.all(p == 0.0):
            fits.append(ChannelFit(alpha0=0.0, alpha1=0.0, sigma=SIGMA_LO,
                                   residual_db=0.0, unidentifiable=True))
            continue
        fits.append(optimize_sigma(profile.z_km, p, max_samples=fit_samples))
    return SpanFit(channels=tuple(fits))
