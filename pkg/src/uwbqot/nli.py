"""Closed-form per-span nonlinear-interference power.

Evaluates, per receiving channel n, the double-series closed form

  P_NLI(n) = 16/27 * P_n * sum_{m, j, k, q}
      gamma_{n,m}^2 P_m^2 rho_m (2 - delta_{m,n}) e^{-4 a1_m/s_m} (-1)^j
      / (2 pi R_m^2 k! q! b2_{n,m} (4 a0_m + (k+q) s_m))
      * (2 a1_m / s_m)^(k+q) * psi_{m,n,j,k}

with psi_{m,n,j,k} = asinh(pi^2 b2_{n,m} R_n (f_m - f_n + (-1)^j R_m/2)
                           / (2 a0_m + k s_m)).

Units: frequencies/symbol rates in THz, alphas/sigmas in 1/km, dispersion in
ps^2/km, gamma in 1/(W km), powers in W; with THz*ps == 1 the expression is
dimensionless without conversion factors.

The factorial/power weights are evaluated in the log domain (k+q can reach
60); the m-accumulation uses exactly-rounded compensated summation
(math.fsum) so repeated runs are bit-identical.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.special import gammaln

from . import fiber as fiber_ops
from .types import FiberSpec

BETA2_CLAMP_PS2_KM = 1e-4     # zero-dispersion guard on the pair-effective beta2
SERIES_CAP_DEFAULT = 30

# rho hook: (channel, accumulated_dispersion_ps2, format_tag) -> positive scalar
RhoCorrection = Callable[[object, float, str], float]


def rho_identity(channel, accumulated_dispersion_ps2: float, format_tag: str) -> float:
    """Default correction term: pure GN closed form (no EGN-style correction)."""
    return 1.0


@dataclass(frozen=True)
class NliSpanResult:
    p_nli_w: np.ndarray               # (Nc,)
    series_order: int                 # M actually used
    clamped_pairs: int                # pairs whose beta2_eff hit the guard
    contributions_w: Optional[np.ndarray] = None   # (Nc, Nc) optional diagnostic


def series_order(fits, cap: int = SERIES_CAP_DEFAULT) -> int:
    """Series order M = max_n floor(10 |2 a1_n / s_n|) + 1, capped."""
    sigma = np.asarray(fits.sigma, dtype=float)
    alpha1 = np.asarray(fits.alpha1, dtype=float)
    if np.any(sigma <= 0):
        raise ValueError("all sigma values must be positive")
    m = int(np.max(np.floor(10.0 * np.abs(2.0 * alpha1 / sigma)))) + 1
    if m > cap:
        warnings.warn(f"series order {m} exceeds cap {cap}; truncating",
                      RuntimeWarning, stacklevel=2)
        return cap
    return m


def psi(beta2_eff_ps2_km: float, r_n_gbaud: float, delta_f_thz: float, j: int,
        r_m_gbaud: float, alpha0_m: float, k: int, sigma_m: float) -> float:
    """Scalar psi term (mostly for tests; the span evaluator is vectorized)."""
    denom = 2.0 * alpha0_m + k * sigma_m
    if denom == 0.0:
        raise ZeroDivisionError("2*alpha0 + k*sigma must be nonzero")
    r_n = r_n_gbaud * 1e-3
    r_m = r_m_gbaud * 1e-3
    arg = (np.pi ** 2 * beta2_eff_ps2_km * r_n
           * (delta_f_thz + (-1) ** j * r_m / 2.0)) / denom
    return float(np.arcsinh(arg))


def _clamped_beta2(fiber: FiberSpec, f_n, f_m):
    b2 = fiber_ops.effective_beta2(fiber, f_n, f_m)
    small = np.abs(b2) < BETA2_CLAMP_PS2_KM
    sign = np.where(b2 > 0, 1.0, np.where(b2 < 0, -1.0, 1.0))
    return np.where(small, sign * BETA2_CLAMP_PS2_KM, b2), int(np.count_nonzero(small))


def nli_contribution_matrix(channels, launch_powers_w, fits, fiber: FiberSpec, *,
                            series_cap: int = SERIES_CAP_DEFAULT):
    """Per-pair NLI contributions before the rho correction.

    Returns (C, M, clamped) where C[n, m] is the m-th channel's contribution
    to P_NLI(n) in W assuming rho_m == 1; the full result is
    P_NLI(n) = sum_m rho_m * C[n, m].  Factoring rho out lets a link reuse one
    matrix across spans that share fiber and launch state.
    """
    freqs = np.array([ch.center_frequency_thz for ch in channels])
    rates = np.array([ch.symbol_rate_gbaud for ch in channels]) * 1e-3   # THz
    p = np.asarray(launch_powers_w, dtype=float)
    nc = freqs.size

    a0 = np.asarray(fits.alpha0, dtype=float)
    a1 = np.asarray(fits.alpha1, dtype=float)
    sg = np.asarray(fits.sigma, dtype=float)
    m_order = series_order(fits, cap=series_cap)
    kq = np.arange(m_order + 1)

    # per-m series weights over (k, q), log-domain
    x = 2.0 * a1 / sg                                     # (Nc,)
    with np.errstate(divide="ignore"):
        logx = np.where(x == 0.0, -np.inf, np.log(np.abs(x)))
    lgf = gammaln(kq + 1.0)
    # log |x|^(k+q) / (k! q!) with the e^{-4 a1/sigma} factor folded in
    with np.errstate(invalid="ignore"):
        log_w = (logx[:, None, None] * (kq[:, None] + kq[None, :])
                 - lgf[:, None] - lgf[None, :]
                 - (4.0 * a1 / sg)[:, None, None])
    log_w = np.where((kq[:, None] + kq[None, :])[None, :, :] == 0,
                     (-(4.0 * a1 / sg))[:, None, None], log_w)
    sign_w = np.where(x[:, None, None] < 0,
                      np.where((kq[:, None] + kq[None, :])[None, :, :] % 2 == 1, -1.0, 1.0),
                      1.0)
    denom_kq = (4.0 * a0[:, None, None]
                + (kq[:, None] + kq[None, :])[None, :, :] * sg[:, None, None])
    g_kq = sign_w * np.exp(log_w) / denom_kq              # (Nc, M+1, M+1)
    w_k = g_kq.sum(axis=2)                                # (Nc, M+1), q summed

    b2, clamped = _clamped_beta2(fiber, freqs[:, None], freqs[None, :])   # (Nc, Nc)
    gam = fiber_ops.gamma(fiber, freqs[:, None], freqs[None, :])          # (Nc, Nc)
    delta_f = freqs[None, :] - freqs[:, None]             # f_m - f_n
    two_minus_delta = 2.0 - np.eye(nc)

    psi_denom = 2.0 * a0[None, :, None] + kq[None, None, :] * sg[None, :, None]   # (1, Nc, M+1)
    core = np.pi ** 2 * b2 * rates[:, None]               # (Nc, Nc)
    contrib = np.empty((nc, nc))
    for j in (0, 1):
        off = delta_f + ((-1) ** j) * rates[None, :] / 2.0
        arg = core[:, :, None] * off[:, :, None] / psi_denom
        psi_j = np.arcsinh(arg)                           # (Nc, Nc, M+1)
        s_j = np.einsum("nmk,mk->nm", psi_j, w_k)
        if j == 0:
            contrib = s_j
        else:
            contrib = contrib - s_j
    pref = (gam ** 2 * (p[None, :] ** 2) * two_minus_delta
            / (2.0 * np.pi * rates[None, :] ** 2 * b2))
    c = (16.0 / 27.0) * p[:, None] * pref * contrib
    return c, m_order, clamped


def nli_power_span(channels, launch_powers_w, fits, fiber: FiberSpec, *,
                   rho: RhoCorrection = rho_identity,
                   accumulated_dispersion_ps2=None,
                   series_cap: int = SERIES_CAP_DEFAULT,
                   with_breakdown: bool = False) -> NliSpanResult:
    """NLI power generated in one span, per channel, in W."""
    c, m_order, clamped = nli_contribution_matrix(
        channels, launch_powers_w, fits, fiber, series_cap=series_cap)
    if rho is rho_identity:
        rho_vec = np.ones(len(channels))
    else:
        if accumulated_dispersion_ps2 is None:
            accumulated_dispersion_ps2 = np.zeros(len(channels))
        rho_vec = np.array([
            float(rho(ch, float(accumulated_dispersion_ps2[i]), ch.format_tag))
            for i, ch in enumerate(channels)])
        if np.any(rho_vec <= 0):
            raise ValueError("rho correction must be positive")
    weighted = c * rho_vec[None, :]
    p_nli = np.array([math.fsum(row) for row in weighted])
    return NliSpanResult(p_nli_w=p_nli, series_order=m_order,
                         clamped_pairs=clamped,
                         contributions_w=weighted if with_breakdown else None)


def accumulate_link(results) -> np.ndarray:
    """Incoherent per-channel sum of per-span NLI powers."""
    results = list(results)
    if not results:
        raise ValueError("no span results to accumulate")
    size = results[0].p_nli_w.size
    if any(r.p_nli_w.size != size for r in results):
        raise ValueError("span results computed on mismatched combs")
    total = np.zeros(size)
    for r in results:
        total = total + r.p_nli_w
    return total
