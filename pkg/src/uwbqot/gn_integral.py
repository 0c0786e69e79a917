"""Brute-force GN-model integration, the independent reference for the
closed form.

Scope is deliberately the flat-loss (no ISRS, single-alpha) regime with
rectangular per-channel spectra.  The NLI power on channel n is assembled
island by island: the self term plus, for each interferer m, the cross term
whose integrand carries the standard single-span link function

    |LK|^2 = |(1 - e^{-2 a L} e^{j 4 pi^2 b2 (f1-f)(f2-f) L})
              / (2 a - j 4 pi^2 b2 (f1-f)(f2-f))|^2

with gamma and the effective dispersion evaluated pairwise.  Triple trapezoid
(receiver frequency, f1, and a normalized coordinate along the exact f2
island interval), refined by grid doubling until the result moves by less
than the requested dB tolerance.
"""

from __future__ import annotations

import numpy as np

from . import fiber as fiber_ops
from .types import ConvergenceError, FiberSpec


def _trapz_weights(n: int) -> np.ndarray:
    w = np.ones(n)
    w[0] = w[-1] = 0.5
    return w


def _island_integral(f_n, r_n, f_m, r_m, alpha, beta2, length_km,
                     n_f, n_f1, n_f2):
    """Integral of |LK|^2 over the (f, f1, f2) island, THz/km units.

    f in the receiver band of n, f1 in the band of n, and f2 restricted to
    the exact interval keeping both f2 and f1 + f2 - f inside the band of m.
    """
    f = np.linspace(f_n - r_n / 2.0, f_n + r_n / 2.0, n_f)
    f1 = np.linspace(f_n - r_n / 2.0, f_n + r_n / 2.0, n_f1)
    t = np.linspace(0.0, 1.0, n_f2)
    wf = _trapz_weights(n_f) * (r_n / (n_f - 1))
    wf1 = _trapz_weights(n_f1) * (r_n / (n_f1 - 1))
    wt = _trapz_weights(n_f2) / (n_f2 - 1)

    fg = f[:, None, None]
    f1g = f1[None, :, None]
    shift = fg - f1g
    lo = f_m - r_m / 2.0 + np.maximum(0.0, shift)
    hi = f_m + r_m / 2.0 + np.minimum(0.0, shift)
    width = np.clip(hi - lo, 0.0, None)
    f2 = lo + t[None, None, :] * width

    kappa = 4.0 * np.pi ** 2 * beta2 * (f1g - fg) * (f2 - fg)   # 1/km
    e2al = np.exp(-2.0 * alpha * length_km)
    num = 1.0 + e2al ** 2 - 2.0 * e2al * np.cos(kappa * length_km)
    den = (2.0 * alpha) ** 2 + kappa ** 2
    integrand = num / den                                        # km^2

    inner = np.einsum("abt,t->ab", integrand, wt) * width[:, :, 0]
    return float(np.einsum("ab,a,b->", inner, wf, wf1))


def nli_integral(n_index: int, channels, fiber: FiberSpec, *,
                 tol_db: float = 0.02, base_grid=(9, 17, 17),
                 max_doublings: int = 6) -> float:
    """GN reference NLI power (W) on the channel with 1-based index n_index.

    Requires a flat-loss configuration (the classic single-alpha GN integral);
    the comb is expected to be small (<= 9 channels).
    """
    chans = list(channels)
    if n_index < 1 or n_index > len(chans):
        raise ValueError("channel index out of range")
    ch_n = chans[n_index - 1]
    f_n = ch_n.center_frequency_thz
    r_n = ch_n.symbol_rate_gbaud * 1e-3
    p = np.array([_launch_w(c) for c in chans])
    if np.all(p == 0.0):
        return 0.0

    prev = None
    n_f, n_f1, n_f2 = base_grid
    for _ in range(max_doublings + 1):
        total = 0.0
        for m, ch_m in enumerate(chans):
            if p[m] == 0.0 or p[n_index - 1] == 0.0:
                continue
            f_m = ch_m.center_frequency_thz
            r_m = ch_m.symbol_rate_gbaud * 1e-3
            gam = float(fiber_ops.gamma(fiber, f_n, f_m))
            b2 = float(fiber_ops.effective_beta2(fiber, f_n, f_m))
            alpha = float(fiber_ops.attenuation(fiber, f_m))
            pre = (16.0 / 27.0) * (2.0 if m != n_index - 1 else 1.0) * gam ** 2 \
                * (p[n_index - 1] / r_n) * (p[m] / r_m) ** 2
            total += pre * _island_integral(f_n, r_n, f_m, r_m, alpha, b2,
                                            fiber.length_km, n_f, n_f1, n_f2)
        if prev is not None and prev > 0.0 and total > 0.0:
            if abs(10.0 * np.log10(total / prev)) < tol_db:
                return total
        prev = total
        n_f = 2 * (n_f - 1) + 1
        n_f1 = 2 * (n_f1 - 1) + 1
        n_f2 = 2 * (n_f2 - 1) + 1
    raise ConvergenceError(
        f"GN integral did not converge to {tol_db} dB within "
        f"{max_doublings} grid doublings")


def _launch_w(channel) -> float:
    if channel.launch_power_dbm is None:
        raise ValueError(f"channel {channel.index} has no launch power assigned")
    return 10.0 ** (channel.launch_power_dbm / 10.0) * 1e-3
