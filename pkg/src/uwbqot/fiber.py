"""Frequency-dependent fiber physics.

Attenuation, Marcuse effective area, the ultra-wide-band nonlinearity
coefficient, pair-effective dispersion and the Raman gain coefficient.  All
functions are pure and accept scalars or numpy arrays for the frequency
arguments.
"""

from __future__ import annotations

import numpy as np
from scipy.constants import c as C_M_S

from .types import FiberSpec, RamanModel

# dB/km -> field attenuation 1/km: alpha = dB / (2 * 10*log10(e))
DB_TO_FIELD = 2.0 * 10.0 / np.log(10.0)   # 8.6858896...


def _interp_checked(f, table, what: str):
    xs = np.array([p[0] for p in table], dtype=float)
    ys = np.array([p[1] for p in table], dtype=float)
    f = np.asarray(f, dtype=float)
    if np.any(f < xs[0]) or np.any(f > xs[-1]):
        raise ValueError(
            f"frequency out of range for {what}: requested "
            f"[{float(np.min(f)):.6g}, {float(np.max(f)):.6g}] THz, "
            f"table covers [{xs[0]:.6g}, {xs[-1]:.6g}] THz")
    return np.interp(f, xs, ys)


def attenuation_db_km(fiber: FiberSpec, f_thz):
    """Power attenuation in dB/km, linearly interpolated; no extrapolation."""
    return _interp_checked(f_thz, fiber.loss_curve, "loss curve")


def attenuation(fiber: FiberSpec, f_thz):
    """Field attenuation alpha in 1/km; power decays as exp(-2*alpha*z)."""
    return attenuation_db_km(fiber, f_thz) / DB_TO_FIELD


def effective_area_um2(fiber: FiberSpec, f_thz):
    """Effective mode area in um^2.

    Marcuse form: V = 2 pi a NA f / c, w = a (0.65 + 1.619 V^-1.5 + 2.879 V^-6),
    A_eff = pi w^2.  A tabulated model, when present, takes precedence.
    """
    if fiber.aeff_table:
        return _interp_checked(f_thz, fiber.aeff_table, "effective-area table")
    f = np.asarray(f_thz, dtype=float)
    if np.any(f <= 0):
        raise ValueError("effective area requires f > 0")
    a_m = fiber.core_radius_um * 1e-6
    v = 2.0 * np.pi * a_m * fiber.numerical_aperture * (f * 1e12) / C_M_S
    if np.any(v <= 0):
        raise ValueError("Marcuse V-number must be positive")
    w_um = fiber.core_radius_um * (0.65 + 1.619 * v ** -1.5 + 2.879 * v ** -6)
    return np.pi * w_um ** 2


def gamma(fiber: FiberSpec, f_n_thz, f_m_thz):
    """Pairwise nonlinearity coefficient gamma_{n,m} in 1/(W km)."""
    a_n = effective_area_um2(fiber, f_n_thz) * 1e-12   # m^2
    a_m = effective_area_um2(fiber, f_m_thz) * 1e-12
    f_n = np.asarray(f_n_thz, dtype=float) * 1e12      # Hz
    g_per_m = (2.0 * np.pi * f_n / C_M_S) * 2.0 * fiber.n2_m2_w / (a_n + a_m)
    return g_per_m * 1e3                               # 1/(W km)


def effective_beta2(fiber: FiberSpec, f_n_thz, f_m_thz):
    """Pair-effective dispersion in ps^2/km.

    Collapses beta2/beta3/beta4 measured at f0 into one coefficient for the
    interacting pair (f_n, f_m); symmetric in its two frequency arguments.
    """
    dn = np.asarray(f_n_thz, dtype=float) - fiber.reference_frequency_thz
    dm = np.asarray(f_m_thz, dtype=float) - fiber.reference_frequency_thz
    return (fiber.beta2_ps2_km
            + np.pi * fiber.beta3_ps3_km * (dn + dm)
            + (2.0 * np.pi ** 2 / 3.0) * fiber.beta4_ps4_km
            * (dn * dn + dn * dm + dm * dm))


def raman_gain(model: RamanModel, f_p_thz, delta_nu_thz):
    """Raman gain coefficient C_r(f_p, delta_nu) in 1/(W km).

    delta_nu outside the model support clamps to 0.  The antisymmetric sign
    convention is NOT applied here; sign handling lives in the ODE right-hand
    side.
    """
    f_p = np.asarray(f_p_thz, dtype=float)
    dnu = np.asarray(delta_nu_thz, dtype=float)
    if model.kind == "none":
        return np.zeros(np.broadcast_shapes(f_p.shape, dnu.shape))
    if model.kind == "parametric":
        from .defaults import SILICA_RAMAN_SHAPE
        xs = np.array([p[0] for p in SILICA_RAMAN_SHAPE])
        ys = np.array([p[1] for p in SILICA_RAMAN_SHAPE])
        # stretch the shape so its peak lands at the configured shift
        stretch = model.peak_shift_thz / 13.2
        shape = np.interp(np.abs(dnu) / stretch, xs, ys, left=0.0, right=0.0)
        out = model.peak_value * shape
    elif model.kind == "table":
        out = _bilinear(model, f_p, np.abs(dnu))
    else:
        raise ValueError(f"unknown Raman model kind {model.kind!r}")
    if model.scaling == "linear_pump":
        out = out * (f_p / model.f_ref_thz)
    elif model.scaling != "none":
        raise ValueError(f"unknown Raman scaling rule {model.scaling!r}")
    return out


def _bilinear(model: RamanModel, f_p, dnu):
    px = np.asarray(model.pump_axis_thz, dtype=float)
    dx = np.asarray(model.delta_axis_thz, dtype=float)
    vals = np.asarray(model.values, dtype=float).reshape(len(px), len(dx))
    f_p = np.clip(f_p, px[0], px[-1])      # pump axis clamps at the edges
    inside = (dnu >= dx[0]) & (dnu <= dx[-1])
    d = np.clip(dnu, dx[0], dx[-1])
    ip = np.clip(np.searchsorted(px, f_p) - 1, 0, max(len(px) - 2, 0))
    idn = np.clip(np.searchsorted(dx, d) - 1, 0, max(len(dx) - 2, 0))
    if len(px) > 1:
        tp = (f_p - px[ip]) / (px[ip + 1] - px[ip])
    else:
        tp = np.zeros_like(np.asarray(f_p, dtype=float))
        ip = np.zeros_like(np.asarray(idn))
    td = (d - dx[idn]) / (dx[idn + 1] - dx[idn])
    v00 = vals[ip, idn]
    v01 = vals[ip, idn + 1]
    if len(px) > 1:
        v10 = vals[ip + 1, idn]
        v11 = vals[ip + 1, idn + 1]
    else:
        v10, v11 = v00, v01
    out = ((1 - tp) * (1 - td) * v00 + (1 - tp) * td * v01
           + tp * (1 - td) * v10 + tp * td * v11)
    return np.where(inside, out, 0.0)
