"""Link budgeting: ASE accumulation, generalized OSNR, information rate and
the end-to-end link evaluation pipeline.

`evaluate_link` runs, span by span: ISRS power propagation, loss-profile
fitting, closed-form NLI, and per-channel amplifier ASE, then maps GOSNR
through the transceiver curve.  The lumped amplifiers restore every channel
to its configured launch power at the next span input, so spans sharing an
identical fiber description reuse one ODE solve, one fit and one NLI
contribution matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import h as PLANCK_J_S

from . import fiber as fiber_ops
from . import lossfit, nli, raman
from .types import Scenario, ScenarioError, TransceiverCurve
from .units import w_to_dbm, dbm_to_w


def ase_power_w(frequency_thz: float, noise_figure_db: float, gain_lin: float,
                bandwidth_gbaud: float) -> float:
    """One amplifier's ASE contribution in the channel bandwidth.

    P_ASE = h f 10^(NF/10) (G - 1) B, with B the symbol rate (matched-filter
    noise bandwidth) and both polarizations folded into the NF convention.
    """
    if gain_lin < 1.0:
        raise ValueError(
            f"amplifier gain {gain_lin:.4g} < 1: span output exceeds the "
            "configured launch power (attenuating amplifier)")
    return (PLANCK_J_S * frequency_thz * 1e12 * 10.0 ** (noise_figure_db / 10.0)
            * (gain_lin - 1.0) * bandwidth_gbaud * 1e9)


def gosnr_db(launch_w, p_ase_w, p_nli_w):
    """Generalized OSNR 10 log10(P / (P_ASE + P_NLI)), dB."""
    noise = np.asarray(p_ase_w, dtype=float) + np.asarray(p_nli_w, dtype=float)
    if np.any(noise <= 0):
        raise ValueError("total noise power must be positive")
    return 10.0 * np.log10(np.asarray(launch_w, dtype=float) / noise)


def info_rate(curve: TransceiverCurve, gosnr: float):
    """Net information rate, bits/symbol: clamped linear interpolation with
    zero below the first knot."""
    xs = np.array([k[0] for k in curve.knots])
    ys = np.array([k[1] for k in curve.knots])
    g = np.asarray(gosnr, dtype=float)
    out = np.interp(g, xs, ys, left=0.0, right=ys[-1])
    return np.where(g < xs[0], 0.0, out)


@dataclass(frozen=True)
class LinkReport:
    frequencies_thz: np.ndarray
    launch_dbm: np.ndarray
    p_ase_w: np.ndarray
    p_nli_w: np.ndarray
    gosnr_db: np.ndarray
    ir_bits_per_symbol: np.ndarray
    rate_gbps: np.ndarray             # IR * symbol rate
    throughput_tbps: float
    series_order: int
    clamped_pairs: int

    def recomputed_throughput_tbps(self) -> float:
        return float(np.sum(self.rate_gbps)) / 1e3


def launch_powers_w(scenario: Scenario, launch_dbm=None) -> np.ndarray:
    """Per-channel launch powers in W, from the override or channel config."""
    if launch_dbm is not None:
        arr = np.asarray(launch_dbm, dtype=float)
        if arr.size != len(scenario.channels):
            raise ValueError("launch power vector length does not match the comb")
        return dbm_to_w(arr)
    dbm = []
    for ch in scenario.channels:
        if ch.launch_power_dbm is None:
            raise ScenarioError("channels", f"channel {ch.index} has no launch power")
        dbm.append(ch.launch_power_dbm)
    return dbm_to_w(np.array(dbm))


def evaluate_link(scenario: Scenario, launch_dbm=None, *,
                  rho: nli.RhoCorrection = nli.rho_identity,
                  keep_profiles: bool = False):
    """Full pipeline over all spans.  Returns a LinkReport (and, when
    `keep_profiles` is set, a list of per-span (profile, fit) pairs)."""
    chans = scenario.channels
    freqs = np.array([ch.center_frequency_thz for ch in chans])
    rates = np.array([ch.symbol_rate_gbaud for ch in chans])
    p0 = launch_powers_w(scenario, launch_dbm)
    solver = scenario.solver

    span_cache: dict = {}
    details = []
    p_ase = np.zeros(freqs.size)
    p_nli = np.zeros(freqs.size)
    acc_disp = np.zeros(freqs.size)     # ps^2, own-channel beta2_eff * L so far
    m_used = 0
    clamped = 0
    identity_rho = rho is nli.rho_identity

    for span_index, (fiber, amp) in enumerate(scenario.spans):
        cached = span_cache.get(fiber)
        if cached is None:
            profile = raman.propagate_span(
                p0, fiber, chans, step_km=solver.ode_step_km,
                validate=solver.validate_ode, tolerance=solver.ode_tolerance,
                n_samples=solver.fit_samples)
            fits = lossfit.fit_span(profile, fit_samples=solver.fit_samples)
            c_matrix, m_order, n_clamped = nli.nli_contribution_matrix(
                chans, p0, fits, fiber, series_cap=solver.series_cap)
            p_nli_identity = np.array([math.fsum(row) for row in c_matrix])
            cached = (profile, fits, c_matrix, m_order, n_clamped, p_nli_identity)
            span_cache[fiber] = cached
        profile, fits, c_matrix, m_order, n_clamped, p_nli_identity = cached
        m_used = max(m_used, m_order)
        clamped += n_clamped

        if identity_rho:
            p_nli = p_nli + p_nli_identity
        else:
            res = nli.nli_power_span(chans, p0, fits, fiber, rho=rho,
                                     accumulated_dispersion_ps2=acc_disp,
                                     series_cap=solver.series_cap)
            p_nli = p_nli + res.p_nli_w

        with np.errstate(invalid="ignore", divide="ignore"):
            gains = np.where(p0 > 0, p0 / profile.output_w, 1.0)
        own_b2 = fiber_ops.effective_beta2(fiber, freqs, freqs)
        acc_disp = acc_disp + own_b2 * fiber.length_km
        for i, ch in enumerate(chans):
            if p0[i] == 0.0:
                continue
            band = scenario.band_of(ch.center_frequency_thz)
            nf = amp.nf_for_band(band.label)
            p_ase[i] += ase_power_w(ch.center_frequency_thz, nf,
                                    float(gains[i]), ch.symbol_rate_gbaud)
        if keep_profiles:
            details.append((profile, fits))

    gosnr = gosnr_db(p0, p_ase, p_nli)
    ir = np.asarray(info_rate(scenario.transceiver, gosnr), dtype=float)
    rate = ir * rates
    report = LinkReport(
        frequencies_thz=freqs, launch_dbm=np.asarray(w_to_dbm(p0)),
        p_ase_w=p_ase, p_nli_w=p_nli, gosnr_db=np.asarray(gosnr),
        ir_bits_per_symbol=ir, rate_gbps=rate,
        throughput_tbps=float(np.sum(rate)) / 1e3,
        series_order=m_used, clamped_pairs=clamped)
    if keep_profiles:
        return report, details
    return report
