"""Launch-power optimization and the progressive band-fill sweep.

The launch profile is parameterized per band as a cubic polynomial in
(f - band_center) THz giving dBm, evaluated identically at every span input
and clipped to the configured power bounds.  Optimization is a deterministic
derivative-free compass/pattern search over all bands' coefficients jointly
(the pipeline contains a clamped transceiver curve and an inner 1-D fit
search, so gradients are unreliable): candidates are polled in a fixed order,
the first improving candidate is accepted, and all steps are halved when a
full poll fails.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import budget
from .defaults import FILL_ORDER
from .scenario import fill_band_comb, sort_and_index
from .types import Scenario, ScenarioError


@dataclass(frozen=True)
class PowerPolicy:
    """Per-band cubic launch-power coefficients, dBm vs (f - band center) THz."""

    coefficients: tuple      # ((band_label, (c0, c1, c2, c3)), ...)
    p_min_dbm: float = -10.0
    p_max_dbm: float = 6.0

    def coeff_map(self) -> dict:
        return {label: np.array(c, dtype=float) for label, c in self.coefficients}

    def launch_dbm(self, scenario: Scenario) -> np.ndarray:
        """Evaluate the policy on the scenario's comb, clipped to bounds."""
        coeffs = self.coeff_map()
        out = np.empty(len(scenario.channels))
        for i, ch in enumerate(scenario.channels):
            band = scenario.band_of(ch.center_frequency_thz)
            c = coeffs.get(band.label)
            if c is None:
                raise ScenarioError("optimizer", f"policy has no band {band.label!r}")
            df = ch.center_frequency_thz - (band.lower_edge_thz + band.upper_edge_thz) / 2.0
            out[i] = c[0] + c[1] * df + c[2] * df * df + c[3] * df ** 3
        return np.clip(out, self.p_min_dbm, self.p_max_dbm)


@dataclass
class OptimizeResult:
    policy: PowerPolicy
    report: budget.LinkReport
    evaluations: int


def flat_policy(scenario: Scenario, level_dbm: float = 0.0) -> PowerPolicy:
    labels = sorted({scenario.band_of(ch.center_frequency_thz).label
                     for ch in scenario.channels})
    opt = scenario.optimizer
    return PowerPolicy(
        coefficients=tuple((lb, (level_dbm, 0.0, 0.0, 0.0)) for lb in labels),
        p_min_dbm=opt.p_min_dbm, p_max_dbm=opt.p_max_dbm)


def optimize_launch(scenario: Scenario, *, initial: Optional[PowerPolicy] = None,
                    rho=None) -> OptimizeResult:
    """Maximize total throughput over the cubic coefficients of every band.

    Deterministic given the scenario and settings; the returned policy is
    never worse than the initial point.
    """
    opt = scenario.optimizer
    policy = initial if initial is not None else flat_policy(scenario)
    labels = [lb for lb, _ in policy.coefficients]
    x0 = np.concatenate([np.asarray(c, dtype=float)
                         for _, c in policy.coefficients])

    half_widths = {}
    for band in scenario.bands:
        half_widths[band.label] = (band.upper_edge_thz - band.lower_edge_thz) / 2.0
    # step scaling: a higher-order coefficient step moves the band edge by the
    # same dB amount as the c0 step
    scales = np.concatenate([
        [1.0, 1.0 / half_widths[lb], 1.0 / half_widths[lb] ** 2,
         1.0 / half_widths[lb] ** 3] for lb in labels])

    extra = {} if rho is None else {"rho": rho}

    def make_policy(x):
        return PowerPolicy(
            coefficients=tuple((lb, tuple(x[4 * i:4 * i + 4]))
                               for i, lb in enumerate(labels)),
            p_min_dbm=opt.p_min_dbm, p_max_dbm=opt.p_max_dbm)

    def evaluate(x):
        pol = make_policy(x)
        report = budget.evaluate_link(scenario, pol.launch_dbm(scenario), **extra)
        return pol, report

    best_policy, best_report = evaluate(x0)
    best = best_report.throughput_tbps
    evals = 1
    x = x0.copy()
    step_db = opt.initial_step_db

    if opt.band_by_band:
        coord_groups = [list(range(4 * i, 4 * i + 4)) for i in range(len(labels))]
    else:
        coord_groups = [list(range(x0.size))]

    for group in coord_groups:
        while evals < opt.budget and step_db >= opt.min_step_db:
            improved = False
            for idx in group:
                for direction in (+1.0, -1.0):
                    if evals >= opt.budget:
                        break
                    cand = x.copy()
                    cand[idx] += direction * step_db * scales[idx]
                    pol, report = evaluate(cand)
                    evals += 1
                    t = report.throughput_tbps
                    if t > best:
                        gain = (t - best) / best if best > 0 else np.inf
                        x = cand
                        best, best_policy, best_report = t, pol, report
                        improved = True
                        if gain < opt.improvement_tol:
                            return OptimizeResult(best_policy, best_report, evals)
                        break
            if not improved:
                step_db /= 2.0
        step_db = opt.initial_step_db

    return OptimizeResult(best_policy, best_report, evals)


@dataclass(frozen=True)
class SweepStep:
    step: int
    n_channels: int
    band_of_last_channel: str
    throughput_tbps: float
    marginal_ir_bits: float


@dataclass
class SweepResult:
    steps: list = field(default_factory=list)
    reports: list = field(default_factory=list)
    policies: list = field(default_factory=list)


def band_fill_sweep(scenario_template: Scenario, increment: int, *,
                    spacing_ghz: float = 75.0, symbol_rate_gbaud: float = 64.0,
                    order=FILL_ORDER, max_channels: Optional[int] = None,
                    keep_reports: bool = False) -> SweepResult:
    """Progressively fill the bands, re-optimizing launch power at each step.

    Channels are added from the low-frequency end of the C band, then through
    L, S, U, E (ascending within each band), `increment` at a time; each
    step's optimization warm-starts from the previous policy.  Marginal IR is
    the mean information rate of the channels added in that step.
    """
    if increment < 1:
        raise ValueError("increment must be >= 1")
    bands_by_label = {b.label: b for b in scenario_template.bands}
    full = fill_band_comb(bands_by_label, order, spacing_ghz, symbol_rate_gbaud,
                          launch_power_dbm=0.0)
    if max_channels is not None:
        full = full[:max_channels]

    result = SweepResult()
    policy = None
    step_no = 0
    for count in range(increment, len(full) + increment, increment):
        subset = full[:min(count, len(full))]
        step_no += 1
        scen = replace(scenario_template, channels=sort_and_index(subset))
        initial = _extend_policy(policy, scen) if policy is not None else None
        opt = optimize_launch(scen, initial=initial)
        policy = opt.policy
        report = opt.report

        freq_to_ir = dict(zip(report.frequencies_thz, report.ir_bits_per_symbol))
        added = [ch.center_frequency_thz for ch in subset[count - increment:]]
        marginal = float(np.mean([freq_to_ir[f] for f in added])) if added else 0.0

        result.steps.append(SweepStep(
            step=step_no, n_channels=len(subset),
            band_of_last_channel=_band_label(bands_by_label, subset[-1]),
            throughput_tbps=report.throughput_tbps,
            marginal_ir_bits=marginal))
        if keep_reports:
            result.reports.append(report)
            result.policies.append(policy)
        if len(subset) == len(full):
            break
    return result


def _band_label(bands_by_label, channel) -> str:
    for label, band in bands_by_label.items():
        if band.contains(channel.center_frequency_thz):
            return label
    return "?"


def _extend_policy(policy: PowerPolicy, scenario: Scenario) -> PowerPolicy:
    """Warm start: keep known band coefficients, add flat 0 dBm for new bands."""
    known = dict(policy.coefficients)
    labels = sorted({scenario.band_of(ch.center_frequency_thz).label
                     for ch in scenario.channels})
    coeffs = tuple((lb, tuple(known.get(lb, (0.0, 0.0, 0.0, 0.0)))) for lb in labels)
    return PowerPolicy(coefficients=coeffs, p_min_dbm=policy.p_min_dbm,
                       p_max_dbm=policy.p_max_dbm)
