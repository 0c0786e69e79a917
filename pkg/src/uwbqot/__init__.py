"""Quality-of-transmission engine for ultra-wide-band WDM fiber links.

Closed-form nonlinear-interference estimation with ISRS-aware loss fitting,
a brute-force GN integral reference, link budgeting and per-band launch-power
optimization.
"""

from .types import (AmplifierSpec, Band, Channel, ConvergenceError, FiberSpec,
                    FitError, OptimizerSettings, RamanModel, Scenario,
                    ScenarioError, SolverSettings, TransceiverCurve)
from .scenario import (build_comb, fill_band_comb, parse_scenario,
                       serialize_scenario, validate_scenario)
from .raman import PowerProfile, propagate_span
from .lossfit import ChannelFit, SpanFit, fit_alpha_given_sigma, fit_span, optimize_sigma
from .nli import (NliSpanResult, accumulate_link, nli_power_span, psi,
                  rho_identity, series_order)
from .gn_integral import nli_integral
from .budget import LinkReport, ase_power_w, evaluate_link, gosnr_db, info_rate
from .optimizer import (OptimizeResult, PowerPolicy, SweepStep, band_fill_sweep,
                        flat_policy, optimize_launch)

__version__ = "0.1.0"

__all__ = [
    "AmplifierSpec", "Band", "Channel", "ChannelFit", "ConvergenceError",
    "FiberSpec", "FitError", "LinkReport", "NliSpanResult", "OptimizeResult",
    "OptimizerSettings", "PowerPolicy", "PowerProfile", "RamanModel",
    "Scenario", "ScenarioError", "SolverSettings", "SpanFit", "SweepStep",
    "TransceiverCurve", "accumulate_link", "ase_power_w", "band_fill_sweep",
    "build_comb", "evaluate_link", "fill_band_comb", "fit_alpha_given_sigma",
    "fit_span", "flat_policy", "gosnr_db", "info_rate", "nli_integral",
    "nli_power_span", "optimize_launch", "optimize_sigma", "parse_scenario",
    "propagate_span", "psi", "rho_identity", "serialize_scenario",
    "series_order", "validate_scenario",
]
