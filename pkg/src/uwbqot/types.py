"""Domain types shared across the engine.

All dataclasses are frozen: a scenario is immutable after construction and
safe for concurrent reads.  Internal unit conventions:

* frequency      THz
* symbol rate    GBaud
* distance       km
* attenuation    1/km, *field* convention (power decays as exp(-2*alpha*z))
* dispersion     ps^k/km (beta2, beta3, beta4)
* Kerr index n2  m^2/W
* power          W internally; dBm only at the I/O boundary
* Raman gain     1/(W km)

With frequency in THz and time in ps (THz*ps == 1) the nonlinear-interference
formulas close dimensionally without conversion factors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional


class ScenarioError(ValueError):
    """Schema or physical-invariant violation in a scenario document."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class FitError(RuntimeError):
    """Degenerate or failed loss-profile fit."""


class ConvergenceError(RuntimeError):
    """A numerical procedure failed to reach its advertised tolerance."""


@dataclass(frozen=True)
class Channel:
    """One WDM carrier."""

    index: int                       # 1-based ordinal within the comb
    center_frequency_thz: float
    symbol_rate_gbaud: float
    launch_power_dbm: Optional[float] = None   # None until assigned
    format_tag: str = "gaussian"     # consumed only by the rho correction hook


@dataclass(frozen=True)
class Band:
    label: str                       # one of U, L, C, S, E, O
    lower_edge_thz: float
    upper_edge_thz: float

    def contains(self, f_thz: float) -> bool:
        return self.lower_edge_thz <= f_thz <= self.upper_edge_thz


@dataclass(frozen=True)
class RamanModel:
    """Raman gain coefficient model.

    kind == "none"        no ISRS coupling (C_r identically zero)
    kind == "parametric"  normalized silica gain shape, scaled to peak_value
                          at delta_nu == peak_shift_thz when the pump sits at
                          f_ref_thz; pump-frequency scaling multiplies by
                          (f_p / f_ref) (the default "linear_pump" rule)
    kind == "table"       measured C_r(f_p, delta_nu) samples, bilinear
                          interpolation, zero outside the tabulated support
    """

    kind: str = "parametric"
    peak_value: float = 0.39         # 1/(W km)
    peak_shift_thz: float = 13.2
    f_ref_thz: float = 193.4
    scaling: str = "linear_pump"     # or "none"
    # table form: sorted pump-frequency axis, sorted delta_nu axis, and a
    # row-major (pump, delta_nu) value grid, all as nested tuples
    pump_axis_thz: tuple = ()
    delta_axis_thz: tuple = ()
    values: tuple = ()


@dataclass(frozen=True)
class FiberSpec:
    """Physical description of one fiber span."""

    length_km: float
    loss_curve: tuple                # ((f_THz, dB/km), ...) sorted by f
    reference_frequency_thz: float   # f0 where beta2..beta4 are measured
    beta2_ps2_km: float
    beta3_ps3_km: float
    beta4_ps4_km: float
    n2_m2_w: float
    # effective-area model: either a table or Marcuse parameters
    aeff_table: tuple = ()           # ((f_THz, um^2), ...) sorted by f
    numerical_aperture: float = 0.0
    core_radius_um: float = 0.0
    raman: RamanModel = field(default_factory=RamanModel)


@dataclass(frozen=True)
class AmplifierSpec:
    """Lumped amplifier after a span.

    Gain policy is fixed: each channel is restored to its configured launch
    power at the next span input.  noise_figure_db maps band label -> NF.
    """

    noise_figure_db: tuple           # ((band_label, NF_dB), ...)

    def nf_for_band(self, label: str) -> float:
        for band, nf in self.noise_figure_db:
            if band == label:
                return nf
        raise ScenarioError("amplifier.noise_figure_db",
                            f"no noise figure configured for band {label!r}")


@dataclass(frozen=True)
class TransceiverCurve:
    """Monotone GOSNR(dB) -> net information rate (bits/symbol) table.

    Linearly interpolated, clamped at both ends; GOSNR below the first knot
    maps to 0 bits/symbol.
    """

    knots: tuple                     # ((gosnr_dB, bits_per_symbol), ...)


@dataclass(frozen=True)
class SolverSettings:
    ode_step_km: float = 0.05
    ode_tolerance: float = 1e-4      # half-step validation threshold (relative)
    validate_ode: bool = True
    fit_samples: int = 1001
    series_cap: int = 30


@dataclass(frozen=True)
class OptimizerSettings:
    p_min_dbm: float = -10.0
    p_max_dbm: float = 6.0
    budget: int = 2000               # link evaluations per sweep step
    improvement_tol: float = 1e-3    # stop when best step improves less
    initial_step_db: float = 1.0
    min_step_db: float = 0.01
    band_by_band: bool = False       # fast mode: coordinate descent per band


@dataclass(frozen=True)
class Scenario:
    spans: tuple                     # ((FiberSpec, AmplifierSpec), ...)
    channels: tuple                  # (Channel, ...) strictly increasing f
    bands: tuple                     # (Band, ...)
    transceiver: TransceiverCurve
    solver: SolverSettings = field(default_factory=SolverSettings)
    optimizer: OptimizerSettings = field(default_factory=OptimizerSettings)

    def band_of(self, f_thz: float) -> Band:
        for band in self.bands:
            if band.contains(f_thz):
                return band
        raise ScenarioError("channels", f"channel at {f_thz} THz lies outside all bands")
