"""Scenario document parsing, validation and serialization.

A scenario is a single hierarchical YAML file describing spans, the WDM comb,
band definitions, the transceiver curve and solver/optimizer settings.  The
parser applies every documented default explicitly, so the returned Scenario
records the complete configuration (no hidden defaults), and the serializer
emits a canonical key order so files are diff-stable.

The full schema is documented in docs/scenario_format.md.
"""

from __future__ import annotations

from typing import Optional

import yaml

from . import defaults
from .types import (AmplifierSpec, Band, Channel, FiberSpec, OptimizerSettings,
                    RamanModel, Scenario, ScenarioError, SolverSettings,
                    TransceiverCurve)


# ---------------------------------------------------------------------------
# comb construction

def build_comb(start_frequency_thz: float, count: int, spacing_ghz: float,
               symbol_rate_gbaud: float,
               launch_power_dbm: Optional[float] = None) -> tuple:
    """Evenly spaced comb: f_k = start + k * spacing, k = 0..count-1."""
    if count < 1:
        raise ScenarioError("comb.count", "count must be >= 1")
    if spacing_ghz <= 0:
        raise ScenarioError("comb.spacing_ghz", "spacing must be > 0")
    return tuple(
        Channel(index=k + 1,
                center_frequency_thz=start_frequency_thz + k * spacing_ghz * 1e-3,
                symbol_rate_gbaud=symbol_rate_gbaud,
                launch_power_dbm=launch_power_dbm)
        for k in range(count))


def fill_band_comb(bands: dict, order, spacing_ghz: float,
                   symbol_rate_gbaud: float, count: Optional[int] = None,
                   launch_power_dbm: Optional[float] = None) -> list:
    """Channels filling the given bands in fill order, ascending within each.

    ``bands`` maps label -> Band.  The first channel of each band is centered
    half a grid slot above the lower edge.  Returns channels in *fill order*
    (not frequency order); indices are not assigned here.
    """
    spacing_thz = spacing_ghz * 1e-3
    out = []
    for label in order:
        band = bands[label]
        f = band.lower_edge_thz + spacing_thz / 2.0
        while f <= band.upper_edge_thz - spacing_thz / 2.0 + 1e-12:
            out.append(Channel(index=0, center_frequency_thz=round(f, 9),
                               symbol_rate_gbaud=symbol_rate_gbaud,
                               launch_power_dbm=launch_power_dbm))
            f += spacing_thz
            if count is not None and len(out) >= count:
                return out
    return out


def sort_and_index(channels) -> tuple:
    """Frequency-sort a channel collection and assign 1-based ordinals."""
    ordered = sorted(channels, key=lambda ch: ch.center_frequency_thz)
    return tuple(
        Channel(index=i + 1,
                center_frequency_thz=ch.center_frequency_thz,
                symbol_rate_gbaud=ch.symbol_rate_gbaud,
                launch_power_dbm=ch.launch_power_dbm,
                format_tag=ch.format_tag)
        for i, ch in enumerate(ordered))


# ---------------------------------------------------------------------------
# parsing helpers

_MISSING = object()


def _expect_mapping(node, path):
    if not isinstance(node, dict):
        raise ScenarioError(path, f"expected a mapping, got {type(node).__name__}")
    return node


def _take(node: dict, key: str, path: str, default=_MISSING):
    if key in node:
        return node.pop(key)
    if default is _MISSING:
        raise ScenarioError(f"{path}.{key}", "required key missing")
    return default


def _reject_unknown(node: dict, path: str):
    if node:
        key = sorted(node)[0]
        raise ScenarioError(f"{path}.{key}", "unknown key")


def _num(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(path, f"expected a number, got {value!r}")
    return float(value)


def _pairs(value, path: str) -> tuple:
    if not isinstance(value, (list, tuple)) or not all(
            isinstance(p, (list, tuple)) and len(p) == 2 for p in value):
        raise ScenarioError(path, "expected a list of [x, y] pairs")
    return tuple((_num(p[0], path), _num(p[1], path)) for p in value)


# ---------------------------------------------------------------------------
# section parsers

def _parse_raman(node, path) -> RamanModel:
    if node is None:
        return RamanModel()
    node = dict(_expect_mapping(node, path))
    kind = _take(node, "kind", path, "parametric")
    if kind == "none":
        _reject_unknown(node, path)
        return RamanModel(kind="none")
    if kind == "parametric":
        model = RamanModel(
            kind="parametric",
            peak_value=_num(_take(node, "peak_value", path, 0.39), f"{path}.peak_value"),
            peak_shift_thz=_num(_take(node, "peak_shift_thz", path, 13.2), f"{path}.peak_shift_thz"),
            f_ref_thz=_num(_take(node, "f_ref_thz", path, 193.4), f"{path}.f_ref_thz"),
            scaling=str(_take(node, "scaling", path, "linear_pump")))
        _reject_unknown(node, path)
        if model.peak_value < 0:
            raise ScenarioError(f"{path}.peak_value", "must be >= 0")
        if model.peak_shift_thz <= 0:
            raise ScenarioError(f"{path}.peak_shift_thz", "must be > 0")
        return model
    if kind == "table":
        pump = tuple(_num(v, f"{path}.pump_axis_thz") for v in _take(node, "pump_axis_thz", path))
        delta = tuple(_num(v, f"{path}.delta_axis_thz") for v in _take(node, "delta_axis_thz", path))
        rows = _take(node, "values", path)
        scaling = str(_take(node, "scaling", path, "linear_pump"))
        f_ref = _num(_take(node, "f_ref_thz", path, 193.4), f"{path}.f_ref_thz")
        _reject_unknown(node, path)
        if len(rows) != len(pump):
            raise ScenarioError(f"{path}.values", "one row per pump frequency required")
        flat = []
        for r, row in enumerate(rows):
            if len(row) != len(delta):
                raise ScenarioError(f"{path}.values", f"row {r} length != delta axis length")
            flat.extend(_num(v, f"{path}.values") for v in row)
        if any(v < 0 for v in flat):
            raise ScenarioError(f"{path}.values", "C_r must be >= 0")
        if delta and delta[0] == 0.0:
            for r in range(len(pump)):
                if flat[r * len(delta)] != 0.0:
                    raise ScenarioError(f"{path}.values", "C_r(f_p, 0) must be 0")
        return RamanModel(kind="table", scaling=scaling, f_ref_thz=f_ref,
                          pump_axis_thz=pump, delta_axis_thz=delta,
                          values=tuple(flat))
    raise ScenarioError(f"{path}.kind", f"unknown Raman model kind {kind!r}")


def _parse_fiber(node, path) -> FiberSpec:
    node = dict(_expect_mapping(node, path))
    length = _num(_take(node, "length_km", path), f"{path}.length_km")
    if length <= 0:
        raise ScenarioError(f"{path}.length_km", "span length must be > 0")

    if "loss_curve" in node:
        curve = _pairs(_take(node, "loss_curve", path), f"{path}.loss_curve")
    elif "loss_db_per_km" in node:
        flat = _num(_take(node, "loss_db_per_km", path), f"{path}.loss_db_per_km")
        curve = ((100.0, flat), (300.0, flat))
    else:
        curve = defaults.default_loss_curve()
    if any(v <= 0 for _, v in curve):
        raise ScenarioError(f"{path}.loss_curve", "all loss values must be > 0")
    if any(curve[i][0] >= curve[i + 1][0] for i in range(len(curve) - 1)):
        raise ScenarioError(f"{path}.loss_curve", "frequencies must be strictly increasing")

    f0 = _num(_take(node, "reference_frequency_thz", path, defaults.DEFAULT_F0_THZ),
              f"{path}.reference_frequency_thz")
    if "beta2_ps2_km" in node:
        beta2 = _num(_take(node, "beta2_ps2_km", path), f"{path}.beta2_ps2_km")
        beta3 = _num(_take(node, "beta3_ps3_km", path, 0.0), f"{path}.beta3_ps3_km")
        beta4 = _num(_take(node, "beta4_ps4_km", path, 0.0), f"{path}.beta4_ps4_km")
    else:
        if "beta3_ps3_km" in node or "beta4_ps4_km" in node:
            raise ScenarioError(f"{path}.beta2_ps2_km",
                                "beta3/beta4 given without beta2")
        beta2 = defaults.DEFAULT_BETA2_PS2_KM
        beta3 = defaults.DEFAULT_BETA3_PS3_KM
        beta4 = defaults.DEFAULT_BETA4_PS4_KM

    n2 = _num(_take(node, "n2_m2_w", path, defaults.DEFAULT_N2_M2_W), f"{path}.n2_m2_w")
    if n2 <= 0:
        raise ScenarioError(f"{path}.n2_m2_w", "n2 must be > 0")

    aeff = _take(node, "aeff", path, None)
    aeff_table: tuple = ()
    na = defaults.DEFAULT_NA
    radius = defaults.DEFAULT_CORE_RADIUS_UM
    if aeff is not None:
        aeff = dict(_expect_mapping(aeff, f"{path}.aeff"))
        if "table" in aeff:
            aeff_table = _pairs(_take(aeff, "table", f"{path}.aeff"), f"{path}.aeff.table")
            na = 0.0
            radius = 0.0
        else:
            na = _num(_take(aeff, "numerical_aperture", f"{path}.aeff"),
                      f"{path}.aeff.numerical_aperture")
            radius = _num(_take(aeff, "core_radius_um", f"{path}.aeff"),
                          f"{path}.aeff.core_radius_um")
            if na <= 0 or radius <= 0:
                raise ScenarioError(f"{path}.aeff", "NA and core radius must be > 0")
        _reject_unknown(aeff, f"{path}.aeff")

    raman = _parse_raman(_take(node, "raman", path, None), f"{path}.raman")
    _reject_unknown(node, path)
    return FiberSpec(length_km=length, loss_curve=curve,
                     reference_frequency_thz=f0, beta2_ps2_km=beta2,
                     beta3_ps3_km=beta3, beta4_ps4_km=beta4, n2_m2_w=n2,
                     aeff_table=aeff_table, numerical_aperture=na,
                     core_radius_um=radius, raman=raman)


def _parse_amplifier(node, path, band_labels) -> AmplifierSpec:
    if node is None:
        nf = tuple((b, defaults.NOISE_FIGURE_DB.get(b, 7.0)) for b in band_labels)
        return AmplifierSpec(noise_figure_db=nf)
    node = dict(_expect_mapping(node, path))
    raw = _take(node, "noise_figure_db", path)
    _reject_unknown(node, path)
    if isinstance(raw, (int, float)) and not isinstance(raw, bool):
        pairs = tuple((b, float(raw)) for b in band_labels)
    else:
        raw = _expect_mapping(raw, f"{path}.noise_figure_db")
        pairs = tuple((str(k), _num(v, f"{path}.noise_figure_db.{k}"))
                      for k, v in raw.items())
    for band, nf in pairs:
        if nf < 0:
            raise ScenarioError(f"{path}.noise_figure_db.{band}", "NF must be >= 0 dB")
    return AmplifierSpec(noise_figure_db=pairs)


def _parse_bands(node, path) -> tuple:
    if node is None:
        edges = defaults.BAND_EDGES_THZ
    else:
        node = _expect_mapping(node, path)
        edges = {}
        for label, pair in node.items():
            if not isinstance(pair, (list, tuple)) or len(pair) != 2:
                raise ScenarioError(f"{path}.{label}", "expected [lower_THz, upper_THz]")
            edges[str(label)] = (_num(pair[0], f"{path}.{label}"),
                                 _num(pair[1], f"{path}.{label}"))
    bands = []
    for label, (lo, hi) in edges.items():
        if lo >= hi:
            raise ScenarioError(f"{path}.{label}", "lower edge must be < upper edge")
        bands.append(Band(label=label, lower_edge_thz=lo, upper_edge_thz=hi))
    bands.sort(key=lambda b: b.lower_edge_thz)
    for a, b in zip(bands, bands[1:]):
        if b.lower_edge_thz < a.upper_edge_thz:
            raise ScenarioError(path, f"bands {a.label} and {b.label} overlap")
    return tuple(bands)


def _parse_channels(node, path, bands_by_label) -> tuple:
    node = dict(_expect_mapping(node, path))
    if "comb" in node:
        comb = dict(_expect_mapping(_take(node, "comb", path), f"{path}.comb"))
        channels = build_comb(
            _num(_take(comb, "start_thz", f"{path}.comb"), f"{path}.comb.start_thz"),
            int(_take(comb, "count", f"{path}.comb")),
            _num(_take(comb, "spacing_ghz", f"{path}.comb"), f"{path}.comb.spacing_ghz"),
            _num(_take(comb, "symbol_rate_gbaud", f"{path}.comb"), f"{path}.comb.symbol_rate_gbaud"),
            _opt_num(_take(comb, "launch_power_dbm", f"{path}.comb", 0.0), f"{path}.comb.launch_power_dbm"))
        _reject_unknown(comb, f"{path}.comb")
    elif "fill_bands" in node:
        fb = dict(_expect_mapping(_take(node, "fill_bands", path), f"{path}.fill_bands"))
        order = _take(fb, "order", f"{path}.fill_bands", list(defaults.FILL_ORDER))
        for label in order:
            if label not in bands_by_label:
                raise ScenarioError(f"{path}.fill_bands.order", f"undefined band {label!r}")
        count = _take(fb, "count", f"{path}.fill_bands", None)
        channels = fill_band_comb(
            bands_by_label, order,
            _num(_take(fb, "spacing_ghz", f"{path}.fill_bands"), f"{path}.fill_bands.spacing_ghz"),
            _num(_take(fb, "symbol_rate_gbaud", f"{path}.fill_bands"), f"{path}.fill_bands.symbol_rate_gbaud"),
            None if count is None else int(count),
            _opt_num(_take(fb, "launch_power_dbm", f"{path}.fill_bands", 0.0), f"{path}.fill_bands.launch_power_dbm"))
        _reject_unknown(fb, f"{path}.fill_bands")
    elif "list" in node:
        items = _take(node, "list", path)
        if not isinstance(items, list):
            raise ScenarioError(f"{path}.list", "expected a list of channels")
        channels = []
        for i, item in enumerate(items):
            item = dict(_expect_mapping(item, f"{path}.list[{i}]"))
            item.pop("index", None)   # ordinals are re-derived from frequency order
            ch = Channel(
                index=0,
                center_frequency_thz=_num(_take(item, "center_frequency_thz", f"{path}.list[{i}]"),
                                          f"{path}.list[{i}].center_frequency_thz"),
                symbol_rate_gbaud=_num(_take(item, "symbol_rate_gbaud", f"{path}.list[{i}]"),
                                       f"{path}.list[{i}].symbol_rate_gbaud"),
                launch_power_dbm=_opt_num(_take(item, "launch_power_dbm", f"{path}.list[{i}]", None),
                                          f"{path}.list[{i}].launch_power_dbm"),
                format_tag=str(_take(item, "format_tag", f"{path}.list[{i}]", "gaussian")))
            _reject_unknown(item, f"{path}.list[{i}]")
            channels.append(ch)
    else:
        raise ScenarioError(path, "one of 'comb', 'fill_bands' or 'list' is required")
    _reject_unknown(node, path)
    return sort_and_index(channels)


def _opt_num(value, path):
    return None if value is None else _num(value, path)


def _parse_transceiver(node, path) -> TransceiverCurve:
    if node is None:
        return TransceiverCurve(knots=defaults.TRANSCEIVER_KNOTS)
    knots = _pairs(node, path)
    for i in range(len(knots) - 1):
        if knots[i + 1][0] <= knots[i][0]:
            raise ScenarioError(path, "GOSNR knots must be strictly increasing")
        if knots[i + 1][1] < knots[i][1]:
            raise ScenarioError(path, "information rate must be non-decreasing")
    if any(r < 0 for _, r in knots):
        raise ScenarioError(path, "information rates must be >= 0")
    return TransceiverCurve(knots=knots)


def _parse_settings(node, path, cls):
    if node is None:
        return cls()
    node = dict(_expect_mapping(node, path))
    kwargs = {}
    for name, fld in cls.__dataclass_fields__.items():
        if name in node:
            value = node.pop(name)
            if isinstance(fld.default, bool):
                if not isinstance(value, bool):
                    raise ScenarioError(f"{path}.{name}", "expected a boolean")
                kwargs[name] = value
            elif isinstance(fld.default, int) and not isinstance(fld.default, bool):
                kwargs[name] = int(_num(value, f"{path}.{name}"))
            else:
                kwargs[name] = _num(value, f"{path}.{name}")
    _reject_unknown(node, path)
    return cls(**kwargs)


# ---------------------------------------------------------------------------
# top level

def parse_scenario(document: str) -> Scenario:
    """Parse and fully validate a scenario document."""
    try:
        root = yaml.safe_load(document)
    except yaml.YAMLError as exc:
        raise ScenarioError("<document>", f"not valid YAML: {exc}") from exc
    root = dict(_expect_mapping(root, "<document>"))

    bands = _parse_bands(_take(root, "bands", "<document>", None), "bands")
    bands_by_label = {b.label: b for b in bands}

    spans_node = _take(root, "spans", "<document>")
    if not isinstance(spans_node, list) or not spans_node:
        raise ScenarioError("spans", "at least one span is required")
    spans = []
    for i, item in enumerate(spans_node):
        item = dict(_expect_mapping(item, f"spans[{i}]"))
        repeat = int(_take(item, "repeat", f"spans[{i}]", 1))
        if repeat < 1:
            raise ScenarioError(f"spans[{i}].repeat", "repeat must be >= 1")
        fiber = _parse_fiber(_take(item, "fiber", f"spans[{i}]"), f"spans[{i}].fiber")
        amp = _parse_amplifier(_take(item, "amplifier", f"spans[{i}]", None),
                               f"spans[{i}].amplifier", tuple(bands_by_label))
        _reject_unknown(item, f"spans[{i}]")
        spans.extend([(fiber, amp)] * repeat)

    channels = _parse_channels(_take(root, "channels", "<document>"), "channels",
                               bands_by_label)
    transceiver = _parse_transceiver(_take(root, "transceiver", "<document>", None),
                                     "transceiver")
    solver = _parse_settings(_take(root, "solver", "<document>", None), "solver",
                             SolverSettings)
    optimizer = _parse_settings(_take(root, "optimizer", "<document>", None),
                                "optimizer", OptimizerSettings)
    _reject_unknown(root, "<document>")

    scenario = Scenario(spans=tuple(spans), channels=channels, bands=bands,
                        transceiver=transceiver, solver=solver, optimizer=optimizer)
    validate_scenario(scenario)
    return scenario


def validate_scenario(scenario: Scenario) -> None:
    """Check cross-cutting physical invariants; raises ScenarioError."""
    if not scenario.spans:
        raise ScenarioError("spans", "at least one span is required")
    if not scenario.channels:
        raise ScenarioError("channels", "comb must be non-empty")
    chans = scenario.channels
    for ch in chans:
        if ch.center_frequency_thz <= 0:
            raise ScenarioError("channels", f"channel {ch.index}: frequency must be > 0")
        if ch.symbol_rate_gbaud <= 0:
            raise ScenarioError("channels", f"channel {ch.index}: symbol rate must be > 0")
    for a, b in zip(chans, chans[1:]):
        if b.center_frequency_thz <= a.center_frequency_thz:
            raise ScenarioError("channels", "channel frequencies must be strictly increasing")
        gap_ghz = (b.center_frequency_thz - a.center_frequency_thz) * 1e3
        if gap_ghz < (a.symbol_rate_gbaud + b.symbol_rate_gbaud) / 2.0 - 1e-9:
            raise ScenarioError(
                "channels",
                f"channels {a.index} and {b.index} overlap spectrally "
                f"(spacing {gap_ghz:.3f} GHz < symbol rate)")
    for ch in chans:
        hits = [b for b in scenario.bands if b.contains(ch.center_frequency_thz)]
        if len(hits) == 0:
            raise ScenarioError("channels",
                                f"channel {ch.index} at {ch.center_frequency_thz} THz "
                                "lies outside all bands")


# ---------------------------------------------------------------------------
# serialization

def serialize_scenario(scenario: Scenario) -> str:
    """Canonical YAML form; parse_scenario(serialize_scenario(s)) == s."""
    doc: dict = {}
    doc["bands"] = {b.label: [b.lower_edge_thz, b.upper_edge_thz]
                    for b in scenario.bands}
    doc["spans"] = []
    for fiber, amp in scenario.spans:
        fdict = {
            "length_km": fiber.length_km,
            "loss_curve": [[f, v] for f, v in fiber.loss_curve],
            "reference_frequency_thz": fiber.reference_frequency_thz,
            "beta2_ps2_km": fiber.beta2_ps2_km,
            "beta3_ps3_km": fiber.beta3_ps3_km,
            "beta4_ps4_km": fiber.beta4_ps4_km,
            "n2_m2_w": fiber.n2_m2_w,
        }
        if fiber.aeff_table:
            fdict["aeff"] = {"table": [[f, v] for f, v in fiber.aeff_table]}
        else:
            fdict["aeff"] = {"numerical_aperture": fiber.numerical_aperture,
                             "core_radius_um": fiber.core_radius_um}
        r = fiber.raman
        if r.kind == "none":
            fdict["raman"] = {"kind": "none"}
        elif r.kind == "parametric":
            fdict["raman"] = {"kind": "parametric", "peak_value": r.peak_value,
                              "peak_shift_thz": r.peak_shift_thz,
                              "f_ref_thz": r.f_ref_thz, "scaling": r.scaling}
        else:
            n_delta = len(r.delta_axis_thz)
            fdict["raman"] = {
                "kind": "table",
                "pump_axis_thz": list(r.pump_axis_thz),
                "delta_axis_thz": list(r.delta_axis_thz),
                "values": [list(r.values[i * n_delta:(i + 1) * n_delta])
                           for i in range(len(r.pump_axis_thz))],
                "scaling": r.scaling,
                "f_ref_thz": r.f_ref_thz,
            }
        doc["spans"].append({
            "fiber": fdict,
            "amplifier": {"noise_figure_db": {b: nf for b, nf in amp.noise_figure_db}},
        })
    doc["channels"] = {"list": [
        {"center_frequency_thz": ch.center_frequency_thz,
         "symbol_rate_gbaud": ch.symbol_rate_gbaud,
         "launch_power_dbm": ch.launch_power_dbm,
         "format_tag": ch.format_tag}
        for ch in scenario.channels]}
    doc["transceiver"] = [[g, r] for g, r in scenario.transceiver.knots]
    doc["solver"] = {name: getattr(scenario.solver, name)
                     for name in SolverSettings.__dataclass_fields__}
    doc["optimizer"] = {name: getattr(scenario.optimizer, name)
                        for name in OptimizerSettings.__dataclass_fields__}
    return yaml.safe_dump(doc, sort_keys=False, default_flow_style=None)
