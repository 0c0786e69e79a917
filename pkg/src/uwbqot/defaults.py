"""Built-in default tables.

Every value here is a documented, overridable stand-in: band edges follow ITU
conventions expressed in THz, the loss curve is a generic zero-water-peak SMF
table, the Raman shape is a normalized silica gain profile, and the
transceiver curve is a placeholder shaped so that a 10x100 km C+L system
plateaus near 7.5 bits/symbol.
"""

from __future__ import annotations

# ITU band edges in THz (O band included for completeness; the engine itself
# is band-agnostic).
BAND_EDGES_THZ = {
    "U": (179.0, 184.5),
    "L": (184.5, 191.6),
    "C": (191.6, 195.9),
    "S": (195.9, 205.3),
    "E": (205.3, 220.4),
    "O": (220.4, 237.9),
}

# Band-fill order used by the progressive sweep.
FILL_ORDER = ("C", "L", "S", "U", "E")

# Default per-band amplifier noise figures, dB.
NOISE_FIGURE_DB = {
    "C": 5.0,
    "L": 6.0,
    "S": 7.0,
    "E": 7.0,
    "U": 8.0,
    "O": 8.0,
}

DEFAULT_F0_THZ = 193.4
DEFAULT_BETA2_PS2_KM = -21.3
DEFAULT_BETA3_PS3_KM = 0.12
DEFAULT_BETA4_PS4_KM = -5e-4
DEFAULT_N2_M2_W = 2.6e-20
DEFAULT_NA = 0.124
DEFAULT_CORE_RADIUS_UM = 4.1


def default_loss_curve():
    """Zero-water-peak SMF attenuation table, dB/km, 1 THz grid 179-238 THz.

    Minimum 0.19 dB/km near 193 THz, rising toward both edges (IR absorption
    at low frequency, Rayleigh scattering at high frequency).
    """
    points = []
    for k in range(179, 239):
        f = float(k)
        d = f - 193.0
        if d >= 0.0:
            loss = 0.19 + 1.35e-4 * d * d
        else:
            loss = 0.19 + 2.1e-4 * d * d
        points.append((f, round(loss, 4)))
    return tuple(points)


# Normalized silica Raman gain shape g(delta_nu); peak 1.0 at 13.2 THz.
# Piecewise-linear, zero outside [0, 30] THz.
SILICA_RAMAN_SHAPE = (
    (0.0, 0.0),
    (1.0, 0.055),
    (2.0, 0.115),
    (3.0, 0.175),
    (4.0, 0.235),
    (5.0, 0.30),
    (6.0, 0.36),
    (7.0, 0.42),
    (8.0, 0.49),
    (9.0, 0.56),
    (10.0, 0.64),
    (11.0, 0.72),
    (12.0, 0.82),
    (13.2, 1.0),
    (14.0, 0.82),
    (15.0, 0.40),
    (16.0, 0.16),
    (17.0, 0.09),
    (18.0, 0.07),
    (20.0, 0.055),
    (22.0, 0.04),
    (24.0, 0.02),
    (26.0, 0.01),
    (28.0, 0.005),
    (30.0, 0.0),
)

# Placeholder transceiver curve: GOSNR dB -> net information rate, bits/symbol
# (dual polarization, net of FEC).  Shaped so a 10x100 km SMF C+L link at its
# optimum launch (GOSNR around 14-15 dB in the symbol-rate bandwidth) sits on
# the 7.5 bits/symbol plateau.
TRANSCEIVER_KNOTS = (
    (1.0, 0.5),
    (3.0, 1.5),
    (5.0, 2.5),
    (7.0, 3.5),
    (9.0, 4.5),
    (11.0, 5.5),
    (12.5, 6.5),
    (14.0, 7.5),
)
