"""dB/dBm conversion helpers (linear watts everywhere internally)."""

from __future__ import annotations

import numpy as np


def dbm_to_w(p_dbm):
    return 10.0 ** (np.asarray(p_dbm, dtype=float) / 10.0) * 1e-3


def w_to_dbm(p_w):
    return 10.0 * np.log10(np.asarray(p_w, dtype=float) / 1e-3)


def db_to_lin(x_db):
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)


def lin_to_db(x):
    return 10.0 * np.log10(np.asarray(x, dtype=float))
