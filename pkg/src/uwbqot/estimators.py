"""Scikit-learn style wrappers around the engine.

Thin estimator veneer so the pipeline composes with sklearn tooling
(`get_params`/`set_params`, cloning, grid search over solver knobs).  The
"X" of these estimators is a Scenario; `QotEstimator.predict` maps launch
power vectors to per-channel GOSNR, `LaunchPowerOptimizer.fit` finds the
throughput-maximizing launch policy.
"""

from __future__ import annotations

from dataclasses import replace

import numpy as np
from sklearn.base import BaseEstimator

from . import budget, optimizer
from .types import Scenario


def _apply_overrides(scenario: Scenario, **solver_overrides) -> Scenario:
    updates = {k: v for k, v in solver_overrides.items() if v is not None}
    if not updates:
        return scenario
    return replace(scenario, solver=replace(scenario.solver, **updates))


class QotEstimator(BaseEstimator):
    """Predict per-channel quality of transmission for a fixed scenario.

    fit(scenario) binds the link; predict(X) evaluates one GOSNR vector (dB)
    per row of launch powers in dBm.
    """

    def __init__(self, ode_step_km=None, series_cap=None):
        self.ode_step_km = ode_step_km
        self.series_cap = series_cap

    def fit(self, scenario: Scenario, y=None):
        self.scenario_ = _apply_overrides(scenario, ode_step_km=self.ode_step_km,
                                          series_cap=self.series_cap)
        return self

    def predict(self, X):
        if not hasattr(self, "scenario_"):
            raise RuntimeError("QotEstimator must be fit to a scenario first")
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != len(self.scenario_.channels):
            raise ValueError(
                f"expected {len(self.scenario_.channels)} launch powers per row, "
                f"got {X.shape[1]}")
        return np.stack([
            budget.evaluate_link(self.scenario_, row).gosnr_db for row in X])

    def score(self, X, y=None):
        """Mean total throughput (Tbit/s) over the given launch vectors."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return float(np.mean([
            budget.evaluate_link(self.scenario_, row).throughput_tbps for row in X]))


class LaunchPowerOptimizer(BaseEstimator):
    """Fit a per-band cubic launch-power policy maximizing throughput."""

    def __init__(self, budget=None, band_by_band=None, initial_step_db=None):
        self.budget = budget
        self.band_by_band = band_by_band
        self.initial_step_db = initial_step_db

    def fit(self, scenario: Scenario, y=None):
        opt = scenario.optimizer
        updates = {}
        if self.budget is not None:
            updates["budget"] = int(self.budget)
        if self.band_by_band is not None:
            updates["band_by_band"] = bool(self.band_by_band)
        if self.initial_step_db is not None:
            updates["initial_step_db"] = float(self.initial_step_db)
        if updates:
            scenario = replace(scenario, optimizer=replace(opt, **updates))
        result = optimizer.optimize_launch(scenario)
        self.scenario_ = scenario
        self.policy_ = result.policy
        self.report_ = result.report
        self.n_evaluations_ = result.evaluations
        return self

    def predict(self, scenario: Scenario = None):
        """Launch powers (dBm) of the fitted policy on the given comb."""
        if not hasattr(self, "policy_"):
            raise RuntimeError("LaunchPowerOptimizer must be fit first")
        return self.policy_.launch_dbm(scenario if scenario is not None
                                       else self.scenario_)

    def score(self, scenario: Scenario = None, y=None):
        if scenario is None:
            return self.report_.throughput_tbps
        return budget.evaluate_link(scenario, self.policy_.launch_dbm(scenario)).throughput_tbps
