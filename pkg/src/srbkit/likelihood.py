"""Observation-level data model: log-normal errors with per-source variances.

A log-scaled SRB observation is normal around the log of the country-year
SRB, with variance equal to the known sampling variance plus an estimated
non-sampling variance for its source type. Administrative (CRVS/SRS) data
carry no non-sampling error by assumption.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .data import SOURCE_TYPES, SURVEY_TYPES, Observation, ObservationSet
from .dists import LOG_2PI
from .errors import MissingTheta, NonFiniteDensity, NonPositiveTheta, ZeroTotalVariance

# Degenerate-likelihood guard for CRVS rows reported with sampling_sd = 0.
VARIANCE_FLOOR = 1e-8

OMEGA_UPPER = 0.5


@dataclass
class ErrorModel:
    """Non-sampling error standard deviations by source type (log scale)."""

    omega: dict = field(default_factory=lambda: {s: 0.0 for s in SOURCE_TYPES})

    def __post_init__(self):
        self.omega.setdefault("CRVS_SRS", 0.0)
        if self.omega["CRVS_SRS"] != 0.0:
            raise ValueError("omega for CRVS_SRS is fixed at zero")
        for s in SURVEY_TYPES:
            w = self.omega.setdefault(s, 0.0)
            if not (0.0 <= w <= OMEGA_UPPER):
                raise ValueError(f"omega[{s}] = {w} outside [0, {OMEGA_UPPER}]")

    def total_variance(self, obs: Observation, floor: float = VARIANCE_FLOOR) -> float:
        var = self.omega[obs.source_type] ** 2 + obs.sampling_sd ** 2
        if var <= 0.0:
            if floor > 0.0:
                return floor
            raise ZeroTotalVariance(
                f"zero total variance for {obs.country_code} @ {obs.year}")
        return max(var, floor) if floor > 0.0 else var


def obs_log_density(obs: Observation, theta: float, em: ErrorModel,
                    floor: float = VARIANCE_FLOOR) -> float:
    """log N(log y | log theta, omega^2 + v^2)."""
    if theta <= 0.0:
        raise NonPositiveTheta(f"theta must be positive, got {theta}")
    var = em.total_variance(obs, floor)
    d = math.log(obs.value) - math.log(theta)
    return -0.5 * (LOG_2PI + math.log(var) + d * d / var)


def total_log_likelihood(obs_set: ObservationSet, theta_field, em: ErrorModel,
                         floor: float = VARIANCE_FLOOR) -> float:
    """Sum of obs_log_density over rows; theta_field maps (code, grid year)."""
    total = 0.0
    for o in obs_set:
        key = (o.country_code, o.grid_year)
        if key not in theta_field:
            raise MissingTheta(f"no theta for {key}")
        total += obs_log_density(o, theta_field[key], em, floor)
    if not np.isfinite(total):
        raise NonFiniteDensity(f"total log likelihood is {total}")
    return total
