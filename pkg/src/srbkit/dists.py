"""Density and sampling helpers for the prior families used by the model.

All log densities include their normalization constants; the truncated
families are renormalized by the retained tail mass, which is required for
correct hyperparameter conditionals.
"""

from __future__ import annotations

import numpy as np
from scipy import special, stats

LOG_2PI = float(np.log(2.0 * np.pi))


def norm_logpdf(x, mu, sd):
    sd = np.asarray(sd, dtype=float)
    z = (np.asarray(x, dtype=float) - mu) / sd
    return -0.5 * (LOG_2PI + z * z) - np.log(sd)


def uniform_logpdf(x, lo, hi):
    x = np.asarray(x, dtype=float)
    out = np.where((x >= lo) & (x <= hi), -np.log(hi - lo), -np.inf)
    return out if out.shape else float(out)


def truncnorm_logpdf(x, mu, sigma, lower):
    """Normal(mu, sigma^2) truncated to [lower, inf)."""
    x = np.asarray(x, dtype=float)
    a = (lower - mu) / sigma
    # log(1 - Phi(a)) evaluated stably
    log_tail = special.log_ndtr(-a)
    out = np.where(x >= lower, norm_logpdf(x, mu, sigma) - log_tail, -np.inf)
    return out if out.shape else float(out)


def truncnorm_sample(mu, sigma, lower, rng, size=None):
    a = (np.asarray(lower, dtype=float) - mu) / sigma
    return stats.truncnorm.rvs(a, np.inf, loc=mu, scale=sigma,
                               size=size, random_state=rng)


def trunc_t_logpdf(x, loc, scale, df, lower):
    """Student-t (df) with location/scale, truncated to [lower, inf)."""
    x = np.asarray(x, dtype=float)
    a = (lower - loc) / scale
    log_tail = stats.t.logsf(a, df)
    out = np.where(
        x >= lower,
        stats.t.logpdf((x - loc) / scale, df) - np.log(scale) - log_tail,
        -np.inf,
    )
    return out if out.shape else float(out)


def trunc_t_sample(loc, scale, df, lower, rng, size=None):
    a = (np.asarray(lower, dtype=float) - loc) / scale
    fa = stats.t.cdf(a, df)
    u = rng.uniform(size=size)
    return loc + scale * stats.t.ppf(fa + u * (1.0 - fa), df)


def trunc_normal_interval_sample(mu, sigma, lo, hi, rng, size=None):
    """Normal(mu, sigma^2) truncated to [lo, hi]."""
    a = (lo - mu) / sigma
    b = (hi - mu) / sigma
    return stats.truncnorm.rvs(a, b, loc=mu, scale=sigma,
                               size=size, random_state=rng)


def logistic_logpdf(x):
    """Density of x when expit(x) is uniform on (0, 1)."""
    x = np.asarray(x, dtype=float)
    return special.log_expit(x) + special.log_expit(-x)


expit = special.expit
logit = special.logit
