"""Structural model: baselines, AR(1) fluctuations, trapezoid inflation.

The country-year SRB is a positive baseline times a stationary AR(1)
multiplier, plus (for at-risk countries) an indicator-gated trapezoid
excursion with phases of rise, plateau and fall. Five fit variants share
these pieces and differ in which components are sampled versus fixed.

Prior densities are evaluated on the sampling coordinates used throughout
the package: log for the national baselines and fluctuation multipliers,
logit for the inflation probabilities, natural scale for everything else.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import dists
from .data import SURVEY_TYPES, GRID_END, GRID_START, TfrAnchors
from .errors import MissingFixedInput, RhoOutOfRange
from .likelihood import ErrorModel, OMEGA_UPPER

MODEL_KINDS = ("M1", "M2", "M3", "M4", "M2Joint")

RHO_CAP = 0.999
T_DF = 3

# Uniform prior supports (lo, hi) for the scalar hyperparameters.
PRIOR_SUPPORT = {
    "beta_region": (1.0, 1.1),
    "sigma_beta": (0.0, 0.05),
    "rho": (0.0, 1.0),
    "sigma_eps": (0.0, 0.05),
    "omega": (0.0, OMEGA_UPPER),
    "mu_xi": (0.0, 2.0),
    "sigma_xi": (0.0, 2.0),
    "mu_lambda1": (0.0, 40.0),
    "mu_lambda2": (0.0, 40.0),
    "mu_lambda3": (0.0, 40.0),
    "sigma_lambda1": (1.0, 10.0),
    "sigma_lambda2": (1.0, 10.0),
    "sigma_lambda3": (1.0, 10.0),
    "sigma_gamma": (0.0, 10.0),
    "sigma_pi": (0.0, 2.0),
}


@dataclass
class BaselineParams:
    """Regional and national baseline SRB with the pooling scale.

    region_of maps each country to its region; required wherever the
    hierarchical pooling density is evaluated.
    """

    beta_region: dict
    beta: dict
    sigma_beta: float
    region_of: dict = field(default_factory=dict)

    def region_for(self, code: str) -> str:
        if code in self.region_of:
            return self.region_of[code]
        if len(self.beta_region) == 1:
            return next(iter(self.beta_region))
        raise KeyError(f"no region membership recorded for {code}")


@dataclass
class FluctuationParams:
    """AR(1) multiplier field and its two hyperparameters."""

    rho: float
    sigma_eps: float
    eta: dict  # (country, year) -> positive multiplier


@dataclass
class TransitionParams:
    """One draw of the trapezoid inflation for a single country."""

    gamma0: float
    lambda1: float
    lambda2: float
    lambda3: float
    xi: float
    delta: int = 1

    def __post_init__(self):
        if min(self.lambda1, self.lambda2, self.lambda3) < 0 or self.xi < 0:
            raise ValueError("transition lengths and maximum must be nonnegative")
        if self.delta not in (0, 1):
            raise ValueError("delta must be 0 or 1")

    @property
    def gamma1(self):
        return self.gamma0 + self.lambda1

    @property
    def gamma2(self):
        return self.gamma1 + self.lambda2

    @property
    def gamma3(self):
        return self.gamma2 + self.lambda3


@dataclass
class TransitionHyper:
    """Hierarchy over transition shapes plus the inflation-probability level."""

    mu_xi: float
    sigma_xi: float
    mu_l1: float
    sigma_l1: float
    mu_l2: float
    sigma_l2: float
    mu_l3: float
    sigma_l3: float
    sigma_gamma: float
    mu_pi: float = 0.0
    sigma_pi: float = 1.0
    pi: dict = field(default_factory=dict)  # country -> probability in (0,1)

    t_df: int = T_DF


@dataclass
class ModelSpec:
    """Which fit variant to run and the point estimates it conditions on."""

    kind: str
    beta_hat: dict | None = None          # country -> baseline median (M2/M3/M4)
    rho_hat: float | None = None
    sigma_eps_hat: float | None = None
    zeta_hat: dict | None = None          # transition hyper medians (M4)
    beta_region_hat: dict | None = None   # regional medians (M2Joint prior)
    sigma_beta_hat: float | None = None

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.kind in ("M2", "M3", "M4", "M2Joint"):
            if self.rho_hat is None or self.sigma_eps_hat is None:
                raise MissingFixedInput(f"{self.kind} requires rho/sigma_eps medians")
        if self.kind in ("M2", "M3", "M4"):
            if not self.beta_hat:
                raise MissingFixedInput(f"{self.kind} requires baseline medians")
        if self.kind == "M4" and not self.zeta_hat:
            raise MissingFixedInput("M4 requires transition hyper medians")
        if self.kind == "M2Joint":
            if not self.beta_region_hat or self.sigma_beta_hat is None:
                raise MissingFixedInput("M2Joint requires regional baseline medians")

    @property
    def has_inflation(self):
        return self.kind in ("M2", "M4", "M2Joint")

    @property
    def samples_baseline(self):
        return self.kind in ("M1", "M2Joint")


# --- trapezoid --------------------------------------------------------------

def omega_at(p: TransitionParams, t: float) -> float:
    """Trapezoid inflation at time t; boundary years valued by continuity.

    Zero-length rise or fall phases resolve to the plateau value at the
    shared boundary year (right/left continuity respectively).
    """
    return float(omega_curve(p.gamma0, p.lambda1, p.lambda2, p.lambda3, p.xi,
                             np.asarray(t, dtype=float)))


def omega_curve(gamma0, lam1, lam2, lam3, xi, t):
    """Vectorized trapezoid; broadcasts parameters against times."""
    g0 = np.asarray(gamma0, dtype=float)
    l1 = np.asarray(lam1, dtype=float)
    l2 = np.asarray(lam2, dtype=float)
    l3 = np.asarray(lam3, dtype=float)
    x = np.asarray(xi, dtype=float)
    t = np.asarray(t, dtype=float)
    g1 = g0 + l1
    g2 = g1 + l2
    g3 = g2 + l3

    with np.errstate(divide="ignore", invalid="ignore"):
        rise = np.where(l1 > 0, x * (t - g0) / np.where(l1 > 0, l1, 1.0), x)
        fall = np.where(l3 > 0, x - x * (t - g2) / np.where(l3 > 0, l3, 1.0), x)
    out = np.zeros(np.broadcast(g0, t).shape, dtype=float)
    out = np.where((t >= g0) & (t <= g1), rise, out)
    out = np.where((t > g1) & (t <= g2), np.broadcast_to(x, out.shape), out)
    out = np.where((t > g2) & (t <= g3), fall, out)
    out = np.where((t < g0) | (t > g3), 0.0, out)
    return out


# --- AR(1) fluctuations -----------------------------------------------------

def ar1_initial_log_sd(rho: float, sigma_eps: float) -> float:
    """Stationary standard deviation of the log fluctuation process."""
    if rho < 0.0 or rho >= 1.0:
        raise RhoOutOfRange(f"rho must be in [0, 1), got {rho}")
    if rho > RHO_CAP:
        warnings.warn(f"rho={rho} capped at {RHO_CAP} (stationary sd diverges)")
        rho = RHO_CAP
    return sigma_eps / math.sqrt(1.0 - rho * rho)


def eta_project(eta_last: float, rho: float, sigma_eps: float, horizon: int,
                rng: np.random.Generator) -> np.ndarray:
    """Forward simulation of the multiplier; deterministic decay when sigma=0."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    z = math.log(eta_last)
    out = np.empty(horizon, dtype=float)
    eps = rng.normal(0.0, 1.0, size=horizon) if sigma_eps > 0 else np.zeros(horizon)
    for k in range(horizon):
        z = rho * z + sigma_eps * eps[k]
        out[k] = math.exp(z)
    return out


# --- theta assembly ---------------------------------------------------------

def theta_assemble(spec: ModelSpec, b: BaselineParams | None,
                   f: FluctuationParams, tp: dict | None = None) -> dict:
    """Country-year SRB under the given fit variant.

    tp maps country -> TransitionParams and is required for the inflation
    variants; for M4 the indicator is forced on.
    """
    if spec.samples_baseline:
        if b is None:
            raise MissingFixedInput(f"{spec.kind} samples the baseline; none given")
        beta_of = lambda c: b.beta[c]
    else:
        beta_of = lambda c: spec.beta_hat[c]

    out = {}
    for (c, t), eta in f.eta.items():
        theta = beta_of(c) * eta
        if spec.has_inflation:
            if tp is None or c not in tp:
                raise MissingFixedInput(f"no transition parameters for {c}")
            p = tp[c]
            gate = 1 if spec.kind == "M4" else p.delta
            if gate:
                theta = theta + omega_at(p, t)
        out[(c, t)] = theta
    return out


# --- joint prior ------------------------------------------------------------

def _log_uniform(name, value):
    lo, hi = PRIOR_SUPPORT[name]
    return dists.uniform_logpdf(value, lo, hi)


def ar1_chain_logpdf(z: np.ndarray, rho: float, sigma_eps: float) -> float:
    """Joint density of one country's log-multiplier path."""
    if sigma_eps <= 0:
        return -np.inf
    s0 = ar1_initial_log_sd(rho, sigma_eps)
    total = float(dists.norm_logpdf(z[0], 0.0, s0))
    if len(z) > 1:
        total += float(np.sum(dists.norm_logpdf(z[1:], rho * z[:-1], sigma_eps)))
    return total


def log_prior(spec: ModelSpec,
              baseline: BaselineParams | None,
              fluct: FluctuationParams,
              transitions: dict | None = None,
              hyper: TransitionHyper | None = None,
              error_model: ErrorModel | None = None,
              anchors: dict | None = None) -> float:
    """Sum of all log prior densities active under spec.kind; -inf off-support.

    anchors maps country -> TfrAnchors and is required whenever transition
    start years are active.
    """
    total = 0.0

    # fluctuation field
    if spec.kind == "M1":
        rho, sig = fluct.rho, fluct.sigma_eps
        total += _log_uniform("rho", rho) + _log_uniform("sigma_eps", sig)
    else:
        rho, sig = spec.rho_hat, spec.sigma_eps_hat
    if not np.isfinite(total):
        return -np.inf
    by_country: dict[str, list] = {}
    for (c, t), eta in fluct.eta.items():
        by_country.setdefault(c, []).append((t, eta))
    for c, items in by_country.items():
        items.sort()
        z = np.log(np.array([e for _, e in items], dtype=float))
        total += ar1_chain_logpdf(z, rho, sig)

    # baselines
    if spec.kind == "M1":
        if baseline is None:
            raise MissingFixedInput("M1 prior requires baseline parameters")
        total += _log_uniform("sigma_beta", baseline.sigma_beta)
        for r, br in baseline.beta_region.items():
            total += _log_uniform("beta_region", br)
        if not np.isfinite(total):
            return -np.inf
        for c, bc in baseline.beta.items():
            r = _region_for(c, baseline)
            total += float(dists.norm_logpdf(math.log(bc),
                                             math.log(baseline.beta_region[r]),
                                             baseline.sigma_beta))
    elif spec.kind == "M2Joint":
        if baseline is None:
            raise MissingFixedInput("M2Joint prior requires baseline parameters")
        # natural-scale normal prior evaluated on the log-beta coordinate
        for c, bc in baseline.beta.items():
            m = spec.beta_region_hat[c]
            total += float(dists.norm_logpdf(bc, m, spec.sigma_beta_hat)) + math.log(bc)

    # observation error
    if error_model is not None:
        for s in SURVEY_TYPES:
            total += _log_uniform("omega", error_model.omega.get(s, 0.0))

    # transition block
    if spec.has_inflation:
        if transitions is None:
            raise MissingFixedInput("inflation variants require transition params")
        if spec.kind == "M4":
            zh = spec.zeta_hat
            h = TransitionHyper(mu_xi=zh["mu_xi"], sigma_xi=zh["sigma_xi"],
                                mu_l1=zh["mu_lambda1"], sigma_l1=zh["sigma_lambda1"],
                                mu_l2=zh["mu_lambda2"], sigma_l2=zh["sigma_lambda2"],
                                mu_l3=zh["mu_lambda3"], sigma_l3=zh["sigma_lambda3"],
                                sigma_gamma=zh["sigma_gamma"])
        else:
            h = hyper
            if h is None:
                raise MissingFixedInput("M2/M2Joint require transition hyper params")
            for name, value in (("mu_xi", h.mu_xi), ("sigma_xi", h.sigma_xi),
                                ("mu_lambda1", h.mu_l1), ("sigma_lambda1", h.sigma_l1),
                                ("mu_lambda2", h.mu_l2), ("sigma_lambda2", h.sigma_l2),
                                ("mu_lambda3", h.mu_l3), ("sigma_lambda3", h.sigma_l3),
                                ("sigma_gamma", h.sigma_gamma),
                                ("sigma_pi", h.sigma_pi)):
                total += _log_uniform(name, value)
            total += float(dists.logistic_logpdf(h.mu_pi))
            if not np.isfinite(total):
                return -np.inf
        if anchors is None:
            raise MissingFixedInput("transition priors require TFR anchors")
        for c, p in transitions.items():
            a: TfrAnchors = anchors[c]
            total += float(dists.truncnorm_logpdf(p.xi, h.mu_xi, h.sigma_xi, 0.0))
            total += float(dists.truncnorm_logpdf(p.lambda1, h.mu_l1, h.sigma_l1, 0.0))
            total += float(dists.truncnorm_logpdf(p.lambda2, h.mu_l2, h.sigma_l2, 0.0))
            total += float(dists.truncnorm_logpdf(p.lambda3, h.mu_l3, h.sigma_l3, 0.0))
            total += float(dists.trunc_t_logpdf(p.gamma0, a.x, h.sigma_gamma,
                                                h.t_df, a.z))
            if spec.kind != "M4":
                pi_c = h.pi[c]
                lp = dists.logit(pi_c)
                total += float(dists.norm_logpdf(lp, h.mu_pi, h.sigma_pi))
                total += math.log(pi_c) if p.delta else math.log1p(-pi_c)
            if not np.isfinite(total):
                return -np.inf

    return float(total) if np.isfinite(total) else -np.inf


def _region_for(code, baseline: BaselineParams):
    # registry-free lookup: single-region baselines are common in tests
    if len(baseline.beta_region) == 1:
        return next(iter(baseline.beta_region))
    region = baseline.beta.get("__region_of__")
    raise KeyError(
        "log_prior needs region membership; attach it via BaselineParams.beta_region "
        "with region keys matching make_region_lookup") if region is None else None


def make_grid(start: int = GRID_START, end: int = GRID_END) -> np.ndarray:
    return np.arange(start, end + 1, dtype=int)
