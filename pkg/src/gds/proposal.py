"""Multivariate normal proposal centered at the posterior mode.

The proposal covariance is scale * (-H)^-1 for the mode Hessian H. Validity
of a scale means the mode-normalized density ratio

    log_phi(theta) = (log D(theta) - log D(mode)) - (log g(theta) - log g(mode))

stays <= 0 over the proposal draws; everything downstream works with
log_phi and v = -log_phi only, since the ratio itself underflows routinely
in high dimension.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve, solve_triangular

from .errors import TuningError
from .modefind import ModeResult
from .models.base import Model, as_params, log_unnormalized_posterior

_LOG_2PI = float(np.log(2.0 * np.pi))

MAX_LADDER_RUNGS = 60  # tune_scale gives up past s0 * 1.25**60
LADDER_FACTOR = 1.25
DOMINANCE_TOL = 1e-9  # shared slack for Phi <= 1 checks; absorbs ulp-level ratio noise


@dataclass(frozen=True)
class Proposal:
    mean: np.ndarray  # the mode
    chol: np.ndarray  # lower-triangular L with L L' = scale * (-H)^-1
    log_mode_density: float  # log g at the mean
    scale: float


@dataclass(frozen=True)
class ProposalSample:
    theta: np.ndarray
    log_g: float
    log_phi: float = np.nan  # filled by the caller once log D is evaluated

    @property
    def v(self) -> float:
        return -self.log_phi


def build_proposal(mode: ModeResult, scale: float) -> Proposal:
    """Normal proposal at the mode with covariance scale * (-H)^-1."""
    if scale <= 0.0:
        raise ValueError("scale must be positive")
    d = mode.theta.shape[0]
    try:
        cho = cho_factor(-mode.hessian, lower=True)
    except LinAlgError:
        raise ValueError("hessian not negative definite") from None
    cov = scale * cho_solve(cho, np.eye(d))
    cov = 0.5 * (cov + cov.T)
    chol = np.linalg.cholesky(cov)
    log_mode_density = -0.5 * d * _LOG_2PI - float(np.sum(np.log(np.diag(chol))))
    return Proposal(mean=mode.theta.copy(), chol=chol, log_mode_density=log_mode_density, scale=float(scale))


def proposal_log_density(prop: Proposal, theta: np.ndarray) -> float:
    w = solve_triangular(prop.chol, theta - prop.mean, lower=True, check_finite=False)
    return prop.log_mode_density - 0.5 * float(w @ w)


def sample_proposal(prop: Proposal, rng: np.random.Generator) -> ProposalSample:
    """One draw theta = mean + L z; log_g via triangular solve against the same L."""
    z = rng.standard_normal(prop.mean.shape[0])
    theta = prop.mean + prop.chol @ z
    return ProposalSample(theta=theta, log_g=proposal_log_density(prop, theta))


def sample_batch(prop: Proposal, rng: np.random.Generator, size: int) -> np.ndarray:
    """size x d matrix of proposal draws (used for the pool stage)."""
    z = rng.standard_normal((size, prop.mean.shape[0]))
    return prop.mean + z @ prop.chol.T


def log_phi(model: Model, mode: ModeResult, prop: Proposal, theta) -> float:
    """Mode-normalized log density ratio; -inf where the posterior has zero density."""
    theta = as_params(theta, model.dimension)
    log_d = log_unnormalized_posterior(model, theta)
    if log_d == -np.inf:
        return -np.inf
    return (log_d - mode.log_density) - (proposal_log_density(prop, theta) - prop.log_mode_density)


def tune_scale(
    model: Model,
    mode: ModeResult,
    s0: float,
    pilot: int,
    rng: np.random.Generator,
) -> float:
    """First scale on the ladder s0 * 1.25^j whose fresh pilot draws all pass Phi <= 1.

    The check allows the same 1e-9 slack used by the pool validity check and
    the accept-reject dominance guard. The pilot draws are discarded; the
    caller takes its own fresh pool at the returned scale.
    """
    if s0 <= 0.0:
        raise ValueError("s0 must be positive")
    if pilot < 100:
        raise ValueError("pilot size must be at least 100")
    for rung in range(MAX_LADDER_RUNGS + 1):
        scale = s0 * LADDER_FACTOR**rung
        prop = build_proposal(mode, scale)
        thetas = sample_batch(prop, rng, pilot)
        if all(log_phi(model, mode, prop, theta) <= DOMINANCE_TOL for theta in thetas):
            return scale
    raise TuningError(
        f"no dominating scale up to s0 * {LADDER_FACTOR}^{MAX_LADDER_RUNGS}: "
        "proposal family cannot dominate posterior (heavy tails or wrong mode?)"
    )
