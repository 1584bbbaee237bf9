"""Model contract: unnormalized log posterior on unconstrained space.

A model exposes the joint density of data and parameters, evaluated on a
fully unconstrained parameter vector (every constrained block mapped to the
real line, with the transform Jacobian folded into the density). Models are
immutable after construction and safe to share across worker processes; all
evaluation entry points are pure functions of (model, theta).
"""

from __future__ import annotations

import numpy as np

from .transforms import Block, block_from_constrained, block_constrained_flat, block_to_constrained

# central-difference step scale for first derivatives
_FD_STEP = float(np.cbrt(np.finfo(float).eps))
# wider step for direct second differences of the density
_FD2_STEP = float(np.finfo(float).eps) ** 0.25


class Model:
    """Base class for target models.

    Subclasses must set ``dimension`` and ``blocks`` and implement
    ``log_density``. ``gradient_analytic`` / ``hessian_analytic`` return None
    by default, which makes callers fall back to central finite differences.
    """

    dimension: int
    blocks: tuple[Block, ...] = ()

    def log_density(self, theta: np.ndarray) -> float:
        raise NotImplementedError

    def gradient_analytic(self, theta: np.ndarray):
        return None

    def hessian_analytic(self, theta: np.ndarray):
        return None

    def describe(self) -> dict:
        """Metadata recorded in run diagnostics."""
        return {"name": type(self).__name__, "dimension": self.dimension}


def as_params(theta, dimension: int) -> np.ndarray:
    """Validate and normalize a parameter vector: 1-d, finite, length checked."""
    arr = np.asarray(theta, dtype=float)
    if arr.ndim != 1 or arr.shape[0] != dimension:
        raise ValueError(f"parameter vector has shape {arr.shape}, expected ({dimension},)")
    if not np.all(np.isfinite(arr)):
        raise ValueError("parameter vector contains non-finite entries")
    return arr


def log_unnormalized_posterior(model: Model, theta) -> float:
    """log D(theta, y): likelihood + priors + transform Jacobians.

    Overflowing intermediates are mapped to -inf so the value is never
    NaN or +inf.
    """
    theta = as_params(theta, model.dimension)
    value = float(model.log_density(theta))
    if np.isnan(value) or value == np.inf:
        return -np.inf
    return value


def gradient(model: Model, theta) -> np.ndarray:
    """Gradient of log D, analytic when the model provides one."""
    theta = as_params(theta, model.dimension)
    g = model.gradient_analytic(theta)
    if g is None:
        g = fd_gradient(model, theta)
    g = np.asarray(g, dtype=float)
    bad = np.flatnonzero(~np.isfinite(g))
    if bad.size:
        raise ValueError(f"gradient non-finite at coordinates {bad.tolist()}")
    return g


def fd_gradient(model: Model, theta: np.ndarray) -> np.ndarray:
    d = model.dimension
    g = np.empty(d)
    for i in range(d):
        h = _FD_STEP * max(1.0, abs(theta[i]))
        e = np.zeros(d)
        e[i] = h
        g[i] = (model.log_density(theta + e) - model.log_density(theta - e)) / (2.0 * h)
    return g


def fd_hessian_from_gradient(model: Model, theta: np.ndarray) -> np.ndarray:
    """Central differences of the (analytic or FD) gradient, symmetrized."""
    d = model.dimension
    H = np.empty((d, d))
    use_analytic = model.gradient_analytic(theta) is not None
    grad_at = model.gradient_analytic if use_analytic else (lambda t: fd_gradient(model, t))
    for i in range(d):
        h = _FD_STEP * max(1.0, abs(theta[i]))
        e = np.zeros(d)
        e[i] = h
        H[:, i] = (grad_at(theta + e) - grad_at(theta - e)) / (2.0 * h)
    return 0.5 * (H + H.T)


def fd_hessian_from_values(model: Model, theta: np.ndarray) -> np.ndarray:
    """Second differences of log D directly; used when no gradient exists."""
    d = model.dimension
    f0 = model.log_density(theta)
    h = np.array([_FD2_STEP * max(1.0, abs(theta[i])) for i in range(d)])
    H = np.empty((d, d))
    for i in range(d):
        ei = np.zeros(d)
        ei[i] = h[i]
        H[i, i] = (model.log_density(theta + ei) - 2.0 * f0 + model.log_density(theta - ei)) / h[i] ** 2
        for j in range(i):
            ej = np.zeros(d)
            ej[j] = h[j]
            H[i, j] = H[j, i] = (
                model.log_density(theta + ei + ej)
                - model.log_density(theta + ei - ej)
                - model.log_density(theta - ei + ej)
                + model.log_density(theta - ei - ej)
            ) / (4.0 * h[i] * h[j])
    return 0.5 * (H + H.T)


def to_constrained(model: Model, theta) -> dict[str, np.ndarray]:
    """Named constrained blocks (variances exponentiated, covariances rebuilt)."""
    theta = as_params(theta, model.dimension)
    out = {}
    offset = 0
    for block in model.blocks:
        out[block.name] = block_to_constrained(block, theta[offset : offset + block.size])
        offset += block.size
    return out


def from_constrained(model: Model, values: dict) -> np.ndarray:
    """Inverse of :func:`to_constrained`."""
    parts = [block_from_constrained(block, values[block.name]) for block in model.blocks]
    theta = np.concatenate(parts) if parts else np.empty(0)
    return as_params(theta, model.dimension)


def constrained_vector(model: Model, theta) -> np.ndarray:
    """Constrained parameters flattened to length d (covariances as lower triangles)."""
    theta = as_params(theta, model.dimension)
    parts = []
    offset = 0
    for block in model.blocks:
        parts.append(block_constrained_flat(block, theta[offset : offset + block.size]))
        offset += block.size
    return np.concatenate(parts)
