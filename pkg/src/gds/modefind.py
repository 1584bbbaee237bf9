"""Posterior mode search and Hessian estimation.

Maximizes the unnormalized log posterior with a trust-region Newton method
using dogleg steps on the dense Hessian. Trust-region steps never commit to
a point where the density underflowed to -inf; the radius shrinks instead,
which is what makes the search safe on ridged or nearly flat surfaces where
line searches overshoot.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from ._threads import single_threaded_blas
from .errors import ModeFindingError
from .models.base import (
    Model,
    as_params,
    fd_hessian_from_gradient,
    fd_hessian_from_values,
    gradient,
    log_unnormalized_posterior,
)


@dataclass(frozen=True)
class ModeOptions:
    max_iter: int = 500
    initial_radius: float = 1.0
    shrink: float = 0.25
    grow: float = 2.0
    accept_ratio: float = 0.1
    grad_tol: float = 1e-6  # relative to max(1, |log density|)
    multistart: tuple = ()  # extra starting points; best mode wins


@dataclass(frozen=True)
class ModeResult:
    theta: np.ndarray  # the mode, unconstrained scale
    log_density: float  # log D at the mode
    hessian: np.ndarray  # d x d, symmetric, negative definite
    converged: bool
    gradient_norm: float  # sup norm at the mode
    iterations: int


def hessian_at(model: Model, theta) -> np.ndarray:
    """Symmetric Hessian of log D: analytic if provided, else central differences."""
    theta = as_params(theta, model.dimension)
    H = model.hessian_analytic(theta)
    if H is None:
        if model.gradient_analytic(theta) is not None:
            H = fd_hessian_from_gradient(model, theta)
        else:
            H = fd_hessian_from_values(model, theta)
    H = np.asarray(H, dtype=float)
    H = 0.5 * (H + H.T)
    bad = np.argwhere(~np.isfinite(H))
    if bad.size:
        raise ValueError(f"hessian non-finite at entries {bad.tolist()[:5]}")
    return H


def _dogleg_step(g: np.ndarray, B: np.ndarray, radius: float) -> tuple[np.ndarray, float]:
    """Approximately minimize g'p + p'Bp/2 subject to ||p|| <= radius.

    Indefinite B is shifted to B + tau I just past its most negative
    eigenvalue, so the subproblem model is always convex. Returns the step
    and the model decrease predicted by the (possibly shifted) model.
    """
    try:
        cho = cho_factor(B, lower=True)
    except LinAlgError:
        lam_min = float(np.linalg.eigvalsh(B)[0])
        shift = -lam_min + max(1e-8, 1e-6 * abs(lam_min))
        while True:
            B = B + shift * np.eye(B.shape[0])
            try:
                cho = cho_factor(B, lower=True)
                break
            except LinAlgError:
                shift *= 10.0

    def model_decrease(p: np.ndarray) -> float:
        return -(float(g @ p) + 0.5 * float(p @ (B @ p)))

    newton = -cho_solve(cho, g)
    if float(np.linalg.norm(newton)) <= radius:
        return newton, model_decrease(newton)
    gnorm = float(np.linalg.norm(g))
    curvature = float(g @ B @ g)
    steepest = -(gnorm * gnorm / curvature) * g
    snorm = float(np.linalg.norm(steepest))
    if snorm >= radius:
        p = -(radius / gnorm) * g
        return p, model_decrease(p)
    diff = newton - steepest
    a = float(diff @ diff)
    b = 2.0 * float(steepest @ diff)
    c = snorm * snorm - radius * radius
    tau = (-b + np.sqrt(b * b - 4.0 * a * c)) / (2.0 * a)
    p = steepest + tau * diff
    return p, model_decrease(p)


def _search(model: Model, init: np.ndarray, opts: ModeOptions):
    """One trust-region run. Returns (x, log density, grad sup-norm, iters, converged)."""
    x = init.copy()
    fx = log_unnormalized_posterior(model, x)
    if not np.isfinite(fx):
        raise ValueError("log density is not finite at the starting point")
    radius = opts.initial_radius
    g = gradient(model, x)
    gnorm = float(np.max(np.abs(g)))
    for iteration in range(opts.max_iter):
        if gnorm <= opts.grad_tol * max(1.0, abs(fx)):
            return x, fx, gnorm, iteration, True
        H = hessian_at(model, x)
        # retry with shrinking radius without recomputing derivatives at x
        while radius >= 1e-14:
            step, predicted = _dogleg_step(-g, -H, radius)
            step_norm = float(np.linalg.norm(step))
            f_new = log_unnormalized_posterior(model, x + step)
            actual = f_new - fx
            ratio = actual / predicted if (np.isfinite(f_new) and predicted > 0.0) else -np.inf
            if ratio < 0.25:
                radius *= opts.shrink
            elif ratio > 0.75 and step_norm >= 0.99 * radius:
                radius *= opts.grow
            if ratio > opts.accept_ratio:
                x = x + step
                fx = f_new
                g = gradient(model, x)
                gnorm = float(np.max(np.abs(g)))
                break
        else:
            break  # radius collapsed without an acceptable step
    else:
        return x, fx, gnorm, opts.max_iter, gnorm <= opts.grad_tol * max(1.0, abs(fx))
    return x, fx, gnorm, iteration + 1, gnorm <= opts.grad_tol * max(1.0, abs(fx))


def find_mode(model: Model, init, opts: ModeOptions | None = None) -> ModeResult:
    """Locate the posterior mode and the Hessian there.

    Raises ModeFindingError (carrying the best point seen) when the
    iteration cap is hit, and when the terminal Hessian is not negative
    definite (saddle point or flat region).
    """
    opts = opts or ModeOptions()
    starts = [as_params(init, model.dimension)]
    starts += [as_params(s, model.dimension) for s in opts.multistart]
    with single_threaded_blas():
        return _find_mode_all_starts(model, starts, opts)


def _find_mode_all_starts(model: Model, starts, opts: ModeOptions) -> ModeResult:
    best = None
    failure = None
    for start in starts:
        x, fx, gnorm, iterations, converged = _search(model, start, opts)
        if not converged:
            failure = ModeFindingError(
                f"no convergence within {opts.max_iter} iterations "
                f"(grad sup-norm {gnorm:.3e}, log density {fx:.6g})",
                best_theta=x,
                best_log_density=fx,
            )
            continue
        if best is None or fx > best[1]:
            best = (x, fx, gnorm, iterations)
    if best is None:
        raise failure

    x, fx, gnorm, iterations = best
    H = hessian_at(model, x)
    try:
        cho_factor(-H, lower=True)
    except LinAlgError:
        raise ModeFindingError(
            "hessian at the terminal point is not negative definite (saddle or flat region)",
            best_theta=x,
            best_log_density=fx,
        ) from None
    return ModeResult(
        theta=x,
        log_density=fx,
        hessian=H,
        converged=True,
        gradient_norm=gnorm,
        iterations=iterations,
    )
