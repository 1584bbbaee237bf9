"""Shared test models and statistics utilities."""

from __future__ import annotations

import numpy as np

from gds.models import Block, Model


class GaussianToy(Model):
    """log D = -(theta-center)' P (theta-center)/2 + offset.

    Exact quadratic target: Newton lands in one step, the matched-scale
    proposal reproduces it exactly, and its normalizer is known in closed
    form. ``expose_derivatives=False`` hides the analytic gradient/Hessian
    to exercise the finite-difference paths.
    """

    def __init__(self, center, precision=None, offset=0.0, expose_derivatives=True):
        self.center = np.asarray(center, dtype=float)
        d = self.center.shape[0]
        self.precision = np.eye(d) if precision is None else np.asarray(precision, dtype=float)
        self.offset = float(offset)
        self.dimension = d
        self.blocks = (Block("theta", "identity", d),)
        self._expose = expose_derivatives

    def log_density(self, theta):
        dev = theta - self.center
        return self.offset - 0.5 * float(dev @ self.precision @ dev)

    def gradient_analytic(self, theta):
        if not self._expose:
            return None
        return -self.precision @ (theta - self.center)

    def hessian_analytic(self, theta):
        if not self._expose:
            return None
        return -self.precision.copy()

    def log_normalizer(self):
        """log of the integral of exp(log_density) over R^d."""
        d = self.dimension
        sign, logdet = np.linalg.slogdet(self.precision)
        return self.offset + 0.5 * d * np.log(2.0 * np.pi) - 0.5 * logdet


class NormalNormal1D(Model):
    """One observation y ~ N(theta, obs_var), prior theta ~ N(0, prior_var)."""

    dimension = 1
    blocks = (Block("theta", "identity", 1),)

    def __init__(self, y=0.7, obs_var=1.0, prior_var=4.0):
        self.y = float(y)
        self.obs_var = float(obs_var)
        self.prior_var = float(prior_var)

    def log_density(self, theta):
        t = float(theta[0])
        return (
            -0.5 * np.log(2.0 * np.pi * self.obs_var)
            - (self.y - t) ** 2 / (2.0 * self.obs_var)
            - 0.5 * np.log(2.0 * np.pi * self.prior_var)
            - t * t / (2.0 * self.prior_var)
        )

    def gradient_analytic(self, theta):
        t = float(theta[0])
        return np.array([(self.y - t) / self.obs_var - t / self.prior_var])

    def hessian_analytic(self, theta):
        return np.array([[-1.0 / self.obs_var - 1.0 / self.prior_var]])

    def posterior(self):
        """(mean, variance) of the exact posterior."""
        precision = 1.0 / self.obs_var + 1.0 / self.prior_var
        var = 1.0 / precision
        return var * self.y / self.obs_var, var


class SaddleModel(Model):
    """log D = (x^2 - y^2)/2: stationary at the origin but not a maximum."""

    dimension = 2
    blocks = (Block("theta", "identity", 2),)

    def log_density(self, theta):
        return 0.5 * (theta[0] ** 2 - theta[1] ** 2)

    def gradient_analytic(self, theta):
        return np.array([theta[0], -theta[1]])

    def hessian_analytic(self, theta):
        return np.diag([1.0, -1.0])


class WalledGaussian(Model):
    """Standard normal bowl that underflows to -inf outside a ball."""

    def __init__(self, d=2, wall_radius=8.0):
        self.dimension = d
        self.blocks = (Block("theta", "identity", d),)
        self.wall_radius = float(wall_radius)

    def log_density(self, theta):
        if float(np.linalg.norm(theta)) > self.wall_radius:
            return -np.inf
        return -0.5 * float(theta @ theta)


def ks_distance(samples, cdf) -> float:
    """Exact Kolmogorov-Smirnov sup distance between samples and a CDF callable."""
    s = np.sort(np.asarray(samples, dtype=float))
    n = s.shape[0]
    F = np.asarray(cdf(s), dtype=float)
    i = np.arange(1, n + 1)
    return float(max(np.max(np.abs(i / n - F)), np.max(np.abs((i - 1) / n - F))))


def grid_cdf(grid, density):
    """Normalized CDF on a uniform grid; returns a callable for ks_distance."""
    c = np.cumsum(np.asarray(density, dtype=float))
    c /= c[-1]
    return lambda x: np.interp(x, grid, c)


def piecewise_threshold_cdf(table):
    """Closed-form CDF of the threshold sampler for a given table."""
    v = table.v
    w = table.weights
    cdf_base = np.concatenate([[0.0], np.cumsum(w)])
    total = cdf_base[-1]

    def cdf(x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.empty_like(x)
        for j, xv in enumerate(x):
            if xv <= v[0]:
                out[j] = 0.0
                continue
            i = int(np.searchsorted(v, xv, side="right")) - 1
            if i >= table.M - 1:
                i = table.M - 1
                seg = 1.0 - np.exp(-(xv - v[i]))
            else:
                gap = v[i + 1] - v[i]
                seg = (1.0 - np.exp(-(xv - v[i]))) / (1.0 - np.exp(-gap))
                seg = min(seg, 1.0)
            out[j] = (cdf_base[i] + w[i] * seg) / total
        return out

    return cdf
