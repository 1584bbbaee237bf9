"""Two-parameter robust hierarchical benchmark.

Observation Y = 0 with Cauchy(0,1) error around a latent level X, which sits
N(0, 5) around its own mean Theta, with Theta ~ N(0, 50000); the N(.,v)
second arguments are variances. Both parameters live on the real line, so no
transforms are involved. Gibbs-style samplers mix poorly here: X and Theta
are nearly independent at the mode but strongly coupled in the tails.
"""

from __future__ import annotations

import math

import numpy as np

from .base import Model
from .transforms import Block

_LOG_PI = math.log(math.pi)
_LOG_2PI = math.log(2.0 * math.pi)

_VAR_LEVEL = 5.0
_VAR_MEAN = 50000.0
_Y_OBS = 0.0
# additive constant: Cauchy and the two normal normalizers
_CONST = -_LOG_PI - 0.5 * (_LOG_2PI + math.log(_VAR_LEVEL)) - 0.5 * (_LOG_2PI + math.log(_VAR_MEAN))


class CauchyNormalModel(Model):
    dimension = 2
    blocks = (
        Block("x", "identity", 1),
        Block("theta", "identity", 1),
    )

    def log_density(self, theta: np.ndarray) -> float:
        x = float(theta[0])
        m = float(theta[1])
        r = _Y_OBS - x
        dev = x - m
        return (
            _CONST
            - math.log1p(r * r)
            - dev * dev / (2.0 * _VAR_LEVEL)
            - m * m / (2.0 * _VAR_MEAN)
        )

    def gradient_analytic(self, theta: np.ndarray) -> np.ndarray:
        x = float(theta[0])
        m = float(theta[1])
        r = _Y_OBS - x
        dev = x - m
        gx = 2.0 * r / (1.0 + r * r) - dev / _VAR_LEVEL
        gm = dev / _VAR_LEVEL - m / _VAR_MEAN
        return np.array([gx, gm])

    def hessian_analytic(self, theta: np.ndarray) -> np.ndarray:
        x = float(theta[0])
        r = _Y_OBS - x
        q = 1.0 + r * r
        hxx = -2.0 * (1.0 - r * r) / (q * q) - 1.0 / _VAR_LEVEL
        hxm = 1.0 / _VAR_LEVEL
        hmm = -1.0 / _VAR_LEVEL - 1.0 / _VAR_MEAN
        return np.array([[hxx, hxm], [hxm, hmm]])

    def describe(self) -> dict:
        return {
            "name": "cauchy_normal",
            "dimension": 2,
            "observation": _Y_OBS,
            "variances": {"level": _VAR_LEVEL, "mean": _VAR_MEAN},
        }


def make_cauchy_normal() -> CauchyNormalModel:
    return CauchyNormalModel()
