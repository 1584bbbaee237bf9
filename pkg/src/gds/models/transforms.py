"""Block transforms between constrained parameters and the unconstrained real line.

Three block kinds are supported:

- ``identity``: unconstrained coordinates used as-is.
- ``log``: positive scalars/vectors stored as their logs.
- ``log_cholesky``: a k x k covariance matrix stored as the k(k+1)/2
  lower-triangle entries of its Cholesky factor, with the diagonal on the
  log scale. Entries are ordered row-major over the lower triangle,
  i.e. (0,0), (1,0), (1,1), (2,0), ...

Jacobian terms returned here are log|d(constrained)/d(unconstrained)| and
belong inside a model's unnormalized log posterior whenever the prior is
expressed on the constrained scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Block:
    """One contiguous slice of the unconstrained parameter vector."""

    name: str
    kind: str  # "identity" | "log" | "log_cholesky"
    size: int  # unconstrained coordinate count
    dim: int = 0  # matrix order k for log_cholesky blocks

    def __post_init__(self):
        if self.kind not in ("identity", "log", "log_cholesky"):
            raise ValueError(f"unknown transform kind {self.kind!r}")
        if self.kind == "log_cholesky":
            expected = self.dim * (self.dim + 1) // 2
            if self.size != expected:
                raise ValueError(
                    f"log_cholesky block {self.name!r}: size {self.size} != k(k+1)/2 = {expected}"
                )


def chol_from_unconstrained(x: np.ndarray, k: int) -> np.ndarray:
    """Lower-triangular factor L with positive diagonal from packed entries."""
    L = np.zeros((k, k))
    rows, cols = np.tril_indices(k)
    L[rows, cols] = x
    idx = np.arange(k)
    L[idx, idx] = np.exp(x[_diag_positions(k)])
    return L


def unconstrained_from_chol(L: np.ndarray) -> np.ndarray:
    k = L.shape[0]
    rows, cols = np.tril_indices(k)
    x = L[rows, cols].copy()
    x[_diag_positions(k)] = np.log(np.diag(L))
    return x


def _diag_positions(k: int) -> np.ndarray:
    """Positions of diagonal entries within the packed lower triangle."""
    rows, cols = np.tril_indices(k)
    return np.flatnonzero(rows == cols)


def log_chol_jacobian(log_diag: np.ndarray) -> float:
    """log-Jacobian of unconstrained -> covariance, Omega = L L'.

    The map L -> L L' has Jacobian 2^k prod L_ii^(k-i+1); the exp link on
    the diagonal contributes another prod L_ii, so the i-th diagonal entry
    (1-based) carries exponent k - i + 2.
    """
    k = log_diag.shape[0]
    powers = k - np.arange(1, k + 1) + 2
    return k * np.log(2.0) + float(powers @ log_diag)


def block_to_constrained(block: Block, x: np.ndarray):
    """Constrained value of one block: array for identity/log, matrix for log_cholesky."""
    if block.kind == "identity":
        return x.copy()
    if block.kind == "log":
        return np.exp(x)
    L = chol_from_unconstrained(x, block.dim)
    return L @ L.T


def block_from_constrained(block: Block, value) -> np.ndarray:
    if block.kind == "identity":
        return np.asarray(value, dtype=float).ravel().copy()
    if block.kind == "log":
        return np.log(np.asarray(value, dtype=float).ravel())
    L = np.linalg.cholesky(np.asarray(value, dtype=float))
    return unconstrained_from_chol(L)


def block_constrained_flat(block: Block, x: np.ndarray) -> np.ndarray:
    """Constrained block flattened to the same length as its unconstrained slice."""
    if block.kind == "log_cholesky":
        omega = block_to_constrained(block, x)
        rows, cols = np.tril_indices(block.dim)
        return omega[rows, cols]
    return block_to_constrained(block, x)
