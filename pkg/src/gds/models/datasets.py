"""Panel dataset container, CSV serialization, and benchmark simulation designs.

File format: UTF-8 CSV with header ``unit_id,t,y,x1,...,xk``, one row per
(unit, t) observation, '.' decimal separator, no quoting.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class Dataset:
    """Long-format panel: row r is observation t[r] of unit unit_ids[r]."""

    unit_ids: np.ndarray  # (rows,) int
    t: np.ndarray  # (rows,) int
    y: np.ndarray  # (rows,) float
    x: np.ndarray  # (rows, k) float

    def __post_init__(self):
        rows = self.y.shape[0]
        if not (self.unit_ids.shape == (rows,) and self.t.shape == (rows,) and self.x.shape[0] == rows):
            raise ValueError("dataset column lengths disagree")

    @property
    def n_rows(self) -> int:
        return self.y.shape[0]

    @property
    def n_covariates(self) -> int:
        return self.x.shape[1]

    @property
    def n_units(self) -> int:
        return np.unique(self.unit_ids).size

    def sorted_by_unit(self) -> "Dataset":
        order = np.lexsort((self.t, self.unit_ids))
        return Dataset(self.unit_ids[order], self.t[order], self.y[order], self.x[order])


def save_dataset(dataset: Dataset, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    k = dataset.n_covariates
    header = "unit_id,t,y," + ",".join(f"x{j + 1}" for j in range(k))
    lines = [header]
    for i in range(dataset.n_rows):
        xs = ",".join(repr(float(v)) for v in dataset.x[i])
        lines.append(f"{int(dataset.unit_ids[i])},{int(dataset.t[i])},{repr(float(dataset.y[i]))},{xs}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_dataset(path) -> Dataset:
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        cols = header.split(",")
        if cols[:3] != ["unit_id", "t", "y"] or not all(c.startswith("x") for c in cols[3:]) or len(cols) < 4:
            raise ValueError(f"{path}: expected header unit_id,t,y,x1,...; got {header!r}")
        raw = np.loadtxt(fh, delimiter=",", ndmin=2)
    if raw.shape[1] != len(cols):
        raise ValueError(f"{path}: row width {raw.shape[1]} != header width {len(cols)}")
    return Dataset(
        unit_ids=raw[:, 0].astype(int),
        t=raw[:, 1].astype(int),
        y=raw[:, 2].copy(),
        x=raw[:, 3:].copy(),
    )


def simulate_hier_gauss(n: int, k: int = 4, T: int = 25, seed: int = 0) -> tuple[Dataset, dict]:
    """Hierarchical Gaussian benchmark design.

    n units, each observed T times with a unit-specific covariate vector
    (intercept plus k-1 standard normal draws). Unit coefficients are drawn
    around (5, 0, -2, 0) (truncated/extended to length k) with covariance
    0.25 I; observation noise has variance 1.
    """
    rng = np.random.default_rng(seed)
    beta_bar = np.zeros(k)
    base = [5.0, 0.0, -2.0, 0.0]
    beta_bar[: min(k, 4)] = base[: min(k, 4)]
    xu = np.column_stack([np.ones(n), rng.standard_normal((n, k - 1))])
    beta = beta_bar + 0.5 * rng.standard_normal((n, k))
    mean = np.einsum("ij,ij->i", xu, beta)
    y = mean[:, None] + rng.standard_normal((n, T))
    dataset = Dataset(
        unit_ids=np.repeat(np.arange(n), T),
        t=np.tile(np.arange(T), n),
        y=y.ravel(),
        x=np.repeat(xu, T, axis=0),
    )
    truth = {
        "design": "hier_gauss",
        "n": n,
        "k": k,
        "T": T,
        "seed": seed,
        "beta_bar": beta_bar.tolist(),
        "omega_diag": [0.25] * k,
        "noise_variance": 1.0,
    }
    return dataset, truth


def simulate_lin_reg(n: int, k: int = 5, T: int = 25, seed: int = 0) -> tuple[Dataset, dict]:
    """Conjugate regression benchmark design.

    n is the total observation count, split into n/T units with T replicate
    observations each; every unit has an intercept plus k standard normal
    covariates. True coefficients: intercept 5, the rest linearly spaced on
    [-5, 5]; noise variance 1.
    """
    if n % T != 0:
        raise ValueError(f"n={n} must be a multiple of T={T}")
    units = n // T
    rng = np.random.default_rng(seed)
    beta = np.concatenate([[5.0], np.linspace(-5.0, 5.0, k)])
    xu = np.column_stack([np.ones(units), rng.standard_normal((units, k))])
    mean = xu @ beta
    y = mean[:, None] + rng.standard_normal((units, T))
    dataset = Dataset(
        unit_ids=np.repeat(np.arange(units), T),
        t=np.tile(np.arange(T), units),
        y=y.ravel(),
        x=np.repeat(xu, T, axis=0),
    )
    truth = {
        "design": "lin_reg",
        "n": n,
        "k": k,
        "T": T,
        "seed": seed,
        "beta": beta.tolist(),
        "noise_variance": 1.0,
    }
    return dataset, truth


def save_metadata(meta: dict, path) -> None:
    Path(path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
