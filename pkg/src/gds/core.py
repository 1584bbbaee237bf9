"""Threshold construction and the parallel accept-reject phase.

The pipeline: draw an M-sized pool from the proposal, transform the density
ratios to v = -log_phi, build the empirical threshold distribution (a
piecewise density q_M(v) e^{-v} over the segments between sorted pool
values), draw one threshold per requested posterior draw, then accept-reject
independently per threshold. Draw i uses the RNG substream derived from
(seed, i), and thresholds are assigned by index before dispatch, so results
are bit-identical for any worker count.
"""

from __future__ import annotations

import multiprocessing
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from ._threads import limit_blas_in_worker, single_threaded_blas
from .errors import AttemptLimitError, DominanceError, RetuneError
from .modefind import ModeOptions, ModeResult, find_mode
from .models.base import Model, log_unnormalized_posterior
from .proposal import DOMINANCE_TOL, LADDER_FACTOR, Proposal, build_proposal, sample_batch, sample_proposal, tune_scale

_TIE_JITTER = 1e-12

# substream labels under the run seed
_STREAM_TUNE = 1
_STREAM_POOL = 2
_STREAM_THRESHOLDS = 3
_STREAM_DRAW = 4


def substream(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, *key]))


@dataclass(frozen=True)
class ThresholdTable:
    """Sorted pool values v_1 < ... < v_M with segment weights.

    weights[i-1] = (i/M) * (exp(-v_i) - exp(-v_{i+1})), v_{M+1} = +inf, so the
    last weight is exp(-v_M). The segment below v_1 has weight zero and is
    never sampled.
    """

    v: np.ndarray
    weights: np.ndarray
    dropped: int = 0  # +inf entries removed (zero-density proposals)

    @property
    def M(self) -> int:
        return self.v.shape[0]

    @property
    def total_weight(self) -> float:
        return float(np.sum(self.weights))


@dataclass(frozen=True)
class PosteriorDraw:
    theta: np.ndarray
    threshold: float
    attempts: int


@dataclass(frozen=True)
class GdsConfig:
    M: int
    N: int
    seed: int
    scale: float | None = None  # fixed proposal scale; tuned from s0 when None
    s0: float = 1.0
    pilot: int = 100
    margin_rungs: int = 1  # ladder rungs added above the minimal valid scale
    workers: int = 1
    max_attempts: int = 10_000_000
    init: np.ndarray | None = None  # mode search start, defaults to the origin
    mode_options: ModeOptions = field(default_factory=ModeOptions)

    def validate(self) -> None:
        if self.M < 100:
            raise ValueError("M must be at least 100")
        if self.N < 1:
            raise ValueError("N must be at least 1")
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        if self.scale is not None and self.scale <= 0.0:
            raise ValueError("scale must be positive when fixed")
        if self.scale is None and self.s0 <= 0.0:
            raise ValueError("s0 must be positive")
        if self.pilot < 100:
            raise ValueError("pilot must be at least 100")
        if self.margin_rungs < 0:
            raise ValueError("margin_rungs must be non-negative")


@dataclass(frozen=True)
class GdsRunResult:
    draws: tuple[PosteriorDraw, ...]
    table: ThresholdTable
    mode: ModeResult
    proposal: Proposal
    scale: float
    total_attempts: int
    seed: int
    tuned: bool
    timings: dict

    @property
    def N(self) -> int:
        return len(self.draws)

    @property
    def acceptance_rate(self) -> float:
        return self.N / self.total_attempts

    @property
    def attempts(self) -> np.ndarray:
        return np.array([d.attempts for d in self.draws], dtype=np.int64)

    def thetas(self) -> np.ndarray:
        return np.vstack([d.theta for d in self.draws])


def build_threshold_table(v_unsorted) -> ThresholdTable:
    """Sorted thresholds and segment weights from raw pool v values."""
    v = np.asarray(v_unsorted, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("expected a non-empty 1-d vector of v values")
    if np.any(np.isnan(v)):
        raise ValueError("v values contain NaN")
    if np.any(v < -DOMINANCE_TOL):
        raise DominanceError(
            f"proposal does not dominate: min v = {float(np.min(v)):.3e} < -{DOMINANCE_TOL}"
        )
    dropped = int(np.sum(np.isposinf(v)))
    if dropped:
        warnings.warn(f"dropping {dropped} zero-density proposal draws from the threshold table")
        v = v[~np.isposinf(v)]
        if v.size == 0:
            raise ValueError("all pool draws had zero posterior density")
    v = np.sort(np.clip(v, 0.0, None))
    # rank jitter keeps segments well-defined when Phi saturates (exact ties)
    v = v + _TIE_JITTER * np.arange(v.shape[0])
    M = v.shape[0]
    decay = np.exp(-v)
    upper = np.append(decay[1:], 0.0)
    weights = (np.arange(1, M + 1) / M) * (decay - upper)
    return ThresholdTable(v=v, weights=weights, dropped=dropped)


def sample_threshold(table: ThresholdTable, rng: np.random.Generator) -> float:
    """One threshold: multinomial segment choice, then a truncated exponential."""
    cum = np.cumsum(table.weights)
    idx = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
    idx = min(idx, table.M - 1)
    eta = rng.random()
    if idx == table.M - 1:
        eps = -np.log1p(-eta)
    else:
        gap = table.v[idx + 1] - table.v[idx]
        eps = -np.log1p(-eta * (1.0 - np.exp(-gap)))
    return float(table.v[idx] + eps)


def sample_thresholds(table: ThresholdTable, rng: np.random.Generator, size: int) -> np.ndarray:
    """Vectorized threshold draws (segment uniforms first, then truncation uniforms)."""
    cum = np.cumsum(table.weights)
    idx = np.searchsorted(cum, rng.random(size) * cum[-1], side="right")
    idx = np.minimum(idx, table.M - 1)
    eta = rng.random(size)
    last = idx == table.M - 1
    gaps = np.zeros(size)
    interior = ~last
    gaps[interior] = table.v[idx[interior] + 1] - table.v[idx[interior]]
    eps = np.where(last, -np.log1p(-eta), -np.log1p(-eta * (1.0 - np.exp(-gaps))))
    return table.v[idx] + eps


def accept_reject(
    model: Model,
    mode: ModeResult,
    prop: Proposal,
    threshold: float,
    rng: np.random.Generator,
    max_attempts: int = 10_000_000,
) -> PosteriorDraw:
    """Draw from the proposal until v(theta) < threshold."""
    if not threshold > 0.0:
        raise ValueError("threshold must be positive")
    attempts = 0
    while attempts < max_attempts:
        attempts += 1
        sample = sample_proposal(prop, rng)
        log_d = log_unnormalized_posterior(model, sample.theta)
        lphi = (log_d - mode.log_density) - (sample.log_g - prop.log_mode_density)
        if lphi > DOMINANCE_TOL:
            raise DominanceError(
                f"proposal draw with log_phi = {lphi:.3e} > 0 during accept-reject; "
                "dominance violated, re-tune the scale"
            )
        if -lphi < threshold:
            return PosteriorDraw(theta=sample.theta, threshold=float(threshold), attempts=attempts)
    raise AttemptLimitError(
        f"no acceptance within {max_attempts} attempts at threshold {threshold:.6g} "
        "(proposal far too diffuse or corrupted table)",
        threshold=float(threshold),
        attempts=attempts,
    )


_WORKER_STATE: tuple | None = None


def _init_worker(model, mode, prop, max_attempts):
    global _WORKER_STATE
    limit_blas_in_worker()
    _WORKER_STATE = (model, mode, prop, max_attempts)


def _worker_draw(task):
    index, threshold, seed = task
    model, mode, prop, max_attempts = _WORKER_STATE
    rng = substream(seed, _STREAM_DRAW, index)
    draw = accept_reject(model, mode, prop, threshold, rng, max_attempts)
    return index, draw


def _pool_log_phi(model: Model, mode: ModeResult, prop: Proposal, thetas: np.ndarray) -> np.ndarray:
    """log_phi for a pool matrix; the proposal part is vectorized."""
    w = solve_triangular(prop.chol, (thetas - prop.mean).T, lower=True, check_finite=False)
    log_g_centered = -0.5 * np.sum(w * w, axis=0)
    log_d = np.array([log_unnormalized_posterior(model, theta) for theta in thetas])
    return (log_d - mode.log_density) - log_g_centered


def run_gds(model: Model, config: GdsConfig) -> GdsRunResult:
    """Full pipeline: mode, scale, pool, thresholds, parallel accept-reject."""
    with single_threaded_blas():
        return _run_gds(model, config)


def _run_gds(model: Model, config: GdsConfig) -> GdsRunResult:
    config.validate()
    timings: dict[str, float] = {}

    t0 = time.perf_counter()
    init = np.zeros(model.dimension) if config.init is None else np.asarray(config.init, dtype=float)
    mode = find_mode(model, init, config.mode_options)
    timings["mode"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    tuned = config.scale is None
    if tuned:
        rng_tune = substream(config.seed, _STREAM_TUNE)
        scale = tune_scale(model, mode, config.s0, config.pilot, rng_tune)
        if config.pilot < config.M:
            # second pass at full pool size so the main validity check rarely trips
            scale = tune_scale(model, mode, scale, config.M, rng_tune)
        # the accept-reject phase samples far more than M draws, each checked
        # for dominance; slack above the minimal valid rung keeps the
        # violation rate there negligible
        scale *= LADDER_FACTOR**config.margin_rungs
    else:
        scale = float(config.scale)
    prop = build_proposal(mode, scale)
    timings["tune"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    pool = sample_batch(prop, substream(config.seed, _STREAM_POOL), config.M)
    lphi = _pool_log_phi(model, mode, prop, pool)
    if np.any(lphi > DOMINANCE_TOL):
        raise RetuneError(
            f"{int(np.sum(lphi > DOMINANCE_TOL))} of {config.M} pool draws have Phi > 1 "
            f"(max log_phi = {float(np.max(lphi)):.3e}); re-tune the scale"
        )
    timings["proposals"] = time.perf_counter() - t0

    table = build_threshold_table(-lphi)
    thresholds = sample_thresholds(table, substream(config.seed, _STREAM_THRESHOLDS), config.N)

    t0 = time.perf_counter()
    tasks = [(i, float(thresholds[i]), config.seed) for i in range(config.N)]
    draws: list[PosteriorDraw | None] = [None] * config.N
    if config.workers == 1:
        for task in tasks:
            index, draw = _worker_draw_serial(model, mode, prop, config.max_attempts, task)
            draws[index] = draw
    else:
        ctx = multiprocessing.get_context("fork") if "fork" in multiprocessing.get_all_start_methods() else None
        with ProcessPoolExecutor(
            max_workers=config.workers,
            mp_context=ctx,
            initializer=_init_worker,
            initargs=(model, mode, prop, config.max_attempts),
        ) as executor:
            for index, draw in executor.map(_worker_draw, tasks, chunksize=1):
                draws[index] = draw
    timings["accept_reject"] = time.perf_counter() - t0
    timings["total"] = sum(timings.values())

    return GdsRunResult(
        draws=tuple(draws),
        table=table,
        mode=mode,
        proposal=prop,
        scale=scale,
        total_attempts=int(sum(d.attempts for d in draws)),
        seed=config.seed,
        tuned=tuned,
        timings=timings,
    )


def _worker_draw_serial(model, mode, prop, max_attempts, task):
    index, threshold, seed = task
    rng = substream(seed, _STREAM_DRAW, index)
    return index, accept_reject(model, mode, prop, threshold, rng, max_attempts)
