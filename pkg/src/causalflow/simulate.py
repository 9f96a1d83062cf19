"""Sample-path generation and ensemble covariance estimation.

Paths start from the stationary law (no transients) unless stationary
initialization is turned off, in which case a burn-in from zero is used.
Each ensemble member draws from its own spawned child of the master seed, so
members are independent streams and the ensemble is reproducible in parallel.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InsufficientData
from .model import (
    ARProcessSpec,
    GaussianJointModel,
    TimeSeriesPanel,
    stationary_covariance,
)


@dataclass(frozen=True)
class SimulationConfig:
    path_length: int
    ensemble_size: int = 1
    seed: int = 0
    burn_in: int = 0
    stationary_init: bool = True

    def __post_init__(self):
        if self.path_length < 2:
            raise ValueError(f"path_length must be >= 2, got {self.path_length}")
        if self.ensemble_size < 1:
            raise ValueError(f"ensemble_size must be >= 1, got {self.ensemble_size}")
        if self.burn_in < 0:
            raise ValueError(f"burn_in must be >= 0, got {self.burn_in}")


def simulate(spec: ARProcessSpec, config: SimulationConfig) -> list[TimeSeriesPanel]:
    """Generate an ensemble of panels from the AR recursion.

    Innovations are drawn per member from independent child streams of the
    master seed; the time recursion itself is vectorized across the ensemble.
    Deterministic: the same (spec, config) always yields the same panels.
    """
    spec.require_stationary()
    n = config.path_length
    d = spec.dimension
    R = config.ensemble_size
    C = spec.coupling
    L_noise = np.linalg.cholesky(spec.noise_cov)
    steps = n if config.stationary_init else n + config.burn_in

    children = np.random.SeedSequence(config.seed).spawn(R)
    draws = np.empty((R, steps, d))
    for r, child in enumerate(children):
        draws[r] = np.random.default_rng(child).standard_normal((steps, d))

    paths = np.empty((R, steps, d))
    if config.stationary_init:
        L_init = np.linalg.cholesky(stationary_covariance(spec))
        paths[:, 0, :] = draws[:, 0, :] @ L_init.T
    else:
        paths[:, 0, :] = draws[:, 0, :] @ L_noise.T
    for t in range(1, steps):
        paths[:, t, :] = paths[:, t - 1, :] @ C.T + draws[:, t, :] @ L_noise.T
    if not config.stationary_init and config.burn_in:
        paths = paths[:, config.burn_in:, :]

    return [TimeSeriesPanel(spec.channel_names, paths[r]) for r in range(R)]


def estimate_window_covariance(panels: Sequence[TimeSeriesPanel],
                               horizon: int) -> GaussianJointModel:
    """Pooled sample covariance over all length-``horizon`` windows.

    Windows overlap, which trades independence for sample efficiency; the
    overlap is recorded in the model metadata so downstream consumers know the
    nominal standard errors are optimistic.  Variables are laid out time-major,
    matching the analytic window builder, and the pooled per-coordinate mean is
    removed.
    """
    if not panels:
        raise InsufficientData("no panels given")
    channels = panels[0].channels
    d = len(channels)
    for p in panels:
        if p.channels != channels:
            raise InsufficientData("panels disagree on channel names")
    m = int(horizon)
    if m < 1:
        raise ValueError(f"horizon must be >= 1, got {m}")
    short = min(p.sample_count for p in panels)
    if short < m:
        raise InsufficientData(f"panel of length {short} shorter than window {m}")
    dim = m * d
    total_windows = sum(p.sample_count - m + 1 for p in panels)
    if total_windows < 10 * dim:
        raise InsufficientData(
            f"{total_windows} windows for {dim} variables; need at least {10 * dim}")

    second = np.zeros((dim, dim))
    first = np.zeros(dim)
    count = 0
    for p in panels:
        # (w, m, d) stack of windows, flattened time-major to (w, m*d)
        wins = np.lib.stride_tricks.sliding_window_view(p.data, m, axis=0)
        flat = wins.transpose(0, 2, 1).reshape(-1, dim)
        second += flat.T @ flat
        first += flat.sum(axis=0)
        count += flat.shape[0]
    mean = first / count
    cov = second / count - np.outer(mean, mean)
    cov = 0.5 * (cov + cov.T)
    variables = tuple((c, t) for t in range(1, m + 1) for c in channels)
    meta = {"source": "window_estimate", "windows": count,
            "overlapping": True, "panels": len(panels), "mean_centered": True}
    return GaussianJointModel(variables, cov, meta=meta)
