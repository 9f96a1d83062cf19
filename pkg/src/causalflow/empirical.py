"""Prediction-error variances and information rates from recorded data.

Everything here rests on one primitive: the pooled residual variance of an
ordinary least-squares regression of a target sample on lagged channel
columns.  Rate estimates are half the log ratio of two such variances fitted
on a shared row window, which is the finite-lag counterpart of the exact
Gaussian conditioning used on the analytic path.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import InsufficientData, SingularCovariance
from .model import RATE, ARProcessSpec, MeasureReport, TimeSeriesPanel
from .simulate import SimulationConfig, simulate

# (channel index, lag) pairs; lag 0 is the present sample, negative lags reach
# into the future (used only by full-record conditioning).
PredictorSet = list[tuple[int, int]]


def _center(panels: Sequence[TimeSeriesPanel]) -> list[np.ndarray]:
    total = np.zeros(panels[0].data.shape[1])
    count = 0
    for p in panels:
        total += p.data.sum(axis=0)
        count += p.sample_count
    mean = total / count
    return [p.data - mean for p in panels]


def _row_window(n: int, predictors: PredictorSet) -> tuple[int, int]:
    """0-based [t_lo, t_hi] target rows such that every lagged column exists."""
    max_past = max([lag for _, lag in predictors if lag > 0], default=0)
    max_future = max([-lag for _, lag in predictors if lag < 0], default=0)
    return max_past, n - 1 - max_future


def _design(data: np.ndarray, target: int, predictors: PredictorSet,
            t_lo: int, t_hi: int) -> tuple[np.ndarray, np.ndarray]:
    rows = t_hi - t_lo + 1
    X = np.empty((rows, len(predictors)))
    for j, (ch, lag) in enumerate(predictors):
        X[:, j] = data[t_lo - lag:t_hi - lag + 1, ch]
    return X, data[t_lo:t_hi + 1, target]


def paired_prediction_variances(panels: Sequence[TimeSeriesPanel], target: str,
                                restricted: PredictorSet,
                                full: PredictorSet) -> tuple[float, float]:
    """Residual variances of the restricted and full regressions on the shared
    row window, pooled over all panels (zero-mean fit after pooled centering)."""
    tgt = panels[0].channel_index(target)
    window_preds = restricted + full
    centered = _center(panels)
    p_r, p_f = len(restricted), len(full)
    G_r = np.zeros((p_r, p_r))
    c_r = np.zeros(p_r)
    G_f = np.zeros((p_f, p_f))
    c_f = np.zeros(p_f)
    yty = 0.0
    rows = 0
    for data in centered:
        t_lo, t_hi = _row_window(data.shape[0], window_preds)
        if t_hi < t_lo:
            raise InsufficientData(
                f"panel of length {data.shape[0]} too short for the lag structure")
        Xf, y = _design(data, tgt, full, t_lo, t_hi)
        Xr, _ = _design(data, tgt, restricted, t_lo, t_hi)
        G_f += Xf.T @ Xf
        c_f += Xf.T @ y
        G_r += Xr.T @ Xr
        c_r += Xr.T @ y
        yty += float(y @ y)
        rows += len(y)

    def _residual_var(G, c, p):
        if rows <= p:
            raise InsufficientData(f"{rows} rows for {p} regressors")
        if p == 0:
            return yty / rows
        try:
            beta = np.linalg.solve(G, c)
        except np.linalg.LinAlgError:
            raise SingularCovariance("collinear regression design") from None
        rss = yty - float(c @ beta)
        var = rss / (rows - p)
        if var <= 0.0:
            raise SingularCovariance(f"nonpositive residual variance {var:.3g}")
        return var

    return _residual_var(G_r, c_r, p_r), _residual_var(G_f, c_f, p_f)


def _cond_predictors(panel: TimeSeriesPanel, cond: Sequence[tuple[str, str]],
                     lag: int) -> PredictorSet:
    preds: PredictorSet = []
    for channel, mode in cond:
        ch = panel.channel_index(channel)
        if mode == "full":
            preds.extend((ch, k) for k in range(-lag, lag + 1))
        elif mode == "causal":
            preds.extend((ch, k) for k in range(0, lag + 1))
        elif mode == "delayed":
            preds.extend((ch, k) for k in range(1, lag + 1))
        else:
            raise ValueError(f"unknown conditioning mode {mode!r}")
    return preds


def empirical_rate_value(panels: Sequence[TimeSeriesPanel], kind: str,
                         source: str, target: str,
                         cond: Sequence[tuple[str, str]] = (),
                         lag: int = 5) -> float:
    """Finite-lag estimate of an information rate from data, in nats.

    kind "di":         target on own past  vs  own past + source record up to now
    kind "delayed_di": target on own past  vs  own past + source past
    kind "iie":        both pasts          vs  both pasts + source present
    """
    panel = panels[0]
    s = panel.channel_index(source)
    t = panel.channel_index(target)
    own = [(t, k) for k in range(1, lag + 1)]
    src_past = [(s, k) for k in range(1, lag + 1)]
    z = _cond_predictors(panel, cond, lag)
    if kind == "di":
        restricted = own + z
        full = own + src_past + [(s, 0)] + z
    elif kind == "delayed_di":
        restricted = own + z
        full = own + src_past + z
    elif kind == "iie":
        restricted = own + src_past + z
        full = own + src_past + [(s, 0)] + z
    else:
        raise ValueError(f"unknown rate kind {kind!r}")
    var_r, var_f = paired_prediction_variances(panels, target, restricted, full)
    return 0.5 * float(np.log(var_r / var_f))


_REPORT_KIND = {"di": "DI", "delayed_di": "DI", "iie": "IIE"}


def empirical_rate(panels: Sequence[TimeSeriesPanel], kind: str, source: str,
                   target: str, cond: Sequence[tuple[str, str]] = (),
                   lag: int = 5, method: str = "empirical") -> MeasureReport:
    """Rate estimate wrapped in a report; see :func:`empirical_rate_value`."""
    cond = tuple((str(c), str(m)) for c, m in cond)
    value = empirical_rate_value(panels, kind, source, target, cond, lag)
    kind_name = _REPORT_KIND[kind]
    if kind == "delayed_di" and any(m in ("causal", "delayed") for _, m in cond):
        kind_name = "DI_causal_cond"
    config = {"rate_kind": kind, "lag": lag, "panels": len(panels),
              "samples": sum(p.sample_count for p in panels)}
    if kind == "delayed_di":
        config["delayed_source"] = True
    return MeasureReport(kind_name, max(value, 0.0), RATE, source, target,
                         cond, method, config)


def monte_carlo_rate(spec: ARProcessSpec, kind: str, source: str, target: str,
                     cond: Sequence[tuple[str, str]] = (), lag: int = 5,
                     config: SimulationConfig | None = None) -> MeasureReport:
    """Simulate an ensemble from the spec and estimate the rate from it."""
    config = config or SimulationConfig(path_length=512, ensemble_size=100, seed=0)
    panels = simulate(spec, config)
    report = empirical_rate(panels, kind, source, target, cond, lag,
                            method="monte_carlo")
    merged = dict(report.config)
    merged.update({"seed": config.seed, "ensemble_size": config.ensemble_size,
                   "path_length": config.path_length})
    return MeasureReport(report.measure_kind, report.value_nats, report.horizon,
                         report.source, report.target, report.conditioning,
                         report.method, merged)


def geweke_prediction_variances(panel: TimeSeriesPanel, kind: str, source: str,
                                target: str, cond: Sequence[str], cond_mode: str,
                                lag: int) -> tuple[float, float]:
    """Numerator and denominator variances for the empirical Geweke indices."""
    s = panel.channel_index(source)
    t = panel.channel_index(target)
    mode = "delayed" if cond_mode == "causal" else "full"
    z = _cond_predictors(panel, [(c, mode) for c in cond], lag)
    own = [(t, k) for k in range(1, lag + 1)]
    src_past = [(s, k) for k in range(1, lag + 1)]
    if kind == "FWD":
        restricted = own + z
        full = own + src_past + z
    else:
        restricted = own + src_past + z
        full = own + src_past + [(s, 0)] + z
    return paired_prediction_variances([panel], target, restricted, full)
