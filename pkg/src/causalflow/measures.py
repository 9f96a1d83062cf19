"""Information measures on stacked Gaussian windows, finite horizon and rate.

Directed information is the running sum of per-step conditional mutual
informations ``I(x^i ; y_i | y^{i-1})``; the delayed variant drops the current
source sample, and the instantaneous exchange conditions on both pasts.  Side
information enters per conditioning mode: the full record, the record up to
the current step, or the record up to the previous step (the delayed series).

Rates are per-step terms evaluated at doubling horizons until a Cauchy stop.
"""

from __future__ import annotations

import math
from enum import Enum
from typing import Callable, Sequence

from .empirical import geweke_prediction_variances
from .engine import conditional_mutual_information, prediction_error
from .errors import InsufficientData, NoConvergence, SingularCovariance
from .model import (
    RATE,
    ARProcessSpec,
    GaussianJointModel,
    MeasureReport,
    TimeSeriesPanel,
    VariableSelector,
    build_window_model,
)

DEFAULT_RATE_TOL = 1e-9
DEFAULT_N_START = 8
DEFAULT_N_MAX = 4096
DEFAULT_LAG = 5

VALUE_FLOOR = -1e-9


class ConditioningMode(str, Enum):
    """How a side-information channel enters the i-th summand."""

    FULL = "full"        # whole record z^n
    CAUSAL = "causal"    # record up to the current step, z^i
    DELAYED = "delayed"  # record up to the previous step, z^{i-1}


Conditioning = Sequence[tuple[str, "ConditioningMode | str"]]


def normalize_conditioning(cond: Conditioning) -> tuple[tuple[str, ConditioningMode], ...]:
    out = []
    for channel, mode in cond:
        out.append((str(channel), ConditioningMode(mode)))
    return tuple(out)


def _cond_selectors(cond: tuple[tuple[str, ConditioningMode], ...],
                    step: int, horizon: int) -> list[VariableSelector]:
    sels = []
    for channel, mode in cond:
        if mode is ConditioningMode.FULL:
            sels.append(VariableSelector.upto(channel, horizon))
        elif mode is ConditioningMode.CAUSAL:
            sels.append(VariableSelector.upto(channel, step))
        else:
            sels.append(VariableSelector.past(channel, step))
    return sels


def _check_pair(model_channels: Sequence[str], source: str, target: str,
                cond: tuple[tuple[str, ConditioningMode], ...]) -> None:
    if source == target:
        raise ValueError(f"source and target must be distinct, got {source!r} twice")
    for channel, _ in cond:
        if channel in (source, target):
            raise ValueError(f"conditioning channel {channel!r} is part of the pair")


def _finalize(value: float) -> float:
    if value < VALUE_FLOOR:
        raise SingularCovariance(
            f"information measure evaluated to {value:.3g} nats; the model is "
            f"too ill-conditioned to trust")
    return max(0.0, value)


def _di_kind(cond: tuple[tuple[str, ConditioningMode], ...]) -> str:
    causal = any(m in (ConditioningMode.CAUSAL, ConditioningMode.DELAYED) for _, m in cond)
    return "DI_causal_cond" if causal else "DI"


def _method_of(model: GaussianJointModel) -> str:
    return "empirical" if model.meta.get("source") == "window_estimate" else "analytic"


def _base_config(model: GaussianJointModel, **extra) -> dict:
    cfg = {k: v for k, v in model.meta.items() if k not in ("source", "horizon")}
    cfg.update(extra)
    return cfg


def _resolve_horizon(model: GaussianJointModel, horizon: int | None) -> int:
    n = model.horizon if horizon is None else int(horizon)
    if n < 1 or n > model.horizon:
        raise ValueError(f"horizon {n} outside the model window 1..{model.horizon}")
    return n


def directed_information(model: GaussianJointModel, source: str, target: str,
                         horizon: int | None = None,
                         cond: Conditioning = ()) -> MeasureReport:
    """Sum over i of ``I(x^i ; y_i | y^{i-1}, side info per mode)``."""
    cond = normalize_conditioning(cond)
    _check_pair(model.channels, source, target, cond)
    n = _resolve_horizon(model, horizon)
    total = 0.0
    for i in range(1, n + 1):
        total += conditional_mutual_information(
            model,
            VariableSelector.upto(source, i),
            VariableSelector.at(target, i),
            [VariableSelector.past(target, i)] + _cond_selectors(cond, i, n),
        )
    return MeasureReport(_di_kind(cond), _finalize(total), n, source, target,
                         tuple((c, m.value) for c, m in cond), _method_of(model),
                         _base_config(model, summands=n))


def delayed_directed_information(model: GaussianJointModel, source: str, target: str,
                                 horizon: int | None = None,
                                 cond: Conditioning = ()) -> MeasureReport:
    """Directed information from the delayed source: the i = 1 summand has an
    empty source block and contributes nothing."""
    cond = normalize_conditioning(cond)
    _check_pair(model.channels, source, target, cond)
    n = _resolve_horizon(model, horizon)
    total = 0.0
    for i in range(2, n + 1):
        total += conditional_mutual_information(
            model,
            VariableSelector.past(source, i),
            VariableSelector.at(target, i),
            [VariableSelector.past(target, i)] + _cond_selectors(cond, i, n),
        )
    return MeasureReport(_di_kind(cond), _finalize(total), n, source, target,
                         tuple((c, m.value) for c, m in cond), _method_of(model),
                         _base_config(model, summands=n, delayed_source=True))


def instantaneous_information_exchange(model: GaussianJointModel, source: str, target: str,
                                       horizon: int | None = None,
                                       cond: Conditioning = ()) -> MeasureReport:
    """Sum over i of ``I(x_i ; y_i | x^{i-1}, y^{i-1}, side info)``; symmetric."""
    cond = normalize_conditioning(cond)
    _check_pair(model.channels, source, target, cond)
    n = _resolve_horizon(model, horizon)
    total = 0.0
    for i in range(1, n + 1):
        total += conditional_mutual_information(
            model,
            VariableSelector.at(source, i),
            VariableSelector.at(target, i),
            [VariableSelector.past(source, i), VariableSelector.past(target, i)]
            + _cond_selectors(cond, i, n),
        )
    return MeasureReport("IIE", _finalize(total), n, source, target,
                         tuple((c, m.value) for c, m in cond), _method_of(model),
                         _base_config(model, summands=n))


def mutual_information_block(model: GaussianJointModel, source: str, target: str,
                             horizon: int | None = None,
                             cond: Conditioning = ()) -> MeasureReport:
    """Block mutual information ``I(x^n ; y^n | side info)``.

    A block MI has no per-step structure, so causal conditioning degenerates to
    conditioning on the whole record; delayed mode uses the record up to n - 1.
    """
    cond = normalize_conditioning(cond)
    _check_pair(model.channels, source, target, cond)
    n = _resolve_horizon(model, horizon)
    sels = []
    for channel, mode in cond:
        upto = n - 1 if mode is ConditioningMode.DELAYED else n
        sels.append(VariableSelector.upto(channel, upto))
    value = conditional_mutual_information(
        model, VariableSelector.upto(source, n), VariableSelector.upto(target, n), sels)
    return MeasureReport("MI", _finalize(value), n, source, target,
                         tuple((c, m.value) for c, m in cond), _method_of(model),
                         _base_config(model))


def transfer_entropy(model: GaussianJointModel, source: str, target: str,
                     k: int, l: int, at_time: int | None = None) -> MeasureReport:
    """Single-step transfer entropy ``I(x_{n-l+1}^{n-1} ; y_n | y_{n-k+1}^{n-1})``.

    ``k`` and ``l`` are the target- and source-past lengths; the source block
    stops at ``n - 1``, so instantaneous coupling never enters.
    """
    _check_pair(model.channels, source, target, ())
    n = _resolve_horizon(model, at_time)
    if not (1 <= k <= n and 1 <= l <= n):
        raise ValueError(f"past lengths must satisfy 1 <= k, l <= {n}, got k={k} l={l}")
    value = conditional_mutual_information(
        model,
        VariableSelector.span(source, n - l + 1, n - 1),
        VariableSelector.at(target, n),
        [VariableSelector.span(target, n - k + 1, n - 1)],
    )
    return MeasureReport("TE", _finalize(value), n, source, target, (), _method_of(model),
                         _base_config(model, target_past=k, source_past=l))


RATE_KINDS = ("di", "delayed_di", "iie")


def _rate_term_fn(kind: str, source: str, target: str,
                  cond: tuple[tuple[str, ConditioningMode], ...]) -> Callable:
    if kind not in RATE_KINDS:
        raise ValueError(f"unknown rate kind {kind!r}; expected one of {RATE_KINDS}")

    def term(model: GaussianJointModel, n: int) -> float:
        extra = _cond_selectors(cond, n, n)
        if kind == "di":
            a = VariableSelector.upto(source, n)
            c = [VariableSelector.past(target, n)] + extra
        elif kind == "delayed_di":
            a = VariableSelector.past(source, n)
            c = [VariableSelector.past(target, n)] + extra
        else:
            a = VariableSelector.at(source, n)
            c = [VariableSelector.past(source, n), VariableSelector.past(target, n)] + extra
        return conditional_mutual_information(model, a, VariableSelector.at(target, n), c)

    return term


def _converge_rate(spec: ARProcessSpec, term_fn: Callable, rate_tol: float,
                   n_start: int, n_max: int) -> tuple[float, int, float]:
    """Evaluate a per-step term at doubling horizons until the increments fall
    below an internal tolerance two decades under ``rate_tol``.

    Returns (value, horizon reached, last increment).
    """
    internal = max(rate_tol * 1e-2, 1e-12)
    n = n_start
    prev = None
    value = None
    delta = float("inf")
    while n <= n_max:
        model = build_window_model(spec, n)
        value = term_fn(model, n)
        if prev is not None:
            delta = abs(value - prev)
            if delta < internal:
                return value, n, delta
        prev = value
        n *= 2
    if delta < rate_tol:
        return value, n // 2, delta
    raise NoConvergence(
        f"per-step term still moving by {delta:.3g} at horizon {n // 2} "
        f"(tolerance {rate_tol:.3g})")


def measure_rate(spec: ARProcessSpec, kind: str, source: str, target: str,
                 cond: Conditioning = (), rate_tol: float = DEFAULT_RATE_TOL,
                 n_start: int = DEFAULT_N_START, n_max: int = DEFAULT_N_MAX) -> MeasureReport:
    """Per-step information rate of ``kind`` in {"di", "delayed_di", "iie"}.

    For stationary processes the directed-information rate is the limit of
    ``I(x^n ; y_n | y^{n-1})``; the same horizon-doubling scheme covers the
    delayed and instantaneous variants and every conditioning mode uniformly.
    """
    spec.require_stationary()
    cond = normalize_conditioning(cond)
    _check_pair(spec.channel_names, source, target, cond)
    term = _rate_term_fn(kind, source, target, cond)
    value, horizon, delta = _converge_rate(spec, term, rate_tol, n_start, n_max)
    report_kind = {"di": _di_kind(cond), "delayed_di": _di_kind(cond), "iie": "IIE"}[kind]
    config = {"rate_kind": kind, "rate_tol": rate_tol, "n_start": n_start,
              "n_max": n_max, "rate_horizon": horizon, "last_increment": delta}
    if kind == "delayed_di":
        config["delayed_source"] = True
    return MeasureReport(report_kind, _finalize(value), RATE, source, target,
                         tuple((c, m.value) for c, m in cond), "analytic", config)


def geweke_index(source_model: "ARProcessSpec | TimeSeriesPanel", kind: str,
                 source: str, target: str, cond: Sequence[str] = (),
                 cond_mode: str = "causal", lag: int = DEFAULT_LAG,
                 rate_tol: float = DEFAULT_RATE_TOL, n_start: int = DEFAULT_N_START,
                 n_max: int = DEFAULT_N_MAX) -> MeasureReport:
    """Geweke feedback index as a log ratio of prediction-error variances.

    ``kind`` is ``"FWD"`` (does the source's past improve prediction of the
    target) or ``"INST"`` (does the source's present improve it beyond both
    pasts).  Side-information channels in ``cond`` enter with their past record
    when ``cond_mode`` is ``"causal"`` and with their full record for
    ``"full"``.  Given a spec, the index is the horizon limit of exact Gaussian
    conditioning; given a panel it is estimated from least-squares residual
    variances with ``lag`` lags.
    """
    if kind not in ("FWD", "INST"):
        raise ValueError(f"kind must be FWD or INST, got {kind!r}")
    if cond_mode not in ("causal", "full"):
        raise ValueError(f"cond_mode must be causal or full, got {cond_mode!r}")
    cond = tuple(str(c) for c in cond)
    report_kind = "GEWEKE_FWD" if kind == "FWD" else "GEWEKE_INST"
    cond_record = tuple((c, "delayed" if cond_mode == "causal" else "full") for c in cond)

    if isinstance(source_model, ARProcessSpec):
        _check_pair(source_model.channel_names, source, target,
                    tuple((c, ConditioningMode.DELAYED) for c in cond))
        full = cond_mode == "full" and cond

        def term(model: GaussianJointModel, n: int) -> float:
            # With the complete side record the predictors must see it on both
            # sides of the prediction time, so the target sits mid-window.
            at = n // 2 if full else n
            if full:
                z_sels = [VariableSelector.upto(c, n) for c in cond]
            else:
                z_sels = [VariableSelector.past(c, at) for c in cond]
            tgt = VariableSelector.at(target, at)
            y_past = VariableSelector.past(target, at)
            x_past = VariableSelector.past(source, at)
            if kind == "FWD":
                num = prediction_error(model, tgt, [y_past] + z_sels)
                den = prediction_error(model, tgt, [y_past, x_past] + z_sels)
            else:
                num = prediction_error(model, tgt, [y_past, x_past] + z_sels)
                den = prediction_error(
                    model, tgt,
                    [y_past, VariableSelector.upto(source, at)] + z_sels)
            return 0.5 * (_safe_log(num.variance_det) - _safe_log(den.variance_det))

        value, horizon, delta = _converge_rate(source_model, term, rate_tol, n_start, n_max)
        config = {"rate_tol": rate_tol, "n_start": n_start, "n_max": n_max,
                  "rate_horizon": horizon, "last_increment": delta,
                  "cond_mode": cond_mode}
        return MeasureReport(report_kind, _finalize(value), RATE, source, target,
                             cond_record, "analytic", config)

    panel = source_model
    if panel.sample_count < 20 * lag:
        raise InsufficientData(
            f"panel length {panel.sample_count} < 20 * lag = {20 * lag}")
    num, den = geweke_prediction_variances(panel, kind, source, target, cond,
                                           cond_mode, lag)
    value = 0.5 * (_safe_log(num) - _safe_log(den))
    return MeasureReport(report_kind, _finalize(value), RATE, source, target,
                         cond_record, "empirical",
                         {"lag": lag, "cond_mode": cond_mode,
                          "samples": panel.sample_count})


def _safe_log(x: float) -> float:
    if x <= 0.0:
        raise SingularCovariance(f"nonpositive prediction variance {x:.3g}")
    return math.log(x)
