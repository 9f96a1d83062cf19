"""Closed-form information for AR(1) networks.

The stationary covariance comes from the discrete Lyapunov fixed point.  The
bivariate measures are evaluated exactly through a scalar recursion for the
filtered source variance ``V_i = Var(x_{i-1} | y^{i-1})``: each summand of the
directed information is half the log of a variance ratio whose numerator is
``c^2 V_i + noise`` and whose denominator is constant once the joint past is
pinned down.  The recursion is a one-dimensional Riccati update, so rates are
roots of a quadratic.  This route never assembles a window covariance, which
makes it an independent cross-check of the numeric path.

A "marginal variance" variant replaces ``V_i`` by the stationary variance of
the source.  That shortcut is exact only when the target record reveals
nothing about the source (white source, no feedback, independent innovations);
it is kept as a diagnostic because it is the form usually quoted for these
models, and the test suite reports how far it drifts from the exact value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NoConvergence, TopologyMismatch
from .model import ARProcessSpec, stationary_covariance

LYAPUNOV_RESIDUAL_TOL = 1e-10
ZERO_COUPLING_TOL = 1e-12


@dataclass(frozen=True)
class StationaryMoments:
    """Stationary covariance of the process with named accessors."""

    channels: tuple[str, ...]
    gamma0: np.ndarray
    residual: float

    def _idx(self, name: str) -> int:
        return self.channels.index(name)

    def variance(self, channel: str) -> float:
        i = self._idx(channel)
        return float(self.gamma0[i, i])

    def covariance(self, a: str, b: str) -> float:
        return float(self.gamma0[self._idx(a), self._idx(b)])

    def correlation(self, a: str, b: str) -> float:
        return self.covariance(a, b) / math.sqrt(self.variance(a) * self.variance(b))


def solve_lyapunov(spec: ARProcessSpec) -> StationaryMoments:
    """Unique positive-definite fixed point of ``G = C G C^t + noise_cov``."""
    gamma0 = stationary_covariance(spec)
    residual = float(np.max(np.abs(
        gamma0 - spec.coupling @ gamma0 @ spec.coupling.T - spec.noise_cov)))
    if residual >= LYAPUNOV_RESIDUAL_TOL:
        raise NoConvergence(
            f"stationary covariance residual {residual:.3g} exceeds "
            f"{LYAPUNOV_RESIDUAL_TOL}")
    return StationaryMoments(spec.channel_names, gamma0, residual)


def _filtered_variance_step(P: float, f: float, h: float, q: float, r: float,
                            s: float) -> float:
    """One update of ``Var(hidden | observed record)`` for the scalar system
    hidden' = f * hidden + input + (noise var q), observed = h * hidden +
    (noise var r), with noise covariance s between the two."""
    return f * f * P + q - (f * h * P + s) ** 2 / (h * h * P + r)


def _filtered_variance_limit(f: float, h: float, q: float, r: float, s: float) -> float:
    """Stabilizing fixed point of the scalar Riccati update (closed form)."""
    D = q * r - s * s
    a = h * h
    b = r * (1.0 - f * f) - q * h * h + 2.0 * f * h * s
    if a == 0.0:
        return D / b
    disc = math.sqrt(b * b + 4.0 * a * D)
    if b < 0.0:
        return (disc - b) / (2.0 * a)
    return 2.0 * D / (b + disc)


@dataclass(frozen=True)
class _BivariateParams:
    sx2: float
    sy2: float
    gxy: float
    sv2: float
    sw2: float
    gvw: float
    cxx: float
    cxy: float
    cyx: float
    cyy: float

    @property
    def D(self) -> float:
        return self.sv2 * self.sw2 - self.gvw ** 2

    @property
    def first_sample_mi(self) -> float:
        return -0.5 * math.log1p(-self.gxy ** 2 / (self.sx2 * self.sy2))


def _bivariate_params(spec: ARProcessSpec) -> _BivariateParams:
    if spec.dimension != 2:
        raise DimensionMismatch(f"expected a 2-channel spec, got {spec.dimension}")
    mom = solve_lyapunov(spec)
    x, y = spec.channel_names
    return _BivariateParams(
        sx2=mom.variance(x), sy2=mom.variance(y), gxy=mom.covariance(x, y),
        sv2=spec.noise_entry(x, x), sw2=spec.noise_entry(y, y),
        gvw=spec.noise_entry(x, y),
        cxx=spec.coupling_from(x, x), cxy=spec.coupling_from(x, y),
        cyx=spec.coupling_from(y, x), cyy=spec.coupling_from(y, y))


@dataclass(frozen=True)
class BivariateMeasures:
    """Finite-horizon closed forms for the two-channel network (nats)."""

    horizon: int
    mi: float
    di_xy: float
    di_yx: float
    iie: float
    delayed_di_xy: float
    delayed_di_yx: float


def bivariate_closed_forms(spec: ARProcessSpec, horizon: int) -> BivariateMeasures:
    """Exact finite-horizon measures via the filtered-variance recursion.

    The denominator sign convention inside the per-step ratios is the one that
    makes the conservation and splitting identities hold exactly; the identity
    tests pin it down.
    """
    spec.require_stationary()
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    p = _bivariate_params(spec)
    I1 = p.first_sample_mi
    D = p.D
    V = p.sx2 - p.gxy ** 2 / p.sy2
    W = p.sy2 - p.gxy ** 2 / p.sx2
    di_xy = di_yx = iie = mi = I1
    delayed_xy = delayed_yx = 0.0
    for _ in range(2, horizon + 1):
        num_x = p.cxy ** 2 * V + p.sw2
        num_y = p.cyx ** 2 * W + p.sv2
        di_xy += 0.5 * math.log(num_x * p.sv2 / D)
        di_yx += 0.5 * math.log(num_y * p.sw2 / D)
        delayed_xy += 0.5 * math.log(num_x / p.sw2)
        delayed_yx += 0.5 * math.log(num_y / p.sv2)
        iie += 0.5 * math.log(p.sv2 * p.sw2 / D)
        mi += 0.5 * math.log(num_x * num_y / D)
        V = _filtered_variance_step(V, p.cxx, p.cxy, p.sv2, p.sw2, p.gvw)
        W = _filtered_variance_step(W, p.cyy, p.cyx, p.sw2, p.sv2, p.gvw)
    return BivariateMeasures(horizon, mi, di_xy, di_yx, iie, delayed_xy, delayed_yx)


def bivariate_marginal_variance_forms(spec: ARProcessSpec, horizon: int) -> BivariateMeasures:
    """Diagnostic variant with the filtered variances frozen at their
    stationary values; exact only for white, feedback-free sources with
    independent innovations."""
    spec.require_stationary()
    p = _bivariate_params(spec)
    I1 = p.first_sample_mi
    D = p.D
    num_x = p.cxy ** 2 * p.sx2 + p.sw2
    num_y = p.cyx ** 2 * p.sy2 + p.sv2
    steps = horizon - 1
    return BivariateMeasures(
        horizon,
        mi=I1 + steps * 0.5 * math.log(num_x * num_y / D),
        di_xy=I1 + steps * 0.5 * math.log(num_x * p.sv2 / D),
        di_yx=I1 + steps * 0.5 * math.log(num_y * p.sw2 / D),
        iie=I1 + steps * 0.5 * math.log(p.sv2 * p.sw2 / D),
        delayed_di_xy=steps * 0.5 * math.log(num_x / p.sw2),
        delayed_di_yx=steps * 0.5 * math.log(num_y / p.sv2))


@dataclass(frozen=True)
class BivariateRates:
    """Per-step information rates for the two-channel network (nats/step)."""

    di_xy: float
    di_yx: float
    te_xy: float
    te_yx: float
    iie: float


def bivariate_rates(spec: ARProcessSpec) -> BivariateRates:
    """Rates from the Riccati fixed points: the directed rate splits into the
    transfer-entropy part (past contribution) plus the instantaneous part."""
    spec.require_stationary()
    p = _bivariate_params(spec)
    D = p.D
    V = _filtered_variance_limit(p.cxx, p.cxy, p.sv2, p.sw2, p.gvw)
    W = _filtered_variance_limit(p.cyy, p.cyx, p.sw2, p.sv2, p.gvw)
    te_xy = 0.5 * math.log((p.cxy ** 2 * V + p.sw2) / p.sw2)
    te_yx = 0.5 * math.log((p.cyx ** 2 * W + p.sv2) / p.sv2)
    iie = 0.5 * math.log(p.sv2 * p.sw2 / D)
    return BivariateRates(te_xy + iie, te_yx + iie, te_xy, te_yx, iie)


def bivariate_marginal_variance_rates(spec: ARProcessSpec) -> BivariateRates:
    """Diagnostic rate variant with stationary variances in place of the
    filtered limits (see :func:`bivariate_marginal_variance_forms`)."""
    spec.require_stationary()
    p = _bivariate_params(spec)
    D = p.D
    te_xy = 0.5 * math.log((p.cxy ** 2 * p.sx2 + p.sw2) / p.sw2)
    te_yx = 0.5 * math.log((p.cyx ** 2 * p.sy2 + p.sv2) / p.sv2)
    iie = 0.5 * math.log(p.sv2 * p.sw2 / D)
    return BivariateRates(te_xy + iie, te_yx + iie, te_xy, te_yx, iie)


@dataclass(frozen=True)
class TrivariateCaseRates:
    """Causally conditioned rate from the third channel back to the first,
    given the delayed middle channel, for the chain network."""

    case: str
    value: float                    # exact, via the filtered-variance limit
    marginal_value: float           # marginal-variance shortcut, plus-sign inner log
    marginal_value_alt: float       # marginal-variance shortcut, minus-sign inner log
    filtered_variance: float
    instantaneous_term: float


def _require_zero(spec: ARProcessSpec, source: str, target: str, case: str) -> None:
    c = spec.coupling_from(source, target)
    if abs(c) > ZERO_COUPLING_TOL:
        raise TopologyMismatch(
            f"case {case} forbids the coupling {source}->{target}, got {c:.3g}")


def trivariate_case_rates(spec: ARProcessSpec, case: str,
                          roles: tuple[str, str, str] | None = None) -> TrivariateCaseRates:
    """Closed-form ``I_inf(y -> x || D z)`` for the chain topologies.

    ``roles`` names the (x, z, y) channels; by default the spec's channel
    order is taken as (x, z, y).  Case A is the pure chain x -> z -> y with no
    feedback; case B adds the direct y -> x coupling.  The exact value follows
    from the steady filtered variance of y given the (x, z) record; the
    marginal-variance shortcut values are reported next to it in both inner
    sign conventions because they disagree in general, and only the exact form
    matches the numeric path.
    """
    if case not in ("A", "B"):
        raise ValueError(f"case must be 'A' or 'B', got {case!r}")
    if spec.dimension != 3:
        raise DimensionMismatch(f"expected a 3-channel spec, got {spec.dimension}")
    spec.require_stationary()
    x, z, y = roles if roles is not None else spec.channel_names

    # Chain zero-pattern: only x->z, z->y (and case B: y->x) may be nonzero.
    for src, dst in ((x, y), (y, z), (z, x)):
        _require_zero(spec, src, dst, case)
    if case == "A":
        _require_zero(spec, y, x, case)
    elif abs(spec.coupling_from(y, x)) <= ZERO_COUPLING_TOL:
        raise TopologyMismatch("case B requires a nonzero coupling y->x")
    if abs(spec.noise_entry(x, z)) > ZERO_COUPLING_TOL or \
            abs(spec.noise_entry(y, z)) > ZERO_COUPLING_TOL:
        raise TopologyMismatch(
            "the middle channel's innovation must be independent of the others")

    sv2 = spec.noise_entry(x, x)
    sw2 = spec.noise_entry(y, y)
    gvw = spec.noise_entry(x, y)
    c_yx = spec.coupling_from(y, x)
    c_yy = spec.coupling_from(y, y)
    D = sv2 * sw2 - gvw ** 2

    P = _filtered_variance_limit(c_yy, c_yx, sw2, sv2, gvw)
    exact = 0.5 * math.log((c_yx ** 2 * P + sv2) * sw2 / D)
    instantaneous = 0.5 * math.log(sv2 * sw2 / D)

    sy2 = solve_lyapunov(spec).variance(y)
    t = gvw ** 2 / (sv2 * sw2)
    lead = 0.5 * math.log1p(c_yx ** 2 * sy2 / sv2)
    marginal = lead - 0.5 * math.log1p(t)
    marginal_alt = lead - 0.5 * math.log1p(-t)
    return TrivariateCaseRates(case, exact, marginal, marginal_alt, P, instantaneous)
