"""Core domain types: data panels, AR network specs, stacked Gaussian windows.

Everything downstream operates on two representations of the same object:

* ``ARProcessSpec`` describes the generating network ``X_n = C X_{n-1} + W_n``
  with stationary initialization.
* ``GaussianJointModel`` is the exact joint covariance of the stacked window
  ``(X_1, ..., X_n)``, the structure every information measure is evaluated on.

All types are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, NonStationary, UnknownChannel

SYMMETRY_TOL = 1e-12
STATIONARITY_TOL = 1e-9

MEASURE_KINDS = ("MI", "DI", "DI_causal_cond", "TE", "IIE", "GEWEKE_FWD", "GEWEKE_INST")
METHODS = ("analytic", "empirical", "monte_carlo")

RATE = "RATE"


def _readonly(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=float, copy=True)
    out.setflags(write=False)
    return out


def _check_unique_names(names: Sequence[str]) -> tuple[str, ...]:
    names = tuple(str(c) for c in names)
    if len(set(names)) != len(names):
        raise ValueError(f"channel names must be unique, got {names}")
    return names


@dataclass(frozen=True)
class TimeSeriesPanel:
    """Synchronized multivariate record: rows are time steps 1..n, columns channels.

    The panel stores the samples exactly as given; mean removal happens inside
    the empirical estimators so that write/read round trips stay bit identical.
    """

    channels: tuple[str, ...]
    data: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "channels", _check_unique_names(self.channels))
        data = np.asarray(self.data, dtype=float)
        if data.ndim != 2:
            raise DimensionMismatch(f"panel data must be 2-d, got shape {data.shape}")
        if data.shape[1] != len(self.channels):
            raise DimensionMismatch(
                f"panel has {data.shape[1]} columns for {len(self.channels)} channels")
        if not np.all(np.isfinite(data)):
            raise ValueError("panel contains non-finite values")
        object.__setattr__(self, "data", _readonly(data))

    @property
    def sample_count(self) -> int:
        return self.data.shape[0]

    def channel_index(self, name: str) -> int:
        try:
            return self.channels.index(name)
        except ValueError:
            raise UnknownChannel(f"channel {name!r} not in panel {self.channels}") from None

    def column(self, name: str) -> np.ndarray:
        return self.data[:, self.channel_index(name)]


@dataclass(frozen=True)
class ARProcessSpec:
    """First-order autoregressive network ``X_n = C X_{n-1} + W_n``.

    ``coupling`` is the transition matrix acting on the left: row = target
    channel, column = source channel, so ``coupling[j, i]`` is the coefficient
    carried by the edge from channel ``i`` into channel ``j``.  Use
    :meth:`coupling_from` (or the named constructors below) instead of raw
    indexing when directions matter.

    ``noise_cov`` is the innovation covariance, symmetric positive definite;
    off-diagonal entries create instantaneous (same-step) coupling.
    """

    channel_names: tuple[str, ...]
    coupling: np.ndarray
    noise_cov: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "channel_names", _check_unique_names(self.channel_names))
        d = len(self.channel_names)
        coupling = np.asarray(self.coupling, dtype=float)
        noise = np.asarray(self.noise_cov, dtype=float)
        if coupling.shape != (d, d):
            raise DimensionMismatch(f"coupling shape {coupling.shape} != ({d}, {d})")
        if noise.shape != (d, d):
            raise DimensionMismatch(f"noise_cov shape {noise.shape} != ({d}, {d})")
        if np.max(np.abs(noise - noise.T), initial=0.0) > SYMMETRY_TOL:
            raise ValueError("noise_cov is not symmetric within 1e-12")
        try:
            np.linalg.cholesky(noise)
        except np.linalg.LinAlgError:
            raise ValueError("noise_cov is not positive definite") from None
        object.__setattr__(self, "coupling", _readonly(coupling))
        object.__setattr__(self, "noise_cov", _readonly(noise))

    @property
    def dimension(self) -> int:
        return len(self.channel_names)

    def spectral_radius(self) -> float:
        return float(np.max(np.abs(np.linalg.eigvals(self.coupling))))

    def require_stationary(self) -> None:
        rho = self.spectral_radius()
        if rho >= 1.0 - STATIONARITY_TOL:
            raise NonStationary(f"spectral radius {rho:.6g} >= {1.0 - STATIONARITY_TOL}")

    def channel_index(self, name: str) -> int:
        try:
            return self.channel_names.index(name)
        except ValueError:
            raise UnknownChannel(
                f"channel {name!r} not in spec {self.channel_names}") from None

    def coupling_from(self, source: str, target: str) -> float:
        """Coefficient of ``source``'s previous sample in ``target``'s update."""
        return float(self.coupling[self.channel_index(target), self.channel_index(source)])

    def noise_entry(self, a: str, b: str) -> float:
        return float(self.noise_cov[self.channel_index(a), self.channel_index(b)])

    def relabeled(self, names: Sequence[str]) -> "ARProcessSpec":
        return ARProcessSpec(tuple(names), self.coupling, self.noise_cov)

    def permuted(self, order: Sequence[int]) -> "ARProcessSpec":
        """Same process with channels listed in a different order."""
        order = list(order)
        names = tuple(self.channel_names[i] for i in order)
        return ARProcessSpec(names,
                             self.coupling[np.ix_(order, order)],
                             self.noise_cov[np.ix_(order, order)])


def bivariate_spec(c_xy: float, c_yx: float, sigma_v: float = 1.0, sigma_w: float = 1.0,
                   gamma_vw: float = 0.0, c_xx: float = 0.0, c_yy: float = 0.0,
                   names: Sequence[str] = ("x", "y")) -> ARProcessSpec:
    """Two-channel spec in the conventional parametrization.

    ``c_xy`` drives the first channel into the second, ``c_yx`` the reverse;
    ``sigma_v``/``sigma_w`` are innovation standard deviations of the first
    and second channel and ``gamma_vw`` their covariance.
    """
    coupling = np.array([[c_xx, c_yx],
                         [c_xy, c_yy]])
    noise = np.array([[sigma_v ** 2, gamma_vw],
                      [gamma_vw, sigma_w ** 2]])
    return ARProcessSpec(tuple(names), coupling, noise)


def trivariate_chain_spec(c_xz: float, c_zy: float, c_yx: float = 0.0,
                          diag: Sequence[float] = (0.0, 0.0, 0.0),
                          sigma_v: float = 1.0, sigma_u: float = 1.0, sigma_w: float = 1.0,
                          gamma_vw: float = 0.0,
                          names: Sequence[str] = ("x", "z", "y")) -> ARProcessSpec:
    """Chain network ``x -> z -> y`` with an optional direct ``y -> x`` feedback.

    With ``c_yx = 0`` this is the chain topology; a nonzero ``c_yx`` closes the
    loop.  ``gamma_vw`` couples the innovations of the first and third channel
    instantaneously; the middle channel's innovation stays independent.
    """
    x, z, y = 0, 1, 2
    coupling = np.zeros((3, 3))
    coupling[x, x], coupling[z, z], coupling[y, y] = diag
    coupling[z, x] = c_xz
    coupling[y, z] = c_zy
    coupling[x, y] = c_yx
    noise = np.diag([sigma_v ** 2, sigma_u ** 2, sigma_w ** 2])
    noise[x, y] = noise[y, x] = gamma_vw
    return ARProcessSpec(tuple(names), coupling, noise)


@dataclass(frozen=True)
class VariableSelector:
    """A channel together with an inclusive 1-based time range ``[start, stop]``.

    ``stop < start`` denotes the empty selection, which is how the one-step
    delay operator behaves at the window edge: the delayed past of time 1 is
    empty index bookkeeping, never a data value.
    """

    channel: str
    start: int
    stop: int

    def __post_init__(self):
        if self.start < 1 and not self.is_empty():
            raise ValueError(f"time range must start at 1 or later, got {self.start}")

    @classmethod
    def at(cls, channel: str, k: int) -> "VariableSelector":
        return cls(channel, k, k)

    # the single present sample; alias for the symbolic PRESENT(k) token
    present = at

    @classmethod
    def upto(cls, channel: str, k: int) -> "VariableSelector":
        return cls(channel, 1, k)

    @classmethod
    def past(cls, channel: str, k: int) -> "VariableSelector":
        """Samples strictly before time ``k``; empty when ``k == 1``."""
        return cls(channel, 1, k - 1)

    @classmethod
    def span(cls, channel: str, a: int, b: int) -> "VariableSelector":
        return cls(channel, a, b)

    def is_empty(self) -> bool:
        return self.stop < self.start

    def times(self) -> range:
        return range(self.start, self.stop + 1)


Selectors = Sequence[VariableSelector]


@dataclass(frozen=True)
class GaussianJointModel:
    """Zero-mean Gaussian law over ``(channel, time)`` variables.

    ``variables`` fixes the ordering of the covariance rows/columns; windows
    built from a spec are laid out time-major so the horizon ``n - 1`` model is
    the leading principal block of the horizon ``n`` model.
    """

    variables: tuple[tuple[str, int], ...]
    cov: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        cov = np.asarray(self.cov, dtype=float)
        k = len(self.variables)
        if cov.shape != (k, k):
            raise DimensionMismatch(f"cov shape {cov.shape} != ({k}, {k})")
        if k and np.max(np.abs(cov - cov.T), initial=0.0) > SYMMETRY_TOL:
            raise ValueError("covariance is not symmetric within 1e-12")
        object.__setattr__(self, "variables", tuple((str(c), int(t)) for c, t in self.variables))
        object.__setattr__(self, "cov", _readonly(cov))
        index = {v: i for i, v in enumerate(self.variables)}
        object.__setattr__(self, "_index", index)

    @property
    def channels(self) -> tuple[str, ...]:
        seen = dict.fromkeys(c for c, _ in self.variables)
        return tuple(seen)

    @property
    def horizon(self) -> int:
        return max((t for _, t in self.variables), default=0)

    def index_of(self, channel: str, time: int) -> int:
        try:
            return self._index[(channel, time)]
        except KeyError:
            if channel not in self.channels:
                raise UnknownChannel(f"channel {channel!r} not in model") from None
            raise ValueError(f"time {time} outside model horizon {self.horizon}") from None

    def resolve(self, selectors: VariableSelector | Selectors) -> list[int]:
        """Flatten selectors into covariance indices, preserving order."""
        if isinstance(selectors, VariableSelector):
            selectors = (selectors,)
        out: list[int] = []
        for sel in selectors:
            if sel.is_empty():
                continue
            if sel.stop > self.horizon:
                raise ValueError(
                    f"selector {sel} exceeds model horizon {self.horizon}")
            out.extend(self.index_of(sel.channel, t) for t in sel.times())
        return out

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.cov)[0])


def stationary_covariance(spec: ARProcessSpec, tol: float = 1e-14,
                          max_iter: int = 2_000_000) -> np.ndarray:
    """Fixed point of ``G = C G C^t + noise_cov`` by direct iteration.

    The map is a contraction whenever the spectral radius is below one, so the
    Cauchy stop at ``tol`` is a convergence guarantee, not a heuristic.
    """
    spec.require_stationary()
    C = spec.coupling
    Q = spec.noise_cov
    G = Q.copy()
    for _ in range(max_iter):
        G_next = C @ G @ C.T + Q
        if np.max(np.abs(G_next - G)) < tol:
            return 0.5 * (G_next + G_next.T)
        G = G_next
    raise NonStationary("stationary covariance iteration did not converge")


def build_window_model(spec: ARProcessSpec, horizon: int) -> GaussianJointModel:
    """Exact joint covariance of ``(X_1, ..., X_n)`` under stationary start.

    Lagged blocks are ``Cov(X_{t+h}, X_t) = C^h G`` with ``G`` the stationary
    covariance; they are assembled by repeated multiplication, never from
    simulated paths.
    """
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    spec.require_stationary()
    d = spec.dimension
    G = stationary_covariance(spec)
    blocks = [G]
    for _ in range(1, horizon):
        blocks.append(spec.coupling @ blocks[-1])
    cov = np.zeros((horizon * d, horizon * d))
    for s in range(horizon):
        for t in range(s, horizon):
            block = blocks[t - s]
            cov[t * d:(t + 1) * d, s * d:(s + 1) * d] = block
            if t != s:
                cov[s * d:(s + 1) * d, t * d:(t + 1) * d] = block.T
    variables = tuple((c, t) for t in range(1, horizon + 1) for c in spec.channel_names)
    return GaussianJointModel(variables, cov, meta={"source": "analytic", "horizon": horizon})


@dataclass(frozen=True)
class MeasureReport:
    """One computed information measure, in nats.

    ``horizon`` is the window length for finite-horizon measures or the string
    ``"RATE"`` for per-step limits; ``config`` carries the resolved run
    parameters (tolerances, lags, seeds, reached horizons) for reproducibility.
    """

    measure_kind: str
    value_nats: float
    horizon: int | str
    source: str
    target: str
    conditioning: tuple[tuple[str, str], ...] = ()
    method: str = "analytic"
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.measure_kind not in MEASURE_KINDS:
            raise ValueError(f"unknown measure kind {self.measure_kind!r}")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.value_nats < -1e-9:
            raise ValueError(
                f"measure value {self.value_nats} below the -1e-9 round-off floor")
        object.__setattr__(self, "value_nats", max(0.0, float(self.value_nats)))

    @property
    def value_bits(self) -> float:
        return self.value_nats / np.log(2.0)

    def to_dict(self, bits: bool = False) -> dict:
        value = self.value_bits if bits else self.value_nats
        return {
            "measure_kind": self.measure_kind,
            "value": value,
            "units": "bits" if bits else "nats",
            "horizon": self.horizon,
            "source": self.source,
            "target": self.target,
            "conditioning": [{"channel": c, "mode": m} for c, m in self.conditioning],
            "method": self.method,
            "config": dict(self.config),
        }


@dataclass(frozen=True)
class CausalGraph:
    """Directed graph over channels: dynamic edges plus undirected
    instantaneous-coupling edges, weights in nats."""

    nodes: tuple[str, ...]
    dynamic_edges: tuple[tuple[str, str, float], ...]
    instantaneous_edges: tuple[tuple[str, str, float], ...]
    conditioning_policy: str
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        for src, dst, _ in self.dynamic_edges:
            if src == dst:
                raise ValueError(f"self-loop {src}->{dst} is not a causal edge")

    def dynamic_edge_set(self) -> set[tuple[str, str]]:
        return {(s, t) for s, t, _ in self.dynamic_edges}

    def instantaneous_edge_set(self) -> set[frozenset]:
        return {frozenset((a, b)) for a, b, _ in self.instantaneous_edges}

    def to_dict(self) -> dict:
        return {
            "nodes": list(self.nodes),
            "dynamic_edges": [
                {"source": s, "target": t, "weight_nats": w}
                for s, t, w in self.dynamic_edges
            ],
            "instantaneous_edges": [
                {"pair": sorted((a, b)), "weight_nats": w}
                for a, b, w in self.instantaneous_edges
            ],
            "conditioning_policy": self.conditioning_policy,
            "config": dict(self.config),
        }
