"""Graph inference: exact-zero criteria on specs, surrogate tests on panels."""

import numpy as np
import pytest

import causalflow as cf
from causalflow.errors import InsufficientData

from util import random_trivariate_spec


CHAIN = dict(c_xz=0.6, c_zy=0.7, diag=(0.3, 0.3, 0.3), gamma_vw=0.0)


def test_chain_conditioned_recovers_true_edges():
    spec = cf.trivariate_chain_spec(**CHAIN)
    graph = cf.infer_graph(spec, policy="causally_conditioned")
    assert graph.dynamic_edge_set() == {("x", "z"), ("z", "y")}
    assert graph.instantaneous_edge_set() == set()


def test_chain_pairwise_reports_mediated_edge():
    spec = cf.trivariate_chain_spec(**CHAIN)
    graph = cf.infer_graph(spec, policy="pairwise")
    edges = graph.dynamic_edge_set()
    assert {("x", "z"), ("z", "y")} <= edges
    assert edges != {("x", "z"), ("z", "y")}
    assert ("x", "y") in edges  # the relayed path shows up as direct
    assert ("y", "x") not in edges


def test_pairwise_superset_on_chain():
    spec = cf.trivariate_chain_spec(c_xz=0.5, c_zy=0.4, diag=(0.2, 0.4, 0.3))
    conditioned = cf.infer_graph(spec, policy="causally_conditioned")
    pairwise = cf.infer_graph(spec, policy="pairwise")
    assert conditioned.dynamic_edge_set() <= pairwise.dynamic_edge_set()


def test_decoupled_spec_gives_empty_graph():
    spec = cf.ARProcessSpec(("x", "y", "z"), np.zeros((3, 3)), np.eye(3))
    for policy in ("pairwise", "causally_conditioned"):
        graph = cf.infer_graph(spec, policy=policy)
        assert graph.dynamic_edge_set() == set()
        assert graph.instantaneous_edge_set() == set()


def test_instantaneous_edges_detected():
    noise = np.eye(3)
    noise[0, 1] = noise[1, 0] = 0.5
    spec = cf.ARProcessSpec(("x", "y", "z"), np.zeros((3, 3)), noise)
    graph = cf.infer_graph(spec, policy="causally_conditioned")
    assert graph.dynamic_edge_set() == set()
    assert graph.instantaneous_edge_set() == {frozenset(("x", "y"))}


def test_zero_pattern_soundness():
    """Channels with no incoming coupling and no mediated instantaneous path
    never acquire a conditioned dynamic edge."""
    rng = np.random.default_rng(50)
    for _ in range(3):
        spec = random_trivariate_spec(rng, max_radius=0.7)
        # cut every coupling into channel "y" (row index 1)
        coupling = np.array(spec.coupling)
        coupling[1, :] = 0.0
        spec = cf.ARProcessSpec(spec.channel_names, coupling, spec.noise_cov)
        graph = cf.infer_graph(spec, policy="causally_conditioned")
        into_y = {e for e in graph.dynamic_edge_set() if e[1] == "y"}
        assert into_y == set()


def test_permutation_equivariance():
    spec = cf.trivariate_chain_spec(**CHAIN)
    graph = cf.infer_graph(spec, policy="causally_conditioned")
    permuted = cf.infer_graph(spec.permuted([2, 0, 1]), policy="causally_conditioned")
    assert graph.dynamic_edge_set() == permuted.dynamic_edge_set()
    assert graph.instantaneous_edge_set() == permuted.instantaneous_edge_set()


def test_threads_env_cap(monkeypatch):
    monkeypatch.setenv("CAUSALFLOW_THREADS", "1")
    spec = cf.trivariate_chain_spec(**CHAIN)
    graph = cf.infer_graph(spec, policy="causally_conditioned")
    assert graph.dynamic_edge_set() == {("x", "z"), ("z", "y")}


def test_surrogate_null_contract():
    spec = cf.bivariate_spec(c_xy=0.5, c_yx=0.0)
    panel = cf.simulate(spec, cf.SimulationConfig(path_length=400, seed=2))[0]
    null_a = cf.surrogate_null(panel, "x", "y", surrogate_count=25, seed=4)
    null_b = cf.surrogate_null(panel, "x", "y", surrogate_count=25, seed=4)
    assert np.array_equal(null_a, null_b)
    assert len(null_a) == 25
    with pytest.raises(InsufficientData):
        cf.surrogate_null(panel, "x", "y", surrogate_count=10, seed=4)
    short = cf.TimeSeriesPanel(("x", "y"), panel.data[:9])
    with pytest.raises(InsufficientData):
        cf.surrogate_null(short, "x", "y", surrogate_count=25, seed=4, lag=5)


def test_strong_coupling_always_detected():
    spec = cf.bivariate_spec(c_xy=0.9, c_yx=0.0)
    hits = 0
    trials = 20
    for i, child in enumerate(np.random.SeedSequence(8).spawn(trials)):
        panel = cf.simulate(spec, cf.SimulationConfig(
            path_length=512, seed=int(child.generate_state(1)[0])))[0]
        stat = cf.empirical_rate_value([panel], "delayed_di", "x", "y", lag=5)
        null = cf.surrogate_null(panel, "x", "y", surrogate_count=99, seed=i)
        if stat > null.max():
            hits += 1
    assert hits >= int(0.95 * trials)


def test_empirical_graph_on_coupled_panel():
    spec = cf.bivariate_spec(c_xy=0.8, c_yx=0.0, gamma_vw=0.0)
    panel = cf.simulate(spec, cf.SimulationConfig(path_length=1024, seed=6))[0]
    graph = cf.infer_graph(panel, policy="pairwise", seed=1)
    assert ("x", "y") in graph.dynamic_edge_set()
    assert ("y", "x") not in graph.dynamic_edge_set()
    assert graph.config["method"] == "empirical"


def test_empirical_conditioned_graph_on_chain_panel():
    spec = cf.trivariate_chain_spec(**CHAIN)
    panel = cf.simulate(spec, cf.SimulationConfig(path_length=4000, seed=12))[0]
    graph = cf.infer_graph(panel, policy="causally_conditioned", seed=3)
    edges = graph.dynamic_edge_set()
    assert {("x", "z"), ("z", "y")} <= edges
    assert ("x", "y") not in edges  # conditioning on the delayed mediator blocks it


def test_empirical_graph_insufficient_data():
    panel = cf.TimeSeriesPanel(("x", "y"),
                               np.random.default_rng(0).standard_normal((50, 2)))
    with pytest.raises(InsufficientData):
        cf.infer_graph(panel, policy="pairwise", lag=5)


def test_infer_rejects_unknown_policy():
    spec = cf.bivariate_spec(c_xy=0.4, c_yx=0.0)
    with pytest.raises(ValueError):
        cf.infer_graph(spec, policy="everything")
