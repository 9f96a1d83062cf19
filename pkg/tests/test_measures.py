"""Directed information, transfer entropy, exchange measures and rates."""

import math

import numpy as np
import pytest

import causalflow as cf
from causalflow.engine import conditional_mutual_information as cmi
from causalflow.errors import NoConvergence
from causalflow.model import VariableSelector as V

from util import random_bivariate_spec, random_trivariate_spec


def _decoupled_model(n=5):
    spec = cf.ARProcessSpec(("x", "y"), np.zeros((2, 2)), np.eye(2))
    return cf.build_window_model(spec, n)


def test_di_zero_for_independent_channels():
    model = _decoupled_model()
    for n in range(1, 6):
        rep = cf.directed_information(model, "x", "y", n)
        assert rep.value_nats == pytest.approx(0.0, abs=1e-12)
        assert rep.measure_kind == "DI"


def test_di_equals_mi_without_feedback():
    rng = np.random.default_rng(10)
    for _ in range(5):
        spec = random_bivariate_spec(rng, no_feedback=True, no_instantaneous=True)
        model = cf.build_window_model(spec, 6)
        di = cf.directed_information(model, "x", "y", 6).value_nats
        mi = cf.mutual_information_block(model, "x", "y", 6).value_nats
        assert abs(di - mi) < 1e-9


def test_di_below_mi_with_feedback():
    rng = np.random.default_rng(11)
    for _ in range(5):
        spec = random_bivariate_spec(rng, min_feedback=0.2)
        model = cf.build_window_model(spec, 8)
        di = cf.directed_information(model, "x", "y", 8).value_nats
        mi = cf.mutual_information_block(model, "x", "y", 8).value_nats
        assert mi - di > 1e-6


def test_di_against_closed_form_oracle():
    """Cross-oracle: the scalar-recursion closed form is an independent route."""
    spec = cf.bivariate_spec(c_xy=0.5, c_yx=0.3, sigma_v=1.0, sigma_w=1.0,
                             gamma_vw=0.2)
    model = cf.build_window_model(spec, 6)
    numeric = cf.directed_information(model, "x", "y", 6).value_nats
    closed = cf.bivariate_closed_forms(spec, 6).di_xy
    assert numeric == pytest.approx(closed, abs=1e-8)


def test_mi_single_step_reduces_to_sample_mi():
    rng = np.random.default_rng(12)
    spec = random_bivariate_spec(rng)
    model = cf.build_window_model(spec, 3)
    mi1 = cf.mutual_information_block(model, "x", "y", 1).value_nats
    direct = cmi(model, V.at("x", 1), V.at("y", 1))
    assert mi1 == pytest.approx(direct, abs=1e-12)


def test_mi_splitting_identity():
    rng = np.random.default_rng(13)
    for _ in range(5):
        spec = random_bivariate_spec(rng)
        model = cf.build_window_model(spec, 5)
        mi = cf.mutual_information_block(model, "x", "y", 5).value_nats
        di = cf.directed_information(model, "x", "y", 5).value_nats
        ddi = cf.delayed_directed_information(model, "y", "x", 5).value_nats
        assert abs(mi - di - ddi) < 1e-9


def test_delayed_di_zero_for_instantaneous_only_coupling():
    spec = cf.ARProcessSpec(("x", "y"), np.zeros((2, 2)),
                            np.array([[1.0, 0.6], [0.6, 1.0]]))
    model = cf.build_window_model(spec, 5)
    for n in (1, 3, 5):
        rep = cf.delayed_directed_information(model, "x", "y", n)
        assert rep.value_nats == pytest.approx(0.0, abs=1e-12)


def test_delayed_di_is_transfer_entropy_sum():
    rng = np.random.default_rng(14)
    spec = random_bivariate_spec(rng)
    model = cf.build_window_model(spec, 6)
    ddi = cf.delayed_directed_information(model, "x", "y", 6).value_nats
    te_sum = sum(cf.transfer_entropy(model, "x", "y", k=i, l=i, at_time=i).value_nats
                 for i in range(1, 7))
    assert ddi == pytest.approx(te_sum, abs=1e-10)


def test_delayed_di_rate_white_driver_formula():
    """With a white, feedback-free source and independent innovations the rate
    is 0.5 log(1 + c^2 var_x / var_w)."""
    c_xy, sw = 0.8, 0.9
    spec = cf.bivariate_spec(c_xy=c_xy, c_yx=0.0, sigma_v=1.1, sigma_w=sw,
                             gamma_vw=0.0, c_xx=0.0, c_yy=0.5)
    rate = cf.measure_rate(spec, "delayed_di", "x", "y")
    expected = 0.5 * math.log(1.0 + c_xy ** 2 * 1.1 ** 2 / sw ** 2)
    assert rate.value_nats == pytest.approx(expected, abs=1e-9)
    assert rate.horizon == cf.RATE


def test_iie_without_instantaneous_coupling():
    """With independent innovations every per-step term vanishes; what is left
    is the correlation the stationary start puts into the very first samples.
    The rate is exactly zero."""
    rng = np.random.default_rng(15)
    spec = random_bivariate_spec(rng, no_instantaneous=True)
    model = cf.build_window_model(spec, 5)
    rep = cf.instantaneous_information_exchange(model, "x", "y", 5)
    first_sample = cmi(model, V.at("x", 1), V.at("y", 1))
    assert rep.value_nats == pytest.approx(first_sample, abs=1e-10)
    decoupled = cf.ARProcessSpec(("x", "y"), np.zeros((2, 2)), np.eye(2))
    flat = cf.build_window_model(decoupled, 5)
    assert cf.instantaneous_information_exchange(flat, "x", "y", 5).value_nats \
        == pytest.approx(0.0, abs=1e-12)


def test_iie_closed_form_any_spec():
    """(n-1)/2 log(vv ww / (vv ww - g^2)) plus the first-sample MI, exactly."""
    rng = np.random.default_rng(16)
    for _ in range(5):
        spec = random_bivariate_spec(rng)
        n = 6
        model = cf.build_window_model(spec, n)
        numeric = cf.instantaneous_information_exchange(model, "x", "y", n).value_nats
        vv = spec.noise_entry("x", "x")
        ww = spec.noise_entry("y", "y")
        g = spec.noise_entry("x", "y")
        mom = cf.solve_lyapunov(spec)
        i1 = -0.5 * math.log(
            1.0 - mom.covariance("x", "y") ** 2 / (mom.variance("x") * mom.variance("y")))
        expected = (n - 1) / 2.0 * math.log(vv * ww / (vv * ww - g ** 2)) + i1
        assert numeric == pytest.approx(expected, abs=1e-9)


def test_iie_symmetry():
    rng = np.random.default_rng(17)
    spec = random_bivariate_spec(rng)
    model = cf.build_window_model(spec, 5)
    xy = cf.instantaneous_information_exchange(model, "x", "y", 5).value_nats
    yx = cf.instantaneous_information_exchange(model, "y", "x", 5).value_nats
    assert abs(xy - yx) < 1e-9


def test_di_decomposition_identity():
    rng = np.random.default_rng(18)
    for _ in range(5):
        spec = random_bivariate_spec(rng)
        model = cf.build_window_model(spec, 6)
        di = cf.directed_information(model, "x", "y", 6).value_nats
        ddi = cf.delayed_directed_information(model, "x", "y", 6).value_nats
        iie = cf.instantaneous_information_exchange(model, "x", "y", 6).value_nats
        assert abs(di - ddi - iie) < 1e-9


def test_conservation_identity():
    rng = np.random.default_rng(19)
    for _ in range(5):
        spec = random_bivariate_spec(rng)
        model = cf.build_window_model(spec, 6)
        di_xy = cf.directed_information(model, "x", "y", 6).value_nats
        di_yx = cf.directed_information(model, "y", "x", 6).value_nats
        mi = cf.mutual_information_block(model, "x", "y", 6).value_nats
        iie = cf.instantaneous_information_exchange(model, "x", "y", 6).value_nats
        assert abs(di_xy + di_yx - mi - iie) < 1e-9


def test_di_monotone_in_horizon():
    rng = np.random.default_rng(20)
    spec = random_bivariate_spec(rng)
    model = cf.build_window_model(spec, 8)
    values = [cf.directed_information(model, "x", "y", n).value_nats
              for n in range(1, 9)]
    assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))


def test_transfer_entropy_zero_independent():
    model = _decoupled_model()
    rep = cf.transfer_entropy(model, "x", "y", k=3, l=3, at_time=5)
    assert rep.value_nats == pytest.approx(0.0, abs=1e-12)


def test_transfer_entropy_decomposition_at_full_past():
    """The per-step conditional MI splits into the transfer part plus the
    same-step term."""
    rng = np.random.default_rng(21)
    spec = random_bivariate_spec(rng)
    n = 6
    model = cf.build_window_model(spec, n)
    lhs = cmi(model, V.upto("x", n), V.at("y", n), [V.past("y", n)])
    te = cf.transfer_entropy(model, "x", "y", k=n, l=n, at_time=n).value_nats
    same_step = cmi(model, V.at("x", n), V.at("y", n),
                    [V.past("x", n), V.past("y", n)])
    assert abs(lhs - te - same_step) < 1e-9


def test_transfer_entropy_converges_to_rate():
    spec = cf.bivariate_spec(c_xy=0.6, c_yx=0.2, gamma_vw=0.3,
                             c_xx=0.5, c_yy=0.4)
    target = cf.bivariate_rates(spec).te_xy
    values = []
    for n in (4, 8, 16):
        model = cf.build_window_model(spec, n)
        values.append(cf.transfer_entropy(model, "x", "y", k=n, l=n,
                                          at_time=n).value_nats)
    # the filtered source variance shrinks with history, so the sequence
    # decreases onto the rate
    assert values[0] >= values[1] - 1e-12
    assert values[1] >= values[2] - 1e-12
    assert values[2] == pytest.approx(target, abs=1e-4)
    assert abs(values[2] - target) < abs(values[0] - target) + 1e-12


def test_transfer_entropy_argument_validation():
    model = _decoupled_model()
    with pytest.raises(ValueError):
        cf.transfer_entropy(model, "x", "y", k=0, l=2, at_time=4)
    with pytest.raises(ValueError):
        cf.transfer_entropy(model, "x", "y", k=2, l=9, at_time=4)


def test_measure_rate_matches_closed_rates():
    rng = np.random.default_rng(22)
    for _ in range(3):
        spec = random_bivariate_spec(rng, max_radius=0.8)
        rates = cf.bivariate_rates(spec)
        di = cf.measure_rate(spec, "di", "x", "y").value_nats
        te = cf.measure_rate(spec, "delayed_di", "x", "y").value_nats
        iie = cf.measure_rate(spec, "iie", "x", "y").value_nats
        assert di == pytest.approx(rates.di_xy, abs=1e-8)
        assert te == pytest.approx(rates.te_xy, abs=1e-8)
        assert iie == pytest.approx(rates.iie, abs=1e-8)


def test_measure_rate_iie_zero_when_uncorrelated():
    spec = cf.bivariate_spec(c_xy=0.5, c_yx=0.2, gamma_vw=0.0)
    rep = cf.measure_rate(spec, "iie", "x", "y")
    assert rep.value_nats == pytest.approx(0.0, abs=1e-10)


def test_measure_rate_reports_horizon_and_config():
    spec = cf.bivariate_spec(c_xy=0.4, c_yx=0.1)
    rep = cf.measure_rate(spec, "di", "x", "y")
    assert rep.horizon == cf.RATE
    assert rep.config["rate_horizon"] >= 16
    assert rep.config["rate_tol"] == 1e-9


def test_measure_rate_no_convergence():
    spec = cf.bivariate_spec(c_xy=0.3, c_yx=0.0, c_xx=0.97, c_yy=0.9)
    with pytest.raises(NoConvergence):
        cf.measure_rate(spec, "di", "x", "y", n_max=8)


def test_trivariate_causal_conditional_rate_matches_closed_form():
    spec = cf.trivariate_chain_spec(c_xz=0.5, c_zy=0.6, c_yx=0.45,
                                    diag=(0.3, 0.2, 0.4), gamma_vw=0.3)
    closed = cf.trivariate_case_rates(spec, "B")
    numeric = cf.measure_rate(spec, "di", "y", "x", [("z", "delayed")])
    assert numeric.value_nats == pytest.approx(closed.value, abs=1e-6)
    assert numeric.measure_kind == "DI_causal_cond"


def test_conditional_conservation_full_mode():
    rng = np.random.default_rng(23)
    for _ in range(3):
        spec = random_trivariate_spec(rng)
        model = cf.build_window_model(spec, 5)
        cond = [("z", "full")]
        di = cf.directed_information(model, "x", "y", 5, cond).value_nats
        ddi = cf.delayed_directed_information(model, "y", "x", 5, cond).value_nats
        mi = cf.mutual_information_block(model, "x", "y", 5, cond).value_nats
        assert abs(mi - di - ddi) < 1e-9


def test_conditioning_mode_selectors_differ():
    spec = cf.trivariate_chain_spec(c_xz=0.6, c_zy=0.7, diag=(0.3, 0.3, 0.3))
    model = cf.build_window_model(spec, 6)
    # x reaches y only through z, so conditioning on the delayed record of z
    # closes the path while the pairwise value stays positive
    pairwise = cf.delayed_directed_information(model, "x", "y", 6).value_nats
    blocked = cf.delayed_directed_information(model, "x", "y", 6,
                                              [("z", "delayed")]).value_nats
    assert pairwise > 1e-3
    assert blocked == pytest.approx(0.0, abs=1e-10)


def test_pair_validation_errors():
    model = _decoupled_model()
    with pytest.raises(ValueError):
        cf.directed_information(model, "x", "x", 3)
    with pytest.raises(cf.UnknownChannel):
        cf.directed_information(model, "q", "y", 3)
    with pytest.raises(ValueError):
        cf.directed_information(model, "x", "y", 3, [("x", "full")])


def test_geweke_zero_for_independent():
    spec = cf.ARProcessSpec(("x", "y"), np.zeros((2, 2)), np.eye(2))
    rep = cf.geweke_index(spec, "FWD", "x", "y")
    assert rep.value_nats == pytest.approx(0.0, abs=1e-12)
    assert rep.measure_kind == "GEWEKE_FWD"


def test_geweke_fwd_equals_delayed_di_rate():
    rng = np.random.default_rng(24)
    for _ in range(3):
        spec = random_bivariate_spec(rng, max_radius=0.8)
        fwd = cf.geweke_index(spec, "FWD", "x", "y").value_nats
        rate = cf.measure_rate(spec, "delayed_di", "x", "y").value_nats
        assert abs(fwd - rate) < 1e-9


def test_geweke_inst_equals_conditional_iie_rate():
    rng = np.random.default_rng(25)
    spec = random_trivariate_spec(rng, max_radius=0.7)
    inst = cf.geweke_index(spec, "INST", "x", "y", cond=["z"]).value_nats
    rate = cf.measure_rate(spec, "iie", "x", "y", [("z", "delayed")]).value_nats
    assert abs(inst - rate) < 1e-9


def test_geweke_full_mode_conditioning():
    """A decoupled side channel changes nothing in either mode; once the side
    channel echoes the target, the full record (which sees the future) and the
    causal record disagree."""
    inert = np.array([[0.4, 0.3, 0.0], [0.5, 0.2, 0.0], [0.0, 0.0, 0.3]])
    spec = cf.ARProcessSpec(("x", "y", "z"), inert, np.eye(3))
    plain = cf.geweke_index(spec, "FWD", "x", "y").value_nats
    for mode in ("full", "causal"):
        conditioned = cf.geweke_index(spec, "FWD", "x", "y", cond=["z"],
                                      cond_mode=mode).value_nats
        assert conditioned == pytest.approx(plain, abs=1e-8)

    echo = inert.copy()
    echo[2, 1] = 0.6  # z_n echoes y_{n-1}
    spec = cf.ARProcessSpec(("x", "y", "z"), echo, np.eye(3))
    full = cf.geweke_index(spec, "FWD", "x", "y", cond=["z"],
                           cond_mode="full").value_nats
    causal = cf.geweke_index(spec, "FWD", "x", "y", cond=["z"],
                             cond_mode="causal").value_nats
    assert abs(full - causal) > 1e-3


def test_geweke_empirical_tracks_analytic():
    spec = cf.bivariate_spec(c_xy=0.6, c_yx=0.0, c_xx=0.4, c_yy=0.3)
    analytic_value = cf.geweke_index(spec, "FWD", "x", "y").value_nats
    panel = cf.simulate(spec, cf.SimulationConfig(path_length=60_000, seed=5))[0]
    empirical = cf.geweke_index(panel, "FWD", "x", "y", lag=6)
    assert empirical.method == "empirical"
    assert empirical.value_nats == pytest.approx(analytic_value, rel=0.15, abs=5e-3)


def test_geweke_insufficient_data():
    panel = cf.TimeSeriesPanel(("x", "y"), np.random.default_rng(0).standard_normal((40, 2)))
    with pytest.raises(cf.InsufficientData):
        cf.geweke_index(panel, "FWD", "x", "y", lag=5)


def test_invalid_kind_arguments():
    spec = cf.bivariate_spec(c_xy=0.4, c_yx=0.1)
    with pytest.raises(ValueError):
        cf.measure_rate(spec, "everything", "x", "y")
    with pytest.raises(ValueError):
        cf.geweke_index(spec, "SIDEWAYS", "x", "y")
    with pytest.raises(ValueError):
        cf.geweke_index(spec, "FWD", "x", "y", cond_mode="sometimes")


def test_mi_block_conditioning_modes():
    """Full mode conditions the block MI on the whole side record, delayed mode
    stops one step earlier; both must match direct engine evaluations."""
    spec = cf.trivariate_chain_spec(c_xz=0.6, c_zy=0.7, diag=(0.3, 0.3, 0.3))
    model = cf.build_window_model(spec, 5)
    full = cf.mutual_information_block(model, "x", "y", 5, [("z", "full")])
    delayed = cf.mutual_information_block(model, "x", "y", 5, [("z", "delayed")])
    assert full.conditioning == (("z", "full"),)
    assert delayed.conditioning == (("z", "delayed"),)
    x5, y5 = V.upto("x", 5), V.upto("y", 5)
    assert full.value_nats == pytest.approx(
        cmi(model, x5, y5, [V.upto("z", 5)]), abs=1e-12)
    assert delayed.value_nats == pytest.approx(
        cmi(model, x5, y5, [V.upto("z", 4)]), abs=1e-12)
