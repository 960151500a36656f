import math

import numpy as np
import pytest

from subdyn import (
    GOLDEN,
    INCONCLUSIVE,
    OFF_DIAGONAL,
    PRODUCT_CONSISTENT,
    InconclusiveError,
    birkhoff,
    builtin,
    correlation_profile,
    correlation_sequence,
    default_lambda_grid,
    default_lengths,
    djr_weak_mixing_experiment,
    expand,
    flow_return_ratio,
    joining_estimate,
    occurrence_indicator,
    rigidity_test,
    rotation_coding,
    spectral_scan,
    t_alpha_ergodicity_probe,
)


@pytest.fixture(scope="module")
def theta_master():
    return expand(builtin("theta"), "0", 10)


def test_occurrence_indicator(theta_master):
    ind = occurrence_indicator("0010011", "001")
    assert ind.tolist() == [True, False, False, True, False]
    with pytest.raises(InconclusiveError):
        occurrence_indicator("01", "0011")


def test_birkhoff_matches_direct_count(theta_master):
    est = birkhoff(theta_master, "001", window=10**5)
    ind = occurrence_indicator(theta_master, "001")[: 10**5]
    assert est.value == float(ind.mean())
    assert est.window == 10**5
    assert est.stderr_proxy < 0.01


def test_correlation_lag_zero_is_frequency(theta_master):
    out = correlation_sequence(theta_master[: 10**5], "1", [0, 86])
    assert out[0] == birkhoff(theta_master, "1", window=10**5 - 0).value


def test_correlation_profile_block_lags(theta_master):
    prof = correlation_profile(theta_master, "1", [86, 342], n_random=50, seed=1)
    assert prof["mu"] == pytest.approx(0.5, abs=1e-3)
    assert set(prof["structured"]) == {86, 342}
    assert prof["random_lag_mean"] == pytest.approx(prof["mu_squared"], abs=0.02)


def test_lambda_grid_contents():
    grid = default_lambda_grid(alpha=GOLDEN, seed=0)
    assert 0.0 in grid
    assert any(abs(g - 0.5) < 1e-15 for g in grid)
    assert any(abs(g - GOLDEN) < 1e-12 for g in grid)
    assert len(grid) > 100


def test_spectral_scan_zero_lambda_is_frequency(theta_master):
    scan = spectral_scan(theta_master, "1", lambdas=[0.0, 0.5], window=10**5)
    assert scan.amplitudes[0] == pytest.approx(
        birkhoff(theta_master, "1", window=10**5).value, abs=1e-12
    )
    assert scan.max_off_zero < 0.1


def test_rotation_coding_has_a_spectral_peak():
    rot = rotation_coding(GOLDEN, 10**5)
    scan = spectral_scan(rot, "1", lambdas=[GOLDEN, 0.25])
    lam, amp = scan.peak()
    assert lam == pytest.approx(GOLDEN)
    assert amp > 0.2


def test_rigidity_test_guards(theta_master):
    with pytest.raises(InconclusiveError):
        # time exceeds the window
        rigidity_test(theta_master[:3000], "1", [5000])
    with pytest.raises(InconclusiveError):
        # cylinder frequency not resolved on a tiny window
        rigidity_test(theta_master[:120], "10011100100100111001", [10])
    res = rigidity_test(theta_master, "1", [86])
    assert 0 < res["ratios"][86] <= 1.01


def test_flow_return_ratio_at_zero_is_one(theta_master):
    L = default_lengths()
    r = flow_return_ratio(theta_master[: 10**5], L, "001", 0.0)
    assert r == pytest.approx(1.0)


def test_flow_return_ratio_generic_shift_is_partial(theta_master):
    L = default_lengths()
    r = flow_return_ratio(theta_master[: 10**5], L, "001", math.pi * 7)
    assert 0.0 <= r < 0.9


def test_djr_weak_mixing_small():
    res = djr_weak_mixing_experiment(n_values=(3,), window_chars=2 * 10**6)
    lv = res["levels"][3]
    assert lv["inserted_one_displacement"] == (0, 1)
    assert lv["nu_E"] >= 0.45 * res["d"]
    assert lv["nu_F"] >= 0.45 * res["d"]


def test_joining_off_diagonal(theta_master):
    est = joining_estimate(theta_master[:50000], theta_master[3:50003])
    assert est.classification == OFF_DIAGONAL
    assert est.offset == 3
    est2 = joining_estimate(theta_master[3:50003], theta_master[:50000])
    assert est2.classification == OFF_DIAGONAL
    assert est2.offset == -3


def test_joining_product_consistent(theta_master):
    big = expand(builtin("theta"), "0", 11)
    x, y = big[: 10**6], big[337911 : 337911 + 10**6]
    ref = {u: birkhoff(big, u).value for u in ("0", "1", "00", "01")}
    est = joining_estimate(x, y, reference=ref)
    assert est.classification == PRODUCT_CONSISTENT
    assert est.max_deviation < est.tolerance
    assert est.marginal_deviation <= 1e-3
    assert len(est.pair_frequencies) == 16


def test_joining_marginal_mismatch_is_inconclusive(theta_master):
    x, y = theta_master[:50000], theta_master[100000:150000]
    bad_ref = {"1": 0.9}
    est = joining_estimate(x, y, reference=bad_ref)
    assert est.classification == INCONCLUSIVE


def test_flow_sampled_ergodicity(theta_master):
    res = t_alpha_ergodicity_probe(
        theta_master, default_lengths(), "1",
        step=1.0 + GOLDEN * 0.37, n_steps=50000, starts=(3.0, 9999.5),
    )
    assert res["consistent"]
