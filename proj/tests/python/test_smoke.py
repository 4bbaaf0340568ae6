# Copyright 2026 The cfmimo Authors
# SPDX-License-Identifier: Apache-2.0

import math

import numpy as np
import pytest

import cfmimo


def small_config():
    cfg = cfmimo.SystemConfig()
    cfg.m, cfg.k, cfg.l, cfg.n = 4, 3, 2, 2
    cfg.i_max = 5
    cfg.seeds = [1, 2]
    cfg.workers = 1
    return cfg


def test_config_round_trip():
    cfg = cfmimo.config_from_string("m = 7\ncombiner = lmmse\n")
    assert cfg.m == 7
    assert cfg.combiner == "lmmse"
    assert cfmimo.config_from_string(str(cfg)).m == 7
    with pytest.raises(cfmimo.ConfigError):
        cfmimo.config_from_string("bogus = 1\n")


def test_model_statistics_are_consistent():
    model = cfmimo.build_model(small_config(), 3)
    r = model.r(0, 1)
    r_hat = model.r_hat(0, 1)
    c = model.error_covariance(0, 1)
    assert r.shape == (4, 4)
    assert np.allclose(r_hat + c, r, rtol=0, atol=1e-9 * np.abs(r).max())
    assert np.allclose(r_hat, r_hat.conj().T)
    assert model.tau_p == 4


def test_closed_and_monte_carlo_agree_roughly():
    model = cfmimo.build_model(small_config(), 4)
    closed = cfmimo.baseline_se(model, "closed")
    mc = cfmimo.baseline_se(model, "mc", cfmimo.Combiner.mr, 4000, 4)
    assert len(closed) == 3
    for a, b in zip(closed, mc):
        assert abs(a - b) <= 0.1 * a


def test_optimizer_improves_the_weighted_sum_rate():
    model = cfmimo.build_model(small_config(), 5)
    out = cfmimo.optimize(model, 10)
    wsr = out["wsr"]
    assert all(b >= a * (1 - 1e-8) for a, b in zip(wsr, wsr[1:]))
    for f in out["precoders"]:
        assert np.trace(f @ f.conj().T).real <= 0.2 * (1 + 1e-9)


def test_sweep_rows_and_csv():
    out = cfmimo.sweep(small_config(), "n", [1, 2])
    assert out["csv"].startswith("drop_seed,m,k_total,l,n,")
    summaries = [r for r in out["rows"] if r["ue_id"] == -1]
    assert len(summaries) == 4
    assert all(r["sum_se"] > 0 for r in summaries)


def test_helpers():
    assert math.isclose(10 * math.log10(cfmimo.large_scale_fading(10.0)), -67.2)
    a = np.array([[4.0, 0.0], [0.0, 9.0]], dtype=complex)
    assert np.allclose(cfmimo.hermitian_sqrt(a), np.diag([2.0, 3.0]))
