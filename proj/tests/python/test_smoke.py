import csv
import io

import numpy as np
import pytest

import ddlab


def test_layered_idft_matches_numpy():
    rng = np.random.default_rng(0)
    v = rng.normal(size=64) + 1j * rng.normal(size=64)
    ref = np.fft.ifft(v) * np.sqrt(64)
    assert np.allclose(ddlab.layered_idft(v, 8), ref, atol=1e-12)
    assert np.allclose(ddlab.unitary_dft(v), np.fft.fft(v) / 8, atol=1e-12)


def test_channel_and_domains():
    cfg = ddlab.case_config(2, 64, 8, 8)
    paths = ddlab.sample_paths(cfg, 5)
    assert paths.total_power() == pytest.approx(1.0)
    H = ddlab.build_H_dt(paths, 64)
    assert H.shape == (64, 64)
    F = np.fft.fft(np.eye(64)) / 8
    fD = ddlab.to_domain(H, "fD")
    assert np.allclose(fD, F @ H @ F.conj().T, atol=1e-10)
    assert np.allclose(ddlab.fD_closed_form(paths, 64), fD, atol=1e-6)
    dd = ddlab.to_domain(H, "dD_otfs", 8)
    assert np.linalg.norm(dd) == pytest.approx(np.linalg.norm(H))
    with pytest.raises(ValueError):
        ddlab.to_domain(H, "dD_otfs")


def test_pathset_json_round_trip():
    paths = ddlab.sample_paths(ddlab.case_config(1), 3)
    back = ddlab.PathSet.from_json(paths.to_json())
    assert np.allclose(ddlab.build_H_dt(back, 256), ddlab.build_H_dt(paths, 256))


def test_sparsity_ratios():
    H = np.eye(16, dtype=complex)
    assert ddlab.lpr(H, 0) == pytest.approx(1.0)
    lpr, spr = ddlab.ratio_profile(ddlab.build_H_dt(ddlab.sample_paths(ddlab.case_config(1), 1), 256), 8)
    assert all(s >= l - 1e-15 for l, s in zip(lpr, spr))


def test_mmse_and_singular_zf():
    rng = np.random.default_rng(1)
    H = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    x = rng.normal(size=4) + 0j
    assert np.allclose(ddlab.mmse_solve(H, H @ x, 0.0), x, atol=1e-10)
    with pytest.raises(ArithmeticError):
        ddlab.mmse_solve(np.zeros((4, 4), dtype=complex), x, 0.0)


def test_run_ber_csv():
    sc = ddlab.scenario(P=64, M=8, schemes=["sc", "otfs-dd"], snr_db=[10], trials=4, min_trials=4)
    rows = list(csv.DictReader(io.StringIO(ddlab.run_ber(sc))))
    assert [r["scheme"] for r in rows] == ["sc", "otfs-dd"]
    assert all(int(r["bits_sent"]) == 4 * 128 for r in rows)


def test_recommend():
    cfg = ddlab.case_config(1)
    domain, rule, _ = ddlab.recommend_domain(cfg)
    assert domain in {"dt", "fD", "dD_otfs"} and rule
