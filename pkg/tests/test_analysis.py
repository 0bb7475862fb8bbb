import numpy as np
import pytest

from gasketwalk import (
    PERIODIC,
    REFLECTIVE,
    classical_walk_series,
    fit_power_law,
    initial_state,
    limiting_distribution,
    mixing_scaling,
    mixing_time,
    scan_mixing_time,
    spectral_decomposition,
    sweep_exponents,
    tvd_decay_series,
)
from gasketwalk.analysis import sigma_series, write_exponents_csv, write_histogram_csv, write_mixing_csv


def test_fit_recovers_exact_power_law():
    t = np.arange(1, 200)
    fit = fit_power_law(t, 1.3 * t ** 0.44)
    assert fit.prefactor == pytest.approx(1.3, abs=1e-10)
    assert fit.exponent == pytest.approx(0.44, abs=1e-10)
    assert fit.residual < 1e-12


def test_fit_constant_series_has_zero_exponent():
    t = np.arange(1, 50)
    fit = fit_power_law(t, np.full(t.size, 2.5))
    assert fit.exponent == pytest.approx(0.0, abs=1e-14)
    assert fit.prefactor == pytest.approx(2.5, abs=1e-12)


def test_fit_scale_covariance():
    t = np.arange(1, 100)
    series = 0.7 * t ** 0.31 * (1 + 0.05 * np.sin(t))
    base = fit_power_law(t, series, window=(5, 90))
    scaled = fit_power_law(t, 13.5 * series, window=(5, 90))
    assert scaled.exponent == pytest.approx(base.exponent, abs=1e-12)
    assert scaled.prefactor == pytest.approx(13.5 * base.prefactor, rel=1e-12)


def test_fit_window_restricts_points():
    t = np.arange(1, 100)
    vals = 2.0 * t ** 0.5
    vals[:10] = 7.0  # garbage outside the window
    fit = fit_power_law(t, vals, window=(11, 99))
    assert fit.exponent == pytest.approx(0.5, abs=1e-12)


def test_fit_errors():
    t = np.arange(1, 30)
    with pytest.raises(ValueError, match="window"):
        fit_power_law(t, t.astype(float), window=(25, 27))  # 3 points < 5
    with pytest.raises(ValueError, match="nonpositive"):
        vals = t.astype(float)
        vals[7] = 0.0
        fit_power_law(t, vals)
    with pytest.raises(ValueError, match="empty"):
        fit_power_law(t, t.astype(float), window=(20, 10))


def test_sigma_series_matches_observer_path(graph_of):
    from gasketwalk import build_shift, evolve, probability, stddev

    graph = graph_of(3, REFLECTIVE)
    series = sigma_series(graph, (8, 0), 8)
    shift = build_shift(graph)
    sigmas = [0.0]
    evolve(
        graph, shift, None, initial_state(graph, (8, 0)), 8,
        observer=lambda s: sigmas.append(stddev(probability(s)).sigma),
    )
    assert np.abs(series - np.array(sigmas)).max() < 1e-10


def test_sweep_requires_reflective_and_guard(graph_of):
    with pytest.raises(ValueError, match="reflective"):
        sweep_exponents(graph_of(4, PERIODIC), 8)
    with pytest.raises(ValueError, match="guard"):
        sweep_exponents(graph_of(3, REFLECTIVE), 9)  # 2^3 = 8


def test_sweep_histogram_counts_and_contents(graph_of):
    graph = graph_of(4, REFLECTIVE)
    hist = sweep_exponents(graph, 16)
    assert hist.counts.sum() == graph.num_vertices
    assert hist.dw.shape == (graph.num_vertices,)
    assert np.isfinite(hist.dw).all()
    assert (hist.exponent > 0).all()
    assert hist.bin_edges.size == hist.counts.size + 1
    assert hist.mean_series.shape == (17,)
    assert hist.mean_series[0] == 0.0
    assert 0.2 < hist.mean_fit.exponent < 0.8


def test_sweep_worker_count_does_not_change_bytes(graph_of):
    graph = graph_of(4, REFLECTIVE)
    serial = sweep_exponents(graph, 16)
    parallel = sweep_exponents(graph, 16, workers=2)
    assert np.array_equal(serial.exponent, parallel.exponent)
    assert np.array_equal(serial.mean_series, parallel.mean_series)
    assert np.array_equal(serial.counts, parallel.counts)


def test_sweep_csv_writers(tmp_path, graph_of):
    graph = graph_of(4, REFLECTIVE)
    hist = sweep_exponents(graph, 16)
    epath = tmp_path / "exponents.csv"
    write_exponents_csv(epath, hist)
    lines = epath.read_text().splitlines()
    assert lines[0] == "x,y,a,exponent,residual"
    assert len(lines) == 1 + graph.num_vertices
    hpath = tmp_path / "hist.csv"
    write_histogram_csv(hpath, hist)
    rows = hpath.read_text().splitlines()
    assert rows[0] == "bin_lo,bin_hi,count"
    assert sum(int(r.split(",")[2]) for r in rows[1:]) == graph.num_vertices


def test_sweep_exponents_in_physical_band_g5(graph_of):
    # fitted spread exponents stay inside the physically sensible band
    graph = graph_of(5, REFLECTIVE)
    hist = sweep_exponents(graph, 32)
    assert (hist.exponent > 0.1).all()
    assert (hist.exponent <= 1.0).all()


def test_scan_mixing_pinned_convention():
    t = np.arange(1, 1001)
    series = 2.0 / t
    res = scan_mixing_time(series, 0.01)
    assert res.tau == 200
    assert res.mixed
    assert res.method == "scan"


def test_scan_mixing_never_settles():
    series = np.full(100, 0.5)
    res = scan_mixing_time(series, 0.01)
    assert res.tau is None
    assert not res.mixed


def test_scan_mixing_always_below():
    series = np.full(100, 1e-4)
    res = scan_mixing_time(series, 0.01)
    assert res.tau == 1


def test_mixing_time_end_to_end_small(graph_of):
    graph = graph_of(2, PERIODIC)
    state = initial_state(graph, (4, 0))
    res = mixing_time(graph, state, epsilon=0.05, horizon=3000)
    assert res.mixed
    # defining invariant on the computed series
    decomp = spectral_decomposition(graph)
    pi_ = limiting_distribution(decomp, state)
    series = tvd_decay_series(graph, state, 3000, pi_)
    assert (series[res.tau - 1 :] <= 0.05).all()
    assert series[res.tau - 2] > 0.05


def test_envelope_prefactor_exact_inverse_law():
    from gasketwalk import envelope_prefactor, fit_mixing_time

    t = np.arange(1, 2001)
    series = 2.0 / t
    assert envelope_prefactor(series) == pytest.approx(2.0, rel=1e-12)
    res = fit_mixing_time(series, 0.01)
    assert res.tau == 200
    assert res.method == "fit-extrapolated"
    with pytest.raises(ValueError, match="T >="):
        envelope_prefactor(series[:5])


def test_mixing_time_fit_method(graph_of):
    graph = graph_of(2, PERIODIC)
    state = initial_state(graph, (4, 0))
    res = mixing_time(graph, state, epsilon=0.05, horizon=2000, method="fit")
    assert res.method == "fit-extrapolated"
    assert res.mixed and res.tau > 0
    with pytest.raises(ValueError, match="method"):
        mixing_time(graph, state, 0.05, 2000, method="guess")


def test_mixing_time_preconditions(graph_of):
    graph = graph_of(2, REFLECTIVE)
    state = initial_state(graph, (4, 0))
    with pytest.raises(ValueError, match="periodic"):
        mixing_time(graph, state, 0.05, 100)
    gp = graph_of(2, PERIODIC)
    sp = initial_state(gp, (4, 0))
    with pytest.raises(ValueError, match="epsilon"):
        mixing_time(gp, sp, 1.5, 100)
    with pytest.raises(ValueError, match="horizon"):
        mixing_time(gp, sp, 0.1, 0)


def test_mixing_scaling_synthetic():
    ns = np.array([123, 366, 1095, 3282])
    fit = mixing_scaling([(n, 0.034 * n ** 0.54) for n in ns])
    assert fit.exponent == pytest.approx(0.54, abs=1e-10)
    assert fit.prefactor == pytest.approx(0.034, rel=1e-8)


def test_mixing_scaling_errors():
    with pytest.raises(ValueError, match="3"):
        mixing_scaling([(10, 5), (20, 8)])
    with pytest.raises(ValueError, match="duplicate"):
        mixing_scaling([(10, 5), (10, 6), (20, 8)])


def test_mixing_csv(tmp_path):
    path = tmp_path / "mixing.csv"
    write_mixing_csv(path, [(123, 0.1, 17), (123, 0.05, None)])
    lines = path.read_text().splitlines()
    assert lines[0] == "N,epsilon,tau"
    assert lines[2].endswith(",-1")


def test_classical_walk_one_step_sigma(graph_of):
    # After one step from (2,0) the distribution is 1/4 on the four
    # neighbors, the same as the quantum walk's first step.
    graph = graph_of(1, REFLECTIVE)
    t, sig = classical_walk_series(graph, (2, 0), 1)
    assert sig[0] == 0.0
    assert sig[1] == pytest.approx(np.sqrt(2.75), abs=1e-12)


def test_classical_walk_conserves_mass_and_spreads(graph_of):
    graph = graph_of(4, REFLECTIVE)
    t, sig = classical_walk_series(graph, (16, 0), 64)
    assert sig.shape == (65,)
    assert (np.diff(sig[:16]) > 0).all()
    fit = fit_power_law(t, sig, window=(4, 64))
    assert 0.2 < fit.exponent < 0.7


def test_classical_walk_against_dict_iteration(graph_of):
    # independent brute-force oracle: iterate the distribution as a dict
    graph = graph_of(2, REFLECTIVE)
    t, sig = classical_walk_series(graph, (4, 0), 10)
    dist = {(4, 0): 1.0}
    for step_idx in range(1, 11):
        nxt = {}
        for v, mass in dist.items():
            nbrs = graph.neighbors(v)
            for u in nbrs:
                nxt[u] = nxt.get(u, 0.0) + mass / len(nbrs)
        dist = nxt
        assert sum(dist.values()) == pytest.approx(1.0, abs=1e-12)
        ex = sum(x * m for (x, _), m in dist.items())
        ex2 = sum(x * x * m for (x, _), m in dist.items())
        ey = sum(y * m for (_, y), m in dist.items())
        ey2 = sum(y * y * m for (_, y), m in dist.items())
        expected = np.sqrt(max(ex2 - ex * ex, 0.0) + max(ey2 - ey * ey, 0.0))
        assert sig[step_idx] == pytest.approx(expected, abs=1e-12)


def test_classical_exponent_matches_log2_5_smallish(graph_of):
    # Desk-size version of the classical cross-check (full one is acceptance).
    graph = graph_of(5, REFLECTIVE)
    t, sig = classical_walk_series(graph, (32, 0), 128)
    fit = fit_power_law(t, sig, window=(4, 128))
    assert fit.exponent == pytest.approx(1 / np.log2(5), abs=0.06)
