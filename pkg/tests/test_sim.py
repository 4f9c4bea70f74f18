import math

import numpy as np
import pytest

from ppbf.errors import InvalidParameterError
from ppbf.sim import (
    ErrorRatePoint,
    TrialConfig,
    _chunk_failures,
    csv_header,
    csv_line,
    derive_seed,
    estimate_threshold,
    grid,
    run_point,
    run_sweep,
    sample_bsc,
    trial_rng,
    wilson_interval,
)


def test_config_defaults_follow_protocol():
    c = TrialConfig("toric", 5, 0.05)
    assert (c.max_trials, c.target_failures, c.decoder, c.depth) == (100_000, 100, "ppbf", 5)
    assert TrialConfig("toric", 5, 0.05, D=3).depth == 3


@pytest.mark.parametrize("kwargs", [
    dict(p=-0.1), dict(p=0.6), dict(p=0.1, D=0), dict(p=0.1, seed=-1), dict(p=0.1, seed=2**64),
    dict(p=0.1, max_trials=0), dict(p=0.1, target_failures=0), dict(p=0.1, decoder="mwpm"),
])
def test_config_validation(kwargs):
    with pytest.raises(InvalidParameterError):
        TrialConfig("toric", 5, **kwargs)


def test_sample_bsc_edge_cases():
    assert not sample_bsc(1000, 0.0, trial_rng(1, 0)).any()
    bits = sample_bsc(10**6, 0.5, trial_rng(123, 0))
    assert abs(bits.mean() - 0.5) < 0.002


def test_sample_bsc_stream_is_frozen():
    first = "".join(map(str, sample_bsc(32, 0.5, trial_rng(7, 0))))
    second = "".join(map(str, sample_bsc(32, 0.5, trial_rng(7, 1))))
    assert first == "01111010100010001001111101101111"
    assert second == "01110101111101000001000000100101"
    assert np.array_equal(sample_bsc(64, 0.3, trial_rng(9, 5)), sample_bsc(64, 0.3, trial_rng(9, 5)))


def test_zero_noise_point():
    pt = run_point(TrialConfig("toric", 5, 0.0, max_trials=500))
    assert pt.trials == 500 and pt.failures == 0 and pt.rate == 0.0


def test_stopping_rule_counts_up_to_the_target_failure():
    cfg = TrialConfig("toric", 5, 0.09, seed=4, max_trials=600, target_failures=7)
    failing = _chunk_failures(cfg, 0, 600)
    pt = run_point(cfg)
    assert pt.failures == 7
    assert pt.trials == failing[6] + 1
    uncapped = run_point(TrialConfig("toric", 5, 0.09, seed=4, max_trials=600, target_failures=10**6))
    assert (uncapped.trials, uncapped.failures) == (600, len(failing))


def test_worker_count_does_not_change_results():
    cfg = TrialConfig("rotated-planar", 5, 0.08, seed=99, max_trials=1500, target_failures=60)
    a, b = run_point(cfg, jobs=1), run_point(cfg, jobs=2)
    assert (a.trials, a.failures, a.ci_low, a.ci_high) == (b.trials, b.failures, b.ci_low, b.ci_high)


def test_classical_bf_point_runs():
    pt = run_point(TrialConfig("toric", 5, 0.05, seed=1, max_trials=300, decoder="classical-bf"))
    assert 0 < pt.failures <= pt.trials


def test_singleton_sweep_equals_point():
    [pt] = run_sweep("toric", [5], [0.07], 3, max_trials=400)
    direct = run_point(TrialConfig("toric", 5, 0.07, seed=derive_seed(3, 0), max_trials=400))
    assert (pt.trials, pt.failures, pt.config) == (direct.trials, direct.failures, direct.config)


def test_sweep_reports_broken_points_without_aborting():
    points = run_sweep("toric", [9], [0.05, 0.06], 3, D=1, max_trials=200)
    assert len(points) == 2
    assert all(pt.error and "DecoderConfigurationError" in pt.error for pt in points)


def test_derived_seeds_differ():
    assert len({derive_seed(7, i) for i in range(50)}) == 50
    assert derive_seed(7, 3) == derive_seed(7, 3)


def test_wilson_interval():
    lo, hi = wilson_interval(10, 100)
    assert lo < 0.1 < hi
    lo2, hi2 = wilson_interval(100, 1000)
    assert hi2 - lo2 < hi - lo
    assert wilson_interval(0, 50)[0] == 0.0


def _point(L, p, rate, trials=10**5):
    failures = round(rate * trials)
    lo, hi = wilson_interval(failures, trials)
    return ErrorRatePoint(TrialConfig("toric", L, p), trials, failures, lo, hi, 0.0)


def test_threshold_on_constructed_crossing():
    ps = grid(0.06, 0.09, 0.005)
    pts = []
    for L in (5, 7, 9):
        for p in ps:
            # log-linear curves pivoting about p = 0.075
            pts.append(_point(L, p, 0.01 * math.exp((L - 3) * 10 * (p - 0.075))))
    est = estimate_threshold(pts)
    assert est.found and not est.missing
    assert est.low <= 0.075 <= est.high
    assert est.high - est.low < 0.005


def test_threshold_without_crossing():
    pts = [_point(L, p, 0.01 * p / L) for L in (5, 7) for p in (0.06, 0.07, 0.08)]
    est = estimate_threshold(pts)
    assert not est.found and est.missing == ((5, 7),)
    assert "no crossing" in est.describe()


def test_threshold_needs_two_sizes():
    with pytest.raises(InvalidParameterError):
        estimate_threshold([_point(5, 0.07, 0.1)])


def test_csv_format():
    pt = _point(5, 0.07, 0.1, trials=1000)
    assert csv_header().splitlines()[1] == "family,L,D,p,decoder,trials,failures,rate,ci_low,ci_high,seed,seconds"
    assert csv_header().startswith("# ppbf ")
    fields = csv_line(pt).split(",")
    assert fields[:7] == ["toric", "5", "5", "0.07", "ppbf", "1000", "100"]
    assert fields[-1] == ""
    assert csv_line(pt, timing=True).split(",")[-1] == "0.0"


def test_grid():
    assert grid(0.06, 0.09, 0.005) == [0.06, 0.065, 0.07, 0.075, 0.08, 0.085, 0.09]
    assert len(grid(0.01, 0.1, 0.01)) == 10
    with pytest.raises(InvalidParameterError):
        grid(0.1, 0.05, 0.01)
