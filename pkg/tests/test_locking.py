import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from forcedhet.core import PHI, MapParams
from forcedhet.diagram import classify_region
from forcedhet.errors import DomainError
from forcedhet.locking import (
    StabilityNote,
    WindowSource,
    existence_intervals,
    lock_windows,
    omega_to_tau,
    predicted_window_count,
    tau_to_omega,
    torus_and_chaos_report,
)

from cases import REGION_SAMPLES
from oracles import brute_force_fold_taus, cubic_root, g

# -K pi / ln(tau) at K = 9/16 for the cubic-root fold taus of (2, 0.5, 0.5)
Z_WINDOW = (6.328841097160833, 20.362668852260427)
OMEGA_AT_HALF = 2.5494525797777965

OPEN_SAMPLES = [(tag, s) for tag, ss in REGION_SAMPLES.items() if not tag.startswith("K0") for s in ss]


def _slice_has_zeros(params, tau, n_s=4000):
    s = np.linspace(0.0, 2 * math.pi, n_s, endpoint=False)
    v = g(*params, tau, s)
    return bool(np.any(np.sign(v) != np.sign(np.roll(v, -1))))


def test_tau_to_omega_value():
    assert tau_to_omega(0.5625, 0.5) == pytest.approx(OMEGA_AT_HALF, abs=1e-12)
    assert OMEGA_AT_HALF == pytest.approx(0.5625 * math.pi / math.log(2.0), rel=1e-15)


@given(st.floats(0.01, 5.0), st.floats(1e-6, 0.999999), st.integers(1, 9))
def test_tau_to_omega_linear_in_n(K, tau, n):
    assert tau_to_omega(K, tau, n) == pytest.approx(n * tau_to_omega(K, tau), rel=1e-15)
    assert omega_to_tau(K, tau_to_omega(K, tau, n), n) == pytest.approx(tau, rel=1e-9)


def test_tau_to_omega_monotone():
    t = np.linspace(1e-6, 1 - 1e-6, 1000)
    w = [tau_to_omega(1.0, x) for x in t]
    assert all(b > a for a, b in zip(w, w[1:]))


@pytest.mark.parametrize("args", [(1.0, 0.0), (1.0, 1.0), (1.0, 1.5), (0.0, 0.5), (1.0, 0.5, 0), (1.0, 0.5, 1.5)])
def test_tau_to_omega_domain(args):
    with pytest.raises(DomainError):
        tau_to_omega(*args)


def test_worked_window():
    (w,) = lock_windows(MapParams(2.0, 0.5, 0.5, 0.5625))
    t_lo, t_hi = cubic_root(0.75), cubic_root(0.25)
    assert -0.5625 * math.pi / math.log(t_lo) == pytest.approx(Z_WINDOW[0], rel=1e-14)
    assert -0.5625 * math.pi / math.log(t_hi) == pytest.approx(Z_WINDOW[1], rel=1e-14)
    assert w.omega_lo == pytest.approx(Z_WINDOW[0], abs=1e-9)
    assert w.omega_hi == pytest.approx(Z_WINDOW[1], abs=1e-9)
    assert w.source is WindowSource.FOLD_INTERVAL


@pytest.mark.parametrize("tag,params", OPEN_SAMPLES)
def test_window_scaling_in_n(tag, params):
    ws = lock_windows(MapParams(*params, K=0.8), n_max=3)
    base = [w for w in ws if w.n == 1]
    for n in (2, 3):
        wn = [w for w in ws if w.n == n]
        assert len(wn) == len(base)
        for a, b in zip(base, wn):
            assert b.omega_lo == pytest.approx(n * a.omega_lo, rel=1e-12, abs=1e-12)
            if math.isinf(a.omega_hi):
                assert math.isinf(b.omega_hi)
            else:
                assert b.omega_hi == pytest.approx(n * a.omega_hi, rel=1e-12)


@pytest.mark.parametrize("tag,params", OPEN_SAMPLES)
def test_window_count_per_region(tag, params):
    assert len(lock_windows(MapParams(*params, K=1.0))) == predicted_window_count(tag)


@pytest.mark.parametrize("tag,params", OPEN_SAMPLES)
def test_window_ends_sit_in_brute_force_fold_cells(tag, params):
    ws = lock_windows(MapParams(*params, K=1.0))
    cells, _ = brute_force_fold_taus(*params, lo=1e-12)
    for w in ws:
        for t in (w.tau_lo, w.tau_hi):
            if t in (0.0, 1.0):
                continue
            assert any(a <= t <= b for a, b in cells)


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(OPEN_SAMPLES), st.floats(0.05, 60.0))
def test_frequency_inside_window_iff_slice_has_zeros(sample, omega):
    _, params = sample
    ws = lock_windows(MapParams(*params, K=1.0))
    tau = omega_to_tau(1.0, omega)
    inside = [w.omega_lo < omega < w.omega_hi for w in ws]
    near_edge = any(abs(omega - e) < 1e-3 * omega for w in ws for e in (w.omega_lo, w.omega_hi))
    if near_edge or tau < 1e-12:
        return
    assert any(inside) == _slice_has_zeros(params, tau)


@pytest.mark.parametrize("params", REGION_SAMPLES["W"])
def test_no_locking_in_W(params):
    assert classify_region(*params).tag == "W"
    assert lock_windows(MapParams(*params, K=1.0)) == []


def test_empty_windows_only_in_W():
    for tag, params in OPEN_SAMPLES:
        empty = not lock_windows(MapParams(*params, K=1.0))
        assert empty == (tag == "W")


def test_full_axis_windows():
    (w,) = lock_windows(MapParams(*REGION_SAMPLES["A"][0], K=1.0))
    assert w.source is WindowSource.FULL_AXIS
    assert (w.omega_lo, w.omega_hi) == (0.0, math.inf)


def test_stability_note_near_attracting_fold():
    lower, upper = lock_windows(MapParams(*REGION_SAMPLES["Y"][0], K=1.0))
    assert lower.stability_note is StabilityNote.ONE_ATTRACTING_NEAR_FOLD
    assert upper.stability_note is StabilityNote.UNKNOWN


@pytest.mark.parametrize("params", [(1.5, 0.0, 0.5), (1.5, 0.3, 0.0)])
def test_unforced_or_unmodulated_has_no_intervals(params):
    assert existence_intervals(MapParams(*params, K=1.0)) == []


def test_report_weak_forcing():
    r = torus_and_chaos_report(1.5, 0.5)
    assert [c.region for c in r.candidates] == ["Y", "X", "X"]
    assert r.gamma_minus is not None
    for c in r.candidates:
        assert c.computed_hopf_gammas
        assert set(c.computed_regions) == {c.region}
        assert all(c.gamma_lo < x < c.gamma_hi for x in c.computed_hopf_gammas)
    text = str(r)
    assert "region Y" in text and "region X" in text


def test_report_strong_forcing():
    r = torus_and_chaos_report(1.5, 2.0)
    (c,) = r.candidates
    assert c.region == "B" and r.gamma_minus is None
    assert set(c.computed_regions) == {"B"}


@pytest.mark.parametrize("d,k", [(PHI, 0.5), (1.7, 0.5), (1.5, 1.0), (1.5, 0.0)])
def test_report_domain(d, k):
    with pytest.raises(DomainError):
        torus_and_chaos_report(d, k)
