import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from forcedhet.core import (
    PHI,
    TWO_PI,
    CylinderPoint,
    F_delta,
    M_F,
    MapParams,
    ModelParams,
    circular_distance,
    dF_delta,
    det_condition_f,
    df_dgamma,
    eval_g,
    eval_G,
    eval_G_tau,
    h_delta,
    h_delta_zero,
    hopf_trace,
    jacobian_G_tau,
    lambda2_at_fold,
    p_delta,
    tau_m,
    wrap_angle,
)
from forcedhet.errors import DomainError, NonPositiveImageError

from oracles import argmax_F, fd_jacobian

# maximiser of F_delta found by grid + ternary search (oracles.argmax_F)
ARGMAX_F = {
    1.2: (0.3541313830599364, 0.1665851913846177),
    1.5: (0.2384948407058456, 0.5823559323096493),
    1.6: (0.09398064850211307, 0.8870051765636748),
}

deltas = st.floats(1.01, 2.5)
taus = st.floats(1e-6, 1.0)
angles = st.floats(0.0, TWO_PI, exclude_max=True)


def test_p_delta_vanishes_at_golden_ratio():
    assert abs(p_delta(PHI)) < 1e-12
    assert p_delta(1.5) == pytest.approx(0.25)


@given(deltas)
def test_F_vanishes_at_one(d):
    assert F_delta(d, 1.0) == 0.0


@pytest.mark.parametrize("d", [1.2, 1.5, 1.6])
def test_tau_m_and_M_F_match_brute_force_maximum(d):
    t_ref, m_ref = ARGMAX_F[d]
    assert tau_m(d) == pytest.approx(t_ref, abs=1e-6)
    assert M_F(d) == pytest.approx(m_ref, rel=1e-10)


def test_frozen_argmax_values_still_reproduce():
    t, m = argmax_F(1.5)
    assert t == pytest.approx(ARGMAX_F[1.5][0], abs=1e-9)
    assert m == pytest.approx(ARGMAX_F[1.5][1], rel=1e-12)


def test_max_at_golden_ratio_limit():
    d = PHI - 1e-4
    assert M_F(d) == pytest.approx(1.0, abs=1e-2)
    assert tau_m(d) == pytest.approx(0.0, abs=1e-2)


@pytest.mark.parametrize("d", [PHI, 1.7, 1.0])
def test_tau_m_rejects_strong_regime(d):
    with pytest.raises(DomainError):
        tau_m(d)
    with pytest.raises(DomainError):
        M_F(d)


@given(deltas, st.floats(1e-4, 0.999))
def test_dF_matches_central_difference(d, t):
    h = 1e-6 * t
    fd = (F_delta(d, t + h) - F_delta(d, t - h)) / (2 * h)
    assert dF_delta(d, t) == pytest.approx(fd, rel=1e-6, abs=1e-6)


@given(deltas)
def test_h_delta_at_one(d):
    assert h_delta(d, 1.0) == -(1 + d) / d


@given(st.floats(1.05, 2.5))
def test_h_delta_zero_is_a_root(d):
    y0 = h_delta_zero(d)
    assert 0.0 < y0 < 1.0
    assert abs(h_delta(d, y0)) < 1e-10


def test_F_array_input():
    t = np.array([0.1, 0.5, 1.0])
    out = F_delta(1.5, t)
    assert out.shape == (3,)
    assert out[-1] == 0.0


@pytest.mark.parametrize("bad", [0.0, -0.1, 1.0000001, float("nan")])
def test_F_rejects_tau_outside_unit_interval(bad):
    with pytest.raises(DomainError):
        F_delta(1.5, bad)


@given(deltas, st.floats(0.0, 2.0), st.floats(0.0, 3.0), taus, angles)
def test_g_partials_match_finite_differences(d, gamma, k, t, s):
    mp = MapParams(d, gamma, k, 1.0)
    jet = eval_g(mp, t, s)
    h = 1e-6
    fd_s = (eval_g(mp, t, s + h).value - eval_g(mp, t, s - h).value) / (2 * h)
    assert jet.d_ds == pytest.approx(fd_s, rel=1e-5, abs=1e-8)
    if t < 1.0 - 1e-5:
        ht = 1e-6 * t
        fd_t = (eval_g(mp, t + ht, s).value - eval_g(mp, t - ht, s).value) / (2 * ht)
        assert jet.d_dtau == pytest.approx(fd_t, rel=1e-5, abs=1e-6)


@settings(max_examples=60)
@given(st.floats(1.05, 2.2), st.floats(0.01, 1.5), st.floats(0.0, 3.0), st.floats(0.1, 2.0),
       st.floats(0.01, 1.0), angles)
def test_jacobian_matches_finite_differences(d, gamma, k, K, y, s):
    mp = MapParams(d, gamma, k, K)
    if 1 + k * math.sin(s) < 0 and y ** (d * d) + gamma * y ** (d * d - d) * (1 + k * math.sin(s)) <= 0:
        return
    J = jacobian_G_tau(mp, CylinderPoint(y, s))
    fd = fd_jacobian(d, gamma, k, K, 0.5, y, s)
    scale = np.abs(J).max()
    assert np.allclose(J, fd, rtol=1e-6, atol=1e-6 * scale)


def test_eval_G_rejects_non_positive_image():
    mp = MapParams(1.5, 1.0, 3.0, 1.0)
    with pytest.raises(NonPositiveImageError):
        eval_G(mp, CylinderPoint(0.5, 1.5 * math.pi))


def test_G_tau_shift_is_phase_only():
    mp = MapParams(1.5, 0.3, 0.5, 0.8)
    pt = CylinderPoint(0.4, 1.0)
    a, b = eval_G(mp, pt), eval_G_tau(mp, 0.3, pt)
    assert a.y == b.y
    assert circular_distance(b.s, a.s + math.log(0.3) / 0.8) < 1e-14


def test_fixed_point_of_G_tau_is_zero_of_g():
    mp = MapParams(2.0, 0.5, 0.5, 0.5625)
    t = 0.8
    u = (F_delta(2.0, t) / 0.5 - 1.0) / 0.5
    s = math.asin(u)
    assert abs(eval_g(mp, t, s).value) < 1e-14
    img = eval_G_tau(mp, t, CylinderPoint(t, s))
    assert img.y == pytest.approx(t, abs=1e-14)
    assert circular_distance(img.s, s) < 1e-12


@given(st.floats(1.05, 1.6), st.floats(0.05, 3.0), st.sampled_from([1, -1]), st.floats(1e-4, 1.0))
def test_lambda2_at_fold_reduces_on_the_fold_level(d, k, eps, t):
    # on a fold gamma(1 + eps k) = F(t); lambda2 then only depends on t
    if eps == -1 and k >= 1:
        return
    gamma = F_delta(d, t) / (1 + eps * k)
    if gamma <= 0:
        return
    mp = MapParams(d, gamma, k, 1.0)
    closed = d * d - d + d * t ** (d * d - 1)
    assert lambda2_at_fold(mp, t, eps) == pytest.approx(closed, rel=1e-12)


def test_lambda2_rejects_bad_eps():
    with pytest.raises(DomainError):
        lambda2_at_fold(MapParams(1.5, 0.3, 0.5, 1.0), 0.5, 0)


@settings(max_examples=80)
@given(st.floats(1.05, 2.2), st.floats(0.01, 1.5), st.floats(0.0, 3.0), st.floats(0.1, 2.0),
       st.floats(1e-3, 1.0), angles)
def test_det_condition_is_scaled_det_minus_one(d, gamma, k, K, t, s):
    # at y = tau the identity f = tau^p (det - 1) holds with no fixed-point assumption
    mp = MapParams(d, gamma, k, K)
    J = jacobian_G_tau(mp, CylinderPoint(t, s))
    det = J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
    p = p_delta(d)
    lhs = det_condition_f(mp, t, s)
    rhs = t ** p * (det - 1.0)
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9 * (abs(det) * t ** p + 1))


@given(st.floats(1.05, 1.6), st.floats(0.05, 3.0), st.sampled_from([1, -1]))
def test_df_dgamma_at_folds_is_exact(d, k, eps):
    s = math.pi / 2 if eps == 1 else 1.5 * math.pi
    mp = MapParams(d, 0.3, k, 0.7)
    e = d * d - d
    assert df_dgamma(mp, 0.5, s) == pytest.approx((1 + eps * k) * e, rel=1e-15, abs=1e-15)


def test_hopf_trace_is_the_trace_when_det_is_one():
    d, k, K, t = 1.5, 0.5, 1.0, 0.2
    s, gamma = 1.3997901505598858, 0.38808525582260434
    mp = MapParams(d, gamma, k, K)
    J = jacobian_G_tau(mp, CylinderPoint(t, s))
    assert abs(J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0] - 1.0) < 1e-10
    assert hopf_trace(mp, t, s) == pytest.approx(J[0, 0] + J[1, 1], abs=1e-10)


def test_model_params_derived_quantities():
    a = ModelParams(2.0, -0.4)
    assert a.delta == pytest.approx(1.5, rel=1e-15)
    assert a.K == pytest.approx(0.64, rel=1e-15)
    b = ModelParams(2.0, -0.5)
    assert b.delta == pytest.approx(5.0 / 3.0, rel=1e-15)
    assert b.K == pytest.approx(0.5625, rel=1e-15)
    assert all(a.constraints.values())
    assert b.forcing_period == pytest.approx(math.pi)


@pytest.mark.parametrize("alpha,beta", [(2.0, 0.5), (1.0, -1.5), (5.0, -0.5), (2.0, 0.0)])
def test_model_params_constraints(alpha, beta):
    with pytest.raises(DomainError):
        ModelParams(alpha, beta)


def test_model_params_map_params_needs_k():
    mp = ModelParams(2.0, -0.5, gamma=0.05).map_params(0.5)
    assert mp.k == 0.5 and mp.gamma == 0.05 and mp.K == pytest.approx(0.5625)


@pytest.mark.parametrize("kw", [dict(delta=1.0), dict(K=0.0), dict(gamma=-0.1), dict(k=-1.0)])
def test_map_params_validation(kw):
    base = dict(delta=1.5, gamma=0.3, k=0.5, K=1.0)
    base.update(kw)
    with pytest.raises(DomainError):
        MapParams(**base)


def test_cylinder_point_wraps_and_validates():
    assert CylinderPoint(0.5, -0.1).s == pytest.approx(TWO_PI - 0.1)
    with pytest.raises(DomainError):
        CylinderPoint(0.0, 1.0)


@given(st.floats(-1e4, 1e4))
def test_wrap_angle_range(x):
    w = wrap_angle(x)
    assert 0.0 <= w < TWO_PI
    assert abs(math.remainder(w - x, TWO_PI)) < 1e-9
