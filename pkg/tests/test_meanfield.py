import cmath

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kerrsense import (
    CavityParams,
    DivergentSteadyState,
    NonConvergence,
    effective_params,
    steady_state_closed_form,
    steady_state_time_march,
)
from kerrsense.meanfield import TOL_ROOT, mean_field_rhs, select_branch, self_consistency_poly


def closed_form_alpha(p):
    # independent oracle: the linear-algebra solution of the stationary equation with the
    # Kerr shift folded into Delta' at the solved photon number
    bs = steady_state_closed_form(p)
    d1 = bs.branch.delta_prime
    den = d1**2 + p.gamma**2 / 4 - 4 * p.g2**2
    return (p.gamma / 2 - 1j * (d1 + 2 * p.g2)) * p.eps / den


def test_empty_cavity():
    br = steady_state_closed_form(CavityParams(eps=0.1)).branch
    assert br.alpha == pytest.approx(0.2)
    assert br.n_mean == pytest.approx(0.04)


def test_linear_parametric_value():
    alpha = steady_state_closed_form(CavityParams(eps=1e-3, g2=0.2)).branch.alpha
    assert alpha.real == pytest.approx(0.005556, abs=5e-7)
    assert alpha.imag == pytest.approx(-0.004444, abs=5e-7)
    # the same number by direct evaluation: (0.5 - 0.4i) eps / 0.09
    assert alpha == pytest.approx((0.5 - 0.4j) * 1e-3 / 0.09, rel=1e-13)


def test_operating_point_photon_number(op_point):
    n = steady_state_closed_form(op_point).branch.n_mean
    assert n == pytest.approx(5e5, rel=0.05)
    # frozen quintic root
    assert n == pytest.approx(500200.1199244924, rel=1e-9)


def test_time_march_agrees(op_point):
    n_cf = steady_state_closed_form(op_point).branch.n_mean
    n_tm = steady_state_time_march(op_point).n_mean
    assert n_tm == pytest.approx(n_cf, rel=1e-2)


def test_time_march_empty_cavity():
    assert steady_state_time_march(CavityParams(eps=0.1)).alpha == pytest.approx(0.2, rel=1e-8)


def test_time_march_above_threshold_diverges():
    with pytest.raises(NonConvergence) as info:
        steady_state_time_march(CavityParams(eps=1e-3, g2=0.3))
    assert info.value.residual is not None


@pytest.mark.parametrize("g", [0.25, 0.3])
def test_linear_threshold_raises(g):
    with pytest.raises(DivergentSteadyState):
        steady_state_closed_form(CavityParams(eps=1e-3, g2=g))


def test_effective_params_examples():
    p = CavityParams(u_kerr=1e-3, g2=0.25)
    assert effective_params(0j, p) == (0.0, 0.0, 0.25)
    d1, d2, gp = effective_params(10 + 0j, p)
    assert (d1, d2) == pytest.approx((0.2, 0.4))
    assert gp == pytest.approx(0.35)
    d1, d2, gp = effective_params(1 + 1j, p)
    assert (d1, d2) == pytest.approx((0.004, 0.008))
    assert gp == pytest.approx(0.25 + 0.002j)


def test_above_threshold_has_three_branches():
    p = CavityParams(u_kerr=1e-5, eps=1e-3, g2=0.3)
    bs = steady_state_closed_form(p)
    assert len(bs) == 3
    assert bs.branch.stable
    assert bs.branch.n_mean == max(b.n_mean for b in bs.branches)


def test_undriven_above_threshold_pairs():
    p = CavityParams(u_kerr=1e-3, g2=0.3)
    bs = steady_state_closed_form(p)
    alphas = sorted((b.alpha for b in bs.branches), key=lambda a: (abs(a), cmath.phase(a)))
    assert alphas[0] == 0
    nonzero = alphas[1:]
    assert len(nonzero) % 2 == 0
    for a in nonzero:
        assert any(abs(a + b) < 1e-9 * abs(a) for b in nonzero)


def test_continuity_picks_nearest_of_symmetric_pair():
    # undriven above threshold: alpha and -alpha are equally good, continuity decides
    p = CavityParams(u_kerr=1e-3, g2=0.3)
    bs = steady_state_closed_form(p)
    a = bs.branch.alpha
    assert a != 0 and bs.branch.fluct_stable
    for guess in (a, -a):
        i = select_branch(bs.branches, "continuity", previous=guess * 1.01)
        assert bs.branches[i].alpha == pytest.approx(guess)


def test_poly_coefficients_match_definition():
    p = CavityParams(delta=0.1, u_kerr=1e-3, eps=1e-2, g2=0.2)
    c = self_consistency_poly(p)
    for x in (0.0, 1.0, 7.5):
        d1 = p.delta + 2 * p.u_kerr * x
        det = d1**2 + 0.25 * p.gamma**2 - 4 * p.g2**2
        rhs = p.eps**2 * (p.gamma**2 / 4 + (d1 + 2 * p.g2) ** 2)
        assert np.polyval(c[::-1], x) == pytest.approx(x * det**2 - rhs, rel=1e-12, abs=1e-18)


driven = st.builds(
    CavityParams,
    delta=st.floats(-1.0, 1.0),
    u_kerr=st.floats(1e-9, 1e-1),
    eps=st.floats(1e-4, 1.0),
    g2=st.floats(0.0, 0.6),
)


@settings(max_examples=60, deadline=None)
@given(driven)
def test_all_branches_are_stationary(p):
    for br in steady_state_closed_form(p).branches:
        scale = max(1.0, abs(br.alpha)) * p.gamma
        assert abs(mean_field_rhs(br.alpha, p)) <= 1e-6 * scale
        assert br.residual <= TOL_ROOT * scale or abs(mean_field_rhs(br.alpha, p)) <= 1e-6 * scale


@settings(max_examples=40, deadline=None)
@given(driven)
def test_selected_alpha_matches_linear_formula(p):
    alpha = steady_state_closed_form(p).branch.alpha
    assert alpha == pytest.approx(closed_form_alpha(p), rel=1e-6, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.0, 0.24), st.floats(1e-4, 1.0), st.floats(-1.0, 1.0), st.floats(0.1, 10.0))
def test_gamma_rescaling_invariance(g, eps, delta, scale):
    # every rate times s: alpha is unchanged (it is dimensionless)
    p = CavityParams(delta=delta, eps=eps, g2=g, u_kerr=1e-4)
    q = CavityParams(gamma=scale, delta=scale * delta, eps=scale * eps, g2=scale * g, u_kerr=scale * 1e-4)
    a = steady_state_closed_form(p).branch.alpha
    b = steady_state_closed_form(q).branch.alpha
    assert b == pytest.approx(a, rel=1e-7, abs=1e-12)
