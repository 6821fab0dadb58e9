import numpy as np
import pytest

from kerrsense import CavityParams, ParameterError, fig3_surface, n_analytic_cp, sensitivity_analytic_cp, sensitivity_numeric, steady_state_closed_form
from kerrsense.flags import RowFlag

CP = CavityParams(eps=1e-3, g2=0.25)


@pytest.mark.parametrize("u, n", [(1e-9, 5e5), (1e-4, 50.0)])
def test_analytic_photon_number(u, n):
    assert n_analytic_cp(CP.replace(u_kerr=u))[0] == pytest.approx(n, rel=1e-12)


def test_analytic_eps_doubling():
    a = n_analytic_cp(CP.replace(u_kerr=1e-8))[0]
    b = n_analytic_cp(CP.replace(u_kerr=1e-8, eps=2e-3))[0]
    assert b / a == pytest.approx(2**0.4, rel=1e-12)


def test_prefactor_and_exponent():
    s1, k = sensitivity_analytic_cp(CP.replace(u_kerr=1e-9))
    assert k == pytest.approx(0.02524, rel=1e-4)
    # K U^(-9/5) at U = 1e-9 is 4.0e14
    assert s1 == pytest.approx(4.0e14, rel=1e-3)
    s2, _ = sensitivity_analytic_cp(CP.replace(u_kerr=2e-9))
    assert s1 / s2 == pytest.approx(2**1.8, rel=1e-12)


def test_analytic_needs_kerr():
    with pytest.raises(ParameterError):
        n_analytic_cp(CP)


def test_numeric_matches_analytic_at_cp():
    rep = sensitivity_numeric(CP.replace(u_kerr=1e-9))
    assert rep.s_numeric == pytest.approx(rep.s_analytic, rel=0.1)
    assert not rep.step_disagree
    assert rep.validity < 0.01
    s_hz, _ = rep.per_hz(1e9)
    assert s_hz == pytest.approx(rep.s_numeric / 1e9)


def test_numeric_slope():
    us = np.logspace(-9, -6, 7)
    s = [sensitivity_numeric(CP.replace(u_kerr=u)).s_numeric for u in us]
    slope = np.polyfit(np.log10(us), np.log10(s), 1)[0]
    assert slope == pytest.approx(-1.8, abs=0.05)


def test_flat_response_off_resonance():
    rep = sensitivity_numeric(CavityParams(eps=1e-3, u_kerr=1e-12))
    assert rep.s_numeric < 1e-6


def test_sensitivity_decreases_away_from_cp():
    u = 1e-9
    s = [sensitivity_numeric(CP.replace(u_kerr=u, g2=0.25 - d)).s_numeric for d in (0.0, 1e-7, 1e-6, 1e-5)]
    assert all(a > b for a, b in zip(s, s[1:]))


def test_surface_interior_maximum_below_cp():
    us = list(np.logspace(-12, -5, 29))
    rows = fig3_surface(CP, us, [0.25 - 1e-6])
    s = np.array([r.s_numeric for r in rows])
    i = int(np.nanargmax(s))
    assert 0 < i < len(s) - 1


def test_surface_orders_and_parallel_equivalence():
    us = [1e-9, 1e-8, 1e-7]
    gs = [0.25, 0.2499]
    serial = fig3_surface(CP, us, gs)
    assert [(r.g2, r.u_kerr) for r in serial] == [(g, u) for g in gs for u in us]
    assert fig3_surface(CP, us, gs, max_workers=2) == serial


def test_single_point_surface_matches_direct():
    (row,) = fig3_surface(CP, [1e-9], [0.25])
    p = CP.replace(u_kerr=1e-9)
    assert row.n_mean == steady_state_closed_form(p).branch.n_mean
    assert row.s_numeric == sensitivity_numeric(p).s_numeric
    assert row.flags == 0 and row.flags_text == "ok"


def test_surface_flags_failures():
    rows = fig3_surface(CavityParams(eps=1e-3), [0.0], [0.3])
    assert rows[0].flags & RowFlag.STEADY_FAILED
