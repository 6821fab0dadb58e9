import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kerrsense import (
    CavityParams,
    NoiseState,
    PreconditionError,
    SteadyStateBranch,
    fig4_curves,
    noise_dynamics_rhs,
    noise_steady_state,
    snr,
    steady_state_closed_form,
)
from kerrsense.fluctuations import SnrReport


def linear_noise(g, gamma=1.0):
    # hand-solved U = 0, Delta = 0 steady state
    n = 8 * g**2 / (gamma**2 - 16 * g**2)
    return n, -2j * g * (2 * n + 1) / gamma


def vacuum_branch(p):
    return steady_state_closed_form(p).branch


def test_vacuum_seed_rhs():
    p = CavityParams(g2=0.2)
    dn, dm = noise_dynamics_rhs(NoiseState(0.0, 0j), vacuum_branch(p), p)
    assert dn == 0.0
    assert dm == pytest.approx(-0.4j)


def test_linear_value_at_g02():
    p = CavityParams(g2=0.2)
    ns = noise_steady_state(vacuum_branch(p), p)
    assert ns.n_fluct == pytest.approx(0.8889, abs=1e-4)
    assert ns.m_anom == pytest.approx(-1.1111j, abs=1e-4)
    n, m = linear_noise(0.2)
    assert ns.n_fluct == pytest.approx(n, rel=1e-9)
    assert ns.m_anom == pytest.approx(m, rel=1e-9)


def test_empty_cavity_stays_vacuum():
    p = CavityParams()
    ns = noise_steady_state(vacuum_branch(p), p)
    assert ns.n_fluct == 0.0 and ns.m_anom == 0


def test_noise_grows_towards_threshold():
    values = []
    for g in (0.2, 0.24, 0.249, 0.2499):
        p = CavityParams(g2=g)
        values.append(noise_steady_state(vacuum_branch(p), p).n_fluct)
    assert all(b > 5 * a for a, b in zip(values[1:], values[2:]))
    assert values[-1] > 600


def test_unstable_branch_rejected():
    p = CavityParams(g2=0.3)
    br = SteadyStateBranch.from_alpha(0j, p)
    with pytest.raises(PreconditionError):
        noise_steady_state(br, p)


def test_operating_point_frozen(op_point):
    br = steady_state_closed_form(op_point).branch
    ns = noise_steady_state(br, op_point)
    assert ns.physical
    assert ns.n_fluct == pytest.approx(22481.987045786824, rel=1e-6)
    rep = snr(br, ns)
    assert rep.snr_db == pytest.approx(13.0, abs=1.0)


@pytest.mark.parametrize("ratio, db", [(20.0, 13.0103), (1.0, 0.0)])
def test_snr_identity(ratio, db):
    br = SteadyStateBranch.from_alpha(complex(math.sqrt(ratio * 3.0)), CavityParams())
    assert snr(br, NoiseState(3.0, 0j)).snr_db == pytest.approx(db, abs=1e-4)


def test_snr_sentinels():
    br = SteadyStateBranch.from_alpha(0.2 + 0j, CavityParams(eps=0.1))
    rep = snr(br, NoiseState(0.0, 0j))
    assert rep.infinite and rep.snr_db is None
    assert rep.as_dict()["snr_infinite"] is True
    assert isinstance(rep, SnrReport)


def test_fig4_trends(op_point):
    rows = fig4_curves(op_point, [1e-11, 1e-10, 1e-9], [1e-6, 1e-5, 1e-4, 1e-3])
    u_rows = [r for r in rows if r.swept == "u_kerr"]
    assert all(r.flags == 0 for r in rows)
    for a, b in zip(u_rows, u_rows[1:]):
        assert a.n_mean > b.n_mean and a.n_fluct > b.n_fluct
    eps_rows = {r.value: r for r in rows if r.swept == "eps"}
    assert eps_rows[1e-6].n_fluct > eps_rows[1e-6].n_mean
    assert eps_rows[1e-4].n_mean > eps_rows[1e-4].n_fluct


@settings(max_examples=25, deadline=None)
@given(st.floats(0.0, 0.245))
def test_linear_noise_matches_closed_form(g):
    p = CavityParams(g2=g)
    ns = noise_steady_state(vacuum_branch(p), p)
    n, m = linear_noise(g)
    assert ns.n_fluct == pytest.approx(n, rel=1e-6, abs=1e-12)
    assert ns.m_anom == pytest.approx(m, rel=1e-6, abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.floats(1e-6, 1e-2), st.floats(0.0, 0.3), st.floats(1e-4, 1e-1))
def test_nonlinear_state_is_stationary_and_real(u, g, eps):
    p = CavityParams(u_kerr=u, g2=g, eps=eps)
    br = steady_state_closed_form(p).branch
    if not br.fluct_stable:
        return
    ns = noise_steady_state(br, p)
    dn, dm = noise_dynamics_rhs(ns, br, p)
    scale = max(1.0, np.linalg.norm(ns.as_vector()))
    assert abs(dn) < 1e-8 * scale and abs(dm) < 1e-8 * scale
    assert ns.n_fluct >= 0.0
