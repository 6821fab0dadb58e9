import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kerrsense import CavityParams, SteadyStateBranch, classify, eigen_fluctuation, eigen_meanfield, spectrum, steady_state_closed_form
from kerrsense.stability import eigenpair


def dense_eigs(gamma, coupling, detuning):
    # oracle: numpy on the 2x2 real form of the (alpha, alpha*) block
    m = np.array([[-gamma / 2 - 1j * detuning, -2j * coupling], [2j * coupling, -gamma / 2 + 1j * detuning]])
    return list(np.linalg.eigvals(m))


@pytest.mark.parametrize(
    "d1, g, plus, minus",
    [(0.0, 0.25, 0.0, -1.0), (0.0, 0.0, -0.5, -0.5), (0.5, 0.0, -0.5 + 0.5j, -0.5 - 0.5j)],
)
def test_meanfield_examples(d1, g, plus, minus):
    lp, lm = eigen_meanfield(CavityParams(g2=g), d1)
    assert lp == pytest.approx(plus, abs=1e-15)
    assert lm == pytest.approx(minus, abs=1e-15)


def test_critical_point_exact_zero():
    lp, _ = eigen_meanfield(CavityParams(g2=0.25), 0.0)
    assert lp == 0.0


def test_fluctuation_examples():
    vac = SteadyStateBranch.from_alpha(0j, CavityParams(g2=0.25))
    lp, lm = eigen_fluctuation(CavityParams(g2=0.25), vac)
    assert (lp, lm) == pytest.approx((0.0, -1.0), abs=1e-15)
    assert eigenpair(1.0, 0.1, 0.0) == pytest.approx((-0.3, -0.7))


@pytest.mark.parametrize("g, expect", [(0.2, (True, True)), (0.3, (False, False))])
def test_classify_linear(g, expect):
    p = CavityParams(g2=g)
    assert classify(p, SteadyStateBranch.from_alpha(0j, p)) == expect


def test_operating_point_ordering(op_point):
    br = steady_state_closed_form(op_point).branch
    s = spectrum(op_point, br)
    assert s.mf_stable and s.fluct_stable
    assert s.lambda_low_plus.real < s.lambda_cap_plus.real < 0.0


@settings(max_examples=200, deadline=None)
@given(st.floats(0.1, 10.0), st.floats(0.0, 5.0), st.floats(-5.0, 5.0))
def test_eigenpair_matches_dense(gamma, coupling, detuning):
    got = eigenpair(gamma, coupling, detuning)
    ref = dense_eigs(gamma, coupling, detuning)
    # numpy loses half the digits at the exceptional point detuning = 2 coupling
    tol = 1e-7 * (gamma + coupling + abs(detuning))
    for a in got:
        assert min(abs(a - b) for b in ref) < tol
    assert got[0].real >= got[1].real


@settings(max_examples=200, deadline=None)
@given(st.floats(0.1, 10.0), st.floats(0.0, 5.0), st.floats(-5.0, 5.0))
def test_trace_and_determinant(gamma, coupling, detuning):
    lp, lm = eigenpair(gamma, coupling, detuning)
    scale = (gamma + coupling + abs(detuning)) ** 2
    assert (lp + lm) == pytest.approx(-gamma, abs=1e-12 * gamma)
    assert lp * lm == pytest.approx(gamma**2 / 4 + detuning**2 - 4 * coupling**2, abs=1e-10 * scale)
