import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thetafourier.core import CoeffTable, GridSpec, ThetaSpec, shift_log_branch
from thetafourier.fourier import analyze, band_limited_table, synthesize, translate
from thetafourier.poincare import poincare_case, poincare_verify, sharp_mode
from thetafourier.regularity import OperatorSpec, diagnose
from thetafourier.transform import lp_norm, omega_forward, omega_inverse

moduli = st.sampled_from([1 / 3, 1.0, math.e, 2.0])
phases = st.floats(-math.pi, math.pi)
thetas = st.builds(lambda r, p: r * cmath.exp(1j * p), moduli, phases)
periods = st.floats(0.5, 7.0)
seeds = st.integers(0, 2**32 - 1)

# tiny random phases land within roundoff of a critical theta
pytestmark = pytest.mark.filterwarnings("ignore:theta is within")


def spec_of(n):
    return st.builds(lambda th, T: ThetaSpec(tuple(th), T), st.lists(thetas, min_size=n, max_size=n), periods)


@settings(max_examples=30, deadline=None)
@given(spec_of(2), seeds)
def test_omega_round_trip(spec, seed):
    rng = np.random.default_rng(seed)
    f = synthesize(band_limited_table(rng, spec, 5), GridSpec(2, 16))
    g = omega_forward(f)
    np.testing.assert_allclose(omega_inverse(g, spec).values, f.values, rtol=1e-12)
    assert abs(lp_norm(f) - lp_norm(g)) <= 1e-12 * lp_norm(g)


@settings(max_examples=30, deadline=None)
@given(spec_of(1), seeds, st.floats(-5, 5))
def test_translation_group(spec, seed, a):
    rng = np.random.default_rng(seed)
    t = band_limited_table(rng, spec, 4)
    twice = translate(translate(t, [a]), [spec.T - a])
    np.testing.assert_allclose(twice.values, spec.theta[0] * t.values, rtol=1e-9, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(spec_of(1), seeds)
def test_poincare_never_violated(spec, seed):
    rng = np.random.default_rng(seed)
    assert poincare_verify(band_limited_table(rng, spec, 6)).holds


@settings(max_examples=40, deadline=None)
@given(spec_of(1), st.integers(-3, 3))
def test_poincare_branch_invariant(spec, k):
    shifted = shift_log_branch(spec, k)
    a, b = poincare_case(spec), poincare_case(shifted)
    assert math.isclose(a.constant, b.constant, rel_tol=1e-12)
    for s, case in ((spec, a), (shifted, b)):
        r = poincare_verify(CoeffTable.from_entries({sharp_mode(case): 1.0}, s, 8))
        assert 1 - 1e-12 <= r.ratio <= 1 + 1e-9  # one ulp of roundoff either side


@settings(max_examples=25, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-2, 2), st.integers(-2, 2))
def test_verdict_branch_invariant(c_re, c_im, q, k):
    spec = ThetaSpec((1.0, -1.0), 2 * math.pi)
    c = complex(c_re, c_im)
    base = diagnose(OperatorSpec(spec, c, q), Xi=16).key()
    assert diagnose(OperatorSpec(shift_log_branch(spec, k), c, q), Xi=16).key() == base


@settings(max_examples=20, deadline=None)
@given(spec_of(2), seeds)
def test_analyze_synthesize(spec, seed):
    rng = np.random.default_rng(seed)
    f = synthesize(band_limited_table(rng, spec, 6), GridSpec(2, 16))
    np.testing.assert_allclose(synthesize(analyze(f), f.grid).values, f.values, atol=1e-10 * np.abs(f.values).max())
