import math
import warnings

import numpy as np
import pytest

from conftest import random_field, random_spec
from thetafourier.core import CoeffTable, GridSpec, SampledField, ThetaSpec, extend_field
from thetafourier.fourier import (
    AliasingWarning,
    analyze,
    analyze_direct,
    apply_symmetry,
    band_limited_table,
    derivative_coeffs,
    dilate,
    evaluate,
    l1_bound_check,
    modulate,
    plancherel_check,
    synthesize,
    translate,
)

TWO_PI = 2 * math.pi


def only(table, xi, value, tol=1e-12):
    expect = CoeffTable.from_entries({xi: value}, table.theta_spec, table.cutoff)
    np.testing.assert_allclose(table.values, expect.values, atol=tol)


class TestAnalyze:
    def test_classical_exponential(self):
        f = SampledField.from_function(lambda x: np.exp(1j * x), ThetaSpec((1.0,), TWO_PI), 32)
        only(analyze(f, 8), (1,), 1.0)

    def test_power_of_two(self):
        f = SampledField.from_function(lambda x: 2.0 ** x, ThetaSpec((2.0,), 1.0), 32)
        only(analyze(f, 8), (0,), 1.0)

    def test_half_frequency_antiperiodic(self):
        f = SampledField.from_function(lambda x: np.exp(0.5j * x), ThetaSpec((-1.0,), TWO_PI), 32)
        only(analyze(f, 8), (0,), 1.0)

    def test_nyquist_limit(self, rng):
        f = random_field(rng, ThetaSpec((1.0,), 1.0), 16, 3)
        with pytest.raises(ValueError):
            analyze(f, 8)

    def test_fft_matches_direct_quadrature(self, rng):
        for n in (1, 2):
            spec = random_spec(rng, n)
            f = random_field(rng, spec, 16, 4)
            np.testing.assert_allclose(analyze(f, 6).values, analyze_direct(f, 6).values, atol=1e-12)

    def test_aliasing_warning(self, rng):
        spec = ThetaSpec((1.0,), 1.0)
        f = random_field(rng, spec, 16, 7)
        with pytest.warns(AliasingWarning):
            analyze(f)
        g = random_field(rng, spec, 16, 3)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            analyze(g)


class TestSynthesize:
    def test_constant_mode_power_of_two(self):
        spec = ThetaSpec((2.0,), 1.0)
        f = synthesize(CoeffTable.from_entries({(0,): 1.0}, spec, 4), GridSpec(1, 32))
        np.testing.assert_allclose(f.values, 2.0 ** GridSpec(1, 32).nodes(1.0), rtol=1e-12)

    def test_constant_mode_periodic(self):
        spec = ThetaSpec((1.0, 1.0), 1.0)
        f = synthesize(CoeffTable.from_entries({(0, 0): 1.0}, spec, 2), GridSpec(2, 8))
        np.testing.assert_allclose(f.values, 1.0, atol=1e-15)

    def test_round_trip(self, rng):
        for n in (1, 2):
            for _ in range(5):
                spec = random_spec(rng, n)
                f = random_field(rng, spec, 32, 8)
                back = synthesize(analyze(f), f.grid)
                np.testing.assert_allclose(back.values, f.values, atol=1e-10 * np.abs(f.values).max())

    def test_evaluate_matches_synthesis(self, rng):
        spec = random_spec(rng, 2)
        table = band_limited_table(rng, spec, 4)
        f = synthesize(table, GridSpec(2, 16))
        mesh = f.grid.mesh(spec.T)
        pts = np.stack([m.ravel() for m in mesh], axis=-1)
        np.testing.assert_allclose(evaluate(table, pts), f.values.ravel(), rtol=1e-11, atol=1e-12)


class TestDerivative:
    def test_classical(self):
        spec = ThetaSpec((1.0,), TWO_PI)
        only(derivative_coeffs(CoeffTable.from_entries({(1,): 1.0}, spec, 3)), (1,), 1j)

    def test_theta_e(self):
        spec = ThetaSpec((math.e,), TWO_PI)
        only(derivative_coeffs(CoeffTable.from_entries({(0,): 1.0}, spec, 3)), (0,), 1 / TWO_PI)

    def test_power_of_two(self):
        spec = ThetaSpec((2.0,), 1.0)
        only(derivative_coeffs(CoeffTable.from_entries({(0,): 1.0}, spec, 3)), (0,), math.log(2))

    def test_second_axis(self, rng):
        spec = random_spec(rng, 2)
        table = band_limited_table(rng, spec, 4)
        d = synthesize(derivative_coeffs(table, 1), GridSpec(2, 16))
        h = 1e-5
        mesh = d.grid.mesh(spec.T)
        pts = np.stack([m.ravel() for m in mesh], axis=-1)
        fd = (evaluate(table, pts + [0, h]) - evaluate(table, pts - [0, h])) / (2 * h)
        np.testing.assert_allclose(d.values.ravel(), fd, rtol=1e-6, atol=1e-6 * np.abs(fd).max())


class TestSymmetries:
    def test_modulate(self):
        spec = ThetaSpec((1.0,), 1.0)
        only(modulate(CoeffTable.from_entries({(0,): 1.0}, spec, 2), 1), (1,), 1.0)

    def test_modulate_drops_and_flags(self):
        spec = ThetaSpec((1.0,), 1.0)
        t = modulate(CoeffTable.from_entries({(2,): 1.0}, spec, 2), 1)
        assert t.truncated and not np.any(t.values)
        assert not modulate(CoeffTable.from_entries({(0,): 1.0}, spec, 2), 1).truncated

    def test_modulation_is_multiplication(self, rng):
        spec = random_spec(rng, 2)
        table = band_limited_table(rng, spec, 3)
        xi0 = (1, -2)
        lhs = synthesize(modulate(table.resized(6), xi0), GridSpec(2, 16))
        base = synthesize(table, GridSpec(2, 16))
        mesh = base.grid.mesh(spec.T)
        phase = np.exp(1j * (TWO_PI / spec.T) * (mesh[0] * xi0[0] + mesh[1] * xi0[1]))
        np.testing.assert_allclose(lhs.values, phase * base.values, atol=1e-11 * np.abs(base.values).max())

    def test_translate_by_period_scales_by_theta(self, rng):
        for n in (1, 2):
            spec = random_spec(rng, n)
            table = band_limited_table(rng, spec, 4)
            for j in range(n):
                moved = translate(table, spec.T * np.eye(n)[j])
                np.testing.assert_allclose(moved.values, spec.theta[j] * table.values, rtol=1e-10)

    def test_translate_matches_extension(self, rng):
        spec = random_spec(rng, 1)
        f = random_field(rng, spec, 32, 6)
        a = 1.37 * spec.T
        moved = synthesize(translate(analyze(f), a), f.grid)
        want = extend_field(f, f.grid.nodes(spec.T) + a)
        np.testing.assert_allclose(moved.values, want, atol=1e-9 * np.abs(want).max())

    def test_dilate_minus_one_reflects(self):
        spec = ThetaSpec((2.0 * np.exp(0.4j),), 1.0)
        t = dilate(CoeffTable.from_entries({(1,): 3.0, (-1,): 5.0}, spec, 2), -1)
        assert t[(1,)] == 5.0 and t[(-1,)] == 3.0
        assert t.theta_spec.theta[0] == pytest.approx(1 / spec.theta[0])
        assert t.theta_spec.log[0] == pytest.approx(-spec.log[0])

    def test_dilation_is_composition(self, rng):
        spec = ThetaSpec((2.0 * np.exp(0.4j),), 1.3)
        table = band_limited_table(rng, spec, 3)
        for k in (2, -1, -3):
            d = dilate(table, k)
            x = np.linspace(-0.5, 0.5, 7)[:, None]
            np.testing.assert_allclose(evaluate(d, x), evaluate(table, k * x), rtol=1e-11)

    def test_dilate_zero_rejected(self, rng):
        with pytest.raises(ValueError):
            apply_symmetry(band_limited_table(rng, ThetaSpec((1.0,), 1.0), 2), "dilate", 0)

    def test_linearity(self, rng):
        spec = random_spec(rng, 2)
        f = random_field(rng, spec, 16, 4)
        g = random_field(rng, spec, 16, 4)
        lam = 0.3 - 1.7j
        lhs = analyze(f + g * lam).values
        np.testing.assert_allclose(lhs, analyze(f).values + lam * analyze(g).values, atol=1e-12 * np.abs(lhs).max())


class TestNormBounds:
    def test_l1_constant(self):
        f = SampledField(GridSpec(1, 16), np.ones(16), ThetaSpec((1.0,), 1.0))
        r = l1_bound_check(f)
        assert r.holds
        assert (r.lhs_max, r.l1_norm, r.weighted_bound) == pytest.approx((1, 1, 1))

    def test_l1_power_of_two(self):
        f = SampledField.from_function(lambda x: 2.0 ** x, ThetaSpec((2.0,), 1.0), 32)
        r = l1_bound_check(f)
        assert r.holds
        assert r.lhs_max == pytest.approx(1.0)
        assert r.weighted_bound == pytest.approx(1 / math.log(2), rel=1e-12)

    def test_l1_random_half(self, rng):
        f = random_field(rng, ThetaSpec((0.5,), 1.0), 32, 5)
        r = l1_bound_check(f)
        assert r.lhs_max < r.l1_norm < r.weighted_bound

    def test_plancherel_power_of_two(self):
        spec = ThetaSpec((2.0,), 1.0)
        f = synthesize(CoeffTable.from_entries({(0,): 1.0}, spec, 2), GridSpec(1, 32))
        r = plancherel_check(f)
        assert r.coeff_l2 == pytest.approx(1.0) and r.weighted_l2 == pytest.approx(1.0)
        assert r.plain_l2 == pytest.approx(math.sqrt(3 / math.log(4)), rel=1e-12)
        assert r.holds

    def test_plancherel_sine(self):
        f = SampledField.from_function(np.sin, ThetaSpec((1.0,), TWO_PI), 32)
        r = plancherel_check(f)
        assert r.coeff_l2 == pytest.approx(1 / math.sqrt(2)) and r.plain_l2 == pytest.approx(1 / math.sqrt(2))

    def test_plancherel_five_modes(self, rng):
        spec = ThetaSpec((3.0, 0.25), 1.0)
        f = synthesize(band_limited_table(rng, spec, 4, modes=5), GridSpec(2, 32))
        r = plancherel_check(f)
        assert (r.k_min, r.k_max) == (0.25, 3.0)
        assert r.holds
