import math

import mpmath
import numpy as np
import pytest

from opcalc.bandlimited import (
    DEFAULT_WINDOW,
    ModulusOfContinuity,
    TrigPolynomial,
    besov_b1inf1_norm,
    evaluate,
    jackson_check,
    lp_piece,
    lp_pieces,
    omega_star,
    partial_derivative,
    random_trig_polynomial,
    seminorm_estimate,
    slice_x,
    slice_y,
    sup_norm,
    vp_smooth,
)
from opcalc.errors import DivergentTailError, GridTooCoarseError

EXP_IX = TrigPolynomial(1.0, {(1, 0): 1.0})


class TestCutoffWindow:
    def test_support(self):
        xs = np.concatenate([np.linspace(0, 0.5, 20), np.linspace(2, 10, 20)])
        assert np.all(DEFAULT_WINDOW.w(xs) == 0.0)

    def test_nonnegative_and_complement(self):
        xs = np.linspace(1.0, 2.0, 64)
        w = DEFAULT_WINDOW.w(xs)
        assert np.all(w >= 0.0)
        assert np.abs(w - (1.0 - DEFAULT_WINDOW.w(xs / 2.0))).max() <= 1e-12

    def test_partition_of_unity(self):
        xs = np.geomspace(1e-3, 1e3, 257)
        total = sum(DEFAULT_WINDOW.w(xs / 2.0**n) for n in range(-15, 15))
        assert np.abs(total - 1.0).max() <= 1e-12

    def test_v_profile(self):
        assert DEFAULT_WINDOW.v(0.0) == 1.0
        assert DEFAULT_WINDOW.v(-1.0) == 1.0
        assert DEFAULT_WINDOW.v(1.5) == DEFAULT_WINDOW.w(1.5)
        assert DEFAULT_WINDOW.v(2.5) == 0.0


class TestModulus:
    @pytest.mark.parametrize("om", [
        ModulusOfContinuity.power(0.5),
        ModulusOfContinuity.capped_linear(1.5),
        ModulusOfContinuity.custom(lambda t: np.sqrt(t)),
    ])
    def test_axioms_sampled(self, om):
        assert om(0.0) == 0.0
        ts = np.linspace(0.0, 5.0, 101)
        vals = om(ts)
        assert np.all(np.diff(vals) >= -1e-15)
        rng = np.random.default_rng(0)
        x, y = rng.uniform(0, 3, (2, 200))
        assert np.all(om(x + y) <= om(x) + om(y) + 1e-12)

    def test_power_validation(self):
        with pytest.raises(ValueError):
            ModulusOfContinuity.power(1.5)


class TestEvaluate:
    def test_constant(self):
        f = TrigPolynomial.constant(1.0)
        assert evaluate(f, (3.7, -2.0)) == 1.0

    def test_single_exponential(self):
        assert abs(evaluate(EXP_IX, (math.pi, 0.0)) - (-1.0)) <= 1e-15

    def test_against_extended_precision(self):
        f = random_trig_polynomial(5.0, 20, seed=12)
        z = (0.3, 0.4)
        got = evaluate(f, z)
        with mpmath.workdps(40):
            want = mpmath.mpc(0)
            for (j, k), c in f.coeffs.items():
                phase = mpmath.mpf(f.h) * (j * mpmath.mpf("0.3") + k * mpmath.mpf("0.4"))
                want += mpmath.mpc(c.real, c.imag) * mpmath.e ** (1j * phase)
            err = abs(mpmath.mpc(got.real, got.imag) - want)
        assert err <= 1e-13

    def test_periodicity(self):
        f = random_trig_polynomial(3.0, 10, seed=5)
        z = (0.7, -1.1)
        shifted = (z[0] + f.period, z[1])
        assert abs(f(np.array(z)) - f(np.array(shifted))) <= 1e-12

    def test_complex_argument(self):
        z = 0.3 + 0.4j
        assert abs(EXP_IX(z) - np.exp(1j * 0.3)) <= 1e-15


class TestPartialDerivative:
    def test_constant(self):
        assert partial_derivative(TrigPolynomial.constant(2.0), "x").coeffs == {}

    def test_single_exponential(self):
        d = partial_derivative(EXP_IX, "x")
        assert d.coeffs == {(1, 0): 1j}
        assert partial_derivative(EXP_IX, "y").coeffs == {}

    def test_bernstein_sweep(self):
        for s in range(100):
            f = random_trig_polynomial(3.0, 8, seed=1000 + s)
            d_lower, _ = sup_norm(partial_derivative(f, "x"), 512)
            _, f_upper = sup_norm(f, 512)
            assert d_lower <= f.support_radius * f_upper

    def test_bad_axis(self):
        with pytest.raises(ValueError):
            partial_derivative(EXP_IX, "z")


class TestDyadicPieces:
    def test_exact_dyadic_frequency(self):
        # at |xi| = 2^n the window value is w(1) = 1 and neighbors vanish
        f = TrigPolynomial(2.0, {(1, 0): 3.0})  # |xi| = 2
        assert lp_piece(f, 1).coeffs == {(1, 0): 3.0}
        assert lp_piece(f, 0).coeffs == {}
        assert lp_piece(f, 2).coeffs == {}

    def test_constant_has_no_pieces(self):
        assert lp_pieces(TrigPolynomial.constant(4.0)) == {}

    def test_pieces_resum_to_f(self):
        f = random_trig_polynomial(5.0, 18, seed=3)
        total = TrigPolynomial(f.h, {})
        for piece in lp_pieces(f).values():
            total = total + piece
        for key, c in f.coeffs.items():
            if key == (0, 0):
                continue
            assert abs(total.coeffs.get(key, 0.0) - c) <= 1e-12 * abs(c)

    def test_piece_support_annulus(self):
        f = random_trig_polynomial(5.0, 18, seed=8)
        for n, piece in lp_pieces(f).items():
            mods = [f.h * math.hypot(j, k) for (j, k) in piece.coeffs]
            assert min(mods) >= 2.0 ** (n - 1)
            assert max(mods) <= 2.0 ** (n + 1)

    def test_vp_identity_below_cutoff(self):
        f = random_trig_polynomial(3.9, 10, seed=2)
        g = vp_smooth(f, 2)  # 2^2 >= sigma
        assert g.coeffs == f.coeffs

    def test_vp_kills_high_frequency(self):
        f = TrigPolynomial(1.0, {(5, 0): 1.0})
        assert vp_smooth(f, 1, DEFAULT_WINDOW).coeffs == {}  # 5 > 2 * 2^1

    def test_vp_residual_support(self):
        f = random_trig_polynomial(5.0, 18, seed=9)
        n = 1
        resid = f - vp_smooth(f, n)
        for (j, k) in resid.coeffs:
            assert f.h * math.hypot(j, k) > 2.0**n


class TestSupNorm:
    def test_constant(self):
        assert sup_norm(TrigPolynomial.constant(1.0)) == (1.0, 1.0)

    def test_single_exponential_bracket(self):
        lower, upper = sup_norm(EXP_IX, 512)
        assert abs(lower - 1.0) <= 1e-12
        assert upper >= lower
        assert upper - lower <= 0.01

    def test_soundness_random_points(self):
        f = random_trig_polynomial(4.0, 12, seed=6)
        _, upper = sup_norm(f, 1024)
        rng = np.random.default_rng(1)
        pts = rng.uniform(0, f.period, (100000, 2))
        assert np.abs(f.eval(pts[:, 0], pts[:, 1])).max() <= upper

    def test_width_halves_under_doubling(self):
        f = random_trig_polynomial(3.0, 12, seed=4)
        widths = [sup_norm(f, m)[1] - sup_norm(f, m)[0] for m in (256, 512, 1024)]
        assert widths[0] / widths[1] > 1.8
        assert widths[1] / widths[2] > 1.8

    def test_too_coarse_raises(self):
        f = TrigPolynomial(1.0, {(300, 0): 1.0})
        with pytest.raises(GridTooCoarseError):
            sup_norm(f, 64)

    def test_auto_policy_caps(self):
        lower, upper = sup_norm(EXP_IX)
        assert abs(lower - 1.0) <= 1e-12
        assert upper - lower <= 2e-3  # cap at 4096 points


class TestBesov:
    def test_constant(self):
        assert besov_b1inf1_norm(TrigPolynomial.constant(3.0)) == 0.0

    def test_single_exponential_enumeration(self):
        # |xi| = 1 sits exactly at the n = 0 band: w(1) = 1, all others vanish
        pieces = lp_pieces(EXP_IX)
        assert set(pieces) == {0}
        total = besov_b1inf1_norm(EXP_IX, refinement=1024)
        _, upper = sup_norm(EXP_IX, 1024)
        assert abs(total - upper) <= 1e-12

    def test_homogeneous(self):
        f = random_trig_polynomial(3.0, 10, seed=11)
        a = besov_b1inf1_norm(7.5 * f, refinement=512)
        b = 7.5 * besov_b1inf1_norm(f, refinement=512)
        assert abs(a - b) <= 1e-12 * b


class TestSeminorm:
    def test_constant(self):
        om = ModulusOfContinuity.power(0.5)
        assert seminorm_estimate(TrigPolynomial.constant(2.0), om, 100, 0) == 0.0

    def test_lipschitz_constant_of_exponential(self):
        om = ModulusOfContinuity.power(1.0)
        est = seminorm_estimate(EXP_IX, om, 10000, 1)
        assert 0.99 <= est <= 1.0 + 1e-12

    def test_monotone_in_samples(self):
        f = random_trig_polynomial(3.0, 10, seed=13)
        om = ModulusOfContinuity.power(0.5)
        e1 = seminorm_estimate(f, om, 100, seed=7)
        e2 = seminorm_estimate(f, om, 1000, seed=7)
        assert e1 <= e2


class TestOmegaStar:
    def test_power_closed_form(self):
        om = ModulusOfContinuity.power(0.5)
        for x in (0.01, 0.3, 2.0):
            assert abs(omega_star(om, x) - x**0.5 / 0.5) <= 1e-12

    def test_capped_interior(self):
        om = ModulusOfContinuity.capped_linear(2.0)
        d = 2.0
        for x in (0.1, 0.5, 1.9):
            assert abs(omega_star(om, x) - (x * math.log(d / x) + x)) <= 1e-12

    def test_capped_boundary(self):
        om = ModulusOfContinuity.capped_linear(2.0)
        assert omega_star(om, 2.0) == 2.0

    @pytest.mark.parametrize("alpha", [0.3, 0.5, 0.8])
    def test_custom_quadrature_matches_power(self, alpha):
        closed = ModulusOfContinuity.power(alpha)
        quadr = ModulusOfContinuity.custom(lambda t, a=alpha: np.power(t, a))
        for x in (0.1, 1.0, 3.0):
            want = omega_star(closed, x)
            assert abs(omega_star(quadr, x) - want) <= 1e-8 * want

    def test_custom_quadrature_matches_capped(self):
        closed = ModulusOfContinuity.capped_linear(1.5)
        quadr = ModulusOfContinuity.custom(lambda t: np.minimum(t, 1.5))
        for x in (0.2, 1.0):
            want = omega_star(closed, x)
            assert abs(omega_star(quadr, x) - want) <= 1e-8 * want

    def test_divergent_tail(self):
        with pytest.raises(DivergentTailError):
            omega_star(ModulusOfContinuity.power(1.0), 0.5)
        with pytest.raises(DivergentTailError):
            omega_star(ModulusOfContinuity.custom(lambda t: t), 0.5)

    @pytest.mark.parametrize("om", [
        ModulusOfContinuity.power(0.4),
        ModulusOfContinuity.capped_linear(3.0),
        ModulusOfContinuity.custom(lambda t: np.power(t, 0.6)),
    ])
    def test_dominates_half_of_omega(self, om):
        # omega_star(x) >= x * omega(x) * int_x^{2x} t^-2 dt = omega(x)/2
        for x in (0.05, 0.7, 2.5):
            assert omega_star(om, x) >= om(x) / 2.0 - 1e-12


class TestJackson:
    def test_smooth_range_is_exact_zero(self):
        om = ModulusOfContinuity.power(1.0)
        rows = jackson_check(EXP_IX, om, range(0, 4), samples=2000, seed=0, refinement=512)
        for _, lhs, ratio, _, _ in rows:
            assert lhs == 0.0 and ratio == 0.0

    def test_constant_rows_zero(self):
        om = ModulusOfContinuity.power(0.5)
        rows = jackson_check(TrigPolynomial.constant(5.0), om, range(-2, 3), samples=100, seed=0)
        assert all(r[1] == 0.0 and r[2] == 0.0 for r in rows)

    def test_exponential_constants_bounded(self):
        # regression pin: measured max ratio is ~0.503 (V_n) and ~1.005 (W_n)
        om = ModulusOfContinuity.power(1.0)
        rows = jackson_check(EXP_IX, om, range(-4, 5), samples=10000, seed=0, refinement=1024)
        assert max(r[2] for r in rows) <= 40.0
        assert max(r[4] for r in rows) <= 40.0


class TestSlices:
    def test_slice_values_agree(self):
        f = random_trig_polynomial(3.0, 12, seed=17)
        xs = np.linspace(-2, 2, 9)
        gx = slice_x(f, 0.4)
        assert np.abs(gx.eval(xs) - f.eval(xs, 0.4)).max() <= 1e-12
        gy = slice_y(f, -1.2)
        assert np.abs(gy.eval(xs) - f.eval(-1.2, xs)).max() <= 1e-12

    def test_slice_type_bound(self):
        f = random_trig_polynomial(3.0, 12, seed=18)
        assert slice_x(f, 0.0).type_bound <= f.support_radius + 1e-12

    def test_slice_sup_bracket(self):
        f = random_trig_polynomial(2.0, 8, seed=19)
        g = slice_x(f, 0.3)
        lo, up = g.sup_bracket()
        ts = np.linspace(0, 2 * math.pi / g.h, 4096)
        assert lo <= np.abs(g.eval(ts)).max() + 1e-12 <= up + 1e-9


class TestSerialization:
    def test_round_trip(self):
        f = random_trig_polynomial(4.0, 15, seed=23)
        g = TrigPolynomial.from_json(f.to_json())
        assert g.h == f.h and g.coeffs == f.coeffs

    def test_immutability(self):
        with pytest.raises(AttributeError):
            EXP_IX.h = 2.0
