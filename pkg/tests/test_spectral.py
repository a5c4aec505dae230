import math

import numpy as np
import pytest

from opcalc.errors import NotNormalError
from opcalc.spectral import (
    SpectralDecomposition,
    diagonalize,
    functional_calculus,
    normality_defect,
    parts,
    random_normal,
)


class TestNormalityDefect:
    def test_hermitian(self):
        rng = np.random.default_rng(0)
        g = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
        assert normality_defect(g + g.conj().T) <= 1e-15

    def test_diagonal(self):
        assert normality_defect(np.diag([1.0 + 2j, -3.0, 0.5j])) == 0.0

    def test_jordan_block(self):
        m = np.array([[0.0, 1.0], [0.0, 0.0]])
        assert abs(normality_defect(m) - math.sqrt(2.0)) <= 1e-15

    def test_rectangular_rejected(self):
        with pytest.raises(ValueError):
            normality_defect(np.ones((2, 3)))


class TestDiagonalize:
    def test_diagonal_input(self):
        lam = np.array([2.0 + 1j, -1.0, 0.3 - 0.7j])
        dec = diagonalize(np.diag(lam))
        assert np.abs(np.sort_complex(dec.eigenvalues) - np.sort_complex(lam)).max() <= 1e-12
        # unitary is a permutation with phases
        assert np.abs(np.abs(dec.unitary) - np.eye(3)[:, np.argmax(np.abs(dec.unitary), 0)]).max() <= 1e-12

    @pytest.mark.parametrize("seed", range(8))
    def test_round_trip_recovery(self, seed):
        planted = random_normal(7, (-2, 2, -1, 3), seed=seed)
        dec = diagonalize(planted.matrix)
        got = np.sort_complex(dec.eigenvalues)
        want = np.sort_complex(planted.eigenvalues)
        scale = 1.0 + np.linalg.norm(planted.matrix)
        assert np.abs(got - want).max() <= 1e-10 * scale
        assert dec.reconstruction_residual <= 1e-9 * scale

    def test_hermitian_spectrum_real(self):
        rng = np.random.default_rng(3)
        g = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
        dec = diagonalize(g + g.conj().T)
        assert np.abs(dec.eigenvalues.imag).max() <= 1e-12

    def test_degenerate_real_parts(self):
        # repeated Re-eigenvalues force the second-stage split on Im
        n = np.diag([1.0 + 1j, 1.0 - 1j, 1.0, 2.0])
        u = random_normal(4, seed=9).unitary
        dec = diagonalize(u @ n @ u.conj().T)
        assert np.abs(np.sort_complex(dec.eigenvalues) - np.sort_complex(np.diag(n))).max() <= 1e-10

    def test_fully_degenerate_pairs(self):
        # ties in both coordinates exercise the third-stage cleanup
        n = np.diag([1.0 + 1j, 1.0 + 1j, 1.0 - 1j])
        u = random_normal(3, seed=11).unitary
        dec = diagonalize(u @ n @ u.conj().T)
        assert dec.reconstruction_residual <= 1e-10 * (1 + np.linalg.norm(n))

    def test_non_normal_rejected(self):
        with pytest.raises(NotNormalError) as info:
            diagonalize(np.array([[0.0, 1.0], [0.0, 0.0]]))
        assert info.value.defect > 1.0


class TestFunctionalCalculus:
    def test_identity_function(self):
        dec = random_normal(6, seed=2)
        assert np.linalg.norm(functional_calculus(lambda z: z, dec) - dec.matrix) <= 1e-12

    def test_constant_function(self):
        dec = random_normal(5, seed=4)
        assert np.linalg.norm(functional_calculus(lambda z: 1.0, dec) - np.eye(5)) <= 1e-12

    def test_conjugation_gives_adjoint(self):
        dec = random_normal(6, (-1, 1, -2, 2), seed=6)
        got = functional_calculus(np.conj, dec)
        assert np.linalg.norm(got - dec.matrix.conj().T) <= 1e-10

    @pytest.mark.parametrize("seed", range(5))
    def test_homomorphism_on_polynomials(self, seed):
        rng = np.random.default_rng(seed)
        a = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        b = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        f = lambda z: a[0] + a[1] * z + a[2] * z**2 + a[3] * z**3
        g = lambda z: b[0] + b[1] * z + b[2] * z**2 + b[3] * z**3
        dec = random_normal(6, seed=100 + seed)
        fg = functional_calculus(lambda z: f(z) * g(z), dec)
        sep = functional_calculus(f, dec) @ functional_calculus(g, dec)
        assert np.linalg.norm(fg - sep) <= 1e-9 * (1 + np.linalg.norm(fg))

    def test_norm_equals_spectral_sup(self):
        dec = random_normal(8, seed=7)
        f = lambda z: np.exp(1j * z.real) + z
        got = np.linalg.norm(functional_calculus(f, dec), 2)
        want = max(abs(f(z)) for z in dec.eigenvalues)
        assert abs(got - want) <= 1e-9


class TestRandomNormal:
    def test_deterministic(self):
        a = random_normal(5, (-1, 2, 0, 1), seed=42)
        b = random_normal(5, (-1, 2, 0, 1), seed=42)
        assert np.array_equal(a.matrix, b.matrix)

    def test_constructed_normal(self):
        dec = random_normal(9, seed=1)
        assert dec.normality_defect <= 1e-12

    def test_spectrum_in_box(self):
        dec = random_normal(20, (-1.0, 2.0, 0.5, 3.0), seed=5)
        lam = dec.eigenvalues
        assert lam.real.min() >= -1.0 and lam.real.max() <= 2.0
        assert lam.imag.min() >= 0.5 and lam.imag.max() <= 3.0

    def test_dim_validation(self):
        with pytest.raises(ValueError):
            random_normal(0, seed=0)


class TestParts:
    def test_hermitian_has_zero_imaginary_part(self):
        rng = np.random.default_rng(8)
        g = rng.standard_normal((4, 4))
        _, b = parts(g + g.T + 0j)
        assert np.linalg.norm(b) <= 1e-15

    def test_i_times_identity(self):
        a, b = parts(1j * np.eye(3))
        assert np.linalg.norm(a) == 0.0
        assert np.linalg.norm(b - np.eye(3)) == 0.0

    @pytest.mark.parametrize("seed", range(0, 100, 10))
    def test_parts_dominated_by_whole(self, seed):
        dec = random_normal(6, (-2, 2, -2, 2), seed=seed)
        a, b = parts(dec)
        n_norm = np.linalg.norm(dec.matrix, 2)
        assert np.linalg.norm(a, 2) <= n_norm + 1e-12
        assert np.linalg.norm(b, 2) <= n_norm + 1e-12
        assert np.linalg.norm(a + 1j * b - dec.matrix) <= 1e-13 * (1 + n_norm)


class TestSerialization:
    def test_round_trip_reverifies(self):
        dec = random_normal(5, seed=3)
        loaded = SpectralDecomposition.from_json(dec.to_json())
        assert np.abs(loaded.matrix - dec.matrix).max() <= 1e-15
        assert np.abs(loaded.eigenvalues - dec.eigenvalues).max() <= 1e-15

    def test_tampered_payload_rejected(self):
        dec = random_normal(4, seed=3)
        text = dec.to_json().replace('"unitary": [[[', '"unitary": [[[9e9, ', 1)
        with pytest.raises(Exception):
            SpectralDecomposition.from_json(text)
