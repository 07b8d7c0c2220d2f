import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from spherepinn import specfun
from spherepinn.sma_core import fibonacci_directions
from spherepinn.specfun import (Enclosure, assoc_legendre, radial_term_b, sh_matrix,
                                sph_bessel_j, sph_bessel_y, sph_hankel1, sph_harm)


# closed forms used as oracles
def j0(x):
    return math.sin(x) / x


def j0_prime(x):
    return (x * math.cos(x) - math.sin(x)) / x ** 2


def h0(x):
    return -1j * cmath.exp(1j * x) / x


def h0_prime(x):
    return (x + 1j) * cmath.exp(1j * x) / x ** 2


class TestLegendre:
    def test_examples(self):
        assert assoc_legendre(0, 0, 0.3) == 1.0
        assert assoc_legendre(1, 0, 0.5) == 0.5
        assert assoc_legendre(1, 1, 0.0) == pytest.approx(-1.0, abs=1e-15)

    @pytest.mark.parametrize("x", [-0.9, -0.2, 0.4, 0.75])
    def test_p11_closed_form(self, x):
        assert assoc_legendre(1, 1, x) == pytest.approx(-math.sqrt(1 - x * x), rel=1e-14)

    @pytest.mark.parametrize("n", range(6))
    def test_condon_shortley_sign(self, n):
        x = np.linspace(-0.99, 0.99, 41)
        assert np.all(np.sign(assoc_legendre(n, n, x)) == (-1) ** n)

    def test_matches_scipy(self):
        x = np.linspace(-1, 1, 57)
        for n in range(0, 12):
            for m in range(n + 1):
                np.testing.assert_allclose(assoc_legendre(n, m, x), special.lpmv(m, n, x),
                                           rtol=1e-10, atol=1e-12)

    @pytest.mark.parametrize("args", [(2, 3, 0.1), (2, 1, 1.5), (2, -1, 0.1)])
    def test_domain_errors(self, args):
        with pytest.raises(ValueError):
            assoc_legendre(*args)

    def test_order_cap(self):
        with pytest.raises(ValueError):
            assoc_legendre(specfun.MAX_ORDER + 1, 0, 0.0)


class TestSphHarm:
    def test_examples(self):
        assert sph_harm(0, 0, 1.3, 2.2) == pytest.approx(0.2820947918, abs=1e-10)
        assert sph_harm(1, 0, 0.0, 0.0) == pytest.approx(0.4886025119, abs=1e-10)

    @given(st.floats(0, math.pi), st.floats(0, 2 * math.pi), st.integers(1, 6))
    def test_negative_degree_symmetry(self, theta, phi, n):
        for m in range(1, n + 1):
            assert sph_harm(n, -m, theta, phi) == pytest.approx(
                (-1) ** m * sph_harm(n, m, theta, phi).conjugate(), abs=1e-12)

    def test_matches_scipy(self):
        theta = np.linspace(0, math.pi, 9)
        phi = np.linspace(0, 2 * math.pi, 9)
        for n in range(6):
            for m in range(-n, n + 1):
                np.testing.assert_allclose(sph_harm(n, m, theta, phi),
                                           special.sph_harm_y(n, m, theta, phi), atol=1e-12)

    def test_orthonormal_on_fibonacci_grid(self):
        theta, phi = fibonacci_directions(2000)
        Y = sh_matrix(4, theta, phi)
        gram = Y.conj().T @ Y * (4 * math.pi / 2000)
        assert np.max(np.abs(gram - np.eye(25))) < 1e-3

    def test_sh_matrix_columns(self):
        theta, phi = np.array([0.3, 1.9]), np.array([4.0, 0.2])
        Y = sh_matrix(3, theta, phi)
        for n in range(4):
            for m in range(-n, n + 1):
                np.testing.assert_allclose(Y[:, specfun.sh_index(n, m)], sph_harm(n, m, theta, phi))

    def test_degree_error(self):
        with pytest.raises(ValueError):
            sph_harm(2, 3, 0.1, 0.1)


class TestBessel:
    def test_examples(self):
        assert sph_bessel_j(0, 1.0) == pytest.approx(0.8414709848, abs=1e-10)
        assert sph_bessel_j(1, 0.0) == 0.0
        assert sph_bessel_j(0, 1.0, 1) == pytest.approx(-0.3011686789, abs=1e-10)
        assert sph_bessel_j(0, 1.0, 1) == pytest.approx(j0_prime(1.0), rel=1e-14)
        assert sph_bessel_j(0, 0.0) == 1.0

    def test_hankel_examples(self):
        assert sph_hankel1(0, 1.0) == pytest.approx(0.8414709848 - 0.5403023059j, abs=1e-10)
        assert sph_hankel1(0, math.pi) == pytest.approx(1j / math.pi, abs=1e-15)
        x = 1.0
        h1 = -(1 / x + 1j / x ** 2) * cmath.exp(1j * x)
        assert sph_hankel1(1, x) == pytest.approx(h1, abs=1e-14)
        assert sph_hankel1(1, 1.0) == pytest.approx(0.3011686789 - 1.3817732907j, abs=1e-10)
        assert sph_hankel1(0, 2.5, 1) == pytest.approx(h0_prime(2.5), abs=1e-14)

    def test_hankel_singular(self):
        with pytest.raises(ValueError):
            sph_hankel1(0, 0.0)

    @pytest.mark.parametrize("n", [0, 1, 2, 5, 8, 15, 30])
    def test_matches_scipy(self, n):
        x = np.concatenate([[0.0], np.logspace(-6, 1.5, 300)])
        ref = special.spherical_jn(n, x)
        mask = np.abs(ref) > 1e-290
        np.testing.assert_allclose(sph_bessel_j(n, x)[mask], ref[mask], rtol=1e-11)
        ref_d = special.spherical_jn(n, x, derivative=True)
        mask = np.abs(ref_d) > 1e-290
        np.testing.assert_allclose(sph_bessel_j(n, x, 1)[mask], ref_d[mask], rtol=1e-11, atol=1e-300)
        xs = x[x > 0.05]
        np.testing.assert_allclose(sph_bessel_y(n, xs), special.spherical_yn(n, xs), rtol=1e-11)

    def test_small_argument_series(self):
        x = np.array([1e-6, 5e-5, 9.9e-5])
        for n in range(5):
            np.testing.assert_allclose(sph_bessel_j(n, x), special.spherical_jn(n, x), rtol=1e-12)
        assert sph_bessel_j(1, 0.0, 1) == pytest.approx(1 / 3)

    @pytest.mark.parametrize("n", range(11))
    def test_wronskian(self, n):
        x = np.linspace(0.1, 20, 400)
        w = sph_bessel_j(n, x) * sph_bessel_y(n, x, 1) - sph_bessel_j(n, x, 1) * sph_bessel_y(n, x)
        np.testing.assert_allclose(w, 1 / x ** 2, rtol=1e-10)


class TestRadialTerm:
    def test_open_examples(self):
        assert radial_term_b(0, 1.0, Enclosure.OPEN) == pytest.approx(0.8414709848, abs=1e-10)
        assert radial_term_b(2, 0.0, "open") == 0

    def test_rigid_from_closed_forms(self):
        x = 1.0
        oracle = j0(x) - j0_prime(x) / h0_prime(x) * h0(x)
        got = radial_term_b(0, x, Enclosure.RIGID)
        assert got == pytest.approx(oracle, abs=1e-14)
        assert got == pytest.approx(0.6908866453380181 - 0.1505843394698784j, abs=1e-14)

    def test_rigid_singular(self):
        with pytest.raises(ValueError):
            radial_term_b(0, 0.0, "rigid")

    @given(st.integers(0, 10), st.floats(0, 30))
    @settings(max_examples=50)
    def test_open_is_bessel(self, n, x):
        assert radial_term_b(n, x, "open") == sph_bessel_j(n, x)

    def test_rigid_vectorised_matches_scalar(self):
        x = np.array([0.3, 2.0, 7.5])
        table = specfun.radial_terms(4, x, "rigid")
        for n in range(5):
            for i, xi in enumerate(x):
                assert table[n, i] == pytest.approx(radial_term_b(n, xi, "rigid"), rel=1e-13)

    def test_enclosure_parse(self):
        assert Enclosure.parse("Rigid") is Enclosure.RIGID
        with pytest.raises(ValueError):
            Enclosure.parse("baffled")
