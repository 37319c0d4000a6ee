import math
from fractions import Fraction

import numpy as np
import pytest

from hplab.weights import (
    GRAM_MAX_N,
    WeightSpec,
    disc_weight_nodes,
    gram_matrix,
    moment_quadrature,
    moment_series,
    radial_monomial_integral,
    weight_eval,
)

DELTAS = (0.0, 1.0, complex(1.0, 2.0), complex(-0.3, 0.0), complex(-0.3, 0.7))


def test_weight_spec_validation():
    WeightSpec("hp", 2, 1.0)
    WeightSpec("bergman", 1)
    with pytest.raises(ValueError):
        WeightSpec("other", 1)
    with pytest.raises(ValueError):
        WeightSpec("hp", 0)
    with pytest.raises(ValueError):
        WeightSpec("hp", 1, -0.7)


def test_weight_eval_formulas():
    z = np.array([0.3 + 0.4j, -0.5j, 0.0])
    bergman = weight_eval(WeightSpec("bergman", 3), z)
    assert np.allclose(bergman, (3 / math.pi) * (1 - np.abs(z) ** 2) ** 2)

    delta = complex(0.5, -1.0)
    hp = weight_eval(WeightSpec("hp", 2, delta), z)
    direct = (
        np.abs(1 - z) ** (2 * delta.real)
        * np.exp(-2 * delta.imag * np.angle(1 - z))
        * (1 - np.abs(z) ** 2)
    )
    assert np.allclose(hp, direct, rtol=1e-14)

    # delta = 0 reduces to the radial factor alone
    flat = weight_eval(WeightSpec("hp", 1, 0.0), z)
    assert np.allclose(flat, 1.0)


def test_weight_eval_rejects_boundary():
    with pytest.raises(ValueError):
        weight_eval(WeightSpec("hp", 1, 0.0), np.array([1.0 + 0j]))
    with pytest.raises(ValueError):
        weight_eval(WeightSpec("bergman", 2), np.array([0.2, 1.3j]))


def test_radial_monomial_integral_exact():
    for p in range(0, 9):
        for m in range(1, 6):
            exact = Fraction(math.factorial(p) * math.factorial(m - 1), math.factorial(p + m))
            got = radial_monomial_integral(p, m) / math.pi
            assert abs(got - float(exact)) < 1e-15 * max(1.0, float(exact))


def test_moment_hand_values():
    # independently derived reference moments
    assert abs(moment_series(0, 0, 1, 0.0) - math.pi) < 1e-10
    assert abs(moment_series(0, 0, 1, 1.0) - 1.5 * math.pi) < 1e-10
    assert abs(moment_series(1, 1, 2, 0.0) - math.pi / 6) < 1e-10
    assert abs(moment_series(0, 1, 1, 1.0) - (-0.5 * math.pi)) < 1e-10
    assert abs(moment_series(1, 1, 1, 1.0) - 5.0 * math.pi / 6.0) < 1e-10
    # non-integer exponent, checked against adaptive numerical integration
    assert abs(moment_series(0, 0, 1, -0.3) - 3.376137709029689) < 1e-10


def test_moment_hermitian_symmetry():
    for delta in DELTAS:
        a = moment_series(3, 1, 2, delta)
        b = moment_series(1, 3, 2, delta)
        assert abs(a - np.conj(b)) < 1e-14 * max(1.0, abs(a))


def test_moment_series_matches_quadrature():
    for delta in DELTAS:
        for m in (1, 2, 4):
            for j, k in ((0, 0), (1, 0), (2, 2), (5, 3), (6, 6)):
                s = moment_series(j, k, m, delta)
                q = moment_quadrature(j, k, m, delta)
                assert abs(s - q) < 1e-11 * max(1.0, abs(s)), (j, k, m, delta)


def test_moment_delta_zero_is_radial():
    for m in (1, 3):
        for j, k in ((0, 0), (2, 2), (4, 4)):
            assert abs(moment_series(j, k, m, 0.0) - radial_monomial_integral(j, m)) < 1e-12
        # off-diagonal moments vanish by rotational symmetry
        assert abs(moment_series(3, 1, m, 0.0)) < 1e-12


def test_disc_nodes_properties():
    z, w = disc_weight_nodes(2, complex(1.0, 2.0))
    assert np.all(np.abs(z) < 1.0)
    assert np.all(w > 0)
    # rule integrates the constant to the zeroth moment
    assert abs(np.sum(w) - moment_series(0, 0, 2, complex(1.0, 2.0))) < 1e-11


def test_disc_nodes_integrate_polynomials():
    m, delta = 1, complex(-0.3, 0.7)
    z, w = disc_weight_nodes(m, delta)
    for j, k in ((1, 0), (2, 1), (3, 3)):
        got = np.sum(w * z**j * np.conj(z) ** k)
        assert abs(got - moment_series(j, k, m, delta)) < 1e-11


def test_gram_matrix_structure():
    for delta in (1.0, complex(-0.3, 0.7)):
        g = gram_matrix(6, 2, delta)
        assert g.shape == (6, 6)
        assert np.allclose(g, g.conj().T, rtol=0, atol=1e-13)
        evals = np.linalg.eigvalsh(g)
        assert evals.min() > 0
        for j in range(6):
            for k in range(6):
                assert abs(g[j, k] - moment_series(j, k, 2, delta)) < 1e-12


def test_gram_matrix_cap():
    gram_matrix(GRAM_MAX_N, 1, 0.0)
    with pytest.raises(ValueError):
        gram_matrix(GRAM_MAX_N + 1, 1, 0.0)
    with pytest.raises(ValueError):
        gram_matrix(0, 1, 0.0)


def test_moment_argument_validation():
    with pytest.raises(ValueError):
        moment_series(-1, 0, 1, 0.0)
    with pytest.raises(ValueError):
        moment_series(0, 0, 0, 0.0)
    with pytest.raises(ValueError):
        moment_series(0, 0, 1, -0.6)
    with pytest.raises(ValueError):
        moment_quadrature(0, 0, 1, 0.0, radial_nodes=8)
