from math import factorial

import numpy as np
import pytest

from src.algebra.forms import (
    adjugate,
    det_ratio,
    hodge_star,
    hodge_star_trace,
    mixed_power,
    positivity_k,
    positivity_n1,
    power_root_bijection,
    quotient_combination,
)
from src.algebra.hermitian import random_hermitian, random_positive_definite
from src.errors import ArgumentError, DimensionError, PositivityError


def test_hodge_star_trace_examples():
    np.testing.assert_allclose(hodge_star_trace(np.eye(2), np.diag([2.0, 7.0])), np.diag([7.0, 2.0]))
    np.testing.assert_allclose(hodge_star_trace(np.eye(3), np.diag([1.0, 2.0, 3.0])), np.diag([5.0, 4.0, 3.0]))

    chi = np.zeros((3, 3))
    chi[0, 1] = chi[1, 0] = 1.0
    star = hodge_star_trace(np.eye(3), chi)
    assert star[0, 1] == pytest.approx(-1.0)
    np.testing.assert_allclose(np.diag(star), 0.0)


def test_hodge_star_trace_needs_two_dimensions():
    with pytest.raises(DimensionError):
        hodge_star_trace(np.eye(1), np.eye(1))


def test_hodge_star_trace_is_an_involution_in_dimension_two(rng):
    omega = random_positive_definite(rng, 2, size=(10,))
    chi = random_hermitian(rng, 2, size=(10,))
    np.testing.assert_allclose(hodge_star_trace(omega, hodge_star_trace(omega, chi)), chi, atol=1e-10)


@pytest.mark.parametrize("n", [2, 3])
def test_star_of_trace_form_is_first_mixed_power(rng, n):
    omega = random_positive_definite(rng, n, size=(8,))
    chi = random_hermitian(rng, n, size=(8,))
    lhs = hodge_star(omega, hodge_star_trace(omega, chi))
    rhs = factorial(n - 1) * mixed_power(omega, chi, 1)
    np.testing.assert_allclose(lhs, rhs, atol=1e-9)


def test_det_ratio_is_preserved_by_hodge_star(rng):
    omega = random_positive_definite(rng, 3, size=(6,))
    phi = random_positive_definite(rng, 3, size=(6,))
    np.testing.assert_allclose(det_ratio(hodge_star(omega, phi), adjugate(omega)), det_ratio(phi, omega), rtol=1e-10)


def test_power_root_examples():
    np.testing.assert_allclose(power_root_bijection(np.eye(3)), np.eye(3), atol=1e-14)
    np.testing.assert_allclose(power_root_bijection(np.diag([2.0, 3.0])), np.diag([3.0, 2.0]), atol=1e-13)

    phi = power_root_bijection(np.diag([1.0, 2.0, 3.0]))
    np.testing.assert_allclose(phi, np.diag([6.0, 3.0, 2.0]), atol=1e-13)
    assert np.real(np.linalg.det(phi)) == pytest.approx(36.0)


def test_power_root_inverse_recovers_form(rng):
    v = random_positive_definite(rng, 3, size=(5,))
    back = power_root_bijection(power_root_bijection(v), "inverse")
    np.testing.assert_allclose(back, v, atol=1e-10)


def test_power_root_rejects_non_positive_input():
    with pytest.raises(PositivityError):
        power_root_bijection(np.diag([1.0, -1.0]))
    with pytest.raises(PositivityError):
        power_root_bijection(np.diag([1.0, 0.0, 2.0]), "inverse")


def test_power_root_rejects_unknown_direction():
    with pytest.raises(ArgumentError):
        power_root_bijection(np.eye(2), "sideways")


def test_positivity_k_examples():
    omega = np.eye(2)
    alpha = np.diag([3.0, -1.0])
    assert positivity_k(omega, alpha, 1).holds
    assert not positivity_k(omega, alpha, 2).holds
    for k in (1, 2):
        assert positivity_k(omega, omega, k).holds


def test_positivity_k_reports_worst_grid_point():
    alpha = np.broadcast_to(np.eye(2), (3, 3, 2, 2)).copy()
    alpha[1, 2] = np.diag([1.0, -2.0])
    verdict = positivity_k(np.eye(2), alpha, 1)
    assert not verdict.holds
    assert verdict.worst_index == (1, 2)


def test_mixed_power_endpoints(rng):
    omega = random_positive_definite(rng, 3)
    alpha = random_hermitian(rng, 3)
    np.testing.assert_allclose(mixed_power(omega, alpha, 0), adjugate(omega), atol=1e-10)
    np.testing.assert_allclose(mixed_power(np.eye(3), alpha, 2), adjugate(alpha), atol=1e-10)
    with pytest.raises(ArgumentError):
        mixed_power(omega, alpha, 3)


def test_quotient_combination_examples():
    omega = np.eye(2)
    good = quotient_combination(omega, 2.0 * omega, k=2, ell=1, c=1.0)
    np.testing.assert_allclose(good, 3.0 * omega, atol=1e-12)
    assert positivity_n1(omega, good).holds

    bad = quotient_combination(omega, omega, k=2, ell=1, c=0.1)
    assert not positivity_n1(omega, bad).holds
