import numpy as np
import pytest

from src.algebra.hermitian import random_positive_definite
from src.algebra.symfunc import Family, OperatorSpec
from src.errors import ArgumentError, DomainError, PositivityError
from src.solver.subsolution import c_subsolution_report, quotient_cone_condition

QUOTIENT = OperatorSpec(Family.HESSIAN_QUOTIENT, 2, 2, 1, 1.0)


def test_monge_ampere_background_is_always_a_subsolution(small_chart):
    op = OperatorSpec(Family.MONGE_AMPERE, 2)
    report = c_subsolution_report(op, small_chart, np.eye(2), 0.0)
    assert report.is_subsolution
    assert report.unbounded
    assert report.worst_point == (0, 0, 0, 0)
    assert report.points_checked == small_chart.points
    assert report.distinct_spectra == 1


def test_unbounded_report_locates_weakest_cone_margin(small_chart):
    x1 = small_chart.coordinates()[0]
    h = np.zeros(small_chart.shape + (2, 2), dtype=complex)
    h[..., 0, 0] = 1.0 + 0.5 * np.cos(2 * np.pi * x1)
    h[..., 1, 1] = 1.0
    report = c_subsolution_report(OperatorSpec(Family.MONGE_AMPERE, 2), small_chart, h, 0.0)
    assert report.is_subsolution
    assert report.worst_point == (4, 0, 0, 0)
    assert report.to_dict()["worst_point"] == [4, 0, 0, 0]


def test_quotient_margin_examples(small_chart):
    report = c_subsolution_report(QUOTIENT, small_chart, np.eye(2), -1.0)
    assert report.is_subsolution
    assert report.worst_margin == pytest.approx(0.5)
    delta, radius = report.delta_R
    assert delta > 0
    assert radius >= delta

    report = c_subsolution_report(QUOTIENT, small_chart, np.eye(2), -0.4)
    assert not report.is_subsolution
    assert report.worst_margin == pytest.approx(-0.1)
    assert report.delta_R is None


def test_quotient_report_locates_worst_point(small_chart):
    psi = np.full(small_chart.shape, -1.0)
    psi[3, 2, 1, 0] = -0.55
    report = c_subsolution_report(QUOTIENT, small_chart, np.eye(2), psi)
    assert report.is_subsolution
    assert report.worst_point == (3, 2, 1, 0)
    assert report.worst_margin == pytest.approx(0.05)
    assert report.distinct_spectra == 2


def test_report_rejects_background_outside_gamma_infinity(small_chart):
    op = OperatorSpec(Family.HESSIAN, 2, 2)
    with pytest.raises(DomainError) as info:
        c_subsolution_report(op, small_chart, np.diag([-1.0, -1.0]), 0.0)
    assert info.value.worst_index == (0, 0, 0, 0)


@pytest.mark.parametrize("psi_high", [-0.3, -0.5, -0.7, -2.0])
def test_lowering_psi_never_breaks_subsolution(small_chart, psi_high):
    high = c_subsolution_report(QUOTIENT, small_chart, np.eye(2), psi_high)
    low = c_subsolution_report(QUOTIENT, small_chart, np.eye(2), psi_high - 0.25)
    assert low.worst_margin >= high.worst_margin
    assert high.is_subsolution <= low.is_subsolution


def test_report_serialises(small_chart):
    data = c_subsolution_report(QUOTIENT, small_chart, np.eye(2), -1.0).to_dict()
    assert data["is_subsolution"] is True
    assert len(data["delta_R"]) == 2


def test_quotient_cone_condition_examples():
    omega = np.eye(2)
    verdict = quotient_cone_condition(2.0 * omega, omega, k=2, ell=1, c=1.0)
    assert verdict.holds
    assert verdict.margin == pytest.approx(3.0)

    verdict = quotient_cone_condition(omega, omega, k=2, ell=1, c=0.1)
    assert not verdict.holds


def test_quotient_cone_condition_rejects_bad_arguments():
    omega = np.eye(2)
    with pytest.raises(ArgumentError):
        quotient_cone_condition(omega, omega, k=2, ell=0, c=1.0)
    with pytest.raises(ArgumentError):
        quotient_cone_condition(omega, omega, k=2, ell=1, c=1.0, route="matrix")
    with pytest.raises(PositivityError):
        quotient_cone_condition(np.diag([1.0, -3.0]), omega, k=2, ell=1, c=1.0)


@pytest.mark.parametrize("k, ell, c", [(2, 1, 1.0), (3, 1, 0.7), (3, 2, 2.5)])
def test_quotient_cone_condition_routes_agree(rng, k, ell, c):
    omega = random_positive_definite(rng, 3, size=(12,))
    omega_h = random_positive_definite(rng, 3, size=(12,))
    by_eigenvalues = quotient_cone_condition(omega_h, omega, k, ell, c)
    by_forms = quotient_cone_condition(omega_h, omega, k, ell, c, route="forms")
    assert by_eigenvalues.holds == by_forms.holds
    assert by_eigenvalues.margin == pytest.approx(by_forms.margin, rel=1e-9, abs=1e-10)
    assert by_eigenvalues.worst_index == by_forms.worst_index
