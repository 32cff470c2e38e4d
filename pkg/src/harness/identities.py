"""
Randomised checks of the algebraic identities the solver relies on.

Every check draws its own samples from a seeded generator, so a failing
check can be replayed with the same seed.
"""

from dataclasses import dataclass, field
from itertools import combinations, permutations
from math import factorial
from typing import Callable, Optional

import numpy as np

from ..algebra.forms import (
    adjugate,
    det_ratio,
    hodge_star,
    hodge_star_trace,
    mixed_power,
    power_root_forward,
    power_root_inverse,
    trace_with,
)
from ..algebra.hermitian import (
    endomorphism,
    generalized_eigh,
    perturb_spectrum,
    random_hermitian,
    random_positive_definite,
)
from ..algebra.symfunc import (
    Family,
    OperatorSpec,
    f_derivatives,
    f_gradients,
    f_values,
    gerhardt_derivatives,
    sample_cone,
    sigmas,
)
from ..constants import DEFAULT_DERIVATIVE_SAMPLES, DEFAULT_IDENTITY_SAMPLES, DEFAULT_SEED
from ..solver.subsolution import quotient_cone_condition

FD_FIRST_STEP = 1e-5
FD_SECOND_STEP = 5e-3
DERIVATIVE_MARGIN = 0.05
DERIVATIVE_GAP = 0.05
PAIR_MARGIN = 1e-3


@dataclass
class IdentityResult:
    """Outcome of one identity over its samples."""
    name: str
    anchor: str
    samples: int
    max_error: float
    tolerance: float
    violations: int
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "anchor": self.anchor,
            "samples": self.samples,
            "max_error": self.max_error,
            "tolerance": self.tolerance,
            "violations": self.violations,
            "passed": self.passed,
            "note": self.note,
        }


@dataclass
class IdentityReport:
    seed: int
    results: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)

    @property
    def failures(self) -> list:
        return [result for result in self.results if not result.passed]

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "passed": self.passed,
            "results": [result.to_dict() for result in self.results],
        }


def _result(name: str, anchor: str, errors: list, tolerance: float, note: str = "") -> IdentityResult:
    errors = np.asarray(errors, dtype=float).reshape(-1)
    if errors.size == 0:
        vacuous = "0 samples (vacuous pass)"
        return IdentityResult(name, anchor, 0, 0.0, tolerance, 0, f"{vacuous}; {note}" if note else vacuous)
    bad = ~np.isfinite(errors) | (errors > tolerance)
    return IdentityResult(
        name=name,
        anchor=anchor,
        samples=int(errors.size),
        max_error=float(np.nanmax(np.where(np.isfinite(errors), errors, np.inf))),
        tolerance=tolerance,
        violations=int(bad.sum()),
        note=note,
    )


def _dimension(rng: np.random.Generator, low: int = 1, high: int = 4) -> int:
    return int(rng.integers(low, high + 1))


def _operators(n: int) -> list:
    ops = [OperatorSpec(Family.MONGE_AMPERE, n)]
    ops += [OperatorSpec(Family.HESSIAN, n, k) for k in range(1, n)]
    ops += [OperatorSpec(Family.HESSIAN_QUOTIENT, n, k, ell, 1.0) for k in range(2, n + 1) for ell in range(1, k)]
    if n >= 2:
        ops += [OperatorSpec(Family.T_HESSIAN, n, k) for k in range(1, n + 1)]
    return ops


def _relative(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    return float(np.abs(a - b).max() / (1.0 + np.abs(b).max()))


# ---------------------------------------------------------------------------
# Symmetric polynomials and forms
# ---------------------------------------------------------------------------

def check_sigma_expansion(rng, samples: int) -> IdentityResult:
    """The recurrence against the brute-force sum over subsets."""
    errors = []
    for _ in range(samples):
        n = _dimension(rng, 1, 5)
        lam = rng.normal(scale=2.0, size=n)
        brute = [1.0] + [sum(np.prod(sub) for sub in combinations(lam, j)) for j in range(1, n + 1)]
        errors.append(_relative(sigmas(lam), brute))
    return _result("sigma-expansion", "sigma_j(lambda) = sum over |S| = j of prod_{i in S} lambda_i", errors, 1e-12,
                   note="product recurrence against the brute-force subset sum")


def check_hodge_trace(rng, samples: int) -> IdentityResult:
    """star(omega, *(chi ^ omega^{n-2})) against (n-1)! times the mixed power, plus its trace."""
    errors = []
    for _ in range(samples):
        n = _dimension(rng, 2, 4)
        omega = random_positive_definite(rng, n)
        chi = random_hermitian(rng, n)
        star = hodge_star_trace(omega, chi)
        lhs = hodge_star(omega, star)
        rhs = factorial(n - 1) * mixed_power(omega, chi, 1)
        trace_gap = trace_with(omega, star) - factorial(n - 2) * (n - 1) * trace_with(omega, chi)
        errors.append(max(_relative(lhs, rhs), abs(float(trace_gap)) / (1.0 + abs(float(trace_with(omega, chi))))))
    return _result("hodge-trace", "*(chi ^ omega^{n-2}) = (n-2)! ((tr chi) omega - chi)", errors, 1e-10,
                   note="also checks tr_omega of the result against (n-1)! tr_omega chi")


def check_hodge_involution(rng, samples: int) -> IdentityResult:
    errors = []
    for _ in range(samples):
        omega = random_positive_definite(rng, 2)
        chi = random_hermitian(rng, 2)
        twice = hodge_star_trace(omega, hodge_star_trace(omega, chi))
        errors.append(_relative(twice, chi))
    return _result("hodge-involution-n2", "*(*chi) = chi for n = 2", errors, 1e-10,
                   note="the trace star is an involution in dimension 2")


def check_det_ratio(rng, samples: int) -> IdentityResult:
    errors = []
    for _ in range(samples):
        n = _dimension(rng, 2, 4)
        omega = random_positive_definite(rng, n)
        phi = random_positive_definite(rng, n)
        lhs = det_ratio(hodge_star(omega, phi), adjugate(omega))
        rhs = det_ratio(phi, omega)
        errors.append(_relative(lhs, rhs))
    return _result("det-ratio", "det(*phi) / det(*omega) = det(phi) / det(omega)", errors, 1e-10,
                   note="det of the star against det of the adjugate")


def check_power_root(rng, samples: int) -> IdentityResult:
    """det(v^{n-1}) = det(v)^{n-1} and the inverse recovers v."""
    errors = []
    for _ in range(samples):
        n = _dimension(rng, 2, 4)
        v = random_positive_definite(rng, n)
        phi = power_root_forward(v)
        det_gap = _relative(np.real(np.linalg.det(phi)), np.real(np.linalg.det(v)) ** (n - 1))
        errors.append(max(det_gap, _relative(power_root_inverse(phi), v)))
    return _result("power-root", "det(v^{n-1}) = det(v)^{n-1} and root(v^{n-1}) = v", errors, 1e-10,
                   note="v -> v^{n-1}/(n-1)! is a bijection of positive forms")


def check_endomorphism(rng, samples: int) -> IdentityResult:
    """sigma_1 and sigma_n of the relative spectrum match trace and determinant of g^{-1} h."""
    errors = []
    for _ in range(samples):
        n = _dimension(rng)
        g = random_positive_definite(rng, n)
        h = random_hermitian(rng, n)
        lam, z = generalized_eigh(h, g)
        a = endomorphism(g, h)
        e = sigmas(lam)
        unitary = z.conj().T @ g @ z
        errors.append(max(
            _relative(e[1], np.real(np.trace(a))),
            _relative(e[n], np.real(np.linalg.det(a))),
            _relative(unitary, np.eye(n)),
        ))
    return _result("endomorphism", "sigma_1(lambda) = tr(g^{-1} h) and sigma_n(lambda) = det(g^{-1} h)", errors, 1e-10,
                   note="relative eigenvalues of (g, h) are the eigenvalues of g^{-1} h")


# ---------------------------------------------------------------------------
# Structure of f
# ---------------------------------------------------------------------------

def _pairs(rng, samples: int):
    """(op, a, b) with a and b strictly admissible for op."""
    for _ in range(samples):
        n = _dimension(rng, 1, 4)
        ops = _operators(n)
        op = ops[int(rng.integers(len(ops)))]
        a, b = sample_cone(rng, op, 2, floor=PAIR_MARGIN)
        yield op, a, b


def _family_samples(rng, samples: int, max_n: int = 4):
    """(op, a, b) per operator of every family for n <= max_n; a and b are (samples, n) cone draws."""
    if samples == 0:
        return
    for n in range(1, max_n + 1):
        for op in _operators(n):
            a = sample_cone(rng, op, samples, floor=PAIR_MARGIN)
            b = sample_cone(rng, op, samples, floor=PAIR_MARGIN)
            yield op, a, b


def check_ellipticity(rng, samples: int) -> IdentityResult:
    errors = []
    for op, a, _ in _family_samples(rng, samples):
        grad = f_gradients(op, a)
        errors.append(np.maximum(0.0, -grad.min(axis=-1)))
    return _result("ellipticity", "f_i > 0", errors, 0.0,
                   note="every operator of every family for n <= 4; error is the depth of the most negative partial")


def check_concavity(rng, samples: int) -> IdentityResult:
    """Midpoint concavity, absolute."""
    errors = []
    for op, a, b in _family_samples(rng, samples):
        gap = 0.5 * (f_values(op, a) + f_values(op, b)) - f_values(op, 0.5 * (a + b))
        errors.append(np.maximum(0.0, gap))
    return _result("concavity", "f((a + b)/2) >= (f(a) + f(b))/2", errors, 1e-12,
                   note="every operator of every family for n <= 4")


def check_tangent_plane(rng, samples: int) -> IdentityResult:
    errors = []
    for op, a, b in _family_samples(rng, samples):
        fa, fb = f_values(op, a), f_values(op, b)
        tangent = fa + np.sum(f_gradients(op, a) * (b - a), axis=-1)
        scale = 1.0 + np.abs(fa) + np.abs(fb)
        errors.append(np.maximum(0.0, (fb - tangent) / scale))
    return _result("tangent-plane", "f(b) <= f(a) + sum_i f_i(a) (b_i - a_i)", errors, 1e-10,
                   note="relative to 1 + |f(a)| + |f(b)|")


def check_euler(rng, samples: int) -> IdentityResult:
    errors = []
    for op, a, _ in _family_samples(rng, samples):
        errors.append(np.maximum(0.0, -np.sum(f_gradients(op, a) * a, axis=-1)))
    return _result("euler", "sum_i f_i lambda_i >= 0", errors, 1e-12,
                   note="every operator of every family for n <= 4")


def check_gradient_order(rng, samples: int) -> IdentityResult:
    """lambda_i >= lambda_j implies f_i <= f_j."""
    errors = []
    for op, a, _ in _pairs(rng, samples):
        lam = np.sort(a)[::-1]
        grad = f_derivatives(op, lam)[0]
        errors.append(max(0.0, float(np.max(np.diff(grad) * -1.0)) / (1.0 + float(np.abs(grad).max())))
                      if lam.size > 1 else 0.0)
    return _result("gradient-order", "lambda_i >= lambda_j implies f_i <= f_j", errors, 1e-10,
                   note="partials are ordered opposite to the eigenvalues")


def check_symmetry(rng, samples: int) -> IdentityResult:
    errors = []
    for op, a, _ in _pairs(rng, samples):
        base = float(f_values(op, a))
        worst = max(abs(float(f_values(op, a[list(p)])) - base) for p in permutations(range(a.size)))
        errors.append(worst / (1.0 + abs(base)))
    return _result("symmetry", "f(P lambda) = f(lambda)", errors, 1e-10, note="every permutation P of the tuple")


# ---------------------------------------------------------------------------
# Matrix derivatives
# ---------------------------------------------------------------------------

def _spectral_matrices(rng, samples: int):
    """(op, A, X) with lambda(A) well inside the cone and well separated."""
    drawn = 0
    while drawn < samples:
        n = _dimension(rng, 2, 3)
        ops = _operators(n)
        op = ops[int(rng.integers(len(ops)))]
        lam = sample_cone(rng, op, 1, scale=2.0, floor=DERIVATIVE_MARGIN)[0]
        if np.diff(np.sort(lam)).min() <= DERIVATIVE_GAP:
            continue
        q, _ = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
        a = (q * lam) @ q.conj().T
        x = random_hermitian(rng, n)
        x /= np.linalg.norm(x)
        drawn += 1
        yield op, a, x


def _big_f(op: OperatorSpec, a: np.ndarray) -> float:
    lam = np.linalg.eigvalsh(a)[::-1]
    return float(f_values(op, lam))


def check_gerhardt_first(rng, samples: int) -> IdentityResult:
    errors = []
    for op, a, x in _spectral_matrices(rng, samples):
        d = gerhardt_derivatives(op, a)
        s = FD_FIRST_STEP
        fd = (_big_f(op, a + s * x) - _big_f(op, a - s * x)) / (2 * s)
        scale = 1.0 + np.linalg.norm(d.first) * np.linalg.norm(x)
        errors.append(abs(fd - d.directional(x)) / scale)
    return _result("matrix-first-derivative", "dF(A)[X] = tr(F^{ij} X)", errors, 1e-6,
                   note="central difference of F(A + sX)")


def check_gerhardt_second(rng, samples: int) -> IdentityResult:
    """Richardson-extrapolated second differences at s and s/2 against the quadratic form."""
    errors = []
    for op, a, x in _spectral_matrices(rng, samples):
        d = gerhardt_derivatives(op, a)
        base = _big_f(op, a)

        def second_difference(s: float) -> float:
            return (_big_f(op, a + s * x) - 2.0 * base + _big_f(op, a - s * x)) / s ** 2

        s = FD_SECOND_STEP
        fd = (4.0 * second_difference(s / 2) - second_difference(s)) / 3.0
        errors.append(abs(fd - d.quadratic_form(x)) / d.quadratic_magnitude(x))
    return _result("matrix-second-derivative",
                   "d2F(A)[X, X] = f_ij X_ii X_jj + sum_{i != j} (f_i - f_j)/(lambda_i - lambda_j) |X_ij|^2",
                   errors, 1e-5,
                   note="eigenvalue gaps and cone margins above 0.05; error relative to the summed term magnitudes")


# ---------------------------------------------------------------------------
# Quotient condition and perturbation
# ---------------------------------------------------------------------------

def check_quotient_routes(rng, samples: int) -> IdentityResult:
    """Eigenvalue and forms routes report the same margin."""
    errors = []
    for _ in range(samples):
        n = _dimension(rng, 2, 4)
        k = int(rng.integers(2, n + 1))
        ell = int(rng.integers(1, k))
        c = float(rng.uniform(0.2, 3.0))
        omega = random_positive_definite(rng, n)
        omega_h = random_positive_definite(rng, n)
        eigen = quotient_cone_condition(omega_h, omega, k, ell, c, route="eigenvalue")
        forms = quotient_cone_condition(omega_h, omega, k, ell, c, route="forms")
        errors.append(abs(eigen.margin - forms.margin) / (1.0 + abs(eigen.margin)))
    return _result("quotient-routes", "eigenvalue margin = (n-1,n-1) forms margin", errors, 1e-10,
                   note="sigma_{k-1}(mu|i) against the (n-1,n-1) combination")


def check_perturbation(rng, samples: int) -> IdentityResult:
    """The shifted spectrum is strictly ordered and loses less than one in trace."""
    errors = []
    for _ in range(samples):
        n = _dimension(rng, 2, 5)
        values = np.round(rng.normal(size=n), 1)
        values[1] = values[0]
        tau = float(rng.uniform(1e-8, 1.0))
        b, shifted = perturb_spectrum(values, tau)
        lam = shifted.as_array()
        ordered = bool(np.all(np.diff(lam) < 0))
        within = sum(b.diagonal) < 1.0 and b.tau <= 1.0 / n
        errors.append(0.0 if ordered and within else 1.0)
    return _result("perturbation-order", "lambda_1 + B_1 > ... > lambda_n + B_n and sum B_i < 1", errors, 0.5,
                   note="B_i = tau (i - 1)/(n - 1) separates ties")


CHECKS: list = [
    ("sigma-expansion", check_sigma_expansion, False),
    ("hodge-trace", check_hodge_trace, False),
    ("hodge-involution-n2", check_hodge_involution, False),
    ("det-ratio", check_det_ratio, False),
    ("power-root", check_power_root, False),
    ("endomorphism", check_endomorphism, False),
    ("ellipticity", check_ellipticity, False),
    ("concavity", check_concavity, False),
    ("tangent-plane", check_tangent_plane, False),
    ("euler", check_euler, False),
    ("gradient-order", check_gradient_order, False),
    ("symmetry", check_symmetry, False),
    ("matrix-first-derivative", check_gerhardt_first, True),
    ("matrix-second-derivative", check_gerhardt_second, True),
    ("quotient-routes", check_quotient_routes, False),
    ("perturbation-order", check_perturbation, False),
]


def verify_identities(
    seed: int = DEFAULT_SEED,
    samples: int = DEFAULT_IDENTITY_SAMPLES,
    derivative_samples: int = DEFAULT_DERIVATIVE_SAMPLES,
    on_result: Optional[Callable[[IdentityResult], None]] = None,
) -> IdentityReport:
    """Run every identity check; each gets its own child generator of ``seed``."""
    report = IdentityReport(seed=seed)
    streams = np.random.SeedSequence(seed).spawn(len(CHECKS))
    for (_, check, derivative), stream in zip(CHECKS, streams):
        rng = np.random.default_rng(stream)
        result = check(rng, derivative_samples if derivative else samples)
        report.results.append(result)
        if on_result:
            on_result(result)
    return report
