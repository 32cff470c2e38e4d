"""
(1,1) and (n-1,n-1) form calculus through Hermitian coefficient matrices.

An (n-1,n-1) form is stored by the coefficient matrix of its top-degree
partner, normalised so that omega^{n-1}/(n-1)! corresponds to the adjugate
det(omega) omega^{-1}. All helpers accept stacked (..., n, n) inputs.
"""

from math import comb, factorial
from typing import NamedTuple, Optional

import numpy as np

from ..errors import ArgumentError, DimensionError, PositivityError
from .hermitian import dagger, generalized_eigh, hermitian_part
from .symfunc import ConeId, cone_margins, sigmas, sigma_removed


class ConeVerdict(NamedTuple):
    """Pointwise cone test reduced over a grid."""
    holds: bool
    margin: float
    worst_index: Optional[tuple] = None


def _reduce(margins: np.ndarray) -> ConeVerdict:
    margins = np.asarray(margins, dtype=float)
    if margins.ndim == 0:
        return ConeVerdict(bool(margins > 0), float(margins), None)
    flat = int(np.argmin(margins))
    worst = tuple(int(i) for i in np.unravel_index(flat, margins.shape))
    value = float(margins.reshape(-1)[flat])
    return ConeVerdict(value > 0, value, worst)


def _trace(m: np.ndarray) -> np.ndarray:
    return np.trace(m, axis1=-2, axis2=-1)


def trace_with(omega: np.ndarray, chi: np.ndarray) -> np.ndarray:
    """tr_omega chi = tr(omega^{-1} chi), real."""
    return np.real(_trace(np.linalg.solve(omega, chi)))


def hodge_star_trace(omega: np.ndarray, chi: np.ndarray) -> np.ndarray:
    """Coefficients of *(chi ^ omega^{n-2}): (n-2)! [(tr_omega chi) omega - chi]."""
    omega = np.asarray(omega, dtype=complex)
    chi = np.asarray(chi, dtype=complex)
    n = omega.shape[-1]
    if n < 2:
        raise DimensionError("hodge_star_trace needs n >= 2")
    tr = trace_with(omega, chi)[..., None, None]
    return factorial(n - 2) * (tr * omega - chi)


def hodge_star(omega: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Star of a (1,1) form as (n-1,n-1) coefficients: det(omega) omega^{-1} phi omega^{-1}."""
    omega = np.asarray(omega, dtype=complex)
    inv = np.linalg.inv(omega)
    det = np.real(np.linalg.det(omega))[..., None, None]
    return hermitian_part(det * inv @ np.asarray(phi, dtype=complex) @ inv)


def adjugate(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    return np.linalg.det(m)[..., None, None] * np.linalg.inv(m)


def _require_positive(m: np.ndarray, what: str) -> None:
    lowest = np.linalg.eigvalsh(hermitian_part(m))[..., 0]
    if np.any(lowest <= 0):
        raise PositivityError(f"{what} is not strictly positive (min eigenvalue {float(lowest.min()):.3e})",
                              margin=float(lowest.min()))


def power_root_forward(v: np.ndarray) -> np.ndarray:
    """v -> v^{n-1}/(n-1)!, i.e. the adjugate det(v) v^{-1}."""
    v = np.asarray(v, dtype=complex)
    _require_positive(v, "(1,1) form")
    return hermitian_part(adjugate(v))


def power_root_inverse(phi: np.ndarray) -> np.ndarray:
    """Unique positive v with v^{n-1}/(n-1)! = phi: det(phi)^{1/(n-1)} phi^{-1}."""
    phi = np.asarray(phi, dtype=complex)
    n = phi.shape[-1]
    if n < 2:
        raise DimensionError("the power-root bijection needs n >= 2")
    _require_positive(phi, "(n-1,n-1) form")
    det = np.real(np.linalg.det(phi))[..., None, None]
    return hermitian_part(det ** (1.0 / (n - 1)) * np.linalg.inv(phi))


def power_root_bijection(x: np.ndarray, direction: str = "forward") -> np.ndarray:
    if direction == "forward":
        return power_root_forward(x)
    if direction == "inverse":
        return power_root_inverse(x)
    raise ArgumentError(f"direction must be 'forward' or 'inverse', got '{direction}'")


def relative_eigenvalues(omega: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    """lambda(omega^{-1} alpha), descending."""
    w, _ = generalized_eigh(alpha, omega)
    return w


def positivity_k(omega: np.ndarray, alpha: np.ndarray, k: int) -> ConeVerdict:
    """Whether lambda(omega^{-1} alpha) lies in Gamma_k everywhere, with the scale-aware margin."""
    lam = relative_eigenvalues(omega, alpha)
    return _reduce(cone_margins(lam, ConeId(k)))


def mixed_power(omega: np.ndarray, alpha: np.ndarray, m: int) -> np.ndarray:
    """
    Coefficients of alpha^m ^ omega^{n-1-m} / (n-1)!.

    Read off from adj(omega + s alpha) = adj(I + s A) adj(omega) with
    A = omega^{-1} alpha, whose s^m coefficient is
    sum_j (-1)^j sigma_{m-j}(A) A^j.
    """
    omega = np.asarray(omega, dtype=complex)
    alpha = np.asarray(alpha, dtype=complex)
    n = omega.shape[-1]
    if not 0 <= m <= n - 1:
        raise ArgumentError(f"mixed power order must lie in 0..{n - 1}, got {m}")
    a = np.linalg.solve(omega, alpha)
    e = sigmas(relative_eigenvalues(omega, alpha))
    coefficient = np.zeros_like(a)
    power = np.broadcast_to(np.eye(n, dtype=complex), a.shape).copy()
    for j in range(m + 1):
        coefficient = coefficient + ((-1) ** j) * e[..., m - j][..., None, None] * power
        power = power @ a
    scale = factorial(n - 1 - m) * factorial(m) / factorial(n - 1)
    return hermitian_part(scale * coefficient @ adjugate(omega))


def positivity_n1(omega: np.ndarray, rho: np.ndarray) -> ConeVerdict:
    """Strict positivity of an (n-1,n-1) coefficient relative to omega^{n-1}/(n-1)!."""
    w, _ = generalized_eigh(rho, adjugate(omega))
    return _reduce(w[..., -1])


def quotient_combination(omega: np.ndarray, omega_h: np.ndarray, k: int, ell: int, c: float, t: float = 1.0):
    """(k c omega_h^{k-1} ^ omega^{n-k} - t ell omega_h^{ell-1} ^ omega^{n-ell}) / (n-1)!."""
    return k * c * mixed_power(omega, omega_h, k - 1) - t * ell * mixed_power(omega, omega_h, ell - 1)


def quotient_margins(mu: np.ndarray, n: int, k: int, ell: int, c: float, t: float = 1.0) -> np.ndarray:
    """Pointwise min over i of n c C(n,k)^{-1} sigma_{k-1}(mu|i) - n t C(n,ell)^{-1} sigma_{ell-1}(mu|i)."""
    first = n * c * sigma_removed(mu, k - 1) / comb(n, k)
    second = n * t * sigma_removed(mu, ell - 1) / comb(n, ell)
    return (first - second).min(axis=-1)


def det_ratio(phi: np.ndarray, xi: np.ndarray) -> np.ndarray:
    return np.real(np.linalg.det(phi) / np.linalg.det(xi))


__all__ = [
    "ConeVerdict",
    "adjugate",
    "dagger",
    "det_ratio",
    "hodge_star",
    "hodge_star_trace",
    "mixed_power",
    "positivity_k",
    "positivity_n1",
    "power_root_bijection",
    "power_root_forward",
    "power_root_inverse",
    "quotient_combination",
    "quotient_margins",
    "relative_eigenvalues",
    "trace_with",
]
