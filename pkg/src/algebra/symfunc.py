"""
Elementary symmetric polynomials, Garding cones and the operator family f.

Every public function accepts a single tuple; the underscore-free batched
helpers (``sigmas``, ``f_values``, ``f_gradients`` ...) take arrays of shape
(..., n) so the solver can evaluate a whole grid at once.
"""

from dataclasses import dataclass, field
from enum import Enum
from math import comb
from typing import Optional

import numpy as np

from ..constants import CONE_STRICTNESS, DEGENERACY_GAP, DEFAULT_PERTURBATION_TAU, UNBOUNDED_SENTINEL
from ..errors import ArgumentError, DomainError


class Family(str, Enum):
    """Operator families understood by the solver."""
    MONGE_AMPERE = "monge-ampere"
    HESSIAN = "hessian"
    HESSIAN_QUOTIENT = "hessian-quotient"
    T_HESSIAN = "t-hessian"


@dataclass(frozen=True)
class ConeId:
    """Gamma_k, or its pullback under T when ``pullback`` is set."""
    k: int
    pullback: bool = False


@dataclass(frozen=True)
class OperatorSpec:
    """
    A concave symmetric operator together with its cone.

    ``blend`` only matters for the quotient family: it interpolates the
    numerator between the constant 1 (blend 0) and sigma_ell (blend 1).
    """
    family: Family
    n: int
    k: int = 0
    ell: int = 0
    c: float = 1.0
    blend: float = 1.0

    def __post_init__(self):
        family = Family(self.family)
        object.__setattr__(self, "family", family)
        if self.n < 1:
            raise ArgumentError(f"dimension must be positive, got n={self.n}")
        if family is Family.MONGE_AMPERE:
            object.__setattr__(self, "k", self.n)
        if not 1 <= self.k <= self.n:
            raise ArgumentError(f"k must lie in 1..{self.n}, got k={self.k}")
        if family is Family.T_HESSIAN and self.n < 2:
            raise ArgumentError("the T-transform family needs n >= 2")
        if family is Family.HESSIAN_QUOTIENT:
            if not 1 <= self.ell < self.k:
                raise ArgumentError(f"quotient needs 1 <= ell < k, got ell={self.ell}, k={self.k}")
            if self.c <= 0:
                raise ArgumentError(f"quotient constant must be positive, got c={self.c}")
            if not 0.0 <= self.blend <= 1.0:
                raise ArgumentError(f"blend must lie in [0, 1], got {self.blend}")

    @property
    def cone(self) -> ConeId:
        return ConeId(self.k, pullback=self.family is Family.T_HESSIAN)

    @property
    def unbounded_at_infinity(self) -> bool:
        return self.family is not Family.HESSIAN_QUOTIENT

    def with_blend(self, blend: float) -> "OperatorSpec":
        return OperatorSpec(self.family, self.n, self.k, self.ell, self.c, blend)

    def describe(self) -> str:
        if self.family is Family.HESSIAN_QUOTIENT:
            return f"{self.family.value}(n={self.n}, k={self.k}, ell={self.ell}, c={self.c:g})"
        return f"{self.family.value}(n={self.n}, k={self.k})"


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalue tuple kept sorted in descending order."""
    values: tuple

    def __post_init__(self):
        ordered = tuple(sorted((float(x) for x in self.values), reverse=True))
        object.__setattr__(self, "values", ordered)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def as_array(self) -> np.ndarray:
        return np.array(self.values, dtype=float)


@dataclass(frozen=True)
class Extended:
    """Extended real: a finite value, or +infinity flagged by ``unbounded``."""
    value: float
    unbounded: bool = False

    @classmethod
    def infinity(cls) -> "Extended":
        return cls(UNBOUNDED_SENTINEL, unbounded=True)

    def __float__(self) -> float:
        return float("inf") if self.unbounded else self.value


def _as_lambda(lam) -> np.ndarray:
    if isinstance(lam, Spectrum):
        return lam.as_array()
    return np.asarray(lam, dtype=float)


# ---------------------------------------------------------------------------
# Elementary symmetric polynomials
# ---------------------------------------------------------------------------

def sigmas(lam: np.ndarray) -> np.ndarray:
    """Return sigma_0..sigma_n of the last axis, shape (..., n + 1)."""
    lam = np.asarray(lam, dtype=float)
    n = lam.shape[-1]
    e = np.zeros(lam.shape[:-1] + (n + 1,))
    e[..., 0] = 1.0
    for i in range(n):
        x = lam[..., i]
        # descending j keeps e[j - 1] from the previous sweep
        for j in range(i + 1, 0, -1):
            e[..., j] += x * e[..., j - 1]
    return e


def sigma(lam, j: int) -> float:
    """sigma_j of a tuple; sigma_0 is 1."""
    arr = _as_lambda(lam)
    if not 0 <= j <= arr.shape[-1]:
        raise ArgumentError(f"sigma index {j} outside 0..{arr.shape[-1]}")
    return float(sigmas(arr)[..., j])


def _sigma_of(e: np.ndarray, m: int) -> np.ndarray:
    if m < 0 or m >= e.shape[-1]:
        return np.zeros(e.shape[:-1])
    return e[..., m]


def sigma_removed(lam: np.ndarray, m: int) -> np.ndarray:
    """sigma_m(lambda | i) for every i, shape (..., n)."""
    lam = np.asarray(lam, dtype=float)
    n = lam.shape[-1]
    out = np.empty(lam.shape)
    for i in range(n):
        rest = np.delete(lam, i, axis=-1)
        out[..., i] = _sigma_of(sigmas(rest), m)
    return out


def sigma_removed_pair(lam: np.ndarray, m: int) -> np.ndarray:
    """sigma_m(lambda | i, j) off the diagonal and 0 on it, shape (..., n, n)."""
    lam = np.asarray(lam, dtype=float)
    n = lam.shape[-1]
    out = np.zeros(lam.shape + (n,))
    for i in range(n):
        for j in range(i + 1, n):
            rest = np.delete(lam, [i, j], axis=-1)
            value = _sigma_of(sigmas(rest), m)
            out[..., i, j] = value
            out[..., j, i] = value
    return out


def t_transform(lam: np.ndarray) -> np.ndarray:
    """T_i(lambda) = sum of the other entries."""
    lam = np.asarray(lam, dtype=float)
    return lam.sum(axis=-1, keepdims=True) - lam


# ---------------------------------------------------------------------------
# Cones
# ---------------------------------------------------------------------------

def _cone_input(lam: np.ndarray, cone: ConeId) -> np.ndarray:
    return t_transform(lam) if cone.pullback else lam


def cone_margins(lam: np.ndarray, cone: ConeId) -> np.ndarray:
    """Scale-aware margin min_j sigma_j / (1 + |lambda|^j) over j <= k."""
    mu = _cone_input(np.asarray(lam, dtype=float), cone)
    e = sigmas(mu)
    size = np.linalg.norm(mu, axis=-1)
    powers = np.arange(1, cone.k + 1)
    scaled = e[..., 1:cone.k + 1] / (1.0 + size[..., None] ** powers)
    return scaled.min(axis=-1)


def first_failing_sigma(lam, cone: ConeId) -> Optional[int]:
    """First j <= k with sigma_j <= 0, or None inside the cone."""
    e = sigmas(_cone_input(_as_lambda(lam), cone))
    for j in range(1, cone.k + 1):
        if e[j] <= 0:
            return j
    return None


def cone_contains(lam, cone: ConeId) -> bool:
    """True iff sigma_1..sigma_k are all positive (after T for the pullback cone)."""
    return first_failing_sigma(lam, cone) is None


def _first_weak_sigma(lam: np.ndarray, cone: ConeId) -> Optional[int]:
    mu = _cone_input(lam, cone)
    e = sigmas(mu)
    size = float(np.linalg.norm(mu))
    for j in range(1, cone.k + 1):
        if e[j] <= CONE_STRICTNESS * (1.0 + size ** j):
            return j
    return None


def _require_cone(op: OperatorSpec, lam: np.ndarray, strict: bool) -> None:
    failing = first_failing_sigma(lam, op.cone)
    if failing is None and strict:
        failing = _first_weak_sigma(lam, op.cone)
    if failing is not None:
        raise DomainError(
            f"spectrum {tuple(np.round(lam, 12))} leaves the cone of {op.describe()} at sigma_{failing}",
            spectrum=lam,
            failing_j=failing,
        )


# ---------------------------------------------------------------------------
# Operator values and derivatives (batched)
# ---------------------------------------------------------------------------

def _quotient_parts(op: OperatorSpec, lam: np.ndarray):
    n, k, ell, t = op.n, op.k, op.ell, op.blend
    e = sigmas(lam)
    p = t * e[..., ell] / comb(n, ell) + (1.0 - t)
    q = e[..., k] / comb(n, k)
    return p, q


def f_values(op: OperatorSpec, lam: np.ndarray) -> np.ndarray:
    """f over an array of spectra, shape (...)."""
    lam = np.asarray(lam, dtype=float)
    n, k = op.n, op.k
    with np.errstate(divide="ignore", invalid="ignore"):
        if op.family is Family.MONGE_AMPERE:
            return np.log(sigmas(lam)[..., n])
        if op.family is Family.HESSIAN:
            return np.log(sigmas(lam)[..., k] / comb(n, k))
        if op.family is Family.HESSIAN_QUOTIENT:
            p, q = _quotient_parts(op, lam)
            return -p / q
        return np.log(sigmas(t_transform(lam))[..., k])


def _log_sigma_derivatives(mu: np.ndarray, k: int, second: bool):
    s = sigmas(mu)[..., k]
    s_i = sigma_removed(mu, k - 1)
    grad = s_i / s[..., None]
    if not second:
        return grad, None
    s_ij = sigma_removed_pair(mu, k - 2)
    hess = s_ij / s[..., None, None] - grad[..., :, None] * grad[..., None, :]
    return grad, hess


def _quotient_derivatives(op: OperatorSpec, lam: np.ndarray, second: bool):
    n, k, ell, t = op.n, op.k, op.ell, op.blend
    p, q = _quotient_parts(op, lam)
    p_i = t * sigma_removed(lam, ell - 1) / comb(n, ell)
    q_i = sigma_removed(lam, k - 1) / comb(n, k)
    qq = q[..., None]
    grad = -p_i / qq + p[..., None] * q_i / qq ** 2
    if not second:
        return grad, None
    p_ij = t * sigma_removed_pair(lam, ell - 2) / comb(n, ell)
    q_ij = sigma_removed_pair(lam, k - 2) / comb(n, k)
    q2 = q[..., None, None]
    pp = p[..., None, None]
    cross = p_i[..., :, None] * q_i[..., None, :] + p_i[..., None, :] * q_i[..., :, None]
    hess = (
        -p_ij / q2
        + cross / q2 ** 2
        - 2.0 * pp * q_i[..., :, None] * q_i[..., None, :] / q2 ** 3
        + pp * q_ij / q2 ** 2
    )
    return grad, hess


def _derivatives(op: OperatorSpec, lam: np.ndarray, second: bool):
    lam = np.asarray(lam, dtype=float)
    if op.family is Family.HESSIAN_QUOTIENT:
        return _quotient_derivatives(op, lam, second)
    if op.family is Family.T_HESSIAN:
        n = op.n
        jacobian = np.ones((n, n)) - np.eye(n)
        grad_h, hess_h = _log_sigma_derivatives(t_transform(lam), op.k, second)
        grad = grad_h @ jacobian
        if not second:
            return grad, None
        return grad, jacobian @ hess_h @ jacobian
    return _log_sigma_derivatives(lam, op.k, second)


def f_gradients(op: OperatorSpec, lam: np.ndarray) -> np.ndarray:
    """(f_i) over an array of spectra, shape (..., n)."""
    return _derivatives(op, lam, second=False)[0]


def f_derivatives(op: OperatorSpec, lam: np.ndarray):
    """(f_i, f_ij) over an array of spectra."""
    return _derivatives(op, lam, second=True)


# ---------------------------------------------------------------------------
# Single-tuple surface
# ---------------------------------------------------------------------------

def _check_length(op: OperatorSpec, lam: np.ndarray, expected: int) -> None:
    if lam.shape != (expected,):
        raise ArgumentError(f"expected a tuple of length {expected} for {op.describe()}, got shape {lam.shape}")


def f_eval(op: OperatorSpec, lam) -> float:
    """f(lambda); raises DomainError outside the cone."""
    arr = np.sort(_as_lambda(lam))[::-1]
    _check_length(op, arr, op.n)
    _require_cone(op, arr, strict=False)
    return float(f_values(op, arr))


def f_grad_hess(op: OperatorSpec, lam):
    """Gradient and Hessian of f at a strictly admissible tuple (input order kept)."""
    arr = _as_lambda(lam)
    _check_length(op, arr, op.n)
    _require_cone(op, arr, strict=True)
    grad, hess = f_derivatives(op, arr)
    return grad, hess


def f_infinity(op: OperatorSpec, lambda_prime) -> Extended:
    """lim_{t -> inf} f(lambda', t)."""
    arr = _as_lambda(lambda_prime)
    _check_length(op, arr, op.n - 1)
    if not in_gamma_infinity(op, arr):
        raise DomainError(
            f"{tuple(arr)} has no completion inside the cone of {op.describe()}",
            spectrum=arr,
        )
    if op.unbounded_at_infinity:
        return Extended.infinity()
    return Extended(float(f_infinity_values(op, arr)))


def in_gamma_infinity(op: OperatorSpec, lambda_prime) -> bool:
    return bool(gamma_infinity_mask(op, _as_lambda(lambda_prime)))


def gamma_infinity_mask(op: OperatorSpec, lambda_prime: np.ndarray) -> np.ndarray:
    """Whether some completion (lambda', t) lies in the cone, batched."""
    lp = np.asarray(lambda_prime, dtype=float)
    if op.family is Family.T_HESSIAN:
        if op.k == op.n:
            return lp.sum(axis=-1) > 0
        return np.ones(lp.shape[:-1], dtype=bool)
    if op.k == 1:
        return np.ones(lp.shape[:-1], dtype=bool)
    e = sigmas(lp)
    return np.all(e[..., 1:op.k] > 0, axis=-1)


def f_infinity_values(op: OperatorSpec, lambda_prime: np.ndarray) -> np.ndarray:
    """Finite limit for the quotient family; the sentinel for the others."""
    lp = np.asarray(lambda_prime, dtype=float)
    if op.unbounded_at_infinity:
        return np.full(lp.shape[:-1], UNBOUNDED_SENTINEL)
    n, k, ell = op.n, op.k, op.ell
    e = sigmas(lp)
    num = op.blend * _sigma_of(e, ell - 1) * comb(n, k)
    den = comb(n, ell) * _sigma_of(e, k - 1)
    return -num / den


# ---------------------------------------------------------------------------
# Matrix derivatives of F(A) = f(lambda(A))
# ---------------------------------------------------------------------------

def degenerate(lam: np.ndarray) -> np.ndarray:
    """True where two eigenvalues are closer than the relative gap threshold."""
    lam = np.asarray(lam, dtype=float)
    if lam.shape[-1] < 2:
        return np.zeros(lam.shape[:-1], dtype=bool)
    gaps = np.abs(np.diff(np.sort(lam, axis=-1), axis=-1))
    scale = 1.0 + np.abs(lam).max(axis=-1)
    return gaps.min(axis=-1) < DEGENERACY_GAP * scale


@dataclass
class GerhardtDerivatives:
    """
    First and second derivatives of F(A) = f(lambda(A)) at a Hermitian A.

    ``first`` is the ambient matrix F^{ij}; in the eigenbasis it is diag(f_i).
    """
    op: OperatorSpec
    eigenvalues: np.ndarray
    basis: np.ndarray
    gradient: np.ndarray
    hessian: np.ndarray
    perturbed: bool = False
    first: np.ndarray = field(init=False)

    def __post_init__(self):
        u = self.basis
        self.first = (u * self.gradient) @ u.conj().T

    def _divided_differences(self) -> np.ndarray:
        lam, grad = self.eigenvalues, self.gradient
        dl = lam[:, None] - lam[None, :]
        df = grad[:, None] - grad[None, :]
        out = np.zeros_like(dl)
        off = ~np.eye(lam.size, dtype=bool)
        out[off] = df[off] / dl[off]
        return out

    def quadratic_parts(self, x: np.ndarray):
        """(diagonal part, off-diagonal part) of the second-order form at X."""
        xp = self.basis.conj().T @ np.asarray(x, dtype=complex) @ self.basis
        d = np.real(np.diag(xp))
        diag_part = float(d @ self.hessian @ d)
        off_part = float(np.sum(self._divided_differences() * np.abs(xp) ** 2))
        return diag_part, off_part

    def quadratic_form(self, x: np.ndarray) -> float:
        diag_part, off_part = self.quadratic_parts(x)
        return diag_part + off_part

    def quadratic_magnitude(self, x: np.ndarray) -> float:
        """Sum of the absolute values of the terms of quadratic_form(x)."""
        xp = self.basis.conj().T @ np.asarray(x, dtype=complex) @ self.basis
        d = np.abs(np.real(np.diag(xp)))
        off = np.sum(np.abs(self._divided_differences()) * np.abs(xp) ** 2)
        return float(d @ np.abs(self.hessian) @ d + off)

    def directional(self, x: np.ndarray) -> float:
        """First derivative of F along X, Re tr(F X)."""
        return float(np.real(np.trace(self.first @ np.asarray(x, dtype=complex))))


def gerhardt_derivatives(
    op: OperatorSpec,
    a: np.ndarray,
    tau: float = DEFAULT_PERTURBATION_TAU,
) -> GerhardtDerivatives:
    """
    Derivatives of F at the Hermitian matrix A.

    Coinciding eigenvalues are separated with the diagonal shift B before the
    divided differences are formed.
    """
    from .hermitian import perturb_spectrum

    a = np.asarray(a, dtype=complex)
    w, u = np.linalg.eigh(a)
    lam, basis = w[::-1].copy(), u[:, ::-1].copy()
    _require_cone(op, lam, strict=True)
    perturbed = False
    if lam.size > 1 and bool(degenerate(lam)):
        _, shifted = perturb_spectrum(Spectrum(lam), tau)
        lam = shifted.as_array()
        perturbed = True
    grad, hess = f_derivatives(op, lam)
    return GerhardtDerivatives(op, lam, basis, grad, hess, perturbed)


def sample_cone(
    rng: np.random.Generator,
    op: OperatorSpec,
    size: int,
    scale: float = 3.0,
    floor: float = 1e-6,
) -> np.ndarray:
    """Rejection-sample spectra whose cone margin exceeds ``floor``, shape (size, n)."""
    out = np.empty((0, op.n))
    while out.shape[0] < size:
        draw = rng.uniform(-scale, scale, size=(4 * size + 8, op.n))
        draw[:, 0] += scale
        keep = draw[cone_margins(draw, op.cone) > floor]
        out = np.concatenate([out, keep])
    return out[:size]


def operator_from_name(name: str, n: int, k: int = 0, ell: int = 0, c: float = 1.0) -> OperatorSpec:
    try:
        family = Family(name)
    except ValueError:
        raise ArgumentError(f"unknown operator family '{name}'") from None
    return OperatorSpec(family, n, k or n, ell, c)
