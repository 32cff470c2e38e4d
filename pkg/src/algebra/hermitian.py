"""
Hermitian matrix algebra for the endomorphism A = g^{-1} h.

Generalized eigenproblems are reduced with the Cholesky factor of g, so
every helper works on single matrices and on stacked (..., n, n) fields.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..constants import HERMITIAN_RTOL
from ..errors import ArgumentError, MetricError
from .symfunc import Spectrum


@dataclass(frozen=True)
class PerturbationB:
    """Diagonal shift 0 = B_1 < B_2 < ... < B_n separating a spectrum."""
    diagonal: tuple
    tau: float
    gap_sum: float


def dagger(m: np.ndarray) -> np.ndarray:
    return np.swapaxes(np.conj(m), -2, -1)


def hermitian_part(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + dagger(m))


def is_hermitian(m: np.ndarray, rtol: float = HERMITIAN_RTOL) -> bool:
    m = np.asarray(m)
    scale = max(1.0, float(np.abs(m).max(initial=0.0)))
    return bool(np.abs(m - dagger(m)).max(initial=0.0) <= rtol * scale)


def _worst_index(values: np.ndarray) -> Optional[tuple]:
    if values.ndim == 0:
        return None
    return tuple(int(i) for i in np.unravel_index(np.argmin(values), values.shape))


def check_positive_definite(g: np.ndarray, what: str = "metric") -> None:
    """Raise MetricError naming the grid point with the smallest eigenvalue."""
    lowest = np.linalg.eigvalsh(hermitian_part(np.asarray(g, dtype=complex)))[..., 0]
    if np.all(lowest > 0):
        return
    worst = _worst_index(lowest)
    value = float(lowest.min())
    where = "" if worst is None else f" at grid point {worst}"
    raise MetricError(f"{what} is not positive definite{where} (min eigenvalue {value:.3e})", worst, value)


def whitening(g: np.ndarray) -> np.ndarray:
    """L^{-1} with g = L L^H; raises MetricError if g is not positive definite."""
    g = hermitian_part(np.asarray(g, dtype=complex))
    try:
        chol = np.linalg.cholesky(g)
    except np.linalg.LinAlgError:
        check_positive_definite(g)
        raise MetricError("metric Cholesky factorisation failed")
    return np.linalg.inv(chol)


def _eigh_2x2(c: np.ndarray):
    """Closed-form descending eigenpairs of stacked 2x2 Hermitian matrices."""
    a = c[..., 0, 0].real
    d = c[..., 1, 1].real
    b = c[..., 0, 1]
    half_gap = 0.5 * (a - d)
    radius = np.hypot(half_gap, np.abs(b))
    mean = 0.5 * (a + d)
    w = np.stack([mean + radius, mean - radius], axis=-1)

    # null vector of C - w_1 I, taken from the row that avoids cancellation
    upper = half_gap >= 0
    p = np.where(upper, radius + half_gap + 0j, b)
    q = np.where(upper, np.conj(b), radius - half_gap + 0j)
    norm = np.hypot(np.abs(p), np.abs(q))
    degenerate = norm == 0
    safe = np.where(degenerate, 1.0, norm)
    p = np.where(degenerate, 1.0 + 0j, p / safe)
    q = np.where(degenerate, 0j, q / safe)
    first = np.stack([p, q], axis=-1)
    second = np.stack([-np.conj(q), np.conj(p)], axis=-1)
    return w, np.stack([first, second], axis=-1)


def generalized_eigh(h: np.ndarray, g: Optional[np.ndarray] = None, whiten: Optional[np.ndarray] = None):
    """
    Solve h z = lambda g z for stacked Hermitian pairs.

    Returns eigenvalues sorted descending on the last axis and eigenvectors
    as columns, normalised so Z^H g Z = I. An identity whitening is skipped
    and 2x2 pairs are solved in closed form.
    """
    h = np.asarray(h, dtype=complex)
    n = h.shape[-1]
    if whiten is None and g is not None:
        whiten = whitening(g)
    identity = whiten is None or (whiten.ndim == 2 and np.array_equal(whiten, np.eye(n)))
    if identity:
        c = hermitian_part(h)
    else:
        whiten_h = dagger(whiten)
        c = hermitian_part(whiten @ h @ whiten_h)
    if n == 2:
        w, y = _eigh_2x2(c)
    else:
        w, y = np.linalg.eigh(c)
        w, y = w[..., ::-1], y[..., ::-1]
    return w, (y if identity else whiten_h @ y)


def endo_from_pair(g: np.ndarray, h: np.ndarray):
    """Descending eigenvalues of A = g^{-1} h with the g-orthonormal eigenbasis."""
    g = np.asarray(g, dtype=complex)
    h = np.asarray(h, dtype=complex)
    if g.ndim != 2 or g.shape != h.shape or g.shape[0] != g.shape[1]:
        raise ArgumentError(f"expected a pair of square matrices, got {g.shape} and {h.shape}")
    w, z = generalized_eigh(h, g)
    return Spectrum(tuple(w)), z


def endomorphism(g: np.ndarray, h: np.ndarray) -> np.ndarray:
    return np.linalg.solve(np.asarray(g, dtype=complex), np.asarray(h, dtype=complex))


def perturb_spectrum(lam, tau: float):
    """
    Shift a descending spectrum by B_i = tau (i - 1) / (n - 1).

    tau is clamped to 1/n so that the trace drops by less than one.
    """
    if tau <= 0:
        raise ArgumentError(f"perturbation gap must be positive, got tau={tau}")
    values = lam.as_array() if isinstance(lam, Spectrum) else np.sort(np.asarray(lam, dtype=float))[::-1]
    n = values.size
    tau = min(float(tau), 1.0 / n)
    if n == 1:
        b = np.zeros(1)
    else:
        b = tau * np.arange(n) / (n - 1)
    shifted = values - b
    gap_sum = float(np.sum(1.0 / (shifted[0] - shifted[1:]))) if n > 1 else 0.0
    return PerturbationB(tuple(b), tau, gap_sum), Spectrum(tuple(shifted))


def perturbation_shift(n: int, tau: float) -> np.ndarray:
    """The B diagonal as an array, for batched use."""
    if n == 1:
        return np.zeros(1)
    tau = min(float(tau), 1.0 / n)
    return tau * np.arange(n) / (n - 1)


def random_hermitian(rng: np.random.Generator, n: int, scale: float = 1.0, size: tuple = ()) -> np.ndarray:
    shape = size + (n, n)
    m = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    return scale * hermitian_part(m)


def random_positive_definite(rng: np.random.Generator, n: int, size: tuple = (), floor: float = 0.2) -> np.ndarray:
    shape = size + (n, n)
    m = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    return m @ dagger(m) / n + floor * np.eye(n)
