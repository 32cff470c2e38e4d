"""
Flat periodic transverse chart.

Real coordinates are ordered (x1, y1, x2, y2, ...) with unit periods; a
basic scalar field is an array of shape (N,) * 2n and a Hermitian field
has two trailing (n, n) axes. Derivatives are spectral (scipy.fft).
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import fft

from ..algebra.hermitian import check_positive_definite, hermitian_part, whitening
from ..constants import MIN_GRID, SUPPORTED_DIMENSIONS
from ..errors import ArgumentError


@dataclass(frozen=True)
class Chart:
    """
    Periodic chart of complex dimension n sampled on N points per real axis.

    ``metric`` is either a constant (n, n) matrix or a full Hermitian field;
    ``whiten`` holds the matching inverse Cholesky factors.
    """
    n: int
    N: int
    metric: np.ndarray
    whiten: np.ndarray
    weights: np.ndarray
    threads: int = 1
    constant_metric: bool = True
    wavenumbers: tuple = field(repr=False, default=())

    @property
    def real_dim(self) -> int:
        return 2 * self.n

    @property
    def shape(self) -> tuple:
        return (self.N,) * self.real_dim

    @property
    def points(self) -> int:
        return self.N ** self.real_dim

    def coordinates(self) -> list:
        """Grid coordinates (x1, y1, x2, y2, ...), each broadcastable to ``shape``."""
        axis = np.arange(self.N) / self.N
        return list(np.meshgrid(*([axis] * self.real_dim), indexing="ij", sparse=True))

    def metric_field(self) -> np.ndarray:
        return np.broadcast_to(self.metric, self.shape + (self.n, self.n))

    def zeros(self) -> np.ndarray:
        return np.zeros(self.shape)


def _wavenumbers(N: int, real_dim: int) -> tuple:
    """(full, odd) wavenumber arrays per axis on the rfftn layout; odd zeroes Nyquist."""
    full, odd = [], []
    for axis in range(real_dim):
        last = axis == real_dim - 1
        freq = fft.rfftfreq(N, d=1.0 / N) if last else fft.fftfreq(N, d=1.0 / N)
        k = 2.0 * np.pi * freq
        k_odd = k.copy()
        k_odd[np.abs(freq) == N // 2] = 0.0
        shape = [1] * real_dim
        shape[axis] = k.size
        full.append(k.reshape(shape))
        odd.append(k_odd.reshape(shape))
    return tuple(full), tuple(odd)


def _is_power_of_two(N: int) -> bool:
    return N > 0 and (N & (N - 1)) == 0


def _constant_metric(metric, n: int) -> np.ndarray:
    if metric is None:
        return np.eye(n, dtype=complex)
    g0 = np.asarray(metric, dtype=complex)
    if g0.ndim == 0:
        return complex(g0) * np.eye(n, dtype=complex)
    if g0.shape != (n, n):
        raise ArgumentError(f"metric must be {n}x{n}, got shape {g0.shape}")
    return hermitian_part(g0)


def build_chart(
    n: int,
    N: int,
    metric=None,
    kappa: Optional[np.ndarray] = None,
    threads: int = 1,
) -> Chart:
    """
    Build a chart with metric g = metric + (kappa)_{i jbar}.

    Args:
        n: Complex dimension (1, 2 or 3)
        N: Points per real axis (power of two, at least 8)
        metric: Constant background, scalar or (n, n); identity when omitted
        kappa: Optional potential perturbation sampled on the grid
        threads: FFT worker count
    """
    if n not in SUPPORTED_DIMENSIONS:
        raise ArgumentError(f"complex dimension must be one of {SUPPORTED_DIMENSIONS}, got n={n}")
    if N < MIN_GRID or not _is_power_of_two(N):
        raise ArgumentError(f"grid size must be a power of two and at least {MIN_GRID}, got N={N}")

    g0 = _constant_metric(metric, n)
    full, odd = _wavenumbers(N, 2 * n)
    shape = (N,) * (2 * n)
    if kappa is None:
        check_positive_definite(g0)
        g, constant = g0, True
        det = np.real(np.linalg.det(g0))
        weights = np.ones(())
    else:
        kappa = np.asarray(kappa, dtype=float)
        if kappa.shape != shape:
            raise ArgumentError(f"metric potential must have shape {shape}, got {kappa.shape}")
        flat = Chart(n, N, g0, np.eye(n), np.ones(()), threads, True, (full, odd))
        g = g0 + complex_hessian(flat, kappa)
        check_positive_definite(g)
        constant = False
        det = np.real(np.linalg.det(g))
        weights = det / det.mean()
    return Chart(n, N, g, whitening(g), weights, max(1, int(threads)), constant, (full, odd))


# ---------------------------------------------------------------------------
# Spectral derivatives
# ---------------------------------------------------------------------------

def _hessian_symbols(chart: Chart) -> list:
    """
    Fourier symbols of the entries of u_{i jbar} on or above the diagonal.

    Returns (i, j, real, imag) tuples; diagonal entries have no imaginary part.
    """
    full, odd = chart.wavenumbers
    out = []
    for i in range(chart.n):
        xi, yi = 2 * i, 2 * i + 1
        out.append((i, i, -0.25 * (full[xi] ** 2 + full[yi] ** 2), None))
        for j in range(i + 1, chart.n):
            xj, yj = 2 * j, 2 * j + 1
            re = -0.25 * (odd[xi] * odd[xj] + odd[yi] * odd[yj])
            im = -0.25 * (odd[xi] * odd[yj] - odd[yi] * odd[xj])
            out.append((i, j, re, im))
    return out


def _transform(chart: Chart, u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.shape != chart.shape:
        raise ArgumentError(f"field shape {u.shape} does not match the chart grid {chart.shape}")
    return fft.rfftn(u, workers=chart.threads)


def _inverse(chart: Chart, spectrum: np.ndarray) -> np.ndarray:
    return fft.irfftn(spectrum, s=chart.shape, workers=chart.threads)


def complex_hessian(chart: Chart, u: np.ndarray) -> np.ndarray:
    """
    u_{i jbar} = d^2 u / dz_i dzbar_j, Hermitian at every grid point.

    One forward transform and n^2 real inverse transforms.
    """
    spectrum = _transform(chart, u)
    n = chart.n
    out = np.empty(chart.shape + (n, n), dtype=complex)
    for i, j, re_symbol, im_symbol in _hessian_symbols(chart):
        re = _inverse(chart, re_symbol * spectrum)
        if im_symbol is None:
            out[..., i, i] = re
            continue
        im = _inverse(chart, im_symbol * spectrum)
        out[..., i, j] = re + 1j * im
        out[..., j, i] = re - 1j * im
    return out


def coefficient_trace(chart: Chart, p: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Re tr(P u_{i jbar}) pointwise for a Hermitian coefficient P, without forming the Hessian."""
    p = np.asarray(p)
    spectrum = _transform(chart, u)
    out = np.zeros(chart.shape)
    for i, j, re, im in _hessian_symbols(chart):
        if im is None:
            out += p[..., i, i].real * _inverse(chart, re * spectrum)
            continue
        out += 2.0 * p[..., j, i].real * _inverse(chart, re * spectrum)
        out -= 2.0 * p[..., j, i].imag * _inverse(chart, im * spectrum)
    return out


def inverse_metric(chart: Chart) -> np.ndarray:
    return np.linalg.inv(chart.metric)


def laplacian_B(chart: Chart, u: np.ndarray) -> np.ndarray:
    """Delta_B u = g^{jbar i} u_{i jbar}."""
    return trace_metric(chart, complex_hessian(chart, u))


def trace_metric(chart: Chart, field_: np.ndarray) -> np.ndarray:
    """Re tr(g^{-1} H) pointwise."""
    return np.real(np.einsum("...ji,...ij->...", inverse_metric(chart), field_))


def integrate(chart: Chart, values: np.ndarray) -> float:
    """Normalised integral against the metric volume, so the integral of 1 is 1."""
    values = np.asarray(values, dtype=float)
    return float(np.mean(values * chart.weights))


def gradient_norm(chart: Chart, u: np.ndarray) -> float:
    """sup over the grid of the Euclidean norm of the real gradient."""
    _, odd = chart.wavenumbers
    spectrum = _transform(chart, u)
    total = np.zeros(chart.shape)
    for a in range(chart.real_dim):
        total += _inverse(chart, 1j * odd[a] * spectrum) ** 2
    return float(np.sqrt(total.max()))


def operator_symbol(chart: Chart, p: np.ndarray) -> np.ndarray:
    """Fourier symbol of v -> Re tr(P v_{i jbar}) for a constant Hermitian P."""
    p = np.asarray(p, dtype=complex)
    symbol = np.zeros(1)
    for i, j, re, im in _hessian_symbols(chart):
        if im is None:
            symbol = symbol + p[i, i].real * re
        else:
            symbol = symbol + 2.0 * (p[j, i].real * re - p[j, i].imag * im)
    return symbol


def poisson_solve(chart: Chart, rhs: np.ndarray, p: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Mean-zero solution v of Re tr(P v_{i jbar}) = rhs - mean(rhs).

    P defaults to the inverse of the constant metric, giving the Laplacian.
    """
    if p is None:
        if not chart.constant_metric:
            raise ArgumentError("poisson_solve needs an explicit coefficient on a curved chart")
        p = np.linalg.inv(chart.metric)
    symbol = operator_symbol(chart, p)
    spectrum = _transform(chart, rhs)
    safe = np.where(np.abs(symbol) > 0, symbol, 1.0)
    solved = np.where(np.abs(symbol) > 0, spectrum / safe, 0.0)
    return _inverse(chart, solved)


def sup_norm(values: np.ndarray) -> float:
    return float(np.abs(values).max())


def hessian_norm(chart: Chart, u: np.ndarray) -> float:
    """sup over the grid of the Frobenius norm of u_{i jbar}."""
    h = complex_hessian(chart, u)
    return float(np.sqrt((np.abs(h) ** 2).sum(axis=(-2, -1))).max())
