"""
Certification of C-subsolutions and of the Hessian-quotient cone condition.

A background h is a C-subsolution for psi when, at every grid point with
mu = lambda(g^{-1} h), the limit of f(mu + s e_i) as s grows exceeds psi for
every axis i. The report keeps the worst point and the (delta, R) pair of
the bounded-level-set containment.
"""

from dataclasses import dataclass, asdict
from typing import Optional

import numpy as np

from ..algebra.forms import ConeVerdict, positivity_k, positivity_n1, quotient_combination, quotient_margins
from ..algebra.hermitian import generalized_eigh
from ..algebra.symfunc import OperatorSpec, cone_margins, f_infinity_values, f_values, gamma_infinity_mask
from ..chart.grid import Chart
from ..constants import UNBOUNDED_SENTINEL
from ..errors import ArgumentError, DomainError, PositivityError

BISECTION_STEPS = 60
RAY_LIMIT = 1e12


@dataclass
class SubsolutionReport:
    """Outcome of a C-subsolution check over a chart."""
    is_subsolution: bool
    worst_point: tuple
    worst_margin: float
    unbounded: bool = False
    delta_R: Optional[tuple] = None
    points_checked: int = 0
    distinct_spectra: int = 0

    def to_dict(self) -> dict:
        data = asdict(self)
        data["worst_point"] = list(self.worst_point)
        data["delta_R"] = None if self.delta_R is None else list(self.delta_R)
        return data


def _removed(mu: np.ndarray) -> np.ndarray:
    """All (n-1)-subtuples, shape (..., n, n - 1)."""
    n = mu.shape[-1]
    return np.stack([np.delete(mu, i, axis=-1) for i in range(n)], axis=-2)


def _axis_limits(op: OperatorSpec, mu: np.ndarray):
    """(inside Gamma_infinity for every axis, min over axes of f_infinity)."""
    parts = _removed(mu)
    inside = gamma_infinity_mask(op, parts).all(axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        limits = f_infinity_values(op, parts).min(axis=-1)
    return inside, np.where(inside, limits, -np.inf)


def _unique_rows(mu: np.ndarray, psi: np.ndarray):
    rows = np.concatenate([mu.reshape(-1, mu.shape[-1]), psi.reshape(-1, 1)], axis=1)
    return np.unique(np.round(rows, 12), axis=0, return_inverse=True)


def _delta(op: OperatorSpec, mu: np.ndarray, psi: np.ndarray) -> np.ndarray:
    """Largest delta with f_infinity((mu - delta)|i) >= psi + delta on every axis, by bisection."""
    lo = np.zeros(mu.shape[0])
    hi = 1.0 + np.abs(mu).max(axis=-1) + np.abs(psi)
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        inside, limits = _axis_limits(op, mu - mid[:, None])
        good = inside & (limits >= psi + mid)
        lo = np.where(good, mid, lo)
        hi = np.where(good, hi, mid)
    return lo


def _level_value(op: OperatorSpec, lam: np.ndarray) -> np.ndarray:
    inside = cone_margins(lam, op.cone) > 0
    with np.errstate(all="ignore"):
        values = f_values(op, lam)
    return np.where(inside, values, -np.inf)


def _ray_directions(n: int) -> list:
    eye = np.eye(n)
    directions = [eye[i] for i in range(n)]
    directions.append(np.ones(n) / np.sqrt(n))
    for i in range(n):
        for j in range(i + 1, n):
            directions.append((eye[i] + eye[j]) / np.sqrt(2.0))
    return directions


def _radius(op: OperatorSpec, base: np.ndarray, psi: np.ndarray) -> np.ndarray:
    """Largest norm of a crossing of {f = psi} along rays base + s d, d in the positive orthant."""
    radius = np.linalg.norm(base, axis=-1)
    for d in _ray_directions(base.shape[-1]):
        below = _level_value(op, base) < psi
        hi = np.ones(base.shape[0])
        while True:
            pending = below & (_level_value(op, base + hi[:, None] * d) < psi)
            if not pending.any() or hi.max() > RAY_LIMIT:
                break
            hi = np.where(pending, 2.0 * hi, hi)
        if (below & (_level_value(op, base + hi[:, None] * d) < psi)).any():
            return np.full(base.shape[0], np.inf)
        lo = np.zeros_like(hi)
        for _ in range(BISECTION_STEPS):
            mid = 0.5 * (lo + hi)
            under = _level_value(op, base + mid[:, None] * d) < psi
            lo = np.where(under, mid, lo)
            hi = np.where(under, hi, mid)
        crossing = np.linalg.norm(base + hi[:, None] * d, axis=-1)
        radius = np.where(below, np.maximum(radius, crossing), radius)
    return radius


def c_subsolution_report(
    op: OperatorSpec,
    chart: Chart,
    h_under: np.ndarray,
    psi: np.ndarray,
) -> SubsolutionReport:
    """
    Check the C-subsolution condition for the background coefficients h_under.

    Args:
        op: Operator and cone
        chart: Chart supplying the metric
        h_under: Coefficients beta + (u_under)_{i jbar}, constant or a field
        psi: Right-hand side, scalar or field

    Raises DomainError when some axis completion can never enter the cone.
    """
    shape = chart.shape
    h = np.broadcast_to(np.asarray(h_under, dtype=complex), shape + (op.n, op.n))
    psi = np.broadcast_to(np.asarray(psi, dtype=float), shape)
    mu, _ = generalized_eigh(h, whiten=chart.whiten)

    unique, inverse = _unique_rows(mu, psi)
    inverse = inverse.reshape(-1)
    u_mu, u_psi = unique[:, :-1], unique[:, -1]

    inside, limits = _axis_limits(op, u_mu)
    if not inside.all():
        bad = int(np.flatnonzero(~inside[inverse])[0])
        worst = tuple(int(i) for i in np.unravel_index(bad, shape))
        raise DomainError(
            f"spectrum {tuple(np.round(mu[worst], 8))} at grid point {worst} has an axis "
            f"that never enters the cone of {op.describe()}",
            spectrum=mu[worst],
            worst_index=worst,
        )

    # f_infinity is +inf for unbounded families, so their worst point is the weakest cone margin
    if op.unbounded_at_infinity:
        per_point = cone_margins(u_mu, op.cone)[inverse]
    else:
        per_point = (limits - u_psi)[inverse]
    flat = int(np.argmin(per_point))
    worst = tuple(int(i) for i in np.unravel_index(flat, shape))
    worst_margin = UNBOUNDED_SENTINEL if op.unbounded_at_infinity else float(per_point[flat])

    ok = worst_margin > 0
    delta_r = None
    if ok:
        delta = _delta(op, u_mu, u_psi) / 2.0
        radius = _radius(op, u_mu - 2.0 * delta[:, None], u_psi)
        delta_r = (float(delta.min()), float(radius.max()))

    return SubsolutionReport(
        is_subsolution=bool(ok),
        worst_point=worst,
        worst_margin=worst_margin,
        unbounded=op.unbounded_at_infinity,
        delta_R=delta_r,
        points_checked=int(np.prod(shape)),
        distinct_spectra=int(u_mu.shape[0]),
    )


def quotient_cone_condition(
    omega_h: np.ndarray,
    omega: np.ndarray,
    k: int,
    ell: int,
    c: float,
    t: float = 1.0,
    route: str = "eigenvalue",
) -> ConeVerdict:
    """
    Positivity of k c omega_h^{k-1} ^ omega^{n-k} - t ell omega_h^{ell-1} ^ omega^{n-ell}.

    The eigenvalue route checks n c C(n,k)^{-1} sigma_{k-1}(mu') - n t C(n,ell)^{-1}
    sigma_{ell-1}(mu') over every (n-1)-subtuple mu'; the forms route builds the
    (n-1,n-1) combination and tests it against omega^{n-1}/(n-1)!. Both report
    the same margin.
    """
    omega = np.asarray(omega, dtype=complex)
    omega_h = np.asarray(omega_h, dtype=complex)
    n = omega.shape[-1]
    if ell < 1:
        raise ArgumentError(f"the quotient condition needs ell >= 1, got ell={ell}")
    if not ell < k <= n:
        raise ArgumentError(f"the quotient condition needs ell < k <= n, got ell={ell}, k={k}, n={n}")
    if c <= 0:
        raise ArgumentError(f"quotient constant must be positive, got c={c}")

    omega_b, omega_h_b = np.broadcast_arrays(omega, omega_h)
    positivity = positivity_k(omega_b, omega_h_b, k)
    if not positivity.holds:
        raise PositivityError(
            f"omega_h is not strictly {k}-positive (margin {positivity.margin:.3e})",
            margin=positivity.margin,
        )

    if route == "forms":
        return positivity_n1(omega_b, quotient_combination(omega_b, omega_h_b, k, ell, c, t))
    if route != "eigenvalue":
        raise ArgumentError(f"route must be 'eigenvalue' or 'forms', got '{route}'")
    mu, _ = generalized_eigh(omega_h_b, omega_b)
    margins = quotient_margins(mu, n, k, ell, c, t)
    if margins.ndim == 0:
        return ConeVerdict(bool(margins > 0), float(margins), None)
    flat = int(np.argmin(margins))
    worst = tuple(int(i) for i in np.unravel_index(flat, margins.shape))
    value = float(margins.reshape(-1)[flat])
    return ConeVerdict(value > 0, value, worst)
