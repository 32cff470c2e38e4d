"""
Problem description shared by the residual, Newton, continuation and flow code.
"""

from dataclasses import dataclass, field, asdict
from enum import Enum
from typing import Optional

import numpy as np

from ..algebra.hermitian import generalized_eigh, perturbation_shift
from ..algebra.symfunc import Family, OperatorSpec, cone_margins, degenerate, f_gradients, f_values
from ..chart.grid import Chart, complex_hessian
from ..constants import (
    DEFAULT_ADMISSIBILITY_FLOOR,
    DEFAULT_INITIAL_T_STEP,
    DEFAULT_KRYLOV_FORCING,
    DEFAULT_KRYLOV_MAXITER,
    DEFAULT_KRYLOV_RESTART,
    DEFAULT_KRYLOV_RTOL,
    DEFAULT_MAX_HALVINGS,
    DEFAULT_MAX_NEWTON_ITER,
    DEFAULT_MIN_T_STEP,
    DEFAULT_NEWTON_TOL,
    DEFAULT_PATH_TOL,
    DEFAULT_PERTURBATION_TAU,
    DEFAULT_SEED,
)
from ..errors import AdmissibilityError, ArgumentError


class Mode(str, Enum):
    EIGENVALUE = "eigenvalue"
    TTRANSFORM = "ttransform"


@dataclass(frozen=True)
class SolveOptions:
    """Numerical knobs of one solve; built from Config.to_solve_options()."""
    newton_tol: float = DEFAULT_NEWTON_TOL
    path_tol: float = DEFAULT_PATH_TOL
    max_newton_iter: int = DEFAULT_MAX_NEWTON_ITER
    max_halvings: int = DEFAULT_MAX_HALVINGS
    initial_t_step: float = DEFAULT_INITIAL_T_STEP
    min_t_step: float = DEFAULT_MIN_T_STEP
    krylov_rtol: float = DEFAULT_KRYLOV_RTOL
    krylov_restart: int = DEFAULT_KRYLOV_RESTART
    krylov_maxiter: int = DEFAULT_KRYLOV_MAXITER
    krylov_forcing: float = DEFAULT_KRYLOV_FORCING
    admissibility_floor: float = DEFAULT_ADMISSIBILITY_FLOOR
    perturbation_tau: float = DEFAULT_PERTURBATION_TAU
    seed: int = DEFAULT_SEED

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class StepEvent:
    """One accepted Newton iteration, as reported to ``on_step`` callbacks."""
    t: float
    iteration: int
    residual: float
    halvings: int = 0
    krylov_iterations: int = 0


@dataclass
class ProblemSpec:
    """
    f(lambda(g^{-1}(beta + u_{i jbar}))) = psi + b on a chart.

    ``beta`` is either a constant (n, n) matrix or a Hermitian field.
    ``omega_h`` is kept for the T-transform family, whose beta is derived from it.
    """
    op: OperatorSpec
    chart: Chart
    beta: np.ndarray
    psi: np.ndarray
    mode: Mode = Mode.EIGENVALUE
    u_under: Optional[np.ndarray] = None
    omega_h: Optional[np.ndarray] = None
    name: str = "problem"

    def __post_init__(self):
        self.mode = Mode(self.mode)
        expected = Mode.TTRANSFORM if self.op.family is Family.T_HESSIAN else Mode.EIGENVALUE
        if self.mode is not expected:
            raise ArgumentError(f"mode '{self.mode.value}' does not match operator {self.op.describe()}")
        if self.op.n != self.chart.n:
            raise ArgumentError(f"operator dimension {self.op.n} differs from chart dimension {self.chart.n}")
        self.psi = np.broadcast_to(np.asarray(self.psi, dtype=float), self.chart.shape).copy()
        self.beta = np.asarray(self.beta, dtype=complex)

    def background(self, u: Optional[np.ndarray] = None) -> np.ndarray:
        """h = beta + u_{i jbar} (beta alone when u is None)."""
        if u is None:
            return np.broadcast_to(self.beta, self.chart.shape + (self.op.n, self.op.n))
        return self.beta + complex_hessian(self.chart, u)

    def with_psi(self, psi: np.ndarray) -> "ProblemSpec":
        return ProblemSpec(self.op, self.chart, self.beta, psi, self.mode, self.u_under, self.omega_h, self.name)

    def with_op(self, op: OperatorSpec) -> "ProblemSpec":
        return ProblemSpec(op, self.chart, self.beta, self.psi, self.mode, self.u_under, self.omega_h, self.name)


@dataclass
class Evaluation:
    """Pointwise spectral data of A_u = g^{-1}(beta + u_{i jbar})."""
    eigenvalues: np.ndarray
    basis: np.ndarray
    margins: np.ndarray
    values: np.ndarray = field(default=None)

    @property
    def worst_index(self) -> tuple:
        flat = int(np.argmin(self.margins))
        return tuple(int(i) for i in np.unravel_index(flat, self.margins.shape))

    @property
    def min_margin(self) -> float:
        return float(self.margins.min())


def evaluate(spec: ProblemSpec, u: Optional[np.ndarray]) -> Evaluation:
    """Eigen-decompose A_u at every grid point; f is left unset outside the cone."""
    h = spec.background(u)
    lam, basis = generalized_eigh(h, whiten=spec.chart.whiten)
    margins = cone_margins(lam, spec.op.cone)
    return Evaluation(lam, basis, margins)


def require_admissible(spec: ProblemSpec, evaluation: Evaluation, floor: float) -> None:
    if evaluation.min_margin >= floor:
        return
    worst = evaluation.worst_index
    spectrum = evaluation.eigenvalues[worst]
    raise AdmissibilityError(
        f"{spec.op.describe()} is not elliptic at grid point {worst}: "
        f"spectrum {tuple(np.round(spectrum, 8))}, margin {evaluation.min_margin:.3e}",
        spectrum=spectrum,
        worst_index=worst,
    )


def operator_values(spec: ProblemSpec, evaluation: Evaluation) -> np.ndarray:
    if evaluation.values is None:
        evaluation.values = f_values(spec.op, evaluation.eigenvalues)
    return evaluation.values


def first_order_coefficients(spec: ProblemSpec, evaluation: Evaluation, tau: float):
    """
    F^{ij} = Z diag(f_i) Z^H at every grid point, plus the gradient used.

    Where two eigenvalues (nearly) coincide the spectrum is separated by the
    diagonal shift B first, provided the shifted tuple stays admissible.
    """
    lam = evaluation.eigenvalues
    mask = degenerate(lam)
    if np.any(mask):
        shifted = lam - perturbation_shift(spec.op.n, tau)
        use = mask & (cone_margins(shifted, spec.op.cone) > 0)
        lam = np.where(use[..., None], shifted, lam)
    grad = f_gradients(spec.op, lam)
    z = evaluation.basis
    p = (z * grad[..., None, :]) @ np.swapaxes(np.conj(z), -2, -1)
    return p, grad


def ttransform_background(omega: np.ndarray, omega_h: np.ndarray) -> np.ndarray:
    """beta = (tr_omega omega_h) omega - (n - 1) omega_h, so that T(lambda(beta)) = (n - 1) lambda(omega_h)."""
    omega = np.asarray(omega, dtype=complex)
    omega_h = np.asarray(omega_h, dtype=complex)
    n = omega.shape[-1]
    tr = np.real(np.trace(np.linalg.solve(omega, omega_h), axis1=-2, axis2=-1))[..., None, None]
    return tr * omega - (n - 1) * omega_h


def normalize_pair(u: np.ndarray, b: float):
    """(u - sup u, b)."""
    u = np.asarray(u, dtype=float)
    return u - u.max(), b
