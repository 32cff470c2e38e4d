"""
Residual and damped Newton iteration for f(lambda(A_u)) = psi + b.

The unknown is the pair (u, b). The linear system L(du) - db = -R is solved
for an augmented field x with db = mean(x) and du = x - mean(x), so that
A(x) = L(x) - mean(x) is nonsingular; GMRES is preconditioned by the
constant-coefficient inverse of L.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import fft
from scipy.sparse.linalg import LinearOperator, gmres

from ..chart.grid import coefficient_trace, operator_symbol
from ..errors import AdmissibilityError, StagnationError
from .backoff import HalvingExhausted, with_halving
from .problem import (
    Evaluation,
    ProblemSpec,
    SolveOptions,
    StepEvent,
    evaluate,
    first_order_coefficients,
    normalize_pair,
    operator_values,
    require_admissible,
)


@dataclass
class StepReport:
    """What one Newton step did."""
    residual_before: float
    residual_after: float
    step: float
    halvings: int
    krylov_iterations: int
    krylov_info: int
    delta_u: float
    delta_b: float


@dataclass
class NewtonResult:
    u: np.ndarray
    b: float
    residual: float
    iterations: int
    history: list = field(default_factory=list)
    evaluation: Optional[Evaluation] = None


def residual(
    spec: ProblemSpec,
    u: np.ndarray,
    b: float,
    psi: Optional[np.ndarray] = None,
    floor: float = 0.0,
):
    """Pointwise f(lambda(A_u)) - psi - b and its sup norm; raises outside the cone."""
    evaluation = evaluate(spec, u)
    require_admissible(spec, evaluation, floor)
    values = operator_values(spec, evaluation)
    psi = spec.psi if psi is None else psi
    r = values - psi - b
    return r, float(np.abs(r).max()), evaluation


class LinearizedOperator:
    """L(v) = Re tr(F^{ij} v_{i jbar}) frozen at an evaluation."""

    def __init__(self, spec: ProblemSpec, evaluation: Evaluation, tau: float):
        self.spec = spec
        self.chart = spec.chart
        self.coefficients, self.gradient = first_order_coefficients(spec, evaluation, tau)
        mean_p = self.coefficients.reshape(-1, spec.op.n, spec.op.n).mean(axis=0)
        self.symbol = operator_symbol(self.chart, mean_p)

    def __call__(self, v: np.ndarray) -> np.ndarray:
        return coefficient_trace(self.chart, self.coefficients, v)

    def augmented(self) -> LinearOperator:
        shape = self.chart.shape
        size = self.chart.points

        def matvec(x: np.ndarray) -> np.ndarray:
            field_ = np.asarray(x, dtype=float).reshape(shape)
            return (self(field_) - field_.mean()).reshape(-1)

        return LinearOperator((size, size), matvec=matvec, dtype=float)

    def preconditioner(self) -> LinearOperator:
        shape = self.chart.shape
        size = self.chart.points
        workers = self.chart.threads
        symbol = self.symbol
        nonzero = np.abs(symbol) > 0
        safe = np.where(nonzero, symbol, 1.0)
        origin = (0,) * len(shape)

        def apply(r: np.ndarray) -> np.ndarray:
            spectrum = fft.rfftn(np.asarray(r, dtype=float).reshape(shape), workers=workers)
            solved = np.where(nonzero, spectrum / safe, 0.0)
            # constants map to minus themselves under the augmented operator
            solved[origin] = -spectrum[origin]
            return fft.irfftn(solved, s=shape, workers=workers).reshape(-1)

        return LinearOperator((size, size), matvec=apply, dtype=float)


def forcing_rtol(sup_r: float, options: SolveOptions) -> float:
    """GMRES relative tolerance for a Newton step at residual sup norm sup_r."""
    return max(options.krylov_rtol, min(options.krylov_forcing, sup_r))


def solve_linearized(
    operator: LinearizedOperator,
    rhs: np.ndarray,
    options: SolveOptions,
    rtol: Optional[float] = None,
):
    """Solve L(du) - db = rhs; returns (du, db, krylov iterations, info)."""
    counter = {"iterations": 0}

    def count(_):
        counter["iterations"] += 1

    x, info = gmres(
        operator.augmented(),
        rhs.reshape(-1),
        rtol=options.krylov_rtol if rtol is None else rtol,
        atol=0.0,
        restart=options.krylov_restart,
        maxiter=options.krylov_maxiter,
        M=operator.preconditioner(),
        callback=count,
        callback_type="pr_norm",
    )
    x = x.reshape(operator.chart.shape)
    db = float(x.mean())
    return x - db, db, counter["iterations"], int(info)


class _Rejected(Exception):
    pass


def newton_step(
    spec: ProblemSpec,
    u: np.ndarray,
    b: float,
    options: SolveOptions = SolveOptions(),
    psi: Optional[np.ndarray] = None,
    on_retry: Optional[Callable[[int, Exception], None]] = None,
):
    """
    One damped Newton step from an admissible (u, b).

    Returns (u', b', StepReport) with sup u' = 0. A candidate that leaves the
    cone or fails to decrease the residual sup norm is halved, never accepted.
    """
    floor = options.admissibility_floor
    r, sup_r, evaluation = residual(spec, u, b, psi, floor)
    if sup_r == 0.0:
        u, b = normalize_pair(u, b)
        return u, b, StepReport(0.0, 0.0, 1.0, 0, 0, 0, 0.0, 0.0)
    operator = LinearizedOperator(spec, evaluation, options.perturbation_tau)
    du, db, iterations, info = solve_linearized(operator, -r, options, forcing_rtol(sup_r, options))

    @with_halving(initial_step=1.0, max_halvings=options.max_halvings,
                  exceptions=(_Rejected, AdmissibilityError), on_retry=on_retry)
    def attempt(step: float):
        candidate_u = u + step * du
        candidate_b = b + step * db
        _, sup_new, _ = residual(spec, candidate_u, candidate_b, psi, floor)
        if not sup_new < sup_r:
            raise _Rejected(f"residual {sup_new:.3e} does not improve on {sup_r:.3e}")
        return candidate_u, candidate_b, sup_new

    try:
        (new_u, new_b, sup_new), step, halvings = attempt()
    except HalvingExhausted as e:
        raise StagnationError(f"line search exhausted: {e}", residual=sup_r) from e

    new_u, new_b = normalize_pair(new_u, new_b)
    report = StepReport(
        residual_before=sup_r,
        residual_after=sup_new,
        step=step,
        halvings=halvings,
        krylov_iterations=iterations,
        krylov_info=info,
        delta_u=float(np.abs(du).max()),
        delta_b=abs(db),
    )
    return new_u, new_b, report


def newton_solve(
    spec: ProblemSpec,
    u: np.ndarray,
    b: float,
    tol: float,
    options: SolveOptions = SolveOptions(),
    psi: Optional[np.ndarray] = None,
    t: float = 1.0,
    on_step: Optional[Callable[[StepEvent], None]] = None,
    on_retry: Optional[Callable[[int, Exception], None]] = None,
) -> NewtonResult:
    """Iterate newton_step until the residual sup norm drops below tol."""
    u, b = normalize_pair(u, b)
    _, sup_r, evaluation = residual(spec, u, b, psi, options.admissibility_floor)
    history = [sup_r]
    iterations = 0
    while sup_r >= tol:
        if iterations >= options.max_newton_iter:
            raise StagnationError(
                f"no convergence after {iterations} Newton iterations (residual {sup_r:.3e})",
                residual=sup_r,
            )
        u, b, report = newton_step(spec, u, b, options, psi, on_retry)
        iterations += 1
        sup_r = report.residual_after
        history.append(sup_r)
        if on_step:
            on_step(StepEvent(t, iterations, sup_r, report.halvings, report.krylov_iterations))
    if iterations:
        _, sup_r, evaluation = residual(spec, u, b, psi, options.admissibility_floor)
    return NewtonResult(u, b, sup_r, iterations, history, evaluation)
