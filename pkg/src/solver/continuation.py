"""
Continuity-method driver.

The path deforms the data, not the operator: with F0 = f(lambda(A_{u0})),
psi_t = (1 - t) F0 + t psi, so (u0, 0) solves the t = 0 equation exactly.
For the quotient family the operator blend can be marched together with t.
"""

import time
from dataclasses import dataclass, field
from math import comb, log
from typing import Callable, Optional

import numpy as np

from ..algebra.forms import hodge_star, power_root_inverse
from ..algebra.hermitian import random_hermitian
from ..algebra.symfunc import Family, gerhardt_derivatives
from ..chart.grid import complex_hessian, gradient_norm, hessian_norm, integrate, laplacian_B
from ..errors import AdmissibilityError, ArgumentError, ContinuationError, StagnationError, SubsolutionError
from .backoff import HalvingExhausted, with_halving
from .newton import newton_solve
from .problem import (
    Evaluation,
    ProblemSpec,
    SolveOptions,
    StepEvent,
    evaluate,
    first_order_coefficients,
    normalize_pair,
    operator_values,
)
from .subsolution import c_subsolution_report

CONCAVITY_SAMPLES = 16


@dataclass
class Diagnostics:
    """Norm monitors and ellipticity constants at one accepted path point."""
    sup_u: float
    sup_grad_u: float
    sup_hess_u: float
    kappa: float
    tau: float
    concavity_max: float
    concavity_bound_gap: float
    mass_defect: Optional[float] = None


@dataclass
class PathPoint:
    t: float
    b: float
    newton_iterations: int
    residual: float
    residual_history: list
    diagnostics: Diagnostics
    u: Optional[np.ndarray] = field(default=None, repr=False)


@dataclass
class SolveRun:
    """Full record of a continuity-method solve."""
    problem: str
    operator: str
    path: list = field(default_factory=list)
    u: Optional[np.ndarray] = field(default=None, repr=False)
    b: float = 0.0
    residual: float = float("inf")
    converged: bool = False
    rejected_steps: int = 0
    elapsed: float = 0.0
    subsolution: Optional[dict] = None

    @property
    def t_values(self) -> list:
        return [point.t for point in self.path]

    @property
    def final_history(self) -> list:
        return self.path[-1].residual_history if self.path else []

    def kappa_min(self) -> float:
        return min((p.diagnostics.kappa for p in self.path), default=float("nan"))

    def tau_min(self) -> float:
        return min((p.diagnostics.tau for p in self.path), default=float("nan"))

    def to_dict(self) -> dict:
        return {
            "problem": self.problem,
            "operator": self.operator,
            "converged": self.converged,
            "b": self.b,
            "residual": self.residual,
            "rejected_steps": self.rejected_steps,
            "elapsed_seconds": self.elapsed,
            "kappa_min": self.kappa_min(),
            "tau_min": self.tau_min(),
            "subsolution": self.subsolution,
            "path": [
                {
                    "t": p.t,
                    "b": p.b,
                    "newton_iterations": p.newton_iterations,
                    "residual": p.residual,
                    "residual_history": list(p.residual_history),
                    "diagnostics": vars(p.diagnostics).copy(),
                }
                for p in self.path
            ],
        }


def _concavity(spec: ProblemSpec, evaluation: Evaluation, seed: int, tau: float):
    """Max of the normalised second-order form and min gap to its off-diagonal bound."""
    rng = np.random.default_rng(seed)
    flat_lam = evaluation.eigenvalues.reshape(-1, spec.op.n)
    picks = rng.choice(flat_lam.shape[0], size=min(CONCAVITY_SAMPLES, flat_lam.shape[0]), replace=False)
    worst, gap = -np.inf, np.inf
    for index in picks:
        a = np.diag(flat_lam[index]).astype(complex)
        derivatives = gerhardt_derivatives(spec.op, a, tau)
        x = random_hermitian(rng, spec.op.n)
        diag_part, off_part = derivatives.quadratic_parts(x)
        norm = float(np.sum(np.abs(x) ** 2))
        worst = max(worst, (diag_part + off_part) / norm)
        gap = min(gap, -diag_part / norm)
    return float(worst), float(gap)


def _mass_defect(spec: ProblemSpec, psi: np.ndarray, b: float) -> Optional[float]:
    if spec.op.family is Family.MONGE_AMPERE or (spec.op.family is Family.HESSIAN and spec.op.k == spec.op.n):
        return abs(integrate(spec.chart, np.exp(psi + b)) - 1.0) if _beta_is_metric(spec) else None
    return None


def _beta_is_metric(spec: ProblemSpec) -> bool:
    beta = np.broadcast_to(spec.beta, spec.chart.shape + (spec.op.n, spec.op.n))
    return bool(np.allclose(beta, spec.chart.metric_field(), rtol=0.0, atol=1e-14))


def diagnose(
    spec: ProblemSpec,
    u: np.ndarray,
    b: float,
    psi: np.ndarray,
    evaluation: Evaluation,
    options: SolveOptions,
) -> Diagnostics:
    """Discrete surrogates of the a priori norms plus kappa, tau and concavity."""
    _, grad = first_order_coefficients(spec, evaluation, options.perturbation_tau)
    total = grad.sum(axis=-1)
    concavity_max, bound_gap = _concavity(spec, evaluation, options.seed, options.perturbation_tau)
    return Diagnostics(
        sup_u=float(np.abs(u).max()),
        sup_grad_u=gradient_norm(spec.chart, u),
        sup_hess_u=hessian_norm(spec.chart, u),
        kappa=float((grad.min(axis=-1) / total).min()),
        tau=float(total.min()),
        concavity_max=concavity_max,
        concavity_bound_gap=bound_gap,
        mass_defect=_mass_defect(spec, psi, b),
    )


def solve(
    spec: ProblemSpec,
    options: SolveOptions = SolveOptions(),
    u_init: Optional[np.ndarray] = None,
    blend_operator: bool = False,
    keep_fields: bool = False,
    certify: bool = True,
    on_step: Optional[Callable[[StepEvent], None]] = None,
    on_point: Optional[Callable[[PathPoint], None]] = None,
    on_retry: Optional[Callable[[int, Exception], None]] = None,
) -> SolveRun:
    """
    March t from 0 to 1 and return the full run record.

    Args:
        spec: Problem to solve
        options: Tolerances and step controls
        u_init: Admissible starting field (u_under, else zero)
        blend_operator: March the quotient blend together with the data
        keep_fields: Store u at every accepted t
        certify: Require a certified C-subsolution before starting
        on_step: Called after every accepted Newton iteration
        on_point: Called after every accepted path point
        on_retry: Called after every rejected Newton step length
    """
    started = time.perf_counter()
    chart = spec.chart
    if blend_operator and spec.op.family is not Family.HESSIAN_QUOTIENT:
        raise ArgumentError("blend_operator only applies to the hessian-quotient family")

    run = SolveRun(problem=spec.name, operator=spec.op.describe())

    if certify:
        h_under = spec.background(spec.u_under)
        report = c_subsolution_report(spec.op, chart, h_under, spec.psi)
        run.subsolution = report.to_dict()
        if not report.is_subsolution:
            raise SubsolutionError(
                f"no certified subsolution: worst margin {report.worst_margin:.3e} at {report.worst_point}",
                report=report,
            )

    if u_init is None:
        u_init = spec.u_under if spec.u_under is not None else chart.zeros()
    u, b = normalize_pair(np.asarray(u_init, dtype=float), 0.0)

    def stage(t: float) -> ProblemSpec:
        return spec.with_op(spec.op.with_blend(t)) if blend_operator else spec

    start = stage(0.0)
    start_eval = evaluate(start, u)
    if start_eval.min_margin < options.admissibility_floor:
        raise AdmissibilityError(
            f"initial field is not admissible at grid point {start_eval.worst_index}",
            spectrum=start_eval.eigenvalues[start_eval.worst_index],
            worst_index=start_eval.worst_index,
        )
    f0 = operator_values(start, start_eval)

    def count_rejection(halving: int, error: Exception):
        run.rejected_steps += 1

    t, dt = 0.0, options.initial_t_step
    while t < 1.0:
        start_t = t

        @with_halving(
            initial_step=dt,
            max_halvings=options.max_halvings,
            min_step=options.min_t_step,
            exceptions=(StagnationError, AdmissibilityError),
            on_retry=count_rejection,
        )
        def advance(step: float):
            t_next = min(1.0, start_t + step)
            psi_t = (1.0 - t_next) * f0 + t_next * spec.psi
            current = stage(t_next)
            tol = options.newton_tol if t_next >= 1.0 else options.path_tol
            result = newton_solve(current, u, b, tol, options, psi_t, t_next, on_step, on_retry)
            return t_next, current, psi_t, result

        try:
            (t, current, psi_t, result), dt, _ = advance()
        except HalvingExhausted as e:
            run.rejected_steps += 1
            run.elapsed = time.perf_counter() - started
            raise ContinuationError(
                f"continuation step fell below {options.min_t_step:g} after t={start_t:.6g}: {e.__cause__}",
                last_good_t=start_t,
                run=run,
            ) from e

        u, b = result.u, result.b
        point = PathPoint(
            t=t,
            b=b,
            newton_iterations=result.iterations,
            residual=result.residual,
            residual_history=result.history,
            diagnostics=diagnose(current, u, b, psi_t, result.evaluation, options),
            u=u.copy() if keep_fields else None,
        )
        run.path.append(point)
        if on_point:
            on_point(point)
        dt = min(2.0 * dt, options.initial_t_step)

    run.u, run.b = u, b
    run.residual = run.path[-1].residual if run.path else 0.0
    run.converged = run.residual < options.newton_tol
    run.elapsed = time.perf_counter() - started
    return run


def calabi_yau_ratio(spec: ProblemSpec, u: np.ndarray, b: float):
    """
    Reconstruct omega~ from a T-transform solution and compare volumes.

    Returns (det omega~ / det omega, exp((psi + b_form)/(n - 1))) pointwise,
    with b_form = b - k log(n - 1) - log C(n, k).
    """
    op = spec.op
    if op.family is not Family.T_HESSIAN or op.k != op.n:
        raise ArgumentError("the volume reconstruction needs the T-transform family with k = n")
    if spec.omega_h is None:
        raise ArgumentError("the problem does not carry omega_h")
    n = op.n
    chart = spec.chart
    omega = chart.metric_field()
    lap = laplacian_B(chart, u)[..., None, None]
    w = spec.omega_h + (lap * omega - complex_hessian(chart, u)) / (n - 1)
    omega_tilde = power_root_inverse(hodge_star(omega, w))
    ratio = np.real(np.linalg.det(omega_tilde) / np.linalg.det(omega))
    b_form = b - op.k * log(n - 1) - log(comb(n, op.k))
    expected = np.exp((spec.psi + b_form) / (n - 1))
    return ratio, expected
