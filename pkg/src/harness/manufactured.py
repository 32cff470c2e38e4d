"""
Manufactured-solution runs: forward-build psi from a chosen u*, solve, compare.
"""

import time
from dataclasses import dataclass, field, asdict
from math import log
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from ..algebra.symfunc import Family, OperatorSpec, f_values
from ..chart.grid import build_chart, integrate, poisson_solve
from ..errors import SolverError
from ..solver.continuation import SolveRun, calabi_yau_ratio, solve
from ..solver.problem import Mode, ProblemSpec, SolveOptions, StepEvent, evaluate, ttransform_background
from .cases import CaseSpec


@dataclass
class CheckResult:
    """One compared quantity of a case."""
    quantity: str
    value: float
    tolerance: float
    provenance: str
    oracle: str
    passed: bool


@dataclass
class CaseReport:
    """Pass/fail summary of one manufactured case."""
    name: str
    passed: bool
    checks: list = field(default_factory=list)
    elapsed: float = 0.0
    run: Optional[SolveRun] = field(default=None, repr=False)
    error: Optional[str] = None
    path: Optional[Path] = None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "elapsed_seconds": self.elapsed,
            "error": self.error,
            "checks": [asdict(check) for check in self.checks],
            "run": None if self.run is None else self.run.to_dict(),
        }


def build_case_problem(case: CaseSpec, threads: int = 1):
    """Return (ProblemSpec, u*) with psi forward-built from u* (quotient: psi = -c)."""
    flat = build_chart(case.n, case.N, metric=case.metric, threads=threads)
    kappa = None
    if case.kappa is not None:
        kappa = np.broadcast_to(case.kappa(flat.coordinates()), flat.shape).copy()
    chart = build_chart(case.n, case.N, metric=case.metric, kappa=kappa, threads=threads)
    exact = np.broadcast_to(case.exact(chart.coordinates()), chart.shape).copy()

    op = OperatorSpec(case.family, case.n, case.k or case.n, case.ell, case.c)
    omega_h = chart.metric if case.omega_h is None else np.asarray(case.omega_h, dtype=complex)
    if case.family is Family.T_HESSIAN:
        beta, mode = ttransform_background(chart.metric, omega_h), Mode.TTRANSFORM
    else:
        beta, mode = omega_h, Mode.EIGENVALUE

    placeholder = np.zeros(chart.shape)
    spec = ProblemSpec(op, chart, beta, placeholder, mode, omega_h=omega_h, name=case.name)
    if case.family is Family.HESSIAN_QUOTIENT:
        psi = np.full(chart.shape, -case.c)
    else:
        psi = f_values(op, evaluate(spec, exact).eigenvalues)
    return spec.with_psi(psi), exact


def _linear_oracle(spec: ProblemSpec) -> tuple:
    """k = 1: Delta u = n (exp(psi + b) - 1) with b = -log mean exp(psi)."""
    n = spec.op.n
    b = -log(integrate(spec.chart, np.exp(spec.psi)))
    u = poisson_solve(spec.chart, n * (np.exp(spec.psi + b) - 1.0))
    return u - u.max(), b


def _quadratic_constant(history: list) -> Optional[float]:
    """Largest r_{m+1} / r_m^2 over the tail where r_m is well above roundoff."""
    ratios = [
        later / earlier ** 2
        for earlier, later in zip(history, history[1:])
        if earlier >= 1e-6 and later >= 1e-13
    ]
    return max(ratios[-3:]) if ratios else None


def _measure(case: CaseSpec, spec: ProblemSpec, exact: np.ndarray, run: SolveRun, options: SolveOptions) -> dict:
    target = exact - exact.max()
    values = {
        "sup_error": float(np.abs(run.u - target).max()),
        "abs_b": abs(run.b),
        "residual": run.residual,
    }
    if case.family is Family.HESSIAN_QUOTIENT:
        reference = float(f_values(spec.op, evaluate(spec, exact).eigenvalues).mean()) + case.c
        values["b_value"] = abs(run.b - reference)
    if case.family is Family.MONGE_AMPERE:
        values["mass_b"] = abs(run.b + log(integrate(spec.chart, np.exp(spec.psi))))
    if case.family is Family.HESSIAN and spec.op.k == 1:
        oracle_u, oracle_b = _linear_oracle(spec)
        values["linear_oracle"] = max(float(np.abs(run.u - oracle_u).max()), abs(run.b - oracle_b))
    if case.family is Family.T_HESSIAN and spec.op.k == spec.op.n:
        ratio, expected = calabi_yau_ratio(spec, run.u, run.b)
        values["volume_ratio"] = float(np.abs(ratio - expected).max())
        if spec.op.n == 2:
            twin = ProblemSpec(OperatorSpec(Family.MONGE_AMPERE, 2), spec.chart, spec.beta, spec.psi,
                               Mode.EIGENVALUE, name=f"{spec.name}-swap")
            twin_run = solve(twin, options)
            values["swap_equivalence"] = max(float(np.abs(run.u - twin_run.u).max()), abs(run.b - twin_run.b))
    constant = _quadratic_constant(run.final_history)
    values["quadratic_constant"] = 0.0 if constant is None else constant
    return values


def run_manufactured(
    case: CaseSpec,
    options: SolveOptions = SolveOptions(),
    threads: int = 1,
    on_step: Optional[Callable[[StepEvent], None]] = None,
) -> CaseReport:
    """
    Build psi from u*, solve twice from different starts, and compare.

    Solver errors propagate with a ``case`` attribute naming the case.
    """
    started = time.perf_counter()
    try:
        spec, exact = build_case_problem(case, threads)
        run = solve(spec, options, on_step=on_step)
        values = _measure(case, spec, exact, run, options)
        second_start = np.broadcast_to(case.second_start(spec.chart.coordinates()), spec.chart.shape).copy()
        again = solve(spec, options, u_init=second_start)
    except SolverError as e:
        e.case = case.name
        raise

    values["uniqueness_u"] = float(np.abs(run.u - again.u).max())
    values["uniqueness_b"] = abs(run.b - again.b)

    checks = []
    for expectation in case.expected:
        value = values.get(expectation.quantity)
        if value is None:
            continue
        checks.append(CheckResult(
            quantity=expectation.quantity,
            value=float(value),
            tolerance=expectation.tolerance,
            provenance=expectation.provenance,
            oracle=expectation.oracle,
            passed=bool(value < expectation.tolerance),
        ))
    return CaseReport(
        name=case.name,
        passed=all(check.passed for check in checks) and run.converged,
        checks=checks,
        elapsed=time.perf_counter() - started,
        run=run,
    )
