from math import log

import numpy as np
import pytest

from src.algebra.symfunc import Family, OperatorSpec, f_values
from src.errors import AdmissibilityError, ArgumentError, ContinuationError, FlowAbort, SubsolutionError
from src.solver import (
    Mode,
    ProblemSpec,
    SolveOptions,
    calabi_yau_ratio,
    newton_step,
    normalize_pair,
    parabolic_flow,
    residual,
    solve,
    ttransform_background,
)
from src.solver.backoff import HalvingExhausted, with_halving
from src.solver.newton import forcing_rtol
from src.solver.loader import (
    build_problem,
    flow_start,
    load_problem,
    parse_matrix,
    parse_problem_text,
    solve_options,
)
from src.solver.problem import evaluate

MA2 = OperatorSpec(Family.MONGE_AMPERE, 2)
TWO_PI = 2.0 * np.pi


def _wave(chart, amplitude=1.0, axis=0):
    return np.broadcast_to(amplitude * np.cos(TWO_PI * chart.coordinates()[axis]), chart.shape).copy()


def _manufactured(chart, op=MA2, u_star=None):
    """Spec whose psi is f(lambda(I + u*_{i jbar})), so (u*, 0) solves it."""
    if u_star is None:
        u_star = _wave(chart, 0.03) + _wave(chart, 0.02, axis=3)
    flat = ProblemSpec(op, chart, np.eye(op.n), 0.0)
    psi = f_values(op, evaluate(flat, u_star).eigenvalues)
    return flat.with_psi(psi), u_star


def test_residual_examples(small_chart):
    spec = ProblemSpec(MA2, small_chart, np.eye(2), 0.0)
    r, sup_r, _ = residual(spec, small_chart.zeros(), 0.0)
    np.testing.assert_allclose(r, 0.0, atol=1e-15)
    assert sup_r == pytest.approx(0.0, abs=1e-15)

    r, sup_r, _ = residual(spec, small_chart.zeros(), 0.5)
    np.testing.assert_allclose(r, -0.5, atol=1e-15)
    assert sup_r == pytest.approx(0.5)


def test_residual_vanishes_at_manufactured_solution(small_chart):
    spec, u_star = _manufactured(small_chart)
    _, sup_r, _ = residual(spec, u_star, 0.0)
    assert sup_r < 1e-12


def test_residual_reports_cone_exit(small_chart):
    spec = ProblemSpec(MA2, small_chart, np.eye(2), 0.0)
    with pytest.raises(AdmissibilityError) as info:
        residual(spec, _wave(small_chart, 0.5), 0.0)
    assert info.value.worst_index is not None
    assert len(info.value.spectrum) == 2


def test_problem_spec_checks_mode_and_dimension(small_chart, line_chart):
    with pytest.raises(ArgumentError):
        ProblemSpec(MA2, small_chart, np.eye(2), 0.0, mode=Mode.TTRANSFORM)
    with pytest.raises(ArgumentError):
        ProblemSpec(OperatorSpec(Family.T_HESSIAN, 2, 2), small_chart, np.eye(2), 0.0)
    with pytest.raises(ArgumentError):
        ProblemSpec(MA2, line_chart, np.eye(2), 0.0)


def test_normalize_pair_examples():
    u, b = normalize_pair(np.array([1.0, 3.0, 2.0]), 0.25)
    np.testing.assert_allclose(u, [-2.0, 0.0, -1.0])
    assert b == 0.25


def test_ttransform_background_in_dimension_two():
    np.testing.assert_allclose(ttransform_background(np.eye(2), np.eye(2)), np.eye(2))
    np.testing.assert_allclose(ttransform_background(np.eye(2), np.diag([1.0, 3.0])), np.diag([3.0, 1.0]))


def test_newton_step_at_exact_solution(small_chart):
    spec = ProblemSpec(MA2, small_chart, np.eye(2), 0.0)
    u, b, report = newton_step(spec, small_chart.zeros(), 0.0)
    np.testing.assert_allclose(u, 0.0)
    assert b == 0.0
    assert report.delta_u == 0.0
    assert report.delta_b == 0.0


def test_newton_step_contracts_near_solution(small_chart):
    spec, u_star = _manufactured(small_chart)
    start = u_star + 1e-3 * _wave(small_chart, axis=1)
    _, before, _ = residual(spec, start, 0.0)
    u, b, report = newton_step(spec, start, 0.0)
    assert report.residual_before == pytest.approx(before)
    assert report.residual_after < before / 10
    assert report.halvings == 0
    assert u.max() == pytest.approx(0.0, abs=1e-15)


def test_with_halving_halves_until_accepted():
    calls = []

    @with_halving(initial_step=1.0, max_halvings=10, exceptions=(ValueError,))
    def accept_small(step):
        calls.append(step)
        if step > 0.2:
            raise ValueError("too long")
        return "ok"

    result, step, halvings = accept_small()
    assert result == "ok"
    assert step == 0.125
    assert halvings == 3
    assert calls == [1.0, 0.5, 0.25, 0.125]


def test_with_halving_exhaustion():
    retries = []

    @with_halving(initial_step=1.0, max_halvings=4, exceptions=(ValueError,), on_retry=lambda i, e: retries.append(i))
    def never(step):
        raise ValueError("no")

    with pytest.raises(HalvingExhausted) as info:
        never()
    assert info.value.halvings == 4
    assert info.value.last_step == 1.0 / 16
    assert retries == [1, 2, 3, 4]


def test_with_halving_stops_at_step_floor():
    steps = []

    @with_halving(initial_step=0.25, max_halvings=30, min_step=1e-4, exceptions=(ValueError,))
    def never(step):
        steps.append(step)
        raise ValueError("no")

    with pytest.raises(HalvingExhausted) as info:
        never()
    assert info.value.halvings == 11
    assert info.value.last_step == 0.25 / 2 ** 11
    assert min(steps) >= 1e-4


def test_with_halving_passes_other_errors_through():
    @with_halving(exceptions=(ValueError,))
    def broken(step):
        raise KeyError("not a step problem")

    with pytest.raises(KeyError):
        broken()


def test_solve_trivial_problem(small_chart):
    spec = ProblemSpec(MA2, small_chart, np.eye(2), 0.0)
    run = solve(spec)
    assert run.converged
    np.testing.assert_allclose(run.u, 0.0, atol=1e-14)
    assert run.b == pytest.approx(0.0, abs=1e-14)
    assert run.t_values[-1] == 1.0
    assert run.subsolution["is_subsolution"]


def test_solve_recovers_volume_normalisation(small_chart):
    x1 = small_chart.coordinates()[0]
    psi = np.broadcast_to(np.log(2.0 + np.cos(TWO_PI * x1)), small_chart.shape)
    spec = ProblemSpec(MA2, small_chart, np.eye(2), psi)
    points = []
    run = solve(spec, on_point=points.append)
    assert run.converged
    assert run.b == pytest.approx(-log(2.0), abs=1e-9)
    # the problem is one dimensional: u_{1 1bar} = cos(2 pi x1) / 2
    exact = -np.cos(TWO_PI * x1) / (2 * np.pi ** 2)
    exact = np.broadcast_to(exact - exact.max(), small_chart.shape)
    np.testing.assert_allclose(run.u, exact, atol=1e-9)
    assert [p.t for p in points] == run.t_values
    assert run.path[-1].diagnostics.mass_defect < 1e-9
    assert run.kappa_min() > 0
    assert run.path[-1].diagnostics.concavity_max <= 1e-10


def test_solve_recovers_manufactured_potential(small_chart):
    spec, u_star = _manufactured(small_chart)
    run = solve(spec, keep_fields=True)
    assert run.converged
    np.testing.assert_allclose(run.u, u_star - u_star.max(), atol=1e-8)
    assert abs(run.b) < 1e-9
    assert all(point.u is not None for point in run.path)
    data = run.to_dict()
    assert data["converged"] is True
    assert len(data["path"]) == len(run.path)


def test_solve_requires_subsolution(small_chart):
    op = OperatorSpec(Family.HESSIAN_QUOTIENT, 2, 2, 1, 1.0)
    spec = ProblemSpec(op, small_chart, np.eye(2), -0.4)
    with pytest.raises(SubsolutionError) as info:
        solve(spec)
    assert info.value.report.worst_margin == pytest.approx(-0.1)


def test_solve_reports_continuation_underflow(small_chart):
    spec = ProblemSpec(MA2, small_chart, np.eye(2), _wave(small_chart, 0.1))
    with pytest.raises(ContinuationError) as info:
        solve(spec, SolveOptions(max_newton_iter=0))
    assert info.value.last_good_t == 0.0
    assert info.value.run.rejected_steps == 12
    assert info.value.run.path == []


def test_blend_operator_only_for_quotients(small_chart):
    spec = ProblemSpec(MA2, small_chart, np.eye(2), 0.0)
    with pytest.raises(ArgumentError):
        solve(spec, blend_operator=True)


def test_t_transform_solution_reconstructs_volume(small_chart):
    op = OperatorSpec(Family.T_HESSIAN, 2, 2)
    omega_h = np.eye(2, dtype=complex)
    psi = 0.1 * _wave(small_chart, axis=1)
    spec = ProblemSpec(op, small_chart, ttransform_background(np.eye(2), omega_h), psi,
                       mode=Mode.TTRANSFORM, omega_h=omega_h)
    run = solve(spec)
    assert run.converged
    ratio, expected = calabi_yau_ratio(spec, run.u, run.b)
    np.testing.assert_allclose(ratio, expected, rtol=1e-8)


def test_calabi_yau_ratio_needs_t_family(small_chart):
    spec = ProblemSpec(MA2, small_chart, np.eye(2), 0.0)
    with pytest.raises(ArgumentError):
        calabi_yau_ratio(spec, small_chart.zeros(), 0.0)


def test_flow_from_stationary_start(small_chart):
    spec = ProblemSpec(MA2, small_chart, np.eye(2), 0.0)
    trajectory = parabolic_flow(spec, small_chart.zeros(), 1e-4, 5)
    assert trajectory.stationary
    assert len(trajectory.residuals) == 6


def test_flow_small_step_decreases_residual(small_chart):
    spec = ProblemSpec(MA2, small_chart, np.eye(2), 0.05 * _wave(small_chart))
    seen = []
    trajectory = parabolic_flow(spec, small_chart.zeros(), 1e-4, 20, on_step=lambda step, value: seen.append(step))
    assert trajectory.monotone
    assert trajectory.residuals[-1] < trajectory.residuals[0]
    assert seen == list(range(21))
    assert trajectory.u.max() == pytest.approx(0.0, abs=1e-15)


def test_flow_large_step_is_unstable(small_chart):
    spec = ProblemSpec(MA2, small_chart, np.eye(2), 0.05 * _wave(small_chart))
    try:
        trajectory = parabolic_flow(spec, small_chart.zeros(), 1.0, 5)
    except FlowAbort as e:
        assert e.step >= 1
        assert e.trajectory is not None
    else:
        assert not trajectory.monotone


def test_flow_rejects_bad_step(small_chart):
    spec = ProblemSpec(MA2, small_chart, np.eye(2), 0.0)
    with pytest.raises(ArgumentError):
        parabolic_flow(spec, small_chart.zeros(), 0.0, 5)


PROBLEM = """
# flat Monge-Ampere
n = 2
N = 8
family = monge-ampere
G = 0.1*cos(2*pi*x1)
u0 = 0.01*cos(2*pi*y2)
tol = 1e-9
seed = 7
"""


def test_parse_problem_text():
    config = parse_problem_text(PROBLEM, "configs/flat.conf")
    assert config.name == "flat"
    assert config.N == 8
    assert config.tol == 1e-9
    spec = build_problem(config)
    assert spec.op.family is Family.MONGE_AMPERE
    np.testing.assert_allclose(spec.psi, 0.1 * _wave(spec.chart))


def test_problem_text_errors_name_the_line():
    with pytest.raises(ArgumentError, match=r":3: unknown key 'colour'"):
        parse_problem_text("n = 2\nN = 8\ncolour = blue\n", "bad.conf")
    with pytest.raises(ArgumentError, match=r":2: duplicate key 'n'"):
        parse_problem_text("n = 2\nn = 3\n", "bad.conf")
    with pytest.raises(ArgumentError, match=r":1: expected 'key = value'"):
        parse_problem_text("just words\n", "bad.conf")
    with pytest.raises(ArgumentError):
        parse_problem_text("N = many\n", "bad.conf")
    with pytest.raises(ArgumentError):
        parse_problem_text("family = laplace\n", "bad.conf")


def test_load_problem_missing_file(tmp_path):
    with pytest.raises(ArgumentError):
        load_problem(tmp_path / "absent.conf")


def test_parse_matrix_literals():
    np.testing.assert_allclose(parse_matrix("identity", 3), np.eye(3))
    np.testing.assert_allclose(parse_matrix("2*identity", 2), 2 * np.eye(2))
    np.testing.assert_allclose(parse_matrix("diag(1, 2)", 2), np.diag([1.0, 2.0]))
    with pytest.raises(ArgumentError):
        parse_matrix("diag(1, 2, 3)", 2)
    with pytest.raises(ArgumentError):
        parse_matrix("ones", 2)


def test_quotient_problem_uses_constant_right_hand_side():
    config = parse_problem_text(
        "n = 2\nN = 8\nfamily = hessian-quotient\nk = 2\nell = 1\nc = 1.5\nomega_h = 2*identity\n",
        "quotient.conf",
    )
    spec = build_problem(config)
    np.testing.assert_allclose(spec.psi, -1.5)
    np.testing.assert_allclose(spec.beta, 2 * np.eye(2))


def test_t_problem_derives_background():
    config = parse_problem_text("n = 2\nN = 8\nfamily = t-hessian\nomega_h = diag(1, 3)\n", "t.conf")
    spec = build_problem(config)
    assert spec.mode is Mode.TTRANSFORM
    np.testing.assert_allclose(spec.beta, np.diag([3.0, 1.0]))


def test_flow_start_and_options():
    config = parse_problem_text(PROBLEM, "flat.conf")
    spec = build_problem(config)
    np.testing.assert_allclose(flow_start(config, spec), 0.01 * _wave(spec.chart, axis=3))

    bare = parse_problem_text("n = 2\nN = 8\n", "bare.conf")
    np.testing.assert_allclose(flow_start(bare, build_problem(bare)), 0.0)

    options = solve_options(config, SolveOptions())
    assert options.newton_tol == 1e-9
    assert options.seed == 7
    assert solve_options(bare, SolveOptions(seed=3)).seed == 3


def test_curved_problem_builds_weighted_chart():
    config = parse_problem_text(
        "n = 2\nN = 8\nmetric = diag(1, 2)\nkappa = 0.01*cos(2*pi*x1)\n", "curved.conf"
    )
    spec = build_problem(config)
    assert not spec.chart.constant_metric
    assert spec.chart.weights.shape == spec.chart.shape


def test_forcing_rtol_tracks_residual():
    options = SolveOptions()
    assert forcing_rtol(0.5, options) == pytest.approx(0.1)
    assert forcing_rtol(1e-4, options) == pytest.approx(1e-4)
    assert forcing_rtol(1e-20, options) == pytest.approx(1e-12)
    assert forcing_rtol(0.5, SolveOptions(krylov_forcing=0.0)) == pytest.approx(1e-12)
