"""
Main Typer CLI application for the Transverse Solver.
One command per task: identities, subsolution, solve, flow, manufacture, settings.
"""

from pathlib import Path
from typing import List, Optional

import typer
from rich.console import Console
from rich.progress import BarColumn, Progress, SpinnerColumn, TextColumn, TimeElapsedColumn

from ..config import Config, load_config, save_config
from ..converters.record import write_json, write_residual_csv, write_run_artifacts
from ..converters.snapshot import write_snapshot
from ..errors import (
    ArgumentError,
    ContinuationError,
    DomainError,
    FlowAbort,
    SolverError,
    StagnationError,
)
from ..harness import CASES, CampaignRunner, get_case, verify_identities
from ..solver.continuation import solve
from ..solver.flow import parabolic_flow
from ..solver.loader import build_problem, flow_start, load_problem, solve_options
from ..solver.subsolution import c_subsolution_report
from .display import (
    show_banner,
    show_campaign_summary,
    show_case_report,
    show_error,
    show_flow_summary,
    show_identity_report,
    show_info,
    show_run_summary,
    show_settings,
    show_step,
    show_subsolution_report,
    show_success,
    show_warning,
)

console = Console()
app = typer.Typer(
    name="transverse",
    help="🧮 Continuity-method solver for fully nonlinear transverse equations on a periodic chart",
    add_completion=False,
    rich_markup_mode="rich",
    no_args_is_help=True,
)


def exit_code_for(error: Exception) -> int:
    """Map a solver failure onto the documented exit codes."""
    if isinstance(error, (ContinuationError, StagnationError)):
        return 2
    if isinstance(error, (DomainError, FlowAbort)):
        return 3
    return 1


def _fail(error: Exception):
    show_error(f"{type(error).__name__}: {error}")
    raise typer.Exit(exit_code_for(error))


def _output_dir(config: Config, out: Optional[Path], name: str) -> Path:
    return Path(out) if out else Path(config.output_dir) / name


def _retry_warning(attempt: int, error: Exception):
    console.print(f"[dim yellow]  ↻ step halved ({attempt}): {error}[/dim yellow]")


@app.command("identities")
def identities_cmd(
    seed: Optional[int] = typer.Option(None, "--seed", "-s", help="Random seed (default from settings)"),
    samples: Optional[int] = typer.Option(None, "--samples", help="Samples per algebraic identity"),
    derivative_samples: Optional[int] = typer.Option(None, "--derivative-samples", help="Samples per derivative check"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Directory for identities.json"),
):
    """
    🧪 Verify the algebraic identities on seeded random inputs.
    """
    show_banner()
    config = load_config()
    seed = config.seed if seed is None else seed
    report = verify_identities(
        seed=seed,
        samples=config.identity_samples if samples is None else samples,
        derivative_samples=config.derivative_samples if derivative_samples is None else derivative_samples,
    )
    show_identity_report(report)

    path = write_json(report.to_dict(), _output_dir(config, out, "identities") / "identities.json")
    if path:
        show_info(f"Report written to {path}")
    if not report.passed:
        raise typer.Exit(1)
    show_success("All identities hold")


@app.command("subsolution")
def subsolution_cmd(
    problem: Path = typer.Argument(..., help="Problem file (key = value)"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Directory for subsolution.json"),
):
    """
    📐 Check the C-subsolution condition for a problem's background.
    """
    show_banner()
    config = load_config()
    try:
        spec = build_problem(load_problem(problem), threads=config.threads)
        report = c_subsolution_report(spec.op, spec.chart, spec.background(spec.u_under), spec.psi)
    except SolverError as e:
        _fail(e)

    show_subsolution_report(report)
    write_json(report.to_dict(), _output_dir(config, out, spec.name) / "subsolution.json")
    if not report.is_subsolution:
        raise typer.Exit(3)


@app.command("solve")
def solve_cmd(
    problem: Path = typer.Argument(..., help="Problem file (key = value)"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Artifact directory"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Print every Newton iteration"),
):
    """
    🚀 Solve a problem by the continuity method.
    """
    show_banner()
    config = load_config()
    try:
        problem_config = load_problem(problem)
        spec = build_problem(problem_config, threads=config.threads)
        options = solve_options(problem_config, config.to_solve_options())
    except SolverError as e:
        _fail(e)

    out_dir = _output_dir(config, out, spec.name)
    show_info(f"Solving {spec.op.describe()} on N={spec.chart.N}")

    with Progress(
        SpinnerColumn(),
        TextColumn("[bold blue]{task.description}"),
        BarColumn(bar_width=40),
        TextColumn("t = {task.completed:.4f}"),
        TimeElapsedColumn(),
        console=console,
    ) as progress:
        task = progress.add_task(f"[bold green]Continuation {spec.name}", total=1.0)
        try:
            run = solve(
                spec,
                options,
                blend_operator=problem_config.blend_operator,
                on_step=show_step if verbose else None,
                on_point=lambda point: progress.update(task, completed=point.t),
                on_retry=_retry_warning if verbose else None,
            )
        except ContinuationError as e:
            if e.run is not None:
                write_json(e.run.to_dict(), out_dir / "record.json")
            _fail(e)
        except SolverError as e:
            _fail(e)

    write_run_artifacts(run, out_dir, spec.op.n)
    show_run_summary(run, str(out_dir.absolute()))
    if not run.converged:
        show_warning("Final residual is above the Newton tolerance")
        raise typer.Exit(2)


@app.command("flow")
def flow_cmd(
    problem: Path = typer.Argument(..., help="Problem file (key = value, with dt and steps)"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Artifact directory"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Print every flow step"),
):
    """
    🌊 Run the explicit parabolic flow from u0.
    """
    show_banner()
    config = load_config()
    try:
        problem_config = load_problem(problem)
        spec = build_problem(problem_config, threads=config.threads)
        options = solve_options(problem_config, config.to_solve_options())
        u0 = flow_start(problem_config, spec)
    except SolverError as e:
        _fail(e)

    out_dir = _output_dir(config, out, f"{spec.name}-flow")

    def on_step(step: int, value: float):
        if verbose:
            console.print(f"[dim]  step {step:5d}  |r| = {value:.3e}[/dim]")

    try:
        trajectory = parabolic_flow(spec, u0, problem_config.dt, problem_config.steps, options, on_step)
    except FlowAbort as e:
        if e.trajectory is not None:
            write_json(e.trajectory.to_dict(), out_dir / "flow.json")
        _fail(e)
    except SolverError as e:
        _fail(e)

    write_json(trajectory.to_dict(), out_dir / "flow.json")
    write_residual_csv(list(enumerate(trajectory.residuals)), out_dir / "residuals.csv", header=("step", "residual"))
    write_snapshot(trajectory.u, out_dir / "u.bin", spec.op.n, "u", spec.name, spec.op.describe())
    show_flow_summary(trajectory, str(out_dir.absolute()))


@app.command("manufacture")
def manufacture_cmd(
    case: Optional[str] = typer.Argument(None, help=f"Case name: {', '.join(CASES)}"),
    all_cases: bool = typer.Option(False, "--all", "-a", help="Run every built-in case"),
    jobs: Optional[int] = typer.Option(None, "--jobs", "-j", help="Cases run concurrently"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Campaign directory"),
):
    """
    🏭 Run manufactured-solution cases and compare with their oracles.
    """
    show_banner()
    config = load_config()
    if jobs is not None:
        config.jobs = jobs
    if all_cases == (case is not None):
        _fail(ArgumentError("give exactly one of a case name or --all"))
    try:
        cases = list(CASES.values()) if all_cases else [get_case(case)]
    except ArgumentError as e:
        _fail(e)

    out_dir = _output_dir(config, out, "manufactured")
    runner = CampaignRunner(config, out_dir)

    def on_complete(spec, report):
        if report.error:
            show_warning(f"{spec.name}: {report.error}")
        else:
            show_case_report(report)

    reports = runner.run_cases(cases, on_case_complete=on_complete)
    write_json({"cases": [r.to_dict() for r in reports]}, out_dir / "campaign.json")
    show_campaign_summary(reports, str(out_dir.absolute()))
    if not all(r.passed for r in reports):
        raise typer.Exit(1)


@app.command("settings")
def settings_cmd(
    assignments: Optional[List[str]] = typer.Option(None, "--set", help="key=value, repeatable"),
):
    """
    ⚙️  View and modify settings.
    """
    show_banner()
    config = load_config()

    if assignments:
        known = config.to_dict()
        updates = {}
        for item in assignments:
            key, sep, value = item.partition("=")
            key = key.strip()
            if not sep or key not in known:
                _fail(ArgumentError(f"cannot apply setting '{item}'"))
            updates[key] = value.strip()
        try:
            config = Config.from_dict({**known, **updates})
        except (TypeError, ValueError) as e:
            _fail(ArgumentError(f"invalid setting value: {e}"))
        if save_config(config):
            show_success("Settings saved")
        else:
            _fail(ArgumentError("could not write config.json"))

    console.print()
    show_settings(config)


def run():
    """Run the CLI application."""
    app()


if __name__ == "__main__":
    run()
