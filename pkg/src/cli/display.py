"""
Rich display components for the Transverse Solver CLI.
Handles banners, panels, tables and step lines.
"""

from rich.console import Console
from rich.panel import Panel
from rich.table import Table
from rich import box

from ..constants import BANNER
from ..config import Config

console = Console()


def show_banner():
    """Display the application banner."""
    console.print(BANNER, style="bold cyan")


def _fmt(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.3e}"
    return str(value)


def show_settings(config: Config):
    """
    Display current settings in a panel.

    Args:
        config: Current configuration
    """
    table = Table(show_header=False, box=None, padding=(0, 2))
    table.add_column("Setting", style="bold cyan")
    table.add_column("Value", style="white")

    for key, value in config.to_dict().items():
        table.add_row(key, str(value))

    panel = Panel(
        table,
        title="[bold magenta]⚙️  Current Settings[/bold magenta]",
        border_style="magenta",
        box=box.ROUNDED,
        padding=(1, 2),
    )

    console.print(panel)


def show_success(message: str):
    """Display a success message."""
    console.print(f"[bold green]✓ {message}[/bold green]")


def show_error(message: str):
    """Display an error message."""
    console.print(f"[bold red]✗ {message}[/bold red]")


def show_warning(message: str):
    """Display a warning message."""
    console.print(f"[bold yellow]⚠ {message}[/bold yellow]")


def show_info(message: str):
    """Display an info message."""
    console.print(f"[bold cyan]ℹ {message}[/bold cyan]")


def show_step(event):
    """One Newton iteration, for --verbose."""
    console.print(
        f"[dim]  t={event.t:.4f}  it={event.iteration:2d}  "
        f"|r|={event.residual:.3e}  halvings={event.halvings}  krylov={event.krylov_iterations}[/dim]"
    )


def show_identity_report(report):
    """Table of identity checks with their worst errors."""
    table = Table(
        title=f"[bold green]🧮 Identity Suite (seed {report.seed})[/bold green]",
        box=box.ROUNDED,
        border_style="green",
        header_style="bold white",
    )
    table.add_column("Identity", style="cyan")
    table.add_column("Samples", justify="right")
    table.add_column("Max error", justify="right")
    table.add_column("Tolerance", justify="right", style="dim")
    table.add_column("Result", justify="center")

    for result in report.results:
        verdict = "[green]✓[/green]" if result.passed else f"[red]✗ {result.violations}[/red]"
        table.add_row(result.name, str(result.samples), _fmt(result.max_error), _fmt(result.tolerance), verdict)

    console.print(table)
    for result in report.failures:
        show_error(f"{result.name} contradicts: {result.anchor}")


def show_subsolution_report(report):
    table = Table(show_header=False, box=None, padding=(0, 2))
    table.add_column("Field", style="bold cyan")
    table.add_column("Value", style="white")

    style = "green" if report.is_subsolution else "red"
    table.add_row("is_subsolution", f"[{style}]{report.is_subsolution}[/{style}]")
    table.add_row("worst_point", _fmt(report.worst_point))
    table.add_row("worst_margin", _fmt(report.worst_margin))
    table.add_row("unbounded", str(report.unbounded))
    if report.delta_R is not None:
        delta, radius = report.delta_R
        table.add_row("delta", _fmt(delta))
        table.add_row("R", _fmt(radius))
    table.add_row("points_checked", str(report.points_checked))
    table.add_row("distinct_spectra", str(report.distinct_spectra))

    console.print(Panel(
        table,
        title="[bold magenta]📐 Subsolution Report[/bold magenta]",
        border_style="magenta",
        box=box.ROUNDED,
        padding=(1, 2),
    ))


def show_run_summary(run, output_dir: str):
    """
    Display a solve summary.

    Args:
        run: SolveRun to summarise
        output_dir: Where the artifacts went
    """
    table = Table(show_header=False, box=None, padding=(0, 2))
    table.add_column("Stat", style="bold")
    table.add_column("Value")

    status = "[green]✓ converged[/green]" if run.converged else "[red]✗ not converged[/red]"
    table.add_row("Status", status)
    table.add_row("Operator", run.operator)
    table.add_row("b", f"{run.b:.12g}")
    table.add_row("Residual", _fmt(run.residual))
    table.add_row("Path points", str(len(run.path)))
    table.add_row("Rejected t-steps", str(run.rejected_steps))
    table.add_row("kappa / tau (min)", f"{run.kappa_min():.3e} / {run.tau_min():.3e}")
    if run.path:
        last = run.path[-1].diagnostics
        table.add_row("|u|, |du|, |ddu|", f"{last.sup_u:.3e}, {last.sup_grad_u:.3e}, {last.sup_hess_u:.3e}")
        if last.mass_defect is not None:
            table.add_row("Mass defect", _fmt(last.mass_defect))
    table.add_row("Elapsed", f"{run.elapsed:.2f}s")
    table.add_row("[cyan]📁 Location[/cyan]", output_dir)

    console.print(Panel(
        table,
        title=f"[bold green]📊 Solve Summary: {run.problem}[/bold green]",
        border_style="green",
        box=box.ROUNDED,
        padding=(1, 2),
    ))


def show_flow_summary(trajectory, output_dir: str):
    table = Table(show_header=False, box=None, padding=(0, 2))
    table.add_column("Stat", style="bold")
    table.add_column("Value")
    table.add_row("dt", f"{trajectory.dt:g}")
    table.add_row("Steps", str(trajectory.steps))
    if trajectory.residuals:
        table.add_row("Residual", f"{trajectory.residuals[0]:.3e} → {trajectory.residuals[-1]:.3e}")
    table.add_row("Monotone", "[green]yes[/green]" if trajectory.monotone else "[yellow]no[/yellow]")
    table.add_row("b", f"{trajectory.b:.12g}")
    table.add_row("[cyan]📁 Location[/cyan]", output_dir)

    console.print(Panel(
        table,
        title="[bold green]🌊 Flow Summary[/bold green]",
        border_style="green",
        box=box.ROUNDED,
        padding=(1, 2),
    ))


def show_case_report(report):
    """Checks of a single manufactured case."""
    table = Table(
        title=f"[bold]{report.name}[/bold]",
        box=box.SIMPLE,
        header_style="bold white",
    )
    table.add_column("Quantity", style="cyan")
    table.add_column("Value", justify="right")
    table.add_column("Tolerance", justify="right", style="dim")
    table.add_column("Provenance", style="dim")
    table.add_column("", justify="center")
    for check in report.checks:
        table.add_row(
            check.quantity,
            _fmt(check.value),
            _fmt(check.tolerance),
            check.provenance,
            "[green]✓[/green]" if check.passed else "[red]✗[/red]",
        )
    console.print(table)


def show_campaign_summary(reports: list, output_dir: str):
    """
    Display campaign summary.

    Args:
        reports: CaseReports of the campaign
        output_dir: Output directory path
    """
    passed = sum(1 for r in reports if r.passed)
    failed = len(reports) - passed

    table = Table(show_header=False, box=None, padding=(0, 2))
    table.add_column("Stat", style="bold")
    table.add_column("Value")

    table.add_row("[green]✓ Passed[/green]", str(passed))
    if failed > 0:
        table.add_row("[red]✗ Failed[/red]", str(failed))
    table.add_row("[cyan]📁 Location[/cyan]", output_dir)

    console.print(Panel(
        table,
        title="[bold green]📊 Campaign Summary[/bold green]",
        border_style="green",
        box=box.ROUNDED,
        padding=(1, 2),
    ))
