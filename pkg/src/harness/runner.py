"""
Campaign runner for manufactured cases.
Runs several cases concurrently and writes one record per case.
"""

from concurrent.futures import ThreadPoolExecutor, as_completed
from pathlib import Path
from typing import Callable, Optional

from rich.console import Console
from rich.progress import (
    BarColumn,
    MofNCompleteColumn,
    Progress,
    SpinnerColumn,
    TextColumn,
    TimeElapsedColumn,
)

from ..config import Config, get_config
from ..converters.record import write_json, write_run_artifacts
from ..errors import SolverError
from .cases import CaseSpec
from .manufactured import CaseReport, run_manufactured

console = Console()


class CampaignRunner:
    """
    Runs manufactured cases on a thread pool.

    FFT threads per case come from ``config.threads``; cases in flight from
    ``config.jobs``.
    """

    def __init__(self, config: Optional[Config] = None, out_dir: Optional[Path] = None):
        self.config = config or get_config()
        self.output_dir = Path(out_dir or self.config.output_dir)
        self.options = self.config.to_solve_options()

    def run_case(self, case: CaseSpec) -> CaseReport:
        """Run one case; solver failures become a failed report instead of propagating."""
        try:
            report = run_manufactured(case, self.options, threads=self.config.threads)
        except SolverError as e:
            return CaseReport(name=case.name, passed=False, error=f"{type(e).__name__}: {e}")

        case_dir = self.output_dir / case.name
        if report.run is not None:
            write_run_artifacts(report.run, case_dir, case.n)
        report.path = write_json(report.to_dict(), case_dir / "case.json")
        return report

    def run_cases(
        self,
        cases: list,
        on_case_complete: Optional[Callable[[CaseSpec, CaseReport], None]] = None,
    ) -> list:
        """
        Run cases concurrently.

        Args:
            cases: CaseSpec objects to run
            on_case_complete: Optional callback for each finished case

        Returns:
            CaseReports in completion order
        """
        reports = []

        with Progress(
            SpinnerColumn(),
            TextColumn("[bold blue]{task.description}"),
            BarColumn(bar_width=40),
            MofNCompleteColumn(),
            TimeElapsedColumn(),
            console=console,
        ) as progress:
            main_task = progress.add_task("[bold green]Manufactured cases", total=len(cases))

            with ThreadPoolExecutor(max_workers=max(1, self.config.jobs)) as executor:
                futures = {executor.submit(self.run_case, case): case for case in cases}

                for future in as_completed(futures):
                    case = futures[future]
                    try:
                        report = future.result()
                    except Exception as e:
                        report = CaseReport(name=case.name, passed=False, error=str(e))
                    reports.append(report)

                    if on_case_complete:
                        on_case_complete(case, report)

                    progress.update(main_task, advance=1)

        return reports
