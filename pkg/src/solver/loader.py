"""
Problem files: ``key = value`` lines with ``#`` comments.

    n = 2
    N = 16
    family = monge-ampere
    G = log(2 + cos(2*pi*x1))
"""

import re
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Optional

import numpy as np

from ..algebra.symfunc import Family, operator_from_name
from ..chart.grid import Chart, build_chart, complex_hessian
from ..chart.trig import parse_trig_sum
from ..constants import FAMILY_NAMES
from ..errors import ArgumentError
from .problem import Mode, ProblemSpec, SolveOptions, ttransform_background

LINE_PATTERN = re.compile(r"^\s*([A-Za-z_][A-Za-z_0-9]*)\s*=\s*(.*?)\s*$")
DIAG_PATTERN = re.compile(r"^diag\((.*)\)$")
SCALED_IDENTITY_PATTERN = re.compile(r"^(.+?)\s*\*\s*identity$")


@dataclass
class ProblemConfig:
    """Raw settings of one problem file."""
    n: int = 2
    N: int = 16
    family: str = "monge-ampere"
    k: int = 0
    ell: int = 0
    c: float = 1.0
    metric: str = "identity"
    kappa: str = ""
    omega_h: str = ""
    omega_h_potential: str = ""
    G: str = "0"
    u_under: str = ""
    tol: float = 0.0
    seed: int = -1
    dt: float = 1e-4
    steps: int = 100
    u0: str = ""
    blend_operator: bool = False
    name: str = ""

    @classmethod
    def from_dict(cls, data: dict) -> "ProblemConfig":
        config = cls()
        known = {item.name: item for item in fields(cls)}
        for key, value in data.items():
            if key not in known:
                raise ArgumentError(f"unknown problem key '{key}'")
            current = getattr(config, key)
            if isinstance(current, bool):
                setattr(config, key, str(value).strip().lower() in ("1", "true", "yes", "on"))
            else:
                try:
                    setattr(config, key, type(current)(value))
                except ValueError:
                    raise ArgumentError(f"problem key '{key}' expects {type(current).__name__}, got '{value}'") from None
        if config.family not in FAMILY_NAMES:
            raise ArgumentError(f"unknown family '{config.family}', expected one of {FAMILY_NAMES}")
        return config


def parse_problem_text(text: str, source: str = "<text>") -> ProblemConfig:
    data = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        match = LINE_PATTERN.match(line)
        if not match:
            raise ArgumentError(f"{source}:{number}: expected 'key = value', got '{raw.strip()}'")
        key, value = match.groups()
        if key in data:
            raise ArgumentError(f"{source}:{number}: duplicate key '{key}'")
        if key not in {item.name for item in fields(ProblemConfig)}:
            raise ArgumentError(f"{source}:{number}: unknown key '{key}'")
        data[key] = value
    config = ProblemConfig.from_dict(data)
    if not config.name:
        config.name = Path(source).stem
    return config


def load_problem(path: Path) -> ProblemConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ArgumentError(f"cannot read problem file {path}: {e}") from None
    return parse_problem_text(text, str(path))


def parse_matrix(text: str, n: int) -> np.ndarray:
    """``identity``, ``s*identity`` or ``diag(a, b, ...)``."""
    text = text.strip()
    if text == "identity":
        return np.eye(n, dtype=complex)
    match = SCALED_IDENTITY_PATTERN.match(text)
    if match:
        return float(match.group(1)) * np.eye(n, dtype=complex)
    match = DIAG_PATTERN.match(text)
    if match:
        entries = [float(x) for x in match.group(1).split(",")]
        if len(entries) != n:
            raise ArgumentError(f"'{text}' has {len(entries)} entries, expected {n}")
        return np.diag(entries).astype(complex)
    raise ArgumentError(f"cannot read matrix literal '{text}'")


def _field(text: str, chart: Chart) -> Optional[np.ndarray]:
    if not text:
        return None
    return parse_trig_sum(text, chart.n).evaluate(chart)


def build_problem(config: ProblemConfig, threads: int = 1) -> ProblemSpec:
    """Turn a problem file into a ProblemSpec on a freshly built chart."""
    n = config.n
    flat = build_chart(n, config.N, threads=threads)
    kappa = _field(config.kappa, flat)
    chart = build_chart(n, config.N, metric=parse_matrix(config.metric, n), kappa=kappa, threads=threads)

    if config.omega_h:
        omega_h = parse_matrix(config.omega_h, n)
    else:
        omega_h = np.array(chart.metric, dtype=complex)
    potential = _field(config.omega_h_potential, chart)
    if potential is not None:
        omega_h = omega_h + complex_hessian(chart, potential)

    op = operator_from_name(config.family, n, config.k, config.ell, config.c)
    family = op.family
    if family is Family.HESSIAN_QUOTIENT:
        psi = np.full(chart.shape, -config.c)
    else:
        psi = _field(config.G, chart)
    if family is Family.T_HESSIAN:
        beta, mode = ttransform_background(chart.metric, omega_h), Mode.TTRANSFORM
    else:
        beta, mode = omega_h, Mode.EIGENVALUE
    return ProblemSpec(
        op=op,
        chart=chart,
        beta=beta,
        psi=psi,
        mode=mode,
        u_under=_field(config.u_under, chart),
        omega_h=omega_h,
        name=config.name or "problem",
    )


def flow_start(config: ProblemConfig, spec: ProblemSpec) -> np.ndarray:
    """The ``u0`` field of a flow problem, falling back to u_under and then zero."""
    u0 = _field(config.u0, spec.chart)
    if u0 is not None:
        return u0
    return spec.u_under if spec.u_under is not None else spec.chart.zeros()


def solve_options(config: ProblemConfig, base: SolveOptions) -> SolveOptions:
    """Apply a problem file's ``tol`` and ``seed`` overrides to the configured options."""
    changes = {}
    if config.tol > 0:
        changes["newton_tol"] = config.tol
    if config.seed >= 0:
        changes["seed"] = config.seed
    return replace(base, **changes)
