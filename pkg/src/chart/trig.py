"""
Trigonometric-sum literals used in problem files.

Literals are parsed by sympy against a fixed namespace (the coordinates
``x1, y1, ..., xn, yn``, ``pi`` and ``cos``, ``sin``, ``log``, ``exp``) and
evaluated on the grid through ``lambdify``. Arguments of cos/sin must be affine
in the coordinates with coefficients in 2*pi*Z, and coordinates may only appear
inside such arguments, so every literal is periodic on the chart.
"""

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import sympy as sp
from sympy.core.function import AppliedUndef
from sympy.parsing.sympy_parser import parse_expr, standard_transformations

from ..errors import ArgumentError

FUNCTIONS = {"cos": sp.cos, "sin": sp.sin, "log": sp.log, "exp": sp.exp, "pi": sp.pi}
WAVE_FUNCTIONS = (sp.cos, sp.sin)


def coordinate_symbols(n: int) -> tuple:
    """Real symbols (x1, y1, x2, y2, ...) in axis order."""
    return tuple(sp.Symbol(f"{c}{i}", real=True) for i in range(1, n + 1) for c in "xy")


def _parse(text: str, coords: tuple) -> sp.Expr:
    local_dict = {str(c): c for c in coords}
    local_dict.update(FUNCTIONS)
    global_dict = {name: getattr(sp, name) for name in ("Integer", "Float", "Rational", "Symbol", "Function")}
    try:
        expr = parse_expr(text, local_dict=local_dict, global_dict=global_dict,
                          transformations=standard_transformations)
    except Exception as e:
        raise ArgumentError(f"cannot parse '{text}': {e}") from None
    if not isinstance(expr, sp.Expr):
        raise ArgumentError(f"cannot parse '{text}': not an expression")
    unknown = sorted(str(f.func) for f in expr.atoms(AppliedUndef))
    unknown += sorted(str(s) for s in expr.free_symbols - set(coords))
    if unknown:
        raise ArgumentError(f"'{text}': unknown name(s) {', '.join(unknown)} for complex dimension {len(coords) // 2}")
    return expr


def _check_waves(expr: sp.Expr, coords: tuple, text: str) -> None:
    waves = expr.atoms(*WAVE_FUNCTIONS)
    for wave in waves:
        argument = wave.args[0]
        try:
            degree = sp.Poly(argument, *coords).total_degree()
        except sp.PolynomialError:
            degree = None
        if degree is None or degree > 1:
            raise ArgumentError(f"'{text}': the argument of {wave.func} must be affine in the coordinates")
        numbers = np.array([float(argument.diff(c) / (2 * sp.pi)) for c in coords])
        if not np.allclose(numbers, np.round(numbers), rtol=0.0, atol=1e-9):
            raise ArgumentError(f"'{text}': wave numbers {tuple(np.round(numbers, 6))} are not integers")

    outside = expr.xreplace({wave: sp.Dummy() for wave in waves}).free_symbols & set(coords)
    if outside:
        names = ", ".join(sorted(map(str, outside)))
        raise ArgumentError(f"'{text}': coordinates {names} appear outside cos/sin and would not be periodic")


@dataclass(frozen=True)
class TrigSum:
    """A parsed periodic literal, evaluated on any chart of matching dimension."""
    text: str
    n: int
    expr: sp.Expr
    function: Callable = field(compare=False, repr=False)

    def evaluate(self, chart) -> np.ndarray:
        if chart.n != self.n:
            raise ArgumentError(f"'{self.text}' was parsed for n={self.n}, chart has n={chart.n}")
        with np.errstate(divide="raise", invalid="raise"):
            try:
                values = self.function(*chart.coordinates())
            except FloatingPointError as e:
                raise ArgumentError(f"'{self.text}' is not finite on the grid: {e}") from None
        return np.broadcast_to(np.asarray(values, dtype=float), chart.shape).copy()


def parse_trig_sum(text: str, n: int) -> TrigSum:
    """Parse and validate a literal such as ``0.05*cos(2*pi*(x1 + y2))``."""
    if not text or not text.strip():
        raise ArgumentError("empty field literal")
    coords = coordinate_symbols(n)
    expr = _parse(text.strip(), coords)
    _check_waves(expr, coords, text)
    return TrigSum(text.strip(), n, expr, sp.lambdify(coords, expr, modules="numpy"))
