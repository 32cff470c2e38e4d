"""Periodic transverse chart: grids, spectral derivatives and field literals."""

from .grid import (
    Chart,
    build_chart,
    complex_hessian,
    gradient_norm,
    integrate,
    laplacian_B,
    poisson_solve,
)
from .trig import TrigSum, parse_trig_sum
