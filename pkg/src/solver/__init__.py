"""Residual, Newton, continuation and flow for f(lambda(A_u)) = psi + b."""

from .continuation import SolveRun, calabi_yau_ratio, solve
from .flow import FlowTrajectory, parabolic_flow
from .newton import newton_step, residual
from .problem import Mode, ProblemSpec, SolveOptions, normalize_pair, ttransform_background
from .subsolution import SubsolutionReport, c_subsolution_report, quotient_cone_condition
