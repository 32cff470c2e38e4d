"""Symmetric functions, Hermitian algebra and form calculus."""

from .symfunc import (
    ConeId,
    Extended,
    Family,
    OperatorSpec,
    Spectrum,
    cone_contains,
    f_eval,
    f_grad_hess,
    f_infinity,
    gerhardt_derivatives,
    sigma,
)
from .hermitian import PerturbationB, endo_from_pair, perturb_spectrum
from .forms import (
    ConeVerdict,
    hodge_star,
    hodge_star_trace,
    mixed_power,
    positivity_k,
    positivity_n1,
    power_root_bijection,
)
