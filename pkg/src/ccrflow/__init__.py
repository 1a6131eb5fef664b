"""Scaling flows of quasi-free covariance forms and their Gaussian density powers."""

from .errors import CCRFlowError, ContractFailure, ValidationError
from .fermion import fermion_flow, fermion_limits, make_covariance
from .flow import flow, flow_trajectory, freeze_limit, generator, kms_rescaling_check
from .gaussian import density_power, trace_determinant, trace_per_mode
from .pwcalc import catalog, f_r, g_r, pw_apply
from .starlinalg import StarSpace, classify, make_form, normal_form, ratio_operator

__all__ = [
    "CCRFlowError",
    "ContractFailure",
    "StarSpace",
    "ValidationError",
    "catalog",
    "classify",
    "density_power",
    "f_r",
    "fermion_flow",
    "fermion_limits",
    "flow",
    "flow_trajectory",
    "freeze_limit",
    "g_r",
    "generator",
    "kms_rescaling_check",
    "make_covariance",
    "make_form",
    "normal_form",
    "pw_apply",
    "ratio_operator",
    "trace_determinant",
    "trace_per_mode",
]
