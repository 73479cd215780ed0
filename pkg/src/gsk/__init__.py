"""Generalized spectral kernels for Gaussian-process modelling."""

from gsk.exceptions import InputError, NumericalError
from gsk.gp import (
    BasisModel,
    GPModel,
    fit_basis,
    fit_gp,
    log_marginal_likelihood,
    mll_gradient,
    mll_value_and_grad,
    predict,
    predict_basis,
)
from gsk.kernels import (
    BaseKernel,
    NonstationaryGSK,
    SparseSpectrumKernel,
    StarKernel,
    StationaryGSK,
    eval_nonstationary,
    eval_stationary,
    grad_nonstationary,
    grad_stationary,
    kernel_from_dict,
    kernel_to_dict,
    pack,
    psi,
    template_for,
    unpack,
)
from gsk.optimize import FitReport, OptimizerConfig, SSEObjective, fit_to_target, minimize, train_gp
from gsk.rff import RFFBasis, estimate_kernel, feature_map, sample_frequencies
from gsk.targets import EvalGrid, IFBMKernel, ifbm, normalized_rmse

__version__ = "0.1.0"

__all__ = [
    "BaseKernel",
    "BasisModel",
    "EvalGrid",
    "FitReport",
    "GPModel",
    "IFBMKernel",
    "InputError",
    "NonstationaryGSK",
    "NumericalError",
    "OptimizerConfig",
    "RFFBasis",
    "SSEObjective",
    "SparseSpectrumKernel",
    "StarKernel",
    "StationaryGSK",
    "estimate_kernel",
    "eval_nonstationary",
    "eval_stationary",
    "feature_map",
    "fit_basis",
    "fit_gp",
    "fit_to_target",
    "grad_nonstationary",
    "grad_stationary",
    "ifbm",
    "kernel_from_dict",
    "kernel_to_dict",
    "log_marginal_likelihood",
    "minimize",
    "mll_gradient",
    "mll_value_and_grad",
    "normalized_rmse",
    "pack",
    "predict",
    "predict_basis",
    "psi",
    "sample_frequencies",
    "template_for",
    "train_gp",
    "unpack",
]
