from .base import (
    Model,
    as_params,
    constrained_vector,
    from_constrained,
    gradient,
    log_unnormalized_posterior,
    to_constrained,
)
from .cauchy_normal import CauchyNormalModel, make_cauchy_normal
from .datasets import Dataset, load_dataset, save_dataset, save_metadata, simulate_hier_gauss, simulate_lin_reg
from .hier_gauss import HierGaussModel, IW_CONVENTION, make_hier_gauss
from .lin_reg import LinRegHyper, LinRegModel, make_lin_reg_conjugate
from .transforms import Block

__all__ = [
    "Block",
    "CauchyNormalModel",
    "Dataset",
    "HierGaussModel",
    "IW_CONVENTION",
    "LinRegHyper",
    "LinRegModel",
    "Model",
    "as_params",
    "constrained_vector",
    "from_constrained",
    "gradient",
    "load_dataset",
    "log_unnormalized_posterior",
    "make_cauchy_normal",
    "make_hier_gauss",
    "make_lin_reg_conjugate",
    "save_dataset",
    "save_metadata",
    "simulate_hier_gauss",
    "simulate_lin_reg",
    "to_constrained",
]
