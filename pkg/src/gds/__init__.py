"""Generalized direct sampling: independent posterior draws without Markov chains."""

from .core import (
    GdsConfig,
    GdsRunResult,
    PosteriorDraw,
    ThresholdTable,
    accept_reject,
    build_threshold_table,
    run_gds,
    sample_threshold,
    sample_thresholds,
)
from .errors import (
    AttemptLimitError,
    DominanceError,
    ModeFindingError,
    RetuneError,
    SamplerError,
    TuningError,
)
from .evidence import EvidenceEstimate, analytic_log_evidence_linreg, estimate_gamma, estimate_log_evidence, log_sum_2i_minus_1
from .modefind import ModeOptions, ModeResult, find_mode, hessian_at
from .models import (
    Dataset,
    LinRegHyper,
    Model,
    constrained_vector,
    from_constrained,
    gradient,
    load_dataset,
    log_unnormalized_posterior,
    make_cauchy_normal,
    make_hier_gauss,
    make_lin_reg_conjugate,
    save_dataset,
    simulate_hier_gauss,
    simulate_lin_reg,
    to_constrained,
)
from .proposal import Proposal, ProposalSample, build_proposal, log_phi, proposal_log_density, sample_batch, sample_proposal, tune_scale

__version__ = "0.1.0"

__all__ = [
    "AttemptLimitError",
    "Dataset",
    "DominanceError",
    "EvidenceEstimate",
    "GdsConfig",
    "GdsRunResult",
    "LinRegHyper",
    "Model",
    "ModeFindingError",
    "ModeOptions",
    "ModeResult",
    "PosteriorDraw",
    "Proposal",
    "ProposalSample",
    "RetuneError",
    "SamplerError",
    "ThresholdTable",
    "TuningError",
    "accept_reject",
    "analytic_log_evidence_linreg",
    "build_proposal",
    "build_threshold_table",
    "constrained_vector",
    "estimate_gamma",
    "estimate_log_evidence",
    "find_mode",
    "from_constrained",
    "gradient",
    "hessian_at",
    "load_dataset",
    "log_phi",
    "log_sum_2i_minus_1",
    "log_unnormalized_posterior",
    "make_cauchy_normal",
    "make_hier_gauss",
    "make_lin_reg_conjugate",
    "proposal_log_density",
    "run_gds",
    "sample_batch",
    "sample_proposal",
    "sample_threshold",
    "sample_thresholds",
    "save_dataset",
    "simulate_hier_gauss",
    "simulate_lin_reg",
    "to_constrained",
    "tune_scale",
]
