"""Exception types shared across the sampler."""


class SamplerError(RuntimeError):
    """Base class for failures inside the sampling pipeline."""


class ModeFindingError(SamplerError):
    """Mode search failed. Carries the best point seen so far."""

    def __init__(self, message, best_theta=None, best_log_density=None):
        super().__init__(message)
        self.best_theta = best_theta
        self.best_log_density = best_log_density


class DominanceError(SamplerError):
    """A proposal draw had density ratio above the mode ratio (Phi > 1)."""


class RetuneError(SamplerError):
    """Main proposal pool contained Phi > 1; the scale must be re-tuned."""


class TuningError(SamplerError):
    """Scale ladder exhausted without finding a dominating proposal."""


class AttemptLimitError(SamplerError):
    """Accept-reject exceeded its attempt cap for one threshold."""

    def __init__(self, message, threshold=None, attempts=None):
        super().__init__(message)
        self.threshold = threshold
        self.attempts = attempts
