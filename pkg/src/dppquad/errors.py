"""Exception types shared across the package."""


class DppQuadError(Exception):
    """Base class for all package-specific failures."""


class SingularGram(DppQuadError):
    """Gram matrix could not be factorized even after the jittered retry."""


class NegativeError(DppQuadError):
    """Squared-error quadratic fell below the -1e-10 clamp threshold."""


class RejectionStalled(DppQuadError):
    """Rejection sampler exceeded the proposal budget at a single step."""


class UnsupportedIntegrand(DppQuadError):
    """Operation requires g identically one."""


class UnsupportedFamily(DppQuadError):
    """Operation does not apply to this kernel family."""


class LengthMismatch(DppQuadError):
    """Vector length does not match the node count."""


class NotAPower(DppQuadError):
    """Tensor designs need N = m^d for an integer m."""


class InsufficientData(DppQuadError):
    """Rate fitting needs at least 3 distinct N with positive mean error."""


class RankDeficient(DppQuadError):
    """Matrix is rank deficient where full rank is required."""


class DegenerateNodes(DppQuadError):
    """Eigenfunction matrix determinant underflowed after rescaling."""


class ConfigError(DppQuadError):
    """Experiment configuration is malformed."""
