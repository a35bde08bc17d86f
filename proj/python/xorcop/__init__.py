"""Frank-copula xor, probabilistic logic and small feedforward networks."""

from ._xorcop import *  # noqa: F401,F403
from ._xorcop import (  # noqa: F401
    DivergenceError,
    DomainError,
    InfeasibleError,
    LookupError,
    Network,
    NotLinearError,
    ParseError,
    ShapeError,
    SingularMatrixError,
    UnboundVariableError,
    XorcopError,
)

__version__ = "0.1.0"
