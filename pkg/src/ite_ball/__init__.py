"""Interior transmission eigenvalues of radially stratified balls.

Modules: ``specfun`` (Bessel and Airy functions in scaled arithmetic),
``uniform`` (large-order uniform asymptotics), ``transmission`` (media,
characteristic determinants and DN symbols), ``rootfind`` (argument
principle zero finding), ``survey`` (spectral surveys and sweeps) and
``cli``.
"""

from .errors import (
    BoundaryZeroError,
    ConditionError,
    DepthExhaustedError,
    DomainError,
    IntegratorError,
    IteError,
    NewtonEscapeError,
    PhaseStepError,
    PoleError,
)
from .scaled import ScaledComplex

__version__ = "0.1.0"
