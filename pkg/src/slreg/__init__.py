"""Population-level stochastic linear regression over polynomial random variables."""

from .linalg import NotLinearlyIndependentError
from .model import (
    ModelDiagnosis,
    RandomVectorSpec,
    check_injectivity,
    classify,
    is_stochastic_linear_regression,
    make_family_member,
    validate_fundamental,
)
from .moments import (
    ConditionalExpectationForm,
    DegreeOverflowError,
    FiniteDiscrete,
    Gaussian,
    Poly,
    conditional_expectation,
    covariance,
    dirac,
    expectation,
    is_mean_independent,
    rademacher,
    raw_moment,
)
from .orthogonalization import orthogonalize, projection_via_orthogonalization
from .projection import decompose, gram_matrix, mse, projection_coefficient

__version__ = "0.1.0"
