"""Record-value maximum-likelihood inference for the Lomax distribution."""
from .errors import DegenerateEstimateError, DomainError, QuadratureError
from .lomax import LomaxParams, cdf, pdf, quantile, sample
from .records import RecordSequence, extract_upper_records, joint_log_density, sample_records
from .estimators import (
    EstimateReport,
    Source,
    cdf_hat,
    log_likelihood_sample,
    mle_from_records,
    mle_from_sample,
    pdf_hat,
)
from .analytic import (
    SeriesResult,
    asymptotic_identity_gap,
    expected_cdf_hat,
    expected_pdf_hat,
    gamma_ratio,
    mse_cdf_hat,
    mse_pdf_hat,
    quadrature_oracle,
    second_moment_pdf_hat,
)

__version__ = "0.1.0"
