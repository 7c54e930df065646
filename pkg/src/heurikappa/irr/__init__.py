"""Inter-rater reliability statistics."""

from .analysis import (
    IssueFrequency,
    SeverityHistogram,
    issue_frequency,
    multi_rater_issue_agreement,
    pairwise_issue_agreement,
    pairwise_severity_agreement,
    per_heuristic_kappa,
    per_site_weighted_kappa,
    ratings_table,
    session_pairs,
    severity_histogram,
    transposed_alpha,
)
from .coefficients import (
    ALPHA_METRICS,
    BINARY_DOMAIN,
    SEVERITY_DOMAIN,
    WEIGHT_SCHEMES,
    AgreementStats,
    AlphaStats,
    ContingencyTable,
    FleissStats,
    MultiRaterStats,
    RatingsTable,
    WeightedAgreementStats,
    WeightMatrix,
    cohen_kappa,
    contingency_table,
    fleiss_kappa,
    krippendorff_alpha,
    multi_rater_stats,
    weight_matrix,
    weighted_kappa,
)
from .estimators import (
    AgreementAnalysis,
    CohenKappa,
    FleissKappa,
    KrippendorffAlpha,
    RatingsExtractor,
)

__all__ = [
    "ALPHA_METRICS",
    "BINARY_DOMAIN",
    "SEVERITY_DOMAIN",
    "WEIGHT_SCHEMES",
    "AgreementAnalysis",
    "AgreementStats",
    "AlphaStats",
    "CohenKappa",
    "ContingencyTable",
    "FleissKappa",
    "FleissStats",
    "IssueFrequency",
    "KrippendorffAlpha",
    "MultiRaterStats",
    "RatingsExtractor",
    "RatingsTable",
    "SeverityHistogram",
    "WeightMatrix",
    "WeightedAgreementStats",
    "cohen_kappa",
    "contingency_table",
    "fleiss_kappa",
    "issue_frequency",
    "krippendorff_alpha",
    "multi_rater_issue_agreement",
    "multi_rater_stats",
    "pairwise_issue_agreement",
    "pairwise_severity_agreement",
    "per_heuristic_kappa",
    "per_site_weighted_kappa",
    "ratings_table",
    "session_pairs",
    "severity_histogram",
    "transposed_alpha",
    "weight_matrix",
    "weighted_kappa",
]
