"""Automated heuristic usability evaluation with inter-rater reliability analysis."""

__version__ = "0.1.0"

from .catalog import (
    HeuristicId,
    build_instructions,
    canonicalize_heuristic,
    heuristic_catalog,
)
from .client import (
    BackendResponse,
    EvaluatorBackend,
    HttpBackend,
    MockBackend,
    SessionConfig,
    evaluate_session,
    mock_backend,
    run_site,
)
from .ingest import (
    CorpusBundle,
    IngestConfig,
    PayloadLimits,
    SourceFile,
    filter_frontend,
    package_payload,
    scan_repository,
)
from .report import AgreementReport, build_report, emit_figure_data, render_report
from .schema import (
    Dataset,
    ExclusionRecord,
    HeuristicEvaluation,
    SessionEvaluation,
    parse_evaluation,
    validate_dataset,
)
from .store import load_dataset, save_results

__all__ = [
    "AgreementReport",
    "BackendResponse",
    "CorpusBundle",
    "Dataset",
    "EvaluatorBackend",
    "ExclusionRecord",
    "HeuristicEvaluation",
    "HeuristicId",
    "HttpBackend",
    "IngestConfig",
    "MockBackend",
    "PayloadLimits",
    "SessionConfig",
    "SessionEvaluation",
    "SourceFile",
    "__version__",
    "build_instructions",
    "build_report",
    "canonicalize_heuristic",
    "emit_figure_data",
    "evaluate_session",
    "filter_frontend",
    "heuristic_catalog",
    "load_dataset",
    "mock_backend",
    "package_payload",
    "parse_evaluation",
    "render_report",
    "run_site",
    "save_results",
    "scan_repository",
    "validate_dataset",
]
