"""Exception hierarchy shared across the pipeline."""


class HeurikappaError(Exception):
    """Base class for all errors raised by this package."""


class IngestError(HeurikappaError):
    pass


class PathNotFoundError(IngestError):
    pass


class ArchiveCorruptError(IngestError):
    pass


class PathTraversalError(IngestError):
    """An archive entry tried to escape the extraction root."""


class PayloadError(IngestError):
    """Raised when a bundle is empty or the limits cannot fit a single file header."""


class UnrecognizedHeuristicError(HeurikappaError):
    def __init__(self, raw_name):
        super().__init__(f"unrecognized heuristic: {raw_name!r}")
        self.raw_name = raw_name


class BackendError(HeurikappaError):
    pass


class TransportError(BackendError):
    """Retryable failure talking to a backend."""


class TransportExhaustedError(BackendError):
    def __init__(self, attempts, last_error):
        super().__init__(f"all {attempts} attempts failed; last error: {last_error}")
        self.attempts = attempts
        self.last_error = last_error


class BackendRefusalError(BackendError):
    """The backend answered with an empty body."""


class ConfigurationError(HeurikappaError):
    pass


class UnparseableResponseError(HeurikappaError):
    """No JSON array could be recovered from an evaluator response."""


class OverwriteRefusedError(HeurikappaError):
    pass


class RatingsError(HeurikappaError, ValueError):
    """Invalid input to an agreement statistic."""
