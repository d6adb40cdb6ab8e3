"""Exception hierarchy shared across the service."""

from __future__ import annotations


class LitscoutError(Exception):
    """Base class for all service errors."""

    machine_code = "internal_error"


class UnknownProjectError(LitscoutError):
    machine_code = "unknown_project"


class UnknownQuestionError(LitscoutError):
    machine_code = "unknown_question"


class UnknownPaperError(LitscoutError):
    machine_code = "unknown_paper"


class AmbiguousPaperError(LitscoutError):
    machine_code = "ambiguous_paper"


class DuplicateSourceError(LitscoutError):
    machine_code = "duplicate_source"


class MalformedAddressError(LitscoutError):
    machine_code = "malformed_address"


class UnreachableSourceError(LitscoutError):
    machine_code = "unreachable_source"


class PermissionDeniedError(LitscoutError):
    machine_code = "permission_denied"


class UnsupportedContentError(LitscoutError):
    machine_code = "unsupported_content"


class NormalizeError(LitscoutError):
    machine_code = "normalize_failed"


class ValidationFailure(LitscoutError):
    """Bad caller input (empty text, unknown enum value, ...)."""

    machine_code = "validation_error"


class DuplicateQuestionError(LitscoutError):
    machine_code = "duplicate_question"


class NoBaselineAnswerError(LitscoutError):
    """Tracking requires at least one stored answer for the question."""

    machine_code = "no_baseline_answer"


class RunInFlightError(LitscoutError):
    """Another update run holds the project lock."""

    machine_code = "busy"


class ProviderError(LitscoutError):
    machine_code = "provider_error"


class TransientProviderError(ProviderError):
    """Retryable provider failure (timeouts, 5xx, rate limits)."""

    machine_code = "provider_transient"


class AuthenticationError(ProviderError):
    """Non-retryable credential failure."""

    machine_code = "provider_auth"


class MissingFixtureError(ProviderError):
    """Strict replay provider has no recorded response for the request."""

    machine_code = "missing_fixture"


class OutputParseError(LitscoutError):
    """Provider output did not match the expected structure."""

    machine_code = "output_parse_error"
