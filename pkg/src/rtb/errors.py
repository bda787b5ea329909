"""Error hierarchy with stable machine-readable names.

The `name` of each error is the identifier printed on CLI stderr and carried
in HTTP error bodies, so all three surfaces report the same condition the
same way.
"""

from __future__ import annotations


class RtbError(Exception):
    """Base error; subclasses override `name` with a stable identifier."""

    name = "error"

    def __init__(self, detail: str = ""):
        self.detail = detail
        super().__init__(detail or self.name)


class UnknownVariableError(RtbError):
    name = "unknown-variable"


class UnknownStateError(RtbError):
    name = "unknown-state"


class CycleDetectedError(RtbError):
    name = "cycle-detected"


class MissingMechanismError(RtbError):
    name = "missing-mechanism"


class InvalidModelError(RtbError):
    name = "invalid-model"


class ParseError(RtbError):
    name = "parse-error"


class ZeroProbabilityEvidenceError(RtbError):
    name = "zero-probability-evidence"


class StateSpaceTooLargeError(RtbError):
    name = "state-space-too-large"


class ScopeMismatchError(RtbError):
    name = "scope-mismatch"


class OverlappingDoAndEvidenceError(RtbError):
    name = "overlapping-do-and-evidence"


class TargetInEvidenceError(RtbError):
    name = "target-in-evidence"


class TargetInDoError(RtbError):
    name = "target-in-do"


class MissingCostEntryError(RtbError):
    name = "missing-cost-entry"


class EmptyEnsembleError(RtbError):
    name = "empty-ensemble"


class MissingImpactModelError(RtbError):
    name = "missing-impact-model"


class InvalidQueryError(RtbError):
    name = "invalid-query"


class InvalidThresholdsError(RtbError):
    name = "invalid-thresholds"


class MalformedRatingError(RtbError):
    name = "malformed-rating"


class DuplicateStateIdError(RtbError):
    name = "duplicate-state-id"


class UnknownAttributeGroupError(RtbError):
    name = "unknown-attribute-group"


class UnknownModelError(RtbError):
    name = "unknown-model"


class UnknownSessionError(RtbError):
    name = "unknown-session"


class NoReportError(RtbError):
    name = "no-rtb-report"
