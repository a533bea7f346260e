"""
Error hierarchy for the UPB state toolkit
Implements classified errors with machine-readable codes and CLI exit codes
"""

from datetime import datetime
from typing import Dict, Any, Optional


class UpbStateError(Exception):
    """
    Base class for all toolkit errors
    """
    code = "upb_state_error"
    exit_code = 1

    def __init__(self,
                 message: str,
                 stage: Optional[str] = None,
                 details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.stage = stage
        self.details = details or {}
        self.timestamp = datetime.now().isoformat()

    def with_stage(self, stage: str) -> "UpbStateError":
        """Tag the error with the pipeline stage it escaped from (first tag wins)"""
        if self.stage is None:
            self.stage = stage
        return self

    def to_dict(self) -> Dict[str, Any]:
        """Convert error to the response format"""
        return {
            "error": {
                "type": type(self).__name__,
                "code": self.code,
                "message": self.message,
                "stage": self.stage,
                "details": self.details,
                "timestamp": self.timestamp
            }
        }


class MalformedInputError(UpbStateError):
    """Raised when an input file or configuration cannot be parsed"""
    code = "malformed_input"
    exit_code = 1


class StateValidationError(UpbStateError):
    """Raised when a matrix violates a density-matrix precondition"""
    code = "invalid_state"
    exit_code = 1


class InvalidParametersError(UpbStateError):
    """Raised for non-positive standard-form parameters"""
    code = "invalid_parameters"
    exit_code = 2


class NotInClassError(UpbStateError):
    """Raised when a state is not a rank (4,4) state with a 6-vector kernel UPB"""
    code = "not_in_class"
    exit_code = 4


class NotOrthogonalizableError(NotInClassError):
    """Raised when no ordering of the kernel vectors gives positive invariants"""
    code = "not_sl_equivalent_to_orthogonal_upb"


class NumericalDegeneracyError(UpbStateError):
    """Raised when a computation is too ill-conditioned to trust"""
    code = "numerical_degeneracy"
    exit_code = 5


class DegenerateConfigurationError(NumericalDegeneracyError):
    """Raised for nearly coplanar vector triples or a missing sixth vector"""
    code = "degenerate_configuration"


class NonGenericSubspaceError(NumericalDegeneracyError):
    """Raised when a 5-dimensional span holds more than one extra product vector"""
    code = "non_generic_subspace"


class AmbiguousNullSpaceError(NumericalDegeneracyError):
    """Raised when the orthogonalizing system has no unique null vector"""
    code = "ambiguous_null_space"


class GroupClosureError(UpbStateError):
    """Raised when the parameter symmetry group fails to close"""
    code = "group_closure"
    exit_code = 5
