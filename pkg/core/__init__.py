"""
Core module initialization for the UPB state toolkit
Exports the linear algebra substrate, state container, codec and errors
"""

from .tensor_core import (kron, partial_transpose, partial_trace, herm_eig, numerical_rank,
                          normalize_phase, projective_distance, wedge_sine)
from .density_matrix import DensityMatrix
from .errors import (UpbStateError, MalformedInputError, StateValidationError, InvalidParametersError,
                     NotInClassError, NotOrthogonalizableError, NumericalDegeneracyError,
                     DegenerateConfigurationError, NonGenericSubspaceError, AmbiguousNullSpaceError,
                     GroupClosureError)

__all__ = [
    # Linear algebra
    'kron',
    'partial_transpose',
    'partial_trace',
    'herm_eig',
    'numerical_rank',
    'normalize_phase',
    'projective_distance',
    'wedge_sine',

    # State container
    'DensityMatrix',

    # Errors
    'UpbStateError',
    'MalformedInputError',
    'StateValidationError',
    'InvalidParametersError',
    'NotInClassError',
    'NotOrthogonalizableError',
    'NumericalDegeneracyError',
    'DegenerateConfigurationError',
    'NonGenericSubspaceError',
    'AmbiguousNullSpaceError',
    'GroupClosureError'
]
