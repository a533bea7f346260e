"""
Classification package
Invariants, the parameter symmetry group and the orthogonalizing pipeline
"""

from .invariants import (InvariantTuple, OrderingReport, compute_invariants, find_positive_orderings,
                         recover_parameters)
from .symmetry import (Generator, ParamPoint, GroupElement, ORDERING_MOVES, cyclic_shift, inversion, swap_sixth,
                       permute_vectors, generate_group, symmetry_group, element_order, orbit,
                       canonical_representative, canonical_params)
from .orthogonalizer import (Orthogonalization, ClassificationReport, Stage, build_m_matrix, solve_null,
                             orthogonalize, classify)

__all__ = [
    # Invariants
    'InvariantTuple',
    'OrderingReport',
    'compute_invariants',
    'find_positive_orderings',
    'recover_parameters',

    # Symmetry group
    'Generator',
    'ParamPoint',
    'GroupElement',
    'ORDERING_MOVES',
    'cyclic_shift',
    'inversion',
    'swap_sixth',
    'permute_vectors',
    'generate_group',
    'symmetry_group',
    'element_order',
    'orbit',
    'canonical_representative',
    'canonical_params',

    # Pipeline
    'Orthogonalization',
    'ClassificationReport',
    'Stage',
    'build_m_matrix',
    'solve_null',
    'orthogonalize',
    'classify'
]
