"""
Verification package
"""

from .certificate import (Verdict, CheckResult, StateCertificate, is_ppt, rank_pair, local_ranks, rank_bounds,
                          admissible_ranks, is_entangled_by_image, is_unextendible, is_extremal,
                          extremality_constraints, certify)

__all__ = [
    'Verdict',
    'CheckResult',
    'StateCertificate',
    'is_ppt',
    'rank_pair',
    'local_ranks',
    'rank_bounds',
    'admissible_ranks',
    'is_entangled_by_image',
    'is_unextendible',
    'is_extremal',
    'extremality_constraints',
    'certify'
]
