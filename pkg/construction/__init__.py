# Construction module initialization
from .upb import (UpbParams, ProductVector, Upb, OrthogonalityReport, build_u, build_v, build_upb,
                  check_orthogonality_graph, conjugate_partner, build_state, standard_state)
from .transform import (ProductTransform, apply_to_state, apply_to_kernel_vectors, map_kernel_vector,
                        random_sl3, random_transform)

__all__ = [
    # Standard-form UPBs
    'UpbParams',
    'ProductVector',
    'Upb',
    'OrthogonalityReport',
    'build_u',
    'build_v',
    'build_upb',
    'check_orthogonality_graph',
    'conjugate_partner',
    'build_state',
    'standard_state',

    # SL x SL transforms
    'ProductTransform',
    'apply_to_state',
    'apply_to_kernel_vectors',
    'map_kernel_vector',
    'random_sl3',
    'random_transform'
]
