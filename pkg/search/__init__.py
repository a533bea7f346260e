"""
Product vector search package
"""

from .product_search import (ProductVectorSet, seesaw_minimize, polish_product_vector, kernel_basis,
                             rank_one_candidates, find_product_vectors, find_product_vectors_in_kernel,
                             find_sixth_vector, minimum_product_overlap, random_product_vector, product_objective)

__all__ = [
    'ProductVectorSet',
    'seesaw_minimize',
    'polish_product_vector',
    'kernel_basis',
    'rank_one_candidates',
    'find_product_vectors',
    'find_product_vectors_in_kernel',
    'find_sixth_vector',
    'minimum_product_overlap',
    'random_product_vector',
    'product_objective'
]
