"""Positive meshfree finite-difference stencils for the Poisson equation."""

from ._mpsfd import (
    Domain,
    PointCloud,
    analyze,
    assemble,
    cone_criterion_check,
    dense_solve,
    fit_slope,
    generate,
    half_space_check,
    lsq_stencil,
    manufactured_solution,
    mps_stencil,
    run_convergence,
    solve,
)

__all__ = [
    "Domain",
    "PointCloud",
    "analyze",
    "assemble",
    "cone_criterion_check",
    "dense_solve",
    "fit_slope",
    "generate",
    "half_space_check",
    "lsq_stencil",
    "manufactured_solution",
    "mps_stencil",
    "run_convergence",
    "solve",
    "to_scipy",
]


def to_scipy(matrix):
    """scipy.sparse.csr_matrix view of a SparseMatrix."""
    import scipy.sparse

    n = matrix.n
    return scipy.sparse.csr_matrix((matrix.values, matrix.cols, matrix.row_ptr), shape=(n, n))
