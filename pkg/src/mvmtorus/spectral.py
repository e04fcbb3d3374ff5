"""Dense symmetric eigen-analysis for the small matrices this package
meets: eigen-decomposition, positive-definiteness, Gershgorin discs and
determinants.

Dimensions here are tiny (p rarely above 4, never large), so everything
is delegated to LAPACK through numpy; the value added by this module is
the validated, ascending-ordered contract the rest of the package relies
on, plus a Cholesky-based definiteness test that is independent of the
eigen path (the two are cross-checked in the test suite).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

#: absolute tolerance for accepting a matrix as symmetric
SYMMETRY_ATOL = 1e-12

__all__ = [
    "SYMMETRY_ATOL",
    "SymEigen",
    "GershgorinReport",
    "sym_eigen",
    "default_pd_tol",
    "is_positive_definite",
    "gershgorin",
    "determinant",
]


def _as_square(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def _require_symmetric(a: np.ndarray) -> None:
    asym = np.max(np.abs(a - a.T)) if a.size else 0.0
    if asym > SYMMETRY_ATOL:
        raise ValueError(
            f"matrix is not symmetric: max |a_ij - a_ji| = {asym:.3e}"
        )


@dataclass(frozen=True)
class SymEigen:
    """Full eigen-decomposition of a symmetric matrix.

    ``values`` are ascending; ``vectors`` has the matching eigenvectors as
    columns and is orthogonal.  Repeated eigenvalues come with an arbitrary
    orthonormal basis of their eigenspace, so comparisons should use the
    eigenvalue multiset, never individual vector entries.
    """

    values: np.ndarray
    vectors: np.ndarray


def sym_eigen(a) -> SymEigen:
    """Eigen-decompose a symmetric matrix; raises if it is not symmetric
    (within ``SYMMETRY_ATOL``)."""
    a = _as_square(a)
    _require_symmetric(a)
    values, vectors = np.linalg.eigh(a)
    return SymEigen(values=values, vectors=vectors)


def default_pd_tol(a: np.ndarray) -> float:
    """Definiteness threshold 1e-10 * max(1, inf-norm): large enough to keep
    a semidefinite boundary matrix (e.g. one with an exactly-zero eigenvalue)
    out of the positive-definite class despite roundoff."""
    a = _as_square(a)
    norm_inf = float(np.max(np.sum(np.abs(a), axis=1))) if a.size else 0.0
    return 1e-10 * max(1.0, norm_inf)


def is_positive_definite(a, tol: float | None = None) -> bool:
    """True iff the smallest eigenvalue exceeds ``tol``.

    Decided by attempting a Cholesky factorization of ``a - tol*I``, which
    succeeds exactly when all eigenvalues of ``a`` exceed ``tol``; this is
    deliberately a different code path from :func:`sym_eigen`.
    """
    a = _as_square(a)
    _require_symmetric(a)
    if tol is None:
        tol = default_pd_tol(a)
    shifted = a - tol * np.eye(a.shape[0])
    try:
        np.linalg.cholesky(shifted)
    except np.linalg.LinAlgError:
        return False
    return True


@dataclass(frozen=True)
class GershgorinReport:
    """Gershgorin discs of a symmetric matrix: intervals centered at the
    diagonal entries with radii equal to the absolute off-diagonal row sums.
    Every eigenvalue lies in their union; ``excludes_zero`` means no disc
    contains 0, hence the matrix is nonsingular."""

    centers: np.ndarray
    radii: np.ndarray
    excludes_zero: bool


def gershgorin(a) -> GershgorinReport:
    a = _as_square(a)
    centers = np.diag(a).copy()
    # zero the diagonal before summing so each radius is exactly the sum of
    # the off-diagonal magnitudes (not a row sum with the center re-subtracted)
    off = np.abs(a)
    off[np.diag_indices_from(off)] = 0.0
    radii = np.sum(off, axis=1)
    excludes = bool(np.all(np.abs(centers) > radii))
    return GershgorinReport(centers=centers, radii=radii, excludes_zero=excludes)


def determinant(a) -> float:
    """Determinant as the product of the eigenvalues of :func:`sym_eigen`."""
    return float(np.prod(sym_eigen(a).values))
