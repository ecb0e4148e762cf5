"""Dense symmetric linear algebra used throughout the library.

All routines operate on small (p <= ~50) dense matrices, favour robustness
over speed, and refuse bad input loudly: asymmetric matrices are rejected
rather than symmetrized, and near-singular SPD factorizations raise instead
of falling back to a pseudo-inverse.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import cho_solve

from .exceptions import DimensionMismatch, NoConvergence, NotPositiveDefinite, NotSymmetric

# Relative symmetry gate: |a - a.T| must not exceed SYM_RTOL * max|a|.
SYM_RTOL = 1e-10


def _as_square_symmetric(a, name: str = "matrix") -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")
    scale = np.abs(a).max() if a.size else 0.0
    if np.abs(a - a.T).max(initial=0.0) > SYM_RTOL * scale:
        raise NotSymmetric(f"{name} is not symmetric within {SYM_RTOL:g} relative")
    return a


def _cholesky_spd(a: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor of a, with an explicit near-singularity gate.

    The pivot at step j of a Cholesky factorization is L[j, j]**2; any pivot
    at or below p * eps * max(diag(a)) marks the matrix as numerically not
    positive definite and raises.
    """
    p = a.shape[0]
    try:
        lower = np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite("Cholesky factorization failed") from exc
    pivot_floor = p * np.finfo(float).eps * np.diag(a).max(initial=0.0)
    if np.min(np.diag(lower)) ** 2 <= pivot_floor:
        raise NotPositiveDefinite(
            f"Cholesky pivot at or below the singularity threshold {pivot_floor:.3e}"
        )
    return lower


def solve_spd(a, b):
    """Solve a @ x = b for symmetric positive definite ``a``.

    ``b`` may be a vector or a matrix of stacked right-hand sides.

    Raises
    ------
    NotSymmetric
        If ``a`` fails the relative symmetry gate.
    NotPositiveDefinite
        If the factorization fails or a pivot falls at or below
        p * eps * max-diagonal.
    DimensionMismatch
        If shapes are incompatible.
    """
    a = _as_square_symmetric(a, "a")
    b = np.asarray(b, dtype=float)
    if b.shape[0] != a.shape[0]:
        raise DimensionMismatch(f"b has leading dimension {b.shape[0]}, expected {a.shape[0]}")
    lower = _cholesky_spd(a)
    return cho_solve((lower, True), b)


def eig_sym_extremes(a) -> tuple[float, float]:
    """Smallest and largest eigenvalue of a symmetric matrix."""
    a = _as_square_symmetric(a, "a")
    try:
        w = np.linalg.eigvalsh(a)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence("symmetric eigenvalue iteration did not converge") from exc
    return float(w[0]), float(w[-1])


def op_norm(a) -> float:
    """Spectral (operator) norm, sqrt of the largest eigenvalue of a.T @ a."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix contains non-finite entries")
    try:
        return float(np.linalg.norm(a, 2))
    except np.linalg.LinAlgError as exc:
        raise NoConvergence("SVD iteration did not converge") from exc


def psd_leq(a, b, tol: float = 0.0) -> bool:
    """True iff ``a`` precedes ``b`` in the PSD order: lambda_min(b - a) >= -tol."""
    a = _as_square_symmetric(a, "a")
    b = _as_square_symmetric(b, "b")
    if a.shape != b.shape:
        raise DimensionMismatch(f"shape mismatch: {a.shape} vs {b.shape}")
    lo, _ = eig_sym_extremes(b - a)
    return lo >= -tol


def inv_sqrt_spd(a) -> np.ndarray:
    """Symmetric inverse square root ``m`` with m @ a @ m = identity.

    Computed from the full spectral decomposition; eigenvalues at or below
    the relative singularity threshold raise NotPositiveDefinite.
    """
    a = _as_square_symmetric(a, "a")
    p = a.shape[0]
    try:
        w, v = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence("symmetric eigenvalue iteration did not converge") from exc
    if w[0] <= p * np.finfo(float).eps * max(w[-1], 0.0):
        raise NotPositiveDefinite(f"eigenvalue {w[0]:.3e} at or below the singularity threshold")
    m = (v / np.sqrt(w)) @ v.T
    return (m + m.T) / 2.0
