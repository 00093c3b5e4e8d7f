"""Dense-matrix subspace geometry: volumes, principal angles, volume correlation.

All routines work on plain numpy arrays (row-major, float64). Matrices hold
one basis/sample vector per column. Singular values below
``SINGULAR_VALUE_FLOOR`` times the largest one are treated as zero when
deciding numerical rank.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Relative floor under which a singular value counts as zero.
SINGULAR_VALUE_FLOOR = 1e-12

__all__ = [
    "SINGULAR_VALUE_FLOOR",
    "SubspaceBasis",
    "EigenPairs",
    "orthonormalize",
    "volume",
    "log_volume",
    "principal_angles",
    "volume_correlation",
    "stacked_log_volume",
    "incremental_volume_factor",
    "projector_complement_apply",
    "symmetric_eig",
    "elementary_symmetric",
]


def _as_matrix(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise ValueError(f"expected a matrix, got ndim={X.ndim}")
    if not np.all(np.isfinite(X)):
        raise ValueError("matrix entries must be finite")
    return X


@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal basis of a subspace of R^n, one basis vector per column."""

    basis: np.ndarray

    def __post_init__(self):
        B = _as_matrix(self.basis)
        object.__setattr__(self, "basis", B)
        if B.shape[1] > B.shape[0]:
            raise ValueError("subspace dimension exceeds ambient dimension")
        if B.shape[1] > 0:
            G = B.T @ B
            if np.max(np.abs(G - np.eye(B.shape[1]))) > 1e-10:
                raise ValueError("basis columns are not orthonormal")

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


@dataclass(frozen=True)
class EigenPairs:
    """Spectral decomposition with eigenvalues sorted descending."""

    values: np.ndarray
    vectors: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        object.__setattr__(self, "vectors", _as_matrix(self.vectors))
        if np.any(np.diff(self.values) > 1e-12):
            raise ValueError("eigenvalues must be sorted descending")
        if self.vectors.shape[1] != self.values.shape[0]:
            raise ValueError("one eigenvector per eigenvalue required")


def orthonormalize(X, tol: float = 1e-8) -> SubspaceBasis:
    """Orthonormal basis of the column space of ``X``.

    Columns whose residual after projecting out the previously accepted
    directions falls below ``tol * ||X||_F`` are dropped, so the resulting
    dimension is the numerical rank of ``X`` at ``tol``. Each column is
    projected twice (classical Gram-Schmidt applied twice) to keep the
    result orthonormal to ~1e-14 even at n ~ 1000.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    X = _as_matrix(X)
    n = X.shape[0]
    scale = np.linalg.norm(X)
    cols: list[np.ndarray] = []
    if scale == 0.0:
        return SubspaceBasis(np.empty((n, 0)))
    for j in range(X.shape[1]):
        v = X[:, j].copy()
        for _ in range(2):
            if cols:
                Q = np.column_stack(cols)
                v -= Q @ (Q.T @ v)
        nrm = np.linalg.norm(v)
        if nrm >= tol * scale:
            cols.append(v / nrm)
    if not cols:
        return SubspaceBasis(np.empty((n, 0)))
    return SubspaceBasis(np.column_stack(cols))


def _rank_from_singular_values(s: np.ndarray) -> int:
    if s.size == 0 or s[0] <= 0.0:
        return 0
    return int(np.sum(s > SINGULAR_VALUE_FLOOR * s[0]))


def volume(X, d: int) -> float:
    """Product of the ``d`` largest singular values of ``X``.

    Equals sqrt(det(X^T X)) for a full-column-rank X with d columns, and 0
    whenever rank(X) < d.
    """
    X = _as_matrix(X)
    if d < 1 or d > X.shape[1]:
        raise ValueError(f"d={d} out of range for {X.shape[1]} columns")
    s = np.linalg.svd(X, compute_uv=False)
    if _rank_from_singular_values(s) < d:
        return 0.0
    return float(np.prod(s[:d]))


def log_volume(X, d: int) -> float:
    """Sum of logs of the ``d`` largest singular values; -inf if rank(X) < d."""
    X = _as_matrix(X)
    if d < 1 or d > X.shape[1]:
        raise ValueError(f"d={d} out of range for {X.shape[1]} columns")
    s = np.linalg.svd(X, compute_uv=False)
    if _rank_from_singular_values(s) < d:
        return float("-inf")
    return float(np.sum(np.log(s[:d])))


def principal_angles(A: SubspaceBasis, B: SubspaceBasis) -> np.ndarray:
    """Principal angles between span(A) and span(B), ascending, in [0, pi/2].

    Computed as arccos of the singular values of A^T B, clamped to [0, 1]
    before the arccos.
    """
    if A.ambient_dim != B.ambient_dim:
        raise ValueError("ambient dimensions differ")
    if A.dim < 1 or B.dim < 1:
        raise ValueError("both subspaces must have dimension >= 1")
    c = np.linalg.svd(A.basis.T @ B.basis, compute_uv=False)
    c = np.clip(c, 0.0, 1.0)
    return np.sort(np.arccos(c))


def _cross_sines_squared(A: SubspaceBasis, B: SubspaceBasis) -> np.ndarray:
    c = np.linalg.svd(A.basis.T @ B.basis, compute_uv=False)
    c = np.clip(c, 0.0, 1.0)
    return np.clip(1.0 - c * c, 0.0, 1.0)


def volume_correlation(A: SubspaceBasis, B: SubspaceBasis) -> float:
    """Stacked-basis volume of [A, B] normalized by the individual volumes.

    For orthonormal inputs the individual volumes are 1, and the value
    reduces to the product of sines of the principal angles. Lies in [0, 1];
    0 iff the subspaces intersect nontrivially.
    """
    if A.ambient_dim != B.ambient_dim:
        raise ValueError("ambient dimensions differ")
    if A.dim == 0 or B.dim == 0:
        return 1.0
    if A.dim + B.dim > A.ambient_dim:
        return 0.0
    return float(np.prod(np.sqrt(_cross_sines_squared(A, B))))


def stacked_log_volume(A: SubspaceBasis, B: SubspaceBasis) -> float:
    """log of Vol_{dA+dB}([A, B]) for orthonormal blocks; -inf if it vanishes.

    Uses the Gram-form reduction det^{1/2}(B^T P_A^perp B), evaluated through
    the singular values of the cross-Gram matrix A^T B, which keeps the
    computation in a min(dA, dB)-sized problem.
    """
    if A.ambient_dim != B.ambient_dim:
        raise ValueError("ambient dimensions differ")
    if A.dim == 0 or B.dim == 0:
        return 0.0
    if A.dim + B.dim > A.ambient_dim:
        return float("-inf")
    sin2 = _cross_sines_squared(A, B)
    if np.any(sin2 < SINGULAR_VALUE_FLOOR**2):
        return float("-inf")
    return float(0.5 * np.sum(np.log(sin2)))


def projector_complement_apply(B: SubspaceBasis, v) -> np.ndarray:
    """Apply the projector onto the orthogonal complement of span(B) to v.

    Two projection passes keep the residual orthogonal to span(B) to ~1e-15.
    """
    v = np.asarray(v, dtype=float)
    if v.shape != (B.ambient_dim,):
        raise ValueError(f"vector length {v.shape} does not match ambient dim {B.ambient_dim}")
    if B.dim == 0:
        return v.copy()
    Q = B.basis
    r = v - Q @ (Q.T @ v)
    r -= Q @ (Q.T @ r)
    return r


def incremental_volume_factor(X, Yprev, y) -> float:
    """Residual norm of y off the column space of [X, Yprev].

    Satisfies Vol([X, Yprev, y]) = Vol([X, Yprev]) * factor, which makes the
    stacked volume maintainable one appended column at a time.
    """
    X = _as_matrix(X)
    Yprev = _as_matrix(Yprev) if np.asarray(Yprev).size else np.empty((X.shape[0], 0))
    y = np.asarray(y, dtype=float)
    if Yprev.shape[0] != X.shape[0] or y.shape != (X.shape[0],):
        raise ValueError("row dimensions are inconsistent")
    stacked = np.hstack([X, Yprev])
    base = orthonormalize(stacked, tol=1e-12)
    return float(np.linalg.norm(projector_complement_apply(base, y)))


def symmetric_eig(S) -> EigenPairs:
    """Full spectral decomposition of a symmetric matrix, values descending."""
    S = _as_matrix(S)
    if S.shape[0] != S.shape[1]:
        raise ValueError("matrix must be square")
    scale = np.linalg.norm(S)
    if scale > 0 and np.linalg.norm(S - S.T) > 1e-10 * scale:
        raise ValueError("matrix is not symmetric within tolerance")
    w, V = np.linalg.eigh((S + S.T) / 2.0)
    return EigenPairs(values=w[::-1].copy(), vectors=V[:, ::-1].copy())


def elementary_symmetric(values, k: int) -> float:
    """k-th elementary symmetric function of the given values; s_0 = 1."""
    values = np.asarray(values, dtype=float)
    if k < 0 or k > values.size:
        raise ValueError(f"k={k} out of range for {values.size} values")
    e = np.zeros(k + 1)
    e[0] = 1.0
    for x in values:
        e[1:] = e[1:] + x * e[:-1]
    return float(e[k])
