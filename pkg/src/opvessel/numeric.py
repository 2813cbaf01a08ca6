"""Tolerance-aware dense complex linear algebra.

All matrices are plain complex ``numpy`` arrays. Tolerances travel explicitly
in a :class:`ToleranceProfile` so that numerical equality is always defined
by the caller.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg as sla
from scipy.optimize import linear_sum_assignment
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import NotSquareError


@dataclass(frozen=True)
class ToleranceProfile:
    """Numerical equality thresholds.

    Parameters
    ----------
    residual_tol : float
        Relative bound for residuals of identities (``|lhs - rhs| <= tol * scale``).
    rank_tol : float
        Singular values below ``rank_tol * s_max`` count as zero.
    eig_cluster_tol : float
        Eigenvalues (and divisor points) closer than this are identified.
    """

    residual_tol: float = 1e-9
    rank_tol: float = 1e-10
    eig_cluster_tol: float = 1e-7

    def __post_init__(self):
        for name in ("residual_tol", "rank_tol", "eig_cluster_tol"):
            value = getattr(self, name)
            if not (0.0 <= value < 1.0):
                raise ValueError(f"{name} must lie in [0, 1), got {value!r}")

    @property
    def direction_tol(self) -> float:
        # sine of the angle below which two direction vectors are parallel
        return float(np.sqrt(self.residual_tol))


DEFAULT_TOL = ToleranceProfile()


def as_matrix(M, name: str = "matrix") -> np.ndarray:
    """Coerce ``M`` to a finite 2-D complex array."""
    arr = np.array(M, dtype=complex)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


def norm2(M) -> float:
    """Spectral norm, 0 for empty arrays."""
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2)) if M.ndim == 2 else float(np.linalg.norm(M))


def _cutoff(s: np.ndarray, tol: ToleranceProfile) -> float:
    return tol.rank_tol * (s[0] if s.size else 0.0)


def rank_with_tol(M, tol: ToleranceProfile = DEFAULT_TOL) -> int:
    """Number of singular values above ``rank_tol`` times the largest one."""
    M = as_matrix(M)
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > _cutoff(s, tol)))


def nullspace_basis(M, tol: ToleranceProfile = DEFAULT_TOL, cutoff: float | None = None) -> np.ndarray:
    """Orthonormal basis (as columns) of the numerical kernel of ``M``.

    Singular values at or below ``cutoff`` (default ``rank_tol * s_max``)
    count as zero. Pass an absolute ``cutoff`` when ``M`` is a nearly
    singular member of a family with a known scale.
    """
    M = as_matrix(M)
    rows, cols = M.shape
    if M.size == 0:
        return np.eye(cols, dtype=complex)
    _, s, Vh = np.linalg.svd(M)
    if cutoff is None:
        cutoff = _cutoff(s, tol)
    rank = 0 if s[0] == 0.0 else int(np.sum(s > cutoff))
    return Vh[rank:].conj().T.copy()


def orth(M, tol: ToleranceProfile = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the numerical range of ``M``."""
    M = as_matrix(M)
    if M.size == 0:
        return np.zeros((M.shape[0], 0), dtype=complex)
    U, s, _ = np.linalg.svd(M, full_matrices=False)
    rank = 0 if s[0] == 0.0 else int(np.sum(s > _cutoff(s, tol)))
    return U[:, :rank]


def invariant_closure(start, operators, tol: ToleranceProfile = DEFAULT_TOL,
                      reference_scale: float | None = None) -> np.ndarray:
    """Smallest subspace containing ``range(start)`` invariant under ``operators``.

    Block Krylov expansion with re-orthogonalisation. New directions are kept
    only when their component outside the current basis exceeds ``rank_tol``
    relative to ``reference_scale`` (default: largest operand norm).
    """
    start = as_matrix(start)
    dim = start.shape[0]
    ops = [as_matrix(A) for A in operators]
    if reference_scale is None:
        reference_scale = max([norm2(start)] + [norm2(A) for A in ops] + [1e-300])
    Q = np.zeros((dim, 0), dtype=complex)
    frontier = start
    while frontier.shape[1] and Q.shape[1] < dim:
        for _ in range(2):  # classical Gram-Schmidt, twice
            frontier = frontier - Q @ (Q.conj().T @ frontier)
        if frontier.size == 0:
            break
        U, s, _ = np.linalg.svd(frontier, full_matrices=False)
        keep = s > tol.rank_tol * reference_scale
        new = U[:, keep]
        if new.shape[1] == 0:
            break
        Q = np.hstack([Q, new])
        frontier = np.hstack([A @ new for A in ops]) if ops else np.zeros((dim, 0))
    return Q


def cluster_values(values, cluster_tol: float) -> list[np.ndarray]:
    """Group complex values by single-linkage within ``cluster_tol``.

    Returns index arrays, ordered by (real, imag) of each cluster mean.
    """
    values = np.asarray(values, dtype=complex).ravel()
    if values.size == 0:
        return []
    dist = np.abs(values[:, None] - values[None, :])
    adj = csr_matrix(dist <= cluster_tol)
    count, labels = connected_components(adj, directed=False)
    groups = [np.flatnonzero(labels == k) for k in range(count)]
    groups.sort(key=lambda idx: (round(values[idx].mean().real, 12),
                                 round(values[idx].mean().imag, 12)))
    return groups


class EigenCluster(NamedTuple):
    eigenvalue: complex
    right_vector: np.ndarray
    left_vector: np.ndarray
    multiplicity: int


def eig_decompose(M, tol: ToleranceProfile = DEFAULT_TOL) -> list[EigenCluster]:
    """Eigenvalue clusters of a square matrix with multiplicities.

    Eigenvalues within ``eig_cluster_tol`` of each other are merged and the
    cluster mean is reported. The right (left) vector is the singular vector
    of ``M - lambda I`` for its smallest singular value, so that
    ``|M v - lambda v|`` is as small as the data allow even for defective
    clusters.

    Raises
    ------
    NotSquareError
        If ``M`` is not square.
    """
    M = as_matrix(M)
    if M.shape[0] != M.shape[1]:
        raise NotSquareError(f"eig_decompose needs a square matrix, got {M.shape}")
    n = M.shape[0]
    if n == 0:
        return []
    ev = np.linalg.eigvals(M)
    out = []
    eye = np.eye(n)
    for idx in cluster_values(ev, tol.eig_cluster_tol):
        lam = complex(ev[idx].mean())
        U, _, Vh = np.linalg.svd(M - lam * eye)
        out.append(EigenCluster(lam, Vh[-1].conj().copy(), U[:, -1].copy(), len(idx)))
    return out


def multiset_distance(achieved, desired) -> float:
    """Largest deviation between two equal-size multisets of complex numbers.

    Points are paired by optimal assignment. Repeated desired values are
    compared through the mean of the achieved values assigned to them, which
    is the well-conditioned quantity for a defective eigenvalue.
    """
    a = np.asarray(achieved, dtype=complex).ravel()
    d = np.asarray(desired, dtype=complex).ravel()
    if a.size != d.size:
        return float("inf")
    if a.size == 0:
        return 0.0
    rows, cols = linear_sum_assignment(np.abs(d[:, None] - a[None, :]))
    assigned = np.empty_like(a)
    assigned[rows] = a[cols]
    worst = 0.0
    for idx in cluster_values(d, 0.0):
        worst = max(worst, abs(assigned[idx].mean() - d[idx].mean()))
    return float(worst)


def schur_triangularize(M):
    """Complex Schur form ``M = Q T Q^H``."""
    T, Q = sla.schur(as_matrix(M), output="complex")
    return T, Q
