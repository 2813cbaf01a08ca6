"""Transfer functions of vessels and realized rational matrix functions.

The vessel transfer function maps the input fiber over a curve point to the
output fiber,

    S(l1, l2) v = (D + C (xi1 (l1 - A1) + xi2 (l2 - A2))^-1 B~ (xi1 s1 + xi2 s2)) v,

and does not depend on ``xi``. Along a regular direction it restricts to the
ordinary realization ``S_xi(l) = D + C (l - A_xi)^-1 B_xi``; pole and zero
divisors are read from the eigenstructure of such realizations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.linalg as sla

from .errors import (
    NonCommutingError,
    NonMinimalError,
    NumericalInconsistencyError,
    SingularMatrixError,
    SpectrumPointError,
    DimensionError,
)
from .numeric import (
    DEFAULT_TOL,
    ToleranceProfile,
    as_matrix,
    cluster_values,
    eig_decompose,
    invariant_closure,
    norm2,
    rank_with_tol,
    schur_triangularize,
)
from .vessel import (
    BivariatePoly,
    CurvePoint,
    Direction,
    Vessel,
    discriminant_polys,
    fiber_residual,
    is_regular_direction,
    is_smooth_point,
    on_curve_residual,
    sigma_xi,
)

# ---------------------------------------------------------------------------
# joint spectrum


class SpectrumPair(NamedTuple):
    lambda1: complex
    lambda2: complex
    multiplicity: int
    on_curve: bool | None
    smooth: bool | None


@dataclass
class SpectrumReport:
    pairs: list[SpectrumPair] = field(default_factory=list)

    @property
    def total_multiplicity(self) -> int:
        return sum(p.multiplicity for p in self.pairs)

    def points(self) -> np.ndarray:
        return np.array([[p.lambda1, p.lambda2] for p in self.pairs], dtype=complex).reshape(-1, 2)

    def distance(self, lambda1, lambda2) -> float:
        """Euclidean distance in C^2 from a point to the nearest spectrum pair."""
        pts = self.points()
        if pts.size == 0:
            return float("inf")
        return float(np.min(np.hypot(np.abs(pts[:, 0] - lambda1), np.abs(pts[:, 1] - lambda2))))


def joint_spectrum(A1, A2, tol: ToleranceProfile = DEFAULT_TOL,
                   curve: BivariatePoly | None = None, seed: int = 7) -> SpectrumReport:
    """Joint spectrum of a commuting pair.

    ``A1 + t A2`` for a fixed pseudo-random ``t`` is brought to complex Schur
    form; the same unitary triangularizes ``A1`` and ``A2`` whenever that
    combination has simple spectrum, and the pairs are read off the
    diagonals. A cluster of size ``k`` of the combination is handled by
    compressing both operators to its generalized eigenspace and taking
    ``trace / k``, which is the numerically stable mean.

    With ``curve`` given, each pair is flagged on-curve and smooth.
    """
    A1, A2 = as_matrix(A1, "A1"), as_matrix(A2, "A2")
    n = A1.shape[0]
    comm = norm2(A1 @ A2 - A2 @ A1)
    if comm > tol.residual_tol * max(2 * norm2(A1) * norm2(A2), 1e-300):
        raise NonCommutingError(f"A1 and A2 do not commute (|[A1, A2]| = {comm:.3g})")
    rng = np.random.default_rng(seed)
    t = complex(rng.uniform(0.5, 1.5) * np.exp(2j * np.pi * rng.uniform()))
    M = A1 + t * A2
    T, Q = schur_triangularize(M)
    T1 = Q.conj().T @ A1 @ Q
    T2 = Q.conj().T @ A2 @ Q
    diag = np.diag(T)
    pairs = []
    for idx in cluster_values(diag, tol.eig_cluster_tol * max(1.0, norm2(M))):
        k = len(idx)
        if k == 1:
            l1, l2 = T1[idx[0], idx[0]], T2[idx[0], idx[0]]
        else:
            mu = diag[idx].mean()
            G = np.linalg.matrix_power(M - mu * np.eye(n), k)
            _, _, Vh = np.linalg.svd(G)
            basis = Vh[-k:].conj().T
            l1 = np.trace(basis.conj().T @ A1 @ basis) / k
            l2 = np.trace(basis.conj().T @ A2 @ basis) / k
        on, sm = None, None
        if curve is not None:
            pt = CurvePoint.affine(l1, l2)
            on = on_curve_residual(curve, pt) <= tol.residual_tol
            sm = is_smooth_point(curve, l1, l2, tol)
        pairs.append(SpectrumPair(complex(l1), complex(l2), k, on, sm))
    return SpectrumReport(pairs)


def vessel_spectrum(V: Vessel, tol: ToleranceProfile = DEFAULT_TOL) -> SpectrumReport:
    return joint_spectrum(V.A1, V.A2, tol, curve=discriminant_polys(V, tol).p_in)


# ---------------------------------------------------------------------------
# vessel transfer function

# fixed fan of 16 real directions used to pick a well-conditioned resolvent
_FAN = [Direction(np.cos(a), np.sin(a)) for a in np.pi * np.arange(16) / 16]


def _resolvent_operator(V: Vessel, l1, l2, xi: Direction) -> np.ndarray:
    eye = np.eye(V.n)
    return xi.xi1 * (l1 * eye - V.A1) + xi.xi2 * (l2 * eye - V.A2)


def best_direction(V: Vessel, point: CurvePoint, tol: ToleranceProfile = DEFAULT_TOL) -> Direction:
    """Direction from the fixed fan giving the best-conditioned resolvent.

    Raises
    ------
    SpectrumPointError
        If every direction gives a numerically singular operator, i.e. the
        point belongs to the joint spectrum.
    """
    l1, l2 = point.coords()
    best, best_ratio = None, -1.0
    for xi in _FAN:
        N = _resolvent_operator(V, l1, l2, xi)
        if V.n == 0:
            return xi
        s = np.linalg.svd(N, compute_uv=False)
        ratio = s[-1] / s[0] if s[0] > 0 else 0.0
        if ratio > best_ratio:
            best, best_ratio = xi, ratio
    if best_ratio <= tol.rank_tol:
        raise SpectrumPointError(
            f"point {point.coords()} is a pole or joint-spectrum point",
            {"inverse_condition": best_ratio},
        )
    return best


def transfer_eval(V: Vessel, point: CurvePoint, v, tol: ToleranceProfile = DEFAULT_TOL,
                  xi: Direction | None = None, check: bool = True) -> np.ndarray:
    """Apply the transfer function at a curve point to an input fiber vector.

    At a point over the line at infinity the value is ``D v``. Otherwise the
    resolvent direction is ``xi`` if given, else the best-conditioned member
    of a fixed fan. With ``check`` the input must lie in the input fiber and
    the output is verified to lie in the output fiber.
    """
    v = np.asarray(v, dtype=complex).ravel()
    if not point.is_affine:
        return V.D @ v
    l1, l2 = point.coords()
    if check and fiber_residual(V, point, v, side="input") > tol.residual_tol:
        raise NumericalInconsistencyError("vector is not in the input fiber at this point")
    if xi is None:
        xi = best_direction(V, point, tol)
    N = _resolvent_operator(V, l1, l2, xi)
    if rank_with_tol(N, tol) < V.n:
        raise SpectrumPointError(f"resolvent singular at {point.coords()} along {xi.as_tuple()}")
    w = V.D @ v + V.C @ np.linalg.solve(N, V.B_tilde @ (sigma_xi(V, xi) @ v))
    if check:
        res = fiber_residual(V, point, w, side="output")
        if res > tol.residual_tol:
            raise NumericalInconsistencyError(
                f"transfer output left the output fiber (relative residual {res:.3g})"
            )
    return w


# ---------------------------------------------------------------------------
# realized rational matrix functions


@dataclass(frozen=True, eq=False)
class RealizedRMF:
    """``W(l) = D + C (l I - A)^-1 B``."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    label: str = ""

    def __post_init__(self):
        for name in ("A", "B", "C", "D"):
            object.__setattr__(self, name, as_matrix(getattr(self, name), name))
        k = self.A.shape[0]
        if self.A.shape != (k, k) or self.B.shape[0] != k or self.C.shape[1] != k:
            raise DimensionError("inconsistent realization shapes")
        if self.D.shape != (self.C.shape[0], self.B.shape[1]):
            raise DimensionError("D shape does not match C and B")

    @property
    def order(self) -> int:
        return self.A.shape[0]

    def __call__(self, lam):
        return rmf_eval(self, lam)


def restricted_transfer(V: Vessel, xi: Direction, tol: ToleranceProfile = DEFAULT_TOL) -> RealizedRMF:
    """Realization ``(A_xi, B_xi, C, D)`` of the restricted transfer function."""
    if not is_regular_direction(V, xi, tol):
        raise SingularMatrixError(f"direction {xi.as_tuple()} is not regular")
    A_xi = xi.xi1 * V.A1 + xi.xi2 * V.A2
    B_xi = V.B_tilde @ sigma_xi(V, xi)
    return RealizedRMF(A_xi, B_xi, V.C, V.D, label=f"S_xi{xi.as_tuple()}")


def rmf_eval(W: RealizedRMF, lam, tol: ToleranceProfile = DEFAULT_TOL) -> np.ndarray:
    """``D + C (lam I - A)^-1 B``; ``lam = inf`` gives ``D``.

    Raises
    ------
    SpectrumPointError
        At a pole; the payload carries the distance to the nearest eigenvalue.
    """
    if np.isinf(lam):
        return W.D.copy()
    if W.order == 0:
        return W.D.copy()
    M = lam * np.eye(W.order) - W.A
    s = np.linalg.svd(M, compute_uv=False)
    if s[-1] <= tol.rank_tol * max(s[0], 1.0):
        dist = float(np.min(np.abs(np.linalg.eigvals(W.A) - lam)))
        raise SpectrumPointError(f"lambda = {lam} is at a pole", {"distance": dist})
    return W.D + W.C @ np.linalg.solve(M, W.B)


def rmf_inverse(W: RealizedRMF, tol: ToleranceProfile = DEFAULT_TOL) -> RealizedRMF:
    """Realization of ``W^-1``: ``(A - B D^-1 C, B D^-1, -D^-1 C, D^-1)``."""
    q = W.D.shape[0]
    if W.D.shape[1] != q or rank_with_tol(W.D, tol) < q:
        raise SingularMatrixError("inverse needs square invertible D")
    Dinv = np.linalg.inv(W.D)
    return RealizedRMF(W.A - W.B @ Dinv @ W.C, W.B @ Dinv, -Dinv @ W.C, Dinv,
                       label=f"inv({W.label})")


def rmf_cascade(W1: RealizedRMF, W2: RealizedRMF) -> RealizedRMF:
    """Realization of the product ``W1(l) W2(l)`` (``W2`` acts first)."""
    k1, k2 = W1.order, W2.order
    A = np.block([[W1.A, W1.B @ W2.C], [np.zeros((k2, k1)), W2.A]])
    B = np.vstack([W1.B @ W2.D, W2.B])
    C = np.hstack([W1.C, W1.D @ W2.C])
    return RealizedRMF(A, B, C, W1.D @ W2.D, label=f"({W1.label})*({W2.label})")


def _modal(W: RealizedRMF, tol: ToleranceProfile):
    """Per-mode input/output gains when ``A`` has simple, well-conditioned eigenvalues.

    Returns ``(eigvals, right, left, b_gain, c_gain)`` with ``left^H right = I``
    or ``None`` if a modal test would be unreliable.
    """
    n = W.order
    if n == 0:
        return None
    ev, vl, vr = sla.eig(W.A, left=True, right=True)
    if any(len(idx) > 1 for idx in cluster_values(ev, tol.eig_cluster_tol)):
        return None
    vr = vr / np.linalg.norm(vr, axis=0)
    vl = vl / np.linalg.norm(vl, axis=0)
    pairing = np.sum(vl.conj() * vr, axis=0)
    if np.min(np.abs(pairing)) < 1e-8:
        return None
    b_gain = np.linalg.norm(vl.conj().T @ W.B, axis=1)
    c_gain = np.linalg.norm(W.C @ vr, axis=0)
    vl = vl / pairing.conj()
    return ev, vr, vl, b_gain, c_gain


def _modal_keep(W: RealizedRMF, tol: ToleranceProfile, modal) -> tuple[np.ndarray, np.ndarray]:
    scale = max(norm2(W.A), norm2(W.B), norm2(W.C), 1e-300)
    _, _, _, b_gain, c_gain = modal
    return b_gain > tol.rank_tol * scale, c_gain > tol.rank_tol * scale


def minimality_ranks(W: RealizedRMF, tol: ToleranceProfile = DEFAULT_TOL) -> tuple[int, int]:
    """Dimensions of the controllable and observable subspaces.

    For simple, well-conditioned spectra this is the modal (PBH) test; a long
    single-input Krylov sequence is too ill-conditioned to decide near
    cancellations. Otherwise orthogonalized block Krylov closure.
    """
    modal = _modal(W, tol)
    if modal is not None:
        ctrl, obs = _modal_keep(W, tol, modal)
        return int(ctrl.sum()), int(obs.sum())
    scale = max(norm2(W.A), norm2(W.B), norm2(W.C), 1e-300)
    rc = invariant_closure(W.B, [W.A], tol, reference_scale=scale).shape[1]
    ro = invariant_closure(W.C.conj().T, [W.A.conj().T], tol, reference_scale=scale).shape[1]
    return rc, ro


def is_minimal(W: RealizedRMF, tol: ToleranceProfile = DEFAULT_TOL) -> bool:
    rc, ro = minimality_ranks(W, tol)
    return rc == W.order and ro == W.order


def minimal_realization(W: RealizedRMF, tol: ToleranceProfile = DEFAULT_TOL) -> RealizedRMF:
    """Remove uncontrollable and unobservable states.

    Modal truncation when the spectrum is simple and well conditioned (the
    kept modes give a diagonal realization); otherwise orthogonal Krylov
    projections, repeated until the order stops dropping.
    """
    modal = _modal(W, tol)
    if modal is not None:
        ev, vr, vl, _, _ = modal
        ctrl, obs = _modal_keep(W, tol, modal)
        keep = ctrl & obs
        return RealizedRMF(np.diag(ev[keep]), vl[:, keep].conj().T @ W.B, W.C @ vr[:, keep], W.D,
                           label=f"min({W.label})")
    A, B, C = W.A, W.B, W.C
    while True:
        order = A.shape[0]
        scale = max(norm2(A), norm2(B), norm2(C), 1e-300)
        Qc = invariant_closure(B, [A], tol, reference_scale=scale)
        A, B, C = Qc.conj().T @ A @ Qc, Qc.conj().T @ B, C @ Qc
        Qo = invariant_closure(C.conj().T, [A.conj().T], tol, reference_scale=scale)
        A, B, C = Qo.conj().T @ A @ Qo, Qo.conj().T @ B, C @ Qo
        if A.shape[0] == order or A.shape[0] == 0:
            return RealizedRMF(A, B, C, W.D, label=f"min({W.label})")


# ---------------------------------------------------------------------------
# divisors


class DivisorEntry(NamedTuple):
    point: object  # complex number or CurvePoint
    multiplicity: int
    direction: np.ndarray | None = None


@dataclass
class Divisor:
    """Finite formal sum of points with positive multiplicities.

    A direction (row vector) is attached only to simple points.
    """

    entries: list[DivisorEntry] = field(default_factory=list)

    def __post_init__(self):
        for e in self.entries:
            if e.multiplicity < 1:
                raise ValueError("multiplicities must be positive")
            if e.direction is not None and e.multiplicity != 1:
                raise ValueError("directions are only carried by simple points")

    @property
    def degree(self) -> int:
        return sum(e.multiplicity for e in self.entries)

    def points(self) -> list:
        return [e.point for e in self.entries]

    def as_multiset(self) -> np.ndarray:
        """Points repeated by multiplicity (complex points only)."""
        return np.array([e.point for e in self.entries for _ in range(e.multiplicity)], dtype=complex)

    @classmethod
    def from_points(cls, points, tol: ToleranceProfile = DEFAULT_TOL) -> "Divisor":
        pts = np.asarray(points, dtype=complex).ravel()
        return cls([DivisorEntry(complex(pts[idx].mean()), len(idx))
                    for idx in cluster_values(pts, tol.eig_cluster_tol)])


def _unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex).ravel()
    nrm = np.linalg.norm(v)
    return v / nrm if nrm > 0 else v


def rmf_pole_divisor(W: RealizedRMF, tol: ToleranceProfile = DEFAULT_TOL) -> Divisor:
    """Left pole divisor of a minimal realization.

    Locations and multiplicities are the eigenvalue clusters of ``A``. At a
    simple pole with left eigenvector ``w`` the residue of ``W`` has row space
    spanned by ``w^H B``, which is recorded as the direction.

    Raises
    ------
    NonMinimalError
        If the realization is not minimal (pole data unreliable).
    """
    rc, ro = minimality_ranks(W, tol)
    if rc != W.order or ro != W.order:
        raise NonMinimalError("pole data unreliable: realization is not minimal",
                              {"controllable_rank": rc, "observable_rank": ro, "order": W.order})
    entries = []
    for cl in eig_decompose(W.A, tol):
        direction = None
        if cl.multiplicity == 1:
            direction = _unit(cl.left_vector.conj() @ W.B)
        entries.append(DivisorEntry(cl.eigenvalue, cl.multiplicity, direction))
    return Divisor(entries)


def rmf_zero_divisor(W: RealizedRMF, tol: ToleranceProfile = DEFAULT_TOL) -> Divisor:
    """Left zero divisor: the pole divisor of the (minimalized) inverse."""
    return rmf_pole_divisor(minimal_realization(rmf_inverse(W, tol), tol), tol)


def directions_parallel(a, b, tol: ToleranceProfile = DEFAULT_TOL) -> bool:
    a, b = _unit(a), _unit(b)
    if a.shape != b.shape:
        return False
    cos = min(abs(np.vdot(a, b)), 1.0)
    return float(np.sqrt(max(0.0, 1.0 - cos * cos))) <= tol.direction_tol


def _point_distance(p, q) -> float:
    if isinstance(p, CurvePoint) or isinstance(q, CurvePoint):
        if not (isinstance(p, CurvePoint) and isinstance(q, CurvePoint)) or p.kind != q.kind:
            return float("inf")
        return float(np.hypot(abs(p.lambda1 - q.lambda1), abs(p.lambda2 - q.lambda2)))
    return float(abs(complex(p) - complex(q)))


def divisor_contains(small: Divisor, big: Divisor, tol: ToleranceProfile = DEFAULT_TOL) -> bool:
    """``small <= big`` as divisors, with direction agreement at simple points."""
    for e in small.entries:
        matches = [f for f in big.entries
                   if _point_distance(e.point, f.point) <= tol.eig_cluster_tol]
        if sum(f.multiplicity for f in matches) < e.multiplicity:
            return False
        if e.multiplicity == 1 and e.direction is not None:
            simple = [f for f in matches if f.multiplicity == 1 and f.direction is not None]
            if len(simple) == len(matches) and simple:
                if not any(directions_parallel(e.direction, f.direction, tol) for f in simple):
                    return False
    return True


@dataclass
class PlacementWitness:
    zeros_contained: bool
    infinity_match: bool
    poles_R_contained: bool
    lemma_consistent: bool
    zeros_S: Divisor
    zeros_T: Divisor
    poles_S: Divisor
    poles_R: Divisor
    R: RealizedRMF


def quotient_realization(T: RealizedRMF, S: RealizedRMF, tol: ToleranceProfile = DEFAULT_TOL) -> RealizedRMF:
    """Minimal realization of ``R = T^-1 S``."""
    return minimal_realization(rmf_cascade(rmf_inverse(T, tol), S), tol)


def placement_condition_check(S: RealizedRMF, T: RealizedRMF, tol: ToleranceProfile = DEFAULT_TOL):
    """Check whether ``T`` is reachable from ``S`` by admissible state feedback.

    Conditions: left zeros of ``T`` contained in those of ``S`` and equal
    values at infinity (``D`` terms). As a consistency check the pole divisor
    of ``R = T^-1 S`` is compared with that of ``S``; the two containments
    must agree.

    Returns
    -------
    (conditions_hold, witness)
    """
    if S.D.shape != T.D.shape or S.D.shape[0] != S.D.shape[1]:
        raise DimensionError("S and T must be square of equal size")
    zS, zT = rmf_zero_divisor(S, tol), rmf_zero_divisor(T, tol)
    zeros_ok = divisor_contains(zT, zS, tol)
    inf_ok = bool(np.linalg.norm(S.D - T.D) <= tol.residual_tol * max(norm2(S.D), 1e-300))
    R = quotient_realization(T, S, tol)
    pS, pR = rmf_pole_divisor(S, tol), rmf_pole_divisor(R, tol)
    poles_ok = divisor_contains(pR, pS, tol)
    witness = PlacementWitness(zeros_ok, inf_ok, poles_ok, poles_ok == zeros_ok,
                               zS, zT, pS, pR, R)
    return zeros_ok and inf_ok, witness
