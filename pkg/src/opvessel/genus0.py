"""Pole placement over line bundles on a genus-0 curve.

Setting: a single-input vessel whose discriminant curve is the line
``c l1 - l2 + d = 0``. Along a regular direction the vessel restricts to a
classical realization ``(A_xi, B_xi, C, D)`` and the curve becomes the
projective line with coordinate ``t = xi1 l1 + xi2 l2`` and one point at
infinity.

Placement works through the controller function ``R = 1 + K (t - A_xi)^-1 B_xi``:
``g = R - 1`` belongs to ``L(Z - D_inf)`` where ``Z`` is the open-loop pole
divisor, the interpolation conditions ``g(p_j) = -1`` put the closed-loop
poles at ``p_j``, and ``F = -K`` is read back from ``g``. Ackermann's formula
serves as an independent check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.linalg as sla

from .errors import DimensionError, NFTupleError, NonMinimalError, PlacementError, VesselError
from .feedback import closed_loop, is_admissible
from .numeric import (
    DEFAULT_TOL,
    ToleranceProfile,
    as_matrix,
    cluster_values,
    eig_decompose,
    multiset_distance,
    nullspace_basis,
    rank_with_tol,
)
from .transfer import Divisor, DivisorEntry, placement_condition_check, restricted_transfer
from .vessel import Direction, Vessel, find_regular_direction, minimality_report

INF = float("inf")


def is_infinite(p) -> bool:
    return bool(np.isinf(p))


# ---------------------------------------------------------------------------
# line-family vessels


@dataclass
class LineVesselSpec:
    """Data of a single-input vessel on the line ``c l1 - l2 + d = 0``.

    ``A2 = c A1 + d I``, ``sigma2 = c sigma1``, ``gamma = d sigma1``; the
    output-side scalars follow from the vessel conditions:
    ``sigma1* = D~ sigma1 / D``, ``sigma2* = c sigma1*``, ``gamma* = d sigma1*``.
    """

    A1: np.ndarray
    b: np.ndarray
    c_row: np.ndarray
    c: complex = 1.0
    d: complex = 0.0
    sigma1: complex = 1.0
    D: complex = 1.0
    D_tilde: complex = 1.0


def build_line_vessel(spec: LineVesselSpec, tol: ToleranceProfile = DEFAULT_TOL) -> Vessel:
    """Vessel of a :class:`LineVesselSpec`; rejects uncontrollable or unobservable data."""
    A1 = as_matrix(spec.A1, "A1")
    n = A1.shape[0]
    b = as_matrix(spec.b, "b").reshape(n, 1)
    c_row = as_matrix(spec.c_row, "c_row").reshape(1, n)
    if spec.sigma1 == 0 or spec.D == 0 or spec.D_tilde == 0:
        raise VesselError("sigma1, D and D_tilde must be nonzero")
    c, d, s1 = complex(spec.c), complex(spec.d), complex(spec.sigma1)
    s1_star = spec.D_tilde * s1 / spec.D
    V = Vessel(
        A1=A1, A2=c * A1 + d * np.eye(n), B_tilde=b, C=c_row,
        D=[[spec.D]], D_tilde=[[spec.D_tilde]],
        sigma1=[[s1]], sigma2=[[c * s1]], gamma=[[d * s1]],
        sigma1_star=[[s1_star]], sigma2_star=[[c * s1_star]], gamma_star=[[d * s1_star]],
    )
    rep = minimality_report(V, tol)
    if not rep.minimal:
        raise NonMinimalError("line vessel data are not controllable and observable", rep.ranks)
    return V


# ---------------------------------------------------------------------------
# feedback dimension


class FeedbackDimension(NamedTuple):
    value: int
    exact: bool


def feedback_dimension(genus: int, n: int, m: int, ell_correction: int = 0) -> FeedbackDimension:
    """``l(Z - D_inf) = l(K - Z + D_inf) + n - m - g + 1`` (Riemann-Roch).

    ``ell_correction`` is ``l(K - Z + D_inf)``. It vanishes automatically when
    ``deg(K - Z + D_inf) = 2g - 2 - (n - m) < 0``, in which case the value is
    exact; otherwise (genus >= 2) only the lower bound is certain. In genus 1
    with ``n = m`` the correction is 1 exactly when ``Z - D_inf`` is principal.
    """
    if min(genus, n, m, ell_correction) < 0:
        raise ValueError("genus, dimensions and correction must be nonnegative")
    degree = n - m
    if degree > 2 * genus - 2:
        return FeedbackDimension(max(degree - genus + 1, 0), True)
    if genus == 0:
        # degree <= -2 here: L(Z - D_inf) = 0
        return FeedbackDimension(0, True)
    if genus == 1:
        if degree < 0:
            return FeedbackDimension(0, True)
        return FeedbackDimension(min(ell_correction, 1), True)
    return FeedbackDimension(max(degree - genus + 1 + ell_correction, 0), False)


# ---------------------------------------------------------------------------
# L(Z - D_inf) on the projective line


@dataclass(frozen=True, eq=False)
class RationalFunctionBasis:
    """Basis of ``L(Z - D_inf)`` in partial-fraction coordinates.

    The coordinate functions are ``1`` followed by ``(t - z)**-j`` for each
    support point ``z`` of ``Z`` and ``j = 1 .. ord_z``; ``coeffs[i]`` holds
    the coordinates of the i-th basis function.
    """

    support: list[tuple[complex, int]]
    coeffs: np.ndarray
    marked: list = field(default_factory=list)

    @property
    def dim(self) -> int:
        return self.coeffs.shape[0]

    def monomials(self, t) -> np.ndarray:
        if is_infinite(t):
            vals = [1.0] + [0.0 for _, k in self.support for _ in range(k)]
            return np.array(vals, dtype=complex)
        vals = [1.0 + 0j]
        for z, k in self.support:
            u = 1.0 / (t - z)
            vals.extend(u ** j for j in range(1, k + 1))
        return np.array(vals, dtype=complex)

    def __call__(self, t) -> np.ndarray:
        """Values of all basis functions at ``t``."""
        return self.coeffs @ self.monomials(t)

    def combination(self, a) -> np.ndarray:
        """Partial-fraction coordinates of ``sum a_i f_i``."""
        return np.asarray(a, dtype=complex) @ self.coeffs

    def pole_points(self) -> list[complex]:
        return [z for z, _ in self.support]


def _support(Z: Divisor) -> list[tuple[complex, int]]:
    pts = []
    for e in Z.entries:
        if is_infinite(e.point):
            raise ValueError("Z must be supported on affine points")
        pts.append((complex(e.point), int(e.multiplicity)))
    return pts


def basis_L_genus0(Z: Divisor, D_inf: Divisor, tol: ToleranceProfile = DEFAULT_TOL) -> RationalFunctionBasis:
    """Basis of rational functions with poles bounded by ``Z`` vanishing on ``D_inf``.

    ``D_inf`` consists of distinct simple points, possibly ``inf``. The
    result has dimension ``max(deg Z - deg D_inf + 1, 0)``; when the kernel
    is aligned with the coordinates (e.g. ``D_inf = {inf}``) the basis is
    the coordinate one ``{(t - z)**-j}``.
    """
    support = _support(Z)
    marked = []
    for e in D_inf.entries:
        if e.multiplicity != 1:
            raise ValueError("D_inf must consist of distinct simple points")
        if not is_infinite(e.point) and any(abs(e.point - z) <= tol.eig_cluster_tol for z, _ in support):
            raise ValueError("marked points must be off the support of Z")
        marked.append(e.point)
    probe = RationalFunctionBasis(support, np.zeros((0, 1 + Z.degree)))
    n_coords = 1 + Z.degree
    if not marked:
        return RationalFunctionBasis(support, np.eye(n_coords, dtype=complex), marked)
    E = np.array([probe.monomials(q) for q in marked])
    K = nullspace_basis(E, tol)
    if K.shape[1] == 0:
        return RationalFunctionBasis(support, np.zeros((0, n_coords), dtype=complex), marked)
    Kt = K.T
    _, _, piv = sla.qr(Kt, pivoting=True)
    piv = np.sort(piv[: Kt.shape[0]])
    coeffs = np.linalg.solve(Kt[:, piv], Kt)
    coeffs[np.abs(coeffs) < 1e-14] = 0.0
    return RationalFunctionBasis(support, coeffs, marked)


def _check_points(basis: RationalFunctionBasis, points, tol: ToleranceProfile) -> np.ndarray:
    pts = np.asarray(points, dtype=complex).ravel()
    if pts.size != basis.dim:
        raise DimensionError(f"need exactly {basis.dim} points, got {pts.size}")
    for idx in cluster_values(pts, tol.eig_cluster_tol):
        if len(idx) > 1:
            raise ValueError("interpolation points must be pairwise distinct")
    for p in pts:
        if not np.isfinite(p):
            raise ValueError("interpolation points must be affine")
        if any(abs(p - z) <= tol.eig_cluster_tol for z in basis.pole_points()):
            raise ValueError(f"point {p} lies on the pole support of the basis")
        if any(not is_infinite(q) and abs(p - q) <= tol.eig_cluster_tol for q in basis.marked):
            raise ValueError(f"point {p} is a marked point of D_inf")
    return pts


def evaluation_matrix(basis: RationalFunctionBasis, points) -> np.ndarray:
    """``M[i, j] = f_i(p_j)``."""
    return np.column_stack([basis(p) for p in points]) if len(points) else np.zeros((0, 0))


def nf_determinant(basis: RationalFunctionBasis, points, tol: ToleranceProfile = DEFAULT_TOL) -> complex:
    """Determinant of ``f_i(p_j)``; it vanishes exactly on the no-feedback set."""
    pts = _check_points(basis, points, tol)
    return complex(np.linalg.det(evaluation_matrix(basis, pts))) if pts.size else 1.0 + 0j


def solve_interpolation(basis: RationalFunctionBasis, points, tol: ToleranceProfile = DEFAULT_TOL) -> np.ndarray:
    """Coefficients ``a`` with ``sum_i a_i f_i(p_j) = -1`` for every ``j``.

    Raises
    ------
    NFTupleError
        If the evaluation matrix is singular (tuple in the no-feedback set).
    """
    pts = _check_points(basis, points, tol)
    if pts.size == 0:
        return np.zeros(0, dtype=complex)
    M = evaluation_matrix(basis, pts)
    if rank_with_tol(M, tol) < M.shape[0]:
        raise NFTupleError("evaluation matrix is singular: tuple lies in the no-feedback set",
                           {"determinant": complex(np.linalg.det(M))})
    return np.linalg.solve(M.T, -np.ones(pts.size, dtype=complex))


# ---------------------------------------------------------------------------
# f = 1 / (g + 1)


@dataclass
class FConstruction:
    """``f = numerator / denominator`` (polynomials, highest degree first) with certificate."""

    numerator: np.ndarray
    denominator: np.ndarray
    zeros: list[complex]
    poles: list[complex]
    cancelled: list[tuple[complex, int]]
    certificate: dict

    @property
    def induced_poles(self) -> list[complex]:
        """Full ``P`` with ``div f = Z - P``: reduced poles plus cancelled points of ``Z``."""
        return list(self.poles) + [z for z, k in self.cancelled for _ in range(k)]

    def __call__(self, t):
        if is_infinite(t):
            dn, dd = len(self.numerator) - 1, len(self.denominator) - 1
            if dn < dd:
                return 0.0
            if dn > dd:
                return INF
            return self.numerator[0] / self.denominator[0]
        return np.polyval(self.numerator, t) / np.polyval(self.denominator, t)


def build_f(coefficients, basis: RationalFunctionBasis, points=None,
            tol: ToleranceProfile = DEFAULT_TOL) -> FConstruction:
    """Form ``g = sum a_i f_i`` and return ``f = 1 / (g + 1)`` in reduced form.

    The zero of ``f`` at a support point ``z`` has the order of the pole of
    ``g`` there, so any drop below ``ord_z(Z)`` is a cancellation and is
    reported. The certificate records ``max |f(q) - 1|`` over ``D_inf``, and,
    if ``points`` are given, ``max |g(p) + 1|`` over them (so each is a pole).
    """
    c = basis.combination(coefficients) if basis.dim else np.zeros(1 + sum(k for _, k in basis.support), complex)
    c0 = c[0]
    scale = max(1.0, float(np.abs(c).max()))
    pos = 1
    num = np.array([1.0 + 0j])
    pieces = []  # (z, order_of_pole, coefficient list)
    cancelled = []
    for z, k in basis.support:
        cz = c[pos: pos + k]
        pos += k
        nz = np.flatnonzero(np.abs(cz) > 1e-13 * scale)
        order = int(nz[-1]) + 1 if nz.size else 0
        if order < k:
            cancelled.append((z, k - order))
        pieces.append((z, order, cz[:order]))
        num = np.polymul(num, np.poly([z] * order)) if order else num
    # denominator = num * (1 + g), every term is a polynomial
    den = (1.0 + c0) * num
    for z, order, cz in pieces:
        for j, cj in enumerate(cz, start=1):
            if cj == 0:
                continue
            rest = np.array([1.0 + 0j])
            for z2, o2, _ in pieces:
                e = o2 - j if z2 == z else o2
                if e:
                    rest = np.polymul(rest, np.poly([z2] * e))
            den = np.polyadd(den, cj * rest)
    den = np.trim_zeros(den, "f")
    if den.size == 0 or np.all(np.abs(den) <= 1e-14 * scale):
        raise VesselError("g + 1 vanishes identically; f is undefined")
    zeros = [z for z, order, _ in pieces for _ in range(order)]
    poles = list(np.roots(den)) if den.size > 1 else []
    f = FConstruction(num, den, zeros, poles, cancelled, {})
    inf_dev = 0.0
    for q in basis.marked:
        inf_dev = max(inf_dev, abs(f(q) - 1.0))
    f.certificate["max_dinf_deviation"] = float(inf_dev)
    if points is not None:
        g_plus_1 = [abs(c0 + 1.0 + sum(c[1:] * basis.monomials(p)[1:])) for p in np.ravel(points)]
        f.certificate["max_pole_residual"] = float(max(g_plus_1, default=0.0))
    return f


# ---------------------------------------------------------------------------
# placement


def ackermann_oracle(A, b, desired, tol: ToleranceProfile = DEFAULT_TOL) -> np.ndarray:
    """Classical single-input gain ``K`` with ``spec(A - b K) = desired``.

    ``K = e_n^T Ctrb^-1 p(A)`` with ``p`` the desired characteristic polynomial.
    """
    A = as_matrix(A, "A")
    n = A.shape[0]
    b = as_matrix(b, "b").reshape(n, 1)
    desired = np.asarray(desired, dtype=complex).ravel()
    if desired.size != n:
        raise DimensionError("need n desired eigenvalues")
    ctrb = np.hstack([np.linalg.matrix_power(A, k) @ b for k in range(n)])
    if rank_with_tol(ctrb, tol) < n:
        raise NonMinimalError("pair (A, b) is not controllable")
    coeffs = np.poly(desired)
    pA = np.zeros_like(A)
    for ck in coeffs:
        pA = pA @ A + ck * np.eye(n)
    en = np.zeros((1, n))
    en[0, -1] = 1.0
    return en @ np.linalg.solve(ctrb, pA)


def _sample_nodes(A, extra, count: int) -> np.ndarray:
    ev = np.linalg.eigvals(A) if A.size else np.zeros(0)
    cloud = np.concatenate([ev, np.asarray(extra, dtype=complex)])
    center = cloud.mean() if cloud.size else 0.0
    radius = 1.5 * max(np.abs(cloud - center).max() if cloud.size else 0.0, 1.0)
    return center + radius * np.exp(2j * np.pi * (np.arange(count) + 0.25) / count)


def gain_from_controller_function(A, B, g) -> np.ndarray:
    """``K`` with ``K (t - A)^-1 B = g(t)`` for a scalar ``g`` vanishing at infinity."""
    A, B = as_matrix(A), as_matrix(B)
    n = A.shape[0]
    nodes = _sample_nodes(A, [], n)
    X = np.column_stack([np.linalg.solve(t * np.eye(n) - A, B).ravel() for t in nodes])
    y = np.array([g(t) for t in nodes], dtype=complex)
    return np.linalg.solve(X.T, y).reshape(1, n)


@dataclass
class PlacementReport:
    xi: Direction
    desired: np.ndarray
    achieved: np.ndarray
    spectrum_error: float
    route: str
    K: np.ndarray
    admissible: bool
    conditions_hold: bool
    lemma_consistent: bool
    open_loop_poles: Divisor
    f: FConstruction | None = None
    notes: list[str] = field(default_factory=list)


def place_poles_genus0(V: Vessel, desired, tol: ToleranceProfile = DEFAULT_TOL,
                       xi: Direction | None = None, spectrum_tol: float = 1e-6):
    """State feedback moving the restricted closed-loop spectrum to ``desired``.

    With ``n`` distinct desired points off the open-loop poles, ``g`` is
    obtained by interpolation in ``L(Z - inf)`` (``Z`` = open-loop poles);
    otherwise from the characteristic polynomials, ``g = p_desired / p_open - 1``.
    ``K`` is read from ``K (t - A_xi)^-1 B_xi = g(t)`` and ``F = -K``.

    Returns
    -------
    (F, PlacementReport)

    Raises
    ------
    NonMinimalError
        If the vessel is not minimal or not single-input.
    PlacementError
        If the achieved spectrum misses ``desired`` by more than ``spectrum_tol``.
    """
    if V.m != 1 or V.m_star != 1:
        raise NonMinimalError("genus-0 placement handles single-input line vessels")
    rep = minimality_report(V, tol)
    if not rep.minimal:
        raise NonMinimalError("vessel is not minimal", rep.ranks)
    desired = np.asarray(desired, dtype=complex).ravel()
    if not np.all(np.isfinite(desired)):
        raise ValueError("desired poles must be affine (off D_inf)")
    if desired.size != V.n:
        raise DimensionError(f"need {V.n} desired poles, got {desired.size}")
    if xi is None:
        xi = find_regular_direction(V, tol)
    S = restricted_transfer(V, xi, tol)
    A, B = S.A, S.B
    n = V.n
    Z = Divisor([DivisorEntry(cl.eigenvalue, cl.multiplicity) for cl in eig_decompose(A, tol)])
    distinct = all(len(idx) == 1 for idx in cluster_values(desired, tol.eig_cluster_tol))
    off_poles = all(abs(p - e.point) > tol.eig_cluster_tol for p in desired for e in Z.entries)
    fb = feedback_dimension(0, n, 1)
    f_cons = None
    notes = []
    if distinct and off_poles and fb.value == n:
        route = "interpolation"
        basis = basis_L_genus0(Z, Divisor([DivisorEntry(INF, 1)]), tol)
        a = solve_interpolation(basis, desired, tol)
        f_cons = build_f(a, basis, desired, tol)
        cvec = basis.combination(a)

        def g(t):
            return complex(cvec @ basis.monomials(t))
    else:
        route = "characteristic"
        notes.append("repeated desired poles or desired poles on open-loop poles")

        def g(t):
            return complex(np.prod(t - desired) / np.linalg.det(t * np.eye(n) - A) - 1.0)
    K = gain_from_controller_function(A, B, g)
    F = -K
    achieved = np.linalg.eigvals(A + B @ F)
    err = multiset_distance(achieved, desired)
    if err > spectrum_tol * max(1.0, float(np.abs(desired).max())):
        raise PlacementError("closed-loop spectrum misses the desired poles",
                             {"achieved": achieved, "error": err})
    admissible, _ = is_admissible(V, F, tol)
    T = restricted_transfer(closed_loop(V, F, tol), xi, tol)
    cond, witness = placement_condition_check(S, T, tol)
    report = PlacementReport(xi, desired, achieved, err, route, K, admissible, cond,
                             witness.lemma_consistent, Z, f_cons, notes)
    return F, report
