"""Operator vessels: data model, vessel conditions and the discriminant curve.

A vessel is the tuple

    (A1, A2, B~, C, D, D~, sigma1, sigma2, gamma, sigma1*, sigma2*, gamma*)

subject to

    (A1)  A1 A2 = A2 A1
    (A2)  A1 B~ sigma2 - A2 B~ sigma1 + B~ gamma = 0
    (A3)  sigma2* C A1 - sigma1* C A2 + gamma* C = 0
    (A4)  sigma1* D = D~ sigma1,  sigma2* D = D~ sigma2,
          gamma* D = D~ gamma + sigma1* C B~ sigma2 - sigma2* C B~ sigma1

with D and D~ invertible. Its frequency-domain theory lives on the plane
curve ``det(lambda1 sigma2 - lambda2 sigma1 + gamma) = 0``.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Literal, NamedTuple

import numpy as np

from .errors import (
    NoRegularDirectionError,
    NumericalInconsistencyError,
    OffCurveError,
    SingularMatrixError,
    TransversalityError,
)
from .numeric import (
    DEFAULT_TOL,
    ToleranceProfile,
    as_matrix,
    cluster_values,
    invariant_closure,
    norm2,
    nullspace_basis,
    rank_with_tol,
)

MATRIX_FIELDS = (
    "A1", "A2", "B_tilde", "C", "D", "D_tilde",
    "sigma1", "sigma2", "gamma", "sigma1_star", "sigma2_star", "gamma_star",
)


@dataclass(frozen=True, eq=False)
class Vessel:
    """A commutative two-operator vessel with finite-dimensional spaces.

    Dimensions are read off the matrices: ``n = dim H`` from ``A1``,
    ``m = dim E`` from ``sigma1`` and ``m_star = dim E*`` from ``sigma1_star``.
    ``declared_r`` and ``declared_s`` are the exponents in
    ``p_in = p1**r``, ``p_out = p2**s``; they are supplied, never computed.
    """

    A1: np.ndarray
    A2: np.ndarray
    B_tilde: np.ndarray
    C: np.ndarray
    D: np.ndarray
    D_tilde: np.ndarray
    sigma1: np.ndarray
    sigma2: np.ndarray
    gamma: np.ndarray
    sigma1_star: np.ndarray
    sigma2_star: np.ndarray
    gamma_star: np.ndarray
    declared_r: int = 1
    declared_s: int = 1

    def __post_init__(self):
        for name in MATRIX_FIELDS:
            object.__setattr__(self, name, as_matrix(getattr(self, name), name))
        if self.declared_r < 1 or self.declared_s < 1:
            raise ValueError("declared_r and declared_s must be positive")

    @property
    def n(self) -> int:
        return self.A1.shape[0]

    @property
    def m(self) -> int:
        return self.sigma1.shape[0]

    @property
    def m_star(self) -> int:
        return self.sigma1_star.shape[0]

    def replace(self, **changes) -> "Vessel":
        return dataclasses.replace(self, **changes)

    def matrices(self) -> dict[str, np.ndarray]:
        return {name: getattr(self, name) for name in MATRIX_FIELDS}

    def input_pencil(self, lambda1, lambda2) -> np.ndarray:
        return lambda1 * self.sigma2 - lambda2 * self.sigma1 + self.gamma

    def output_pencil(self, lambda1, lambda2) -> np.ndarray:
        return lambda1 * self.sigma2_star - lambda2 * self.sigma1_star + self.gamma_star

    def pencil(self, side: str, lambda1, lambda2) -> np.ndarray:
        if side == "input":
            return self.input_pencil(lambda1, lambda2)
        if side == "output":
            return self.output_pencil(lambda1, lambda2)
        raise ValueError(f"side must be 'input' or 'output', got {side!r}")

    def allclose(self, other: "Vessel", atol: float = 0.0) -> bool:
        return all(
            getattr(self, k).shape == getattr(other, k).shape
            and np.allclose(getattr(self, k), getattr(other, k), rtol=0, atol=atol)
            for k in MATRIX_FIELDS
        )


# ---------------------------------------------------------------------------
# validation


@dataclass
class ValidationReport:
    """Residuals of the vessel conditions.

    ``residuals[name]`` is the spectral norm of the defect and ``scales[name]``
    the sum of the norms of the products entering it; a condition passes when
    ``residual <= residual_tol * scale``.
    """

    residuals: dict[str, float] = field(default_factory=dict)
    scales: dict[str, float] = field(default_factory=dict)
    structural_errors: list[str] = field(default_factory=list)
    D_invertible: bool = False
    D_tilde_invertible: bool = False
    passed: bool = False

    def relative(self, name: str) -> float:
        scale = self.scales[name]
        res = self.residuals[name]
        if scale == 0.0:
            return 0.0 if res == 0.0 else float("inf")
        return res / scale

    def max_relative(self) -> float:
        return max((self.relative(k) for k in self.residuals), default=0.0)


CONDITION_NAMES = ("A1", "A2", "A3", "A4_sigma", "A4_gamma")


def structural_errors(V: Vessel) -> list[str]:
    n, m, ms = V.n, V.m, V.m_star
    expected = {
        "A1": (n, n), "A2": (n, n), "B_tilde": (n, m), "C": (ms, n),
        "D": (ms, m), "D_tilde": (ms, ms),
        "sigma1": (m, m), "sigma2": (m, m), "gamma": (m, m),
        "sigma1_star": (ms, ms), "sigma2_star": (ms, ms), "gamma_star": (ms, ms),
    }
    errs = []
    for name, shape in expected.items():
        got = getattr(V, name).shape
        if got != shape:
            errs.append(f"{name}: expected shape {shape}, got {got}")
    if m != ms:
        errs.append(f"D must be square (dim E = {m}, dim E* = {ms})")
    return errs


def _condition_terms(V: Vessel):
    A1, A2, B, C = V.A1, V.A2, V.B_tilde, V.C
    D, Dt = V.D, V.D_tilde
    s1, s2, g = V.sigma1, V.sigma2, V.gamma
    s1s, s2s, gs = V.sigma1_star, V.sigma2_star, V.gamma_star
    nA1, nA2, nB, nC = norm2(A1), norm2(A2), norm2(B), norm2(C)
    nD, nDt = norm2(D), norm2(Dt)
    ns1, ns2, ng = norm2(s1), norm2(s2), norm2(g)
    ns1s, ns2s, ngs = norm2(s1s), norm2(s2s), norm2(gs)

    res, scale = {}, {}
    res["A1"] = norm2(A1 @ A2 - A2 @ A1)
    scale["A1"] = 2 * nA1 * nA2
    res["A2"] = norm2(A1 @ B @ s2 - A2 @ B @ s1 + B @ g)
    scale["A2"] = nA1 * nB * ns2 + nA2 * nB * ns1 + nB * ng
    res["A3"] = norm2(s2s @ C @ A1 - s1s @ C @ A2 + gs @ C)
    scale["A3"] = ns2s * nC * nA1 + ns1s * nC * nA2 + ngs * nC
    r1, r2 = norm2(s1s @ D - Dt @ s1), norm2(s2s @ D - Dt @ s2)
    res["A4_sigma"] = max(r1, r2)
    scale["A4_sigma"] = max(ns1s * nD + nDt * ns1, ns2s * nD + nDt * ns2)
    res["A4_gamma"] = norm2(gs @ D - Dt @ g - s1s @ C @ B @ s2 + s2s @ C @ B @ s1)
    scale["A4_gamma"] = ngs * nD + nDt * ng + (ns1s * ns2 + ns2s * ns1) * nC * nB
    return res, scale


def validate_vessel(V: Vessel, tol: ToleranceProfile = DEFAULT_TOL) -> ValidationReport:
    """Check the vessel conditions (A1)-(A4) and invertibility of D, D~."""
    report = ValidationReport()
    report.structural_errors = structural_errors(V)
    if report.structural_errors:
        return report
    res, scale = _condition_terms(V)
    report.residuals = {k: float(res[k]) for k in CONDITION_NAMES}
    report.scales = {k: float(scale[k]) for k in CONDITION_NAMES}
    report.D_invertible = rank_with_tol(V.D, tol) == V.D.shape[0]
    report.D_tilde_invertible = rank_with_tol(V.D_tilde, tol) == V.D_tilde.shape[0]
    ok = all(res[k] <= tol.residual_tol * scale[k] for k in CONDITION_NAMES)
    report.passed = bool(ok and report.D_invertible and report.D_tilde_invertible)
    return report


def similarity_transform(V: Vessel, N, tol: ToleranceProfile = DEFAULT_TOL) -> Vessel:
    """Change of state coordinates ``x = N x'``; the transfer function is unchanged."""
    N = as_matrix(N, "N")
    if N.shape != (V.n, V.n) or rank_with_tol(N, tol) < V.n:
        raise SingularMatrixError("similarity needs an invertible n x n matrix")
    Ninv = np.linalg.inv(N)
    return V.replace(
        A1=Ninv @ V.A1 @ N, A2=Ninv @ V.A2 @ N, B_tilde=Ninv @ V.B_tilde, C=V.C @ N
    )


# ---------------------------------------------------------------------------
# polynomials and curve points


@dataclass(frozen=True, eq=False)
class BivariatePoly:
    """Polynomial ``sum c[i, j] lambda1**i lambda2**j`` with complex coefficients."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.coeffs, dtype=complex))
        rows = np.flatnonzero(np.any(c != 0, axis=1))
        cols = np.flatnonzero(np.any(c != 0, axis=0))
        if rows.size == 0:
            c = np.zeros((1, 1), dtype=complex)
        else:
            c = c[: rows[-1] + 1, : cols[-1] + 1]
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def interpolate(cls, func, degree: int, chop: float = 1e-12) -> "BivariatePoly":
        """Recover a polynomial of degree <= ``degree`` in each variable.

        ``func`` is sampled on the tensor grid of ``(degree + 1)``-th roots of
        unity; on that grid the coefficient map is a 2-D DFT, which is exact up
        to rounding. Coefficients below ``chop`` times the largest are dropped.
        """
        k = degree + 1
        w = np.exp(2j * np.pi * np.arange(k) / k)
        vals = np.array([[func(a, b) for b in w] for a in w], dtype=complex)
        c = np.fft.fft2(vals) / (k * k)
        # fft2 uses exp(-2 pi i ...), i.e. c[i, j] multiplies w^(a i) w^(b j)
        big = np.max(np.abs(c)) if c.size else 0.0
        c[np.abs(c) <= chop * big] = 0.0
        return cls(c)

    def __call__(self, lambda1, lambda2):
        return np.polynomial.polynomial.polyval2d(lambda1, lambda2, self.coeffs)

    def gradient(self, lambda1, lambda2) -> tuple[complex, complex]:
        P = np.polynomial.polynomial
        d1 = P.polyder(self.coeffs, axis=0) if self.coeffs.shape[0] > 1 else np.zeros((1, 1))
        d2 = P.polyder(self.coeffs, axis=1) if self.coeffs.shape[1] > 1 else np.zeros((1, 1))
        return complex(P.polyval2d(lambda1, lambda2, d1)), complex(P.polyval2d(lambda1, lambda2, d2))

    @property
    def degree(self) -> int:
        i, j = np.nonzero(self.coeffs)
        return int(np.max(i + j)) if i.size else 0

    @property
    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    def scale_at(self, lambda1, lambda2) -> float:
        """Natural magnitude of the terms of ``p`` at a point (rounding scale)."""
        return float(np.polynomial.polynomial.polyval2d(abs(lambda1), abs(lambda2), np.abs(self.coeffs)))

    def top_form(self) -> np.ndarray:
        """Coefficients ``h[k]`` of ``l1**(d-k) l2**k`` in the top-degree part."""
        d = self.degree
        h = np.zeros(d + 1, dtype=complex)
        for k in range(d + 1):
            i, j = d - k, k
            if i < self.coeffs.shape[0] and j < self.coeffs.shape[1]:
                h[k] = self.coeffs[i, j]
        return h

    def in_lambda2(self, lambda1) -> np.ndarray:
        """Univariate coefficients in ``lambda2`` (lowest degree first) at fixed ``lambda1``."""
        powers = lambda1 ** np.arange(self.coeffs.shape[0])
        return powers @ self.coeffs

    def in_lambda1(self, lambda2) -> np.ndarray:
        powers = lambda2 ** np.arange(self.coeffs.shape[1])
        return self.coeffs @ powers

    def to_dict(self) -> dict:
        return {"coeffs": self.coeffs}


class Discriminant(NamedTuple):
    p_in: BivariatePoly
    p_out: BivariatePoly
    mu: complex | None


def discriminant_polys(V: Vessel, tol: ToleranceProfile = DEFAULT_TOL) -> Discriminant:
    """``p_in = det(l1 s2 - l2 s1 + g)``, ``p_out`` likewise, and ``mu`` with ``p_out = mu p_in``."""
    p_in = BivariatePoly.interpolate(lambda a, b: np.linalg.det(V.input_pencil(a, b)), V.m)
    p_out = BivariatePoly.interpolate(lambda a, b: np.linalg.det(V.output_pencil(a, b)), V.m_star)
    return Discriminant(p_in, p_out, _proportionality(p_in, p_out))


def _proportionality(p_in: BivariatePoly, p_out: BivariatePoly, rel: float = 1e-8):
    shape = tuple(max(a, b) for a, b in zip(p_in.coeffs.shape, p_out.coeffs.shape))
    a = np.zeros(shape, dtype=complex)
    b = np.zeros(shape, dtype=complex)
    a[: p_in.coeffs.shape[0], : p_in.coeffs.shape[1]] = p_in.coeffs
    b[: p_out.coeffs.shape[0], : p_out.coeffs.shape[1]] = p_out.coeffs
    if not np.any(a):
        return None
    mu = complex(np.vdot(a, b) / np.vdot(a, a))
    if mu == 0 or np.linalg.norm(b - mu * a) > rel * np.linalg.norm(b):
        return None
    grid = np.exp(2j * np.pi * np.arange(7) / 7) * 1.7
    for l1 in grid:
        for l2 in grid[::-1]:
            ref = max(p_out.scale_at(l1, l2), 1e-300)
            if abs(p_out(l1, l2) - mu * p_in(l1, l2)) > rel * ref:
                return None
    return mu


@dataclass(frozen=True)
class Direction:
    """Projective direction ``(xi1 : xi2)``, stored with unit norm and the
    first nonzero component real positive."""

    xi1: complex
    xi2: complex

    def __post_init__(self):
        v = np.array([self.xi1, self.xi2], dtype=complex)
        nrm = np.linalg.norm(v)
        if nrm == 0:
            raise ValueError("direction must be nonzero")
        v = v / nrm
        lead = v[0] if abs(v[0]) > 1e-15 else v[1]
        v = v * (abs(lead) / lead)
        object.__setattr__(self, "xi1", complex(v[0]))
        object.__setattr__(self, "xi2", complex(v[1]))

    def as_tuple(self) -> tuple[complex, complex]:
        return self.xi1, self.xi2

    def coordinate(self, lambda1, lambda2):
        """The local coordinate ``xi1 lambda1 + xi2 lambda2``."""
        return self.xi1 * lambda1 + self.xi2 * lambda2


def sigma_xi(V: Vessel, xi: Direction) -> np.ndarray:
    return xi.xi1 * V.sigma1 + xi.xi2 * V.sigma2


def is_regular_direction(V: Vessel, xi: Direction, tol: ToleranceProfile = DEFAULT_TOL) -> bool:
    """True iff ``xi1 sigma1 + xi2 sigma2`` is numerically invertible."""
    return rank_with_tol(sigma_xi(V, xi), tol) == V.m


def find_regular_direction(V: Vessel, tol: ToleranceProfile = DEFAULT_TOL,
                           max_tries: int = 64, seed: int = 0) -> Direction:
    """First regular direction in a fixed candidate sequence.

    Candidates are ``(1, 0)``, ``(0, 1)`` and then seeded random complex
    directions, so the result is reproducible.
    """
    rng = np.random.default_rng(seed)
    for k in range(max_tries):
        if k == 0:
            xi = Direction(1, 0)
        elif k == 1:
            xi = Direction(0, 1)
        else:
            z = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            xi = Direction(z[0], z[1])
        if is_regular_direction(V, xi, tol):
            return xi
    raise NoRegularDirectionError(
        f"no regular direction found in {max_tries} tries; det(sigma_xi) may vanish identically"
    )


@dataclass(frozen=True)
class CurvePoint:
    """A point of the discriminant curve, affine or on the line at infinity.

    At infinity, ``(lambda1 : lambda2)`` is the homogeneous direction of the
    asymptote.
    """

    kind: Literal["affine", "at_infinity"]
    lambda1: complex
    lambda2: complex

    @classmethod
    def affine(cls, lambda1, lambda2) -> "CurvePoint":
        return cls("affine", complex(lambda1), complex(lambda2))

    @classmethod
    def infinity(cls, l1, l2) -> "CurvePoint":
        d = Direction(l1, l2)
        return cls("at_infinity", d.xi1, d.xi2)

    @property
    def is_affine(self) -> bool:
        return self.kind == "affine"

    def coords(self) -> tuple[complex, complex]:
        return self.lambda1, self.lambda2


def on_curve_residual(p: BivariatePoly, point: CurvePoint) -> float:
    """``|p(point)|`` relative to the magnitude of its terms."""
    l1, l2 = point.coords()
    return float(abs(p(l1, l2)) / max(p.scale_at(l1, l2), 1e-300))


def is_smooth_point(p: BivariatePoly, lambda1, lambda2, tol: ToleranceProfile = DEFAULT_TOL) -> bool:
    """Gradient test ``|dp/dl1| + |dp/dl2| > residual_tol * scale``."""
    g1, g2 = p.gradient(lambda1, lambda2)
    return abs(g1) + abs(g2) > tol.residual_tol * max(p.scale_at(lambda1, lambda2), np.abs(p.coeffs).max())


@dataclass(frozen=True, eq=False)
class FiberBasis:
    point: CurvePoint
    side: str
    basis: np.ndarray
    smooth: bool = True
    maximal: bool = True

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


def pencil_scale(V: Vessel, side: str, lambda1, lambda2) -> float:
    """``|l1| |s2| + |l2| |s1| + |g|``, the size of the pencil's terms."""
    s1, s2, g = (V.sigma1, V.sigma2, V.gamma) if side == "input" else (
        V.sigma1_star, V.sigma2_star, V.gamma_star)
    return abs(lambda1) * norm2(s2) + abs(lambda2) * norm2(s1) + norm2(g)


def curve_fiber(V: Vessel, point: CurvePoint, side: str = "input",
                tol: ToleranceProfile = DEFAULT_TOL, curve: BivariatePoly | None = None) -> FiberBasis:
    """Kernel of the input (or output) pencil at a curve point.

    ``maximal`` records whether the dimension equals ``declared_r`` (resp.
    ``declared_s``) at a smooth point, which is what maximality predicts.

    Raises
    ------
    OffCurveError
        If the point is not on the curve of that side.
    NumericalInconsistencyError
        If the kernel is empty at an on-curve point.
    """
    if not point.is_affine:
        raise ValueError("curve_fiber needs an affine point")
    if curve is None:
        disc = discriminant_polys(V, tol)
        curve = disc.p_in if side == "input" else disc.p_out
    residual = on_curve_residual(curve, point)
    if residual > tol.residual_tol:
        raise OffCurveError(
            f"point {point.coords()} is off the {side} curve (relative residual {residual:.3g})",
            {"residual": residual},
        )
    l1, l2 = point.coords()
    cutoff = max(tol.rank_tol, tol.residual_tol) * pencil_scale(V, side, l1, l2)
    basis = nullspace_basis(V.pencil(side, l1, l2), tol, cutoff=cutoff)
    if basis.shape[1] == 0:
        raise NumericalInconsistencyError(
            f"empty {side} fiber at on-curve point {point.coords()}; loosen rank_tol"
        )
    smooth = is_smooth_point(curve, *point.coords(), tol=tol)
    power = V.declared_r if side == "input" else V.declared_s
    maximal = (basis.shape[1] == power) if smooth else basis.shape[1] >= 1
    return FiberBasis(point, side, basis, smooth, maximal)


def fiber_residual(V: Vessel, point: CurvePoint, w, side: str = "output") -> float:
    """Relative residual ``|P(point) w| / (scale |w|)`` of fiber membership.

    The scale is :func:`pencil_scale`, not ``|P(point)|``, which is itself
    small at a curve point.
    """
    w = np.asarray(w, dtype=complex).ravel()
    P = V.pencil(side, *point.coords())
    denom = pencil_scale(V, side, *point.coords()) * np.linalg.norm(w)
    if denom == 0:
        return 0.0
    return float(np.linalg.norm(P @ w) / denom)


class CurveSample(NamedTuple):
    affine: list[CurvePoint]
    at_infinity: list[CurvePoint]


def points_over(p: BivariatePoly, lambda1=None, lambda2=None) -> list[CurvePoint]:
    """Affine curve points with one coordinate fixed (roots of the other)."""
    if (lambda1 is None) == (lambda2 is None):
        raise ValueError("fix exactly one of lambda1, lambda2")
    if lambda1 is not None:
        uni = np.trim_zeros(p.in_lambda2(lambda1), "b")
        roots = np.polynomial.polynomial.polyroots(uni) if uni.size > 1 else []
        return [CurvePoint.affine(lambda1, r) for r in roots]
    uni = np.trim_zeros(p.in_lambda1(lambda2), "b")
    roots = np.polynomial.polynomial.polyroots(uni) if uni.size > 1 else []
    return [CurvePoint.affine(r, lambda2) for r in roots]


def infinity_points(p: BivariatePoly, tol: ToleranceProfile = DEFAULT_TOL) -> list[CurvePoint]:
    """Homogeneous roots ``(l1 : l2)`` of the top-degree form.

    Raises
    ------
    TransversalityError
        If the curve is tangent to the line at infinity (repeated root).
    """
    h = p.top_form()
    d = h.size - 1
    if d == 0:
        return []
    h = np.where(np.abs(h) <= 1e-14 * np.abs(h).max(), 0, h)
    # h(1, t) = sum h[k] t**k; missing top degree means roots at (0 : 1)
    nz = np.flatnonzero(h)
    deg_t = int(nz[-1])
    roots = list(np.polynomial.polynomial.polyroots(h[: deg_t + 1])) if deg_t >= 1 else []
    at_vertical = d - deg_t
    if at_vertical > 1:
        raise TransversalityError("repeated point at infinity (0 : 1)")
    for idx in cluster_values(roots, tol.eig_cluster_tol * max(1.0, max(map(abs, roots), default=1.0))):
        if len(idx) > 1:
            raise TransversalityError(f"repeated point at infinity near (1 : {roots[idx[0]]:.6g})")
    pts = [CurvePoint.infinity(1.0, t) for t in roots]
    if at_vertical:
        pts.append(CurvePoint.infinity(0.0, 1.0))
    return pts


def sample_curve_points(p: BivariatePoly, count: int, seed: int = 0,
                        tol: ToleranceProfile = DEFAULT_TOL, radius: float = 2.0) -> CurveSample:
    """Deterministic sample of affine curve points plus the points at infinity.

    A seeded sequence of ``lambda1`` values (complex, modulus up to
    ``radius``) is solved for ``lambda2``; when ``p`` does not involve
    ``lambda2`` the roles are swapped. Slices where ``p`` vanishes
    identically are skipped.
    """
    if p.degree == 0:
        raise ValueError("curve polynomial must be nonconstant")
    rng = np.random.default_rng(seed)
    use_l1 = p.coeffs.shape[1] > 1
    pts: list[CurvePoint] = []
    attempts = 0
    while len(pts) < count:
        attempts += 1
        if attempts > 100 * max(count, 1):
            raise NumericalInconsistencyError("could not sample enough curve points")
        z = radius * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        slice_pts = points_over(p, lambda1=z) if use_l1 else points_over(p, lambda2=z)
        for q in slice_pts:
            if on_curve_residual(p, q) <= tol.residual_tol and len(pts) < count:
                pts.append(q)
    return CurveSample(pts, infinity_points(p, tol))


# ---------------------------------------------------------------------------
# controllability / observability


@dataclass
class MinimalityReport:
    controllable: bool
    observable: bool
    minimal: bool
    restricted_minimal: bool | None
    ranks: dict[str, int]


def controllable_subspace(V: Vessel, tol: ToleranceProfile = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of ``sum Im A1^i A2^j B~``."""
    return invariant_closure(V.B_tilde, [V.A1, V.A2], tol)


def unobservable_complement(V: Vessel, tol: ToleranceProfile = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of ``cap ker C A1^i A2^j``."""
    return invariant_closure(V.C.conj().T, [V.A1.conj().T, V.A2.conj().T], tol)


def minimality_report(V: Vessel, tol: ToleranceProfile = DEFAULT_TOL,
                      xi: Direction | None = None) -> MinimalityReport:
    """Controllability, observability and (optionally) minimality along ``xi``.

    The reachable space is grown by orthogonalised block Krylov steps with
    both ``A1`` and ``A2``; exponents with ``n1 + n2 < n`` suffice.
    """
    n = V.n
    rc = controllable_subspace(V, tol).shape[1]
    ro = unobservable_complement(V, tol).shape[1]
    ranks = {"controllable": rc, "observable": ro}
    restricted = None
    if xi is not None:
        A_xi = xi.xi1 * V.A1 + xi.xi2 * V.A2
        B_xi = V.B_tilde @ sigma_xi(V, xi)
        rc_xi = invariant_closure(B_xi, [A_xi], tol).shape[1]
        ro_xi = invariant_closure(V.C.conj().T, [A_xi.conj().T], tol).shape[1]
        ranks.update(restricted_controllable=rc_xi, restricted_observable=ro_xi)
        restricted = rc_xi == n and ro_xi == n
    return MinimalityReport(rc == n, ro == n, rc == n and ro == n, restricted, ranks)
