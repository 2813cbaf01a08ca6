"""Admissible state feedback, closed-loop and controller vessels.

An operator ``F: H -> E`` is admissible when

    sigma2 F A1 - sigma1 F A2 + gamma F = 0,
    sigma1 F B~ sigma2 - sigma2 F B~ sigma1 = 0.

Then ``(A1 + B~ s1 F, A2 + B~ s2 F, B~, C + D F, ...)`` is again a vessel, and
the open-loop transfer function factors as ``S = S_CL o S_Ctrl`` through the
controller vessel ``(A1, A2, B~, -F, I, I, s1, s2, g, s1, s2, g)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, InadmissibleFeedbackError, SpectrumPointError
from .numeric import DEFAULT_TOL, ToleranceProfile, as_matrix, norm2, nullspace_basis
from .transfer import restricted_transfer, rmf_eval, transfer_eval, vessel_spectrum
from .vessel import CurvePoint, Direction, Vessel, curve_fiber, discriminant_polys


def _check_shape(V: Vessel, F: np.ndarray):
    if F.shape != (V.m, V.n):
        raise DimensionError(f"feedback must be {V.m} x {V.n}, got {F.shape}")


def admissibility_residuals(V: Vessel, F) -> dict[str, tuple[float, float]]:
    """``{name: (residual, scale)}`` for the two feedback equations."""
    F = as_matrix(F, "F")
    _check_shape(V, F)
    s1, s2, g, B = V.sigma1, V.sigma2, V.gamma, V.B_tilde
    nF = norm2(F)
    r1 = norm2(s2 @ F @ V.A1 - s1 @ F @ V.A2 + g @ F)
    c1 = nF * (norm2(s2) * norm2(V.A1) + norm2(s1) * norm2(V.A2) + norm2(g))
    r2 = norm2(s1 @ F @ B @ s2 - s2 @ F @ B @ s1)
    c2 = 2 * nF * norm2(s1) * norm2(s2) * norm2(B)
    return {"state": (r1, c1), "input": (r2, c2)}


def is_admissible(V: Vessel, F, tol: ToleranceProfile = DEFAULT_TOL):
    """Return ``(admissible, residuals)``; each residual is compared to ``residual_tol * scale``."""
    res = admissibility_residuals(V, F)
    ok = all(r <= tol.residual_tol * c for r, c in res.values())
    return ok, res


def admissibility_operator(V: Vessel) -> np.ndarray:
    """Matrix of ``vec(F) -> (vec(eq. 1), vec(eq. 2))`` in column-major ``vec``.

    Uses ``vec(X F Y) = (Y^T kron X) vec(F)``.
    """
    n = V.n
    s1, s2, g, B = V.sigma1, V.sigma2, V.gamma, V.B_tilde
    L1 = np.kron(V.A1.T, s2) - np.kron(V.A2.T, s1) + np.kron(np.eye(n), g)
    L2 = np.kron((B @ s2).T, s1) - np.kron((B @ s1).T, s2)
    return np.vstack([L1, L2])


def admissible_basis(V: Vessel, tol: ToleranceProfile = DEFAULT_TOL) -> list[np.ndarray]:
    """Orthonormal basis (Frobenius inner product) of all admissible feedbacks.

    The rank cutoff is taken relative to the size of the individual terms, so
    that an operator that cancels to rounding level has a full kernel.
    """
    s1, s2 = norm2(V.sigma1), norm2(V.sigma2)
    scale = (norm2(V.A1) * s2 + norm2(V.A2) * s1 + norm2(V.gamma)
             + 2 * norm2(V.B_tilde) * s1 * s2)
    K = nullspace_basis(admissibility_operator(V), tol, cutoff=tol.rank_tol * scale)
    return [K[:, j].reshape((V.m, V.n), order="F") for j in range(K.shape[1])]


def closed_loop(V: Vessel, F, tol: ToleranceProfile = DEFAULT_TOL) -> Vessel:
    """Closed-loop vessel ``(A1 + B~ s1 F, A2 + B~ s2 F, B~, C + D F, ...)``.

    Raises
    ------
    InadmissibleFeedbackError
        If ``F`` fails the admissibility equations.
    """
    F = as_matrix(F, "F")
    ok, res = is_admissible(V, F, tol)
    if not ok:
        raise InadmissibleFeedbackError("feedback is not admissible",
                                        {k: r for k, (r, _) in res.items()})
    B = V.B_tilde
    return V.replace(
        A1=V.A1 + B @ V.sigma1 @ F,
        A2=V.A2 + B @ V.sigma2 @ F,
        C=V.C + V.D @ F,
    )


def controller_vessel(V: Vessel, F) -> Vessel:
    """``(A1, A2, B~, -F, I, I, s1, s2, g, s1, s2, g)``; a vessel iff ``F`` is admissible."""
    F = as_matrix(F, "F")
    _check_shape(V, F)
    eye = np.eye(V.m)
    return Vessel(V.A1, V.A2, V.B_tilde, -F, eye, eye,
                  V.sigma1, V.sigma2, V.gamma, V.sigma1, V.sigma2, V.gamma,
                  declared_r=V.declared_r, declared_s=V.declared_r)


@dataclass
class FactorizationReport:
    max_residual: float = 0.0
    residuals: list[float] = field(default_factory=list)
    evaluated: list[CurvePoint] = field(default_factory=list)
    skipped: list[tuple[CurvePoint, str]] = field(default_factory=list)
    passed: bool = True


def factorization_check(V: Vessel, F, points, tol: ToleranceProfile = DEFAULT_TOL) -> FactorizationReport:
    """Verify ``S_CL(p) S_Ctrl(p) v = S(p) v`` on fiber bases at curve points.

    Residuals are relative to ``|S v| + |D| |v|``. Points within
    ``10 * eig_cluster_tol`` of the joint spectrum of the open-loop,
    closed-loop or controller vessel are skipped and listed.
    """
    F = as_matrix(F, "F")
    V_cl = closed_loop(V, F, tol)
    V_ctrl = controller_vessel(V, F)
    curve = discriminant_polys(V, tol).p_in
    spectra = [vessel_spectrum(W, tol) for W in (V, V_cl, V_ctrl)]
    guard = 10 * tol.eig_cluster_tol
    report = FactorizationReport()
    nD = norm2(V.D)
    for p in points:
        if not p.is_affine:
            report.skipped.append((p, "at infinity"))
            continue
        if min(s.distance(*p.coords()) for s in spectra) <= guard:
            report.skipped.append((p, "near a joint-spectrum point"))
            continue
        try:
            fib = curve_fiber(V, p, "input", tol, curve=curve)
            worst = 0.0
            for v in fib.basis.T:
                sv = transfer_eval(V, p, v, tol)
                rv = transfer_eval(V_ctrl, p, v, tol)
                tv = transfer_eval(V_cl, p, rv, tol)
                scale = np.linalg.norm(sv) + nD * np.linalg.norm(v)
                worst = max(worst, float(np.linalg.norm(tv - sv) / scale))
        except SpectrumPointError as exc:
            report.skipped.append((p, str(exc)))
            continue
        report.evaluated.append(p)
        report.residuals.append(worst)
    report.max_residual = max(report.residuals, default=0.0)
    report.passed = report.max_residual <= tol.residual_tol
    return report


def restricted_factorization_residual(V: Vessel, F, xi: Direction, lambdas,
                                      tol: ToleranceProfile = DEFAULT_TOL) -> float:
    """Max relative defect of ``S_CL,xi(l) R_xi(l) = S_xi(l)`` over sample values ``l``."""
    F = as_matrix(F, "F")
    S = restricted_transfer(V, xi, tol)
    T = restricted_transfer(closed_loop(V, F, tol), xi, tol)
    R = restricted_transfer(controller_vessel(V, F), xi, tol)
    worst = 0.0
    for lam in lambdas:
        s = rmf_eval(S, lam, tol)
        worst = max(worst, float(norm2(rmf_eval(T, lam, tol) @ rmf_eval(R, lam, tol) - s)
                                 / max(norm2(s), 1e-300)))
    return worst
