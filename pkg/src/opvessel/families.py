"""Random vessel generators used by the tests and demo scripts."""

from __future__ import annotations

import numpy as np
import scipy.linalg as sla

from .genus0 import LineVesselSpec, build_line_vessel
from .numeric import DEFAULT_TOL, ToleranceProfile, nullspace_basis
from .vessel import Vessel


def _crandn(rng: np.random.Generator, *shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def _well_conditioned(rng: np.random.Generator, n: int, spread: float = 0.3) -> np.ndarray:
    Q, _ = np.linalg.qr(_crandn(rng, n, n))
    return Q @ (np.eye(n) + spread * _crandn(rng, n, n) / np.sqrt(n))


def random_line_vessel(rng: np.random.Generator, n: int, c=None, d=None,
                       tol: ToleranceProfile = DEFAULT_TOL) -> Vessel:
    """Minimal single-input vessel on a random line ``c l1 - l2 + d = 0``."""
    c = _crandn(rng)[()] if c is None else c
    d = _crandn(rng)[()] if d is None else d
    spec = LineVesselSpec(
        A1=_crandn(rng, n, n) / np.sqrt(n),
        b=_crandn(rng, n, 1),
        c_row=_crandn(rng, 1, n),
        c=c, d=d,
        sigma1=1.0 + 0.5 * _crandn(rng)[()],
        D=1.0 + 0.5 * _crandn(rng)[()],
        D_tilde=1.0 + 0.5 * _crandn(rng)[()],
    )
    return build_line_vessel(spec, tol)


def random_pencil_vessel(rng: np.random.Generator, n: int, m: int = 2,
                         tol: ToleranceProfile = DEFAULT_TOL) -> Vessel:
    """Minimal vessel with ``m``-dimensional fibers on a random curve of degree ``m``.

    The joint spectrum consists of ``n`` generic points of the curve
    ``det(l1 s2 - l2 s1 + g) = 0``; ``B~`` and ``C`` are built from the left
    and right kernel vectors there, with the output weights chosen so that the
    coupling condition ``s1 C' B~ s2 = s2 C' B~ s1`` holds. ``D``, ``D~`` are
    random and the output-side matrices follow from the vessel conditions,
    so ``p_out = det(D~) / det(D) * p_in``.
    """
    s1, s2, g = (_crandn(rng, m, m) for _ in range(3))
    l1 = _crandn(rng, n)
    l2 = np.empty(n, dtype=complex)
    U = np.empty((m, n), dtype=complex)
    W = np.empty((n, m), dtype=complex)
    for k in range(n):
        ev, vl, vr = sla.eig(l1[k] * s2 + g, s1, left=True, right=True)
        j = int(rng.integers(m))
        l2[k] = ev[j]
        U[:, k] = vr[:, j] / np.linalg.norm(vr[:, j])
        W[k] = vl[:, j].conj() / np.linalg.norm(vl[:, j])
    beta = 1.0 + 0.3 * _crandn(rng, n)
    coupling = np.column_stack([
        (s1 @ np.outer(U[:, k], W[k]) @ s2 - s2 @ np.outer(U[:, k], W[k]) @ s1).ravel()
        for k in range(n)
    ])
    kernel = nullspace_basis(coupling, tol)
    alpha = kernel @ _crandn(rng, kernel.shape[1])
    B0 = beta[:, None] * W
    C0 = U * (alpha / beta)[None, :]
    N = _well_conditioned(rng, n)
    Ninv = np.linalg.inv(N)
    D = np.eye(m) + 0.3 * _crandn(rng, m, m)
    Dt = np.eye(m) + 0.3 * _crandn(rng, m, m)
    Dinv = np.linalg.inv(D)
    return Vessel(
        A1=N @ np.diag(l1) @ Ninv,
        A2=N @ np.diag(l2) @ Ninv,
        B_tilde=N @ B0,
        C=D @ C0 @ Ninv,
        D=D, D_tilde=Dt,
        sigma1=s1, sigma2=s2, gamma=g,
        sigma1_star=Dt @ s1 @ Dinv, sigma2_star=Dt @ s2 @ Dinv, gamma_star=Dt @ g @ Dinv,
    )
