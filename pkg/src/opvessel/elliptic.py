"""Divisor calculus on a complex elliptic curve ``y^2 = x^3 + a x + b``.

The point at infinity ``O`` is the identity of the chord-tangent group and
the base point of the Abel sum ``Phi(D) = (+)_P n_P P``. A degree-zero
divisor is principal iff ``Phi(D) = O``; for principal divisors a Miller
straight-line program of line quotients realizes a function with exactly
that divisor.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import NotPrincipalError, OffEllipticCurveError

_ID_TOL = 1e-9
PRINCIPAL_TOL = 1e-8


@dataclass(frozen=True)
class ECPoint:
    """Affine point ``(x, y)`` or the point at infinity (``x = y = None``)."""

    x: complex | None = None
    y: complex | None = None

    @classmethod
    def affine(cls, x, y) -> "ECPoint":
        return cls(complex(x), complex(y))

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def __repr__(self) -> str:
        return "O" if self.is_infinity else f"({self.x:.6g}, {self.y:.6g})"


O = ECPoint()


def _scale(*vals) -> float:
    return 1.0 + max(abs(v) for v in vals)


def points_close(P: ECPoint, Q: ECPoint, tol: float = _ID_TOL) -> bool:
    if P.is_infinity or Q.is_infinity:
        return P.is_infinity and Q.is_infinity
    s = _scale(P.x, P.y, Q.x, Q.y)
    return abs(P.x - Q.x) <= tol * s and abs(P.y - Q.y) <= tol * s


@dataclass(frozen=True)
class EllipticCurve:
    a: complex
    b: complex

    def __post_init__(self):
        a, b = complex(self.a), complex(self.b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        disc = 4 * a ** 3 + 27 * b ** 2
        if abs(disc) <= 1e-12 * (1 + abs(a) ** 3 + abs(b) ** 2):
            raise ValueError("singular curve: 4a^3 + 27b^2 = 0")

    def residual(self, P: ECPoint) -> float:
        if P.is_infinity:
            return 0.0
        x, y = P.x, P.y
        terms = abs(y) ** 2 + abs(x) ** 3 + abs(self.a * x) + abs(self.b)
        return abs(y * y - x ** 3 - self.a * x - self.b) / max(terms, 1e-300)

    def contains(self, P: ECPoint, tol: float = _ID_TOL) -> bool:
        return self.residual(P) <= tol

    def check(self, *points: ECPoint, tol: float = _ID_TOL):
        for P in points:
            if not self.contains(P, tol):
                raise OffEllipticCurveError(f"point {P!r} is not on the curve",
                                            {"residual": self.residual(P)})

    def rhs(self, x):
        return x ** 3 + self.a * x + self.b

    def lift(self, x, sign: int = 1) -> ECPoint:
        """A point with abscissa ``x`` (principal square root times ``sign``)."""
        return ECPoint.affine(x, sign * np.sqrt(complex(self.rhs(x))))

    def random_point(self, rng: np.random.Generator, radius: float = 2.0) -> ECPoint:
        x = radius * (rng.standard_normal() + 1j * rng.standard_normal()) / np.sqrt(2)
        return self.lift(x, 1 if rng.uniform() < 0.5 else -1)


def ec_negate(E: EllipticCurve, P: ECPoint) -> ECPoint:
    E.check(P)
    return P if P.is_infinity else ECPoint(P.x, -P.y)


def _chord(E: EllipticCurve, P: ECPoint, Q: ECPoint, tol: float):
    """Slope of the chord/tangent through ``P`` and ``Q``, or ``None`` if vertical."""
    s = _scale(P.x, P.y, Q.x, Q.y)
    if abs(P.x - Q.x) > tol * s:
        return (Q.y - P.y) / (Q.x - P.x)
    if abs(P.y + Q.y) <= tol * s:
        return None  # Q = -P, including 2-torsion doubling
    return (3 * P.x * P.x + E.a) / (2 * P.y)


def _add(E: EllipticCurve, P: ECPoint, Q: ECPoint, tol: float = _ID_TOL) -> ECPoint:
    if P.is_infinity:
        return Q
    if Q.is_infinity:
        return P
    lam = _chord(E, P, Q, tol)
    if lam is None:
        return O
    x3 = lam * lam - P.x - Q.x
    return ECPoint(x3, -(P.y + lam * (x3 - P.x)))


def ec_group_op(E: EllipticCurve, P: ECPoint, Q: ECPoint, negate: bool = False) -> ECPoint:
    """``P (+) Q``; with ``negate=True`` returns ``P (+) (-Q)``.

    Raises
    ------
    OffEllipticCurveError
        If an input is not on the curve.
    """
    E.check(P, Q)
    return _add(E, P, ec_negate(E, Q) if negate else Q)


def ec_multiply(E: EllipticCurve, k: int, P: ECPoint) -> ECPoint:
    """``k P`` by double-and-add."""
    E.check(P)
    if k < 0:
        k, P = -k, ec_negate(E, P)
    result, base = O, P
    while k:
        if k & 1:
            result = _add(E, result, base)
        base = _add(E, base, base)
        k >>= 1
    return result


@dataclass
class ECDivisor:
    """Formal integer combination of curve points."""

    entries: list[tuple[ECPoint, int]] = field(default_factory=list)

    @classmethod
    def of(cls, *pairs) -> "ECDivisor":
        return cls([(P, int(k)) for P, k in pairs])

    @property
    def degree(self) -> int:
        return sum(k for _, k in self.entries)

    def __add__(self, other: "ECDivisor") -> "ECDivisor":
        return ECDivisor(self.entries + other.entries).normalized()

    def __neg__(self) -> "ECDivisor":
        return ECDivisor([(P, -k) for P, k in self.entries])

    def __sub__(self, other: "ECDivisor") -> "ECDivisor":
        return self + (-other)

    def normalized(self, tol: float = _ID_TOL) -> "ECDivisor":
        """Merge coincident points and drop zero multiplicities."""
        merged: list[list] = []
        for P, k in self.entries:
            for item in merged:
                if points_close(item[0], P, tol):
                    item[1] += k
                    break
            else:
                merged.append([P, k])
        return ECDivisor([(P, k) for P, k in merged if k != 0])

    def support(self) -> list[ECPoint]:
        return [P for P, _ in self.normalized().entries]

    def positive_part(self) -> "ECDivisor":
        return ECDivisor([(P, k) for P, k in self.normalized().entries if k > 0])


def phi_of_divisor(E: EllipticCurve, D: ECDivisor) -> ECPoint:
    """Abel sum ``(+) n_P P`` with base point ``O``."""
    total = O
    for P, k in D.entries:
        E.check(P)
        total = _add(E, total, ec_multiply(E, k, P))
    return total


def is_principal(E: EllipticCurve, D: ECDivisor, tol: float = PRINCIPAL_TOL) -> bool:
    """``deg D = 0`` and ``Phi(D) = O``.

    Compares the sums of the positive and negative parts, which avoids
    deciding closeness to ``O`` in an affine chart.
    """
    if D.degree != 0:
        return False
    pos = phi_of_divisor(E, ECDivisor([(P, k) for P, k in D.entries if k > 0]))
    neg = phi_of_divisor(E, ECDivisor([(P, -k) for P, k in D.entries if k < 0]))
    return points_close(pos, neg, tol)


# ---------------------------------------------------------------------------
# Miller functions


class Line(tuple):
    """``alpha x + beta y + gamma`` as an immutable triple."""

    def __new__(cls, alpha, beta, gamma):
        return super().__new__(cls, (complex(alpha), complex(beta), complex(gamma)))

    def __call__(self, P: ECPoint) -> complex:
        al, be, ga = self
        return al * P.x + be * P.y + ga

    def scale_at(self, P: ECPoint) -> float:
        al, be, ga = self
        return abs(al * P.x) + abs(be * P.y) + abs(ga)

    def order_at_infinity(self) -> tuple[int, complex]:
        """Pole order at ``O`` and leading coefficient (``x ~ t^-2``, ``y ~ t^-3``)."""
        al, be, ga = self
        if be != 0:
            return 3, be
        if al != 0:
            return 2, al
        return 0, ga


def _vertical(P: ECPoint) -> Line:
    return Line(1.0, 0.0, -P.x)


@dataclass
class MillerFunction:
    """Straight-line program ``constant * prod line_k ** exponent_k``."""

    factors: list[tuple[Line, int]]
    divisor: ECDivisor
    curve: EllipticCurve
    constant: complex = 1.0

    def _raw(self, P: ECPoint) -> complex:
        val = complex(self.constant)
        for line, e in self.factors:
            val *= line(P) ** e
        return val

    def _at_infinity(self) -> complex:
        order, val = 0, complex(self.constant)
        for line, e in self.factors:
            k, lead = line.order_at_infinity()
            order += k * e
            val *= lead ** e
        if order != 0:
            raise ValueError("O lies in the support of the divisor")
        # x^(3k) / y^(2k) -> 1 at O
        return val

    def __call__(self, P: ECPoint) -> complex:
        """Value at a point off the support of the divisor."""
        if any(points_close(P, Q) for Q in self.divisor.support()):
            raise ValueError(f"{P!r} lies in the support of the divisor")
        if P.is_infinity:
            return self._at_infinity()
        if all(abs(line(P)) > 1e-6 * line.scale_at(P) for line, _ in self.factors):
            return self._raw(P)
        return self._circle_mean(P)

    def _circle_mean(self, P: ECPoint, count: int = 32) -> complex:
        # an intermediate line vanishes at P although f does not: average f over a
        # small circle in a local coordinate (mean value property)
        E = self.curve
        others = [Q for Q in self.divisor.support() if not Q.is_infinity]
        use_x = abs(P.y) > 1e-3 * _scale(P.x)
        dist = min((abs(Q.x - P.x) if use_x else abs(Q.y - P.y) for Q in others), default=1.0)
        # radius well inside the nearest singularity keeps the trapezoid rule exact to rounding
        h = min(1e-3 * _scale(P.x, P.y), 0.1 * dist)
        vals = []
        for theta in 2 * np.pi * (np.arange(count) + 0.5) / count:
            u = h * np.exp(1j * theta)
            if use_x:
                x = P.x + u
                y = P.y * np.sqrt(complex(E.rhs(x)) / P.y ** 2)
            else:
                y = P.y + u
                roots = np.roots([1.0, 0.0, E.a, E.b - y * y])
                x = roots[np.argmin(np.abs(roots - P.x))]
            vals.append(self._raw(ECPoint(complex(x), complex(y))))
        return complex(np.mean(vals))

    def evaluate_divisor(self, D: ECDivisor) -> complex:
        """``prod f(Q) ** n_Q`` over a divisor disjoint from the support."""
        val = 1.0 + 0j
        for Q, k in D.normalized().entries:
            val *= self(Q) ** k
        return val


def miller_build(E: EllipticCurve, D: ECDivisor, tol: float = PRINCIPAL_TOL) -> MillerFunction:
    """Function with divisor exactly ``D`` as a program of line quotients.

    Each term is folded into a running point ``T`` using
    ``div(l_{T,P} / v_{T+P}) = (T) + (P) - (T+P) - (O)`` and, for negative
    multiplicities, ``(O) - (P) = ((-P) - (O)) - div(v_P)``. For principal
    ``D`` the running point ends at ``O``.

    Raises
    ------
    NotPrincipalError
        If ``D`` is not principal.
    """
    D = D.normalized()
    for P, _ in D.entries:
        E.check(P)
    if not is_principal(E, D, tol):
        raise NotPrincipalError("divisor is not principal", {"degree": D.degree})
    factors: list[tuple[Line, int]] = []
    T = O

    def fold(P: ECPoint):
        nonlocal T
        if P.is_infinity:
            return
        if T.is_infinity:
            T = P
            return
        lam = _chord(E, T, P, tol)
        if lam is None:
            factors.append((_vertical(T), 1))
            T = O
            return
        S = _add(E, T, P, tol)
        factors.append((Line(-lam, 1.0, lam * T.x - T.y), 1))
        factors.append((_vertical(S), -1))
        T = S

    for P, k in D.entries:
        if P.is_infinity:
            continue
        for _ in range(abs(k)):
            if k > 0:
                fold(P)
            else:
                factors.append((_vertical(P), -1))
                fold(ECPoint(P.x, -P.y))
    if not T.is_infinity:
        raise NotPrincipalError("Miller reduction did not close up at O")
    return MillerFunction(_collect(factors), D, E)


def _collect(factors):
    # merge repeated lines; v_S / v_S pairs from consecutive folds cancel
    exps: dict[Line, int] = {}
    for line, e in factors:
        exps[line] = exps.get(line, 0) + e
    return [(line, e) for line, e in exps.items() if e != 0]


def forbidden_point(E: EllipticCurve, Z: ECDivisor, D_inf: ECDivisor,
                    partial_points: Iterable[ECPoint]) -> ECPoint:
    """The unique ``p_r`` making ``Z - D_inf - p_1 - ... - p_r`` principal.

    Raises
    ------
    ValueError
        If ``r = deg(Z - D_inf) <= 0`` or the wrong number of partial points is given.
    """
    partial = list(partial_points)
    r = Z.degree - D_inf.degree
    if r <= 0:
        raise ValueError("need deg(Z - D_inf) >= 1")
    if len(partial) != r - 1:
        raise ValueError(f"need {r - 1} partial points, got {len(partial)}")
    rest = Z - D_inf - ECDivisor([(p, 1) for p in partial])
    return phi_of_divisor(E, rest)


@dataclass
class Achievability:
    achievable: bool
    f: MillerFunction | None
    values: list[complex]
    reason: str = ""


def genus1_achievability(E: EllipticCurve, Z: ECDivisor, P: ECDivisor, D_inf: ECDivisor,
                         tol: float = PRINCIPAL_TOL) -> Achievability:
    """Is there ``f`` with ``div f = Z - P`` and ``f = 1`` on ``supp D_inf``?

    Raises
    ------
    ValueError
        If ``deg Z != deg P``.
    """
    if Z.degree != P.degree:
        raise ValueError("deg Z must equal deg P")
    diff = (Z - P).normalized()
    if not is_principal(E, diff, tol):
        return Achievability(False, None, [], "Z - P is not principal")
    f = miller_build(E, diff, tol)
    marks = D_inf.support()
    if any(points_close(q, s) for q in marks for s in diff.support()):
        return Achievability(False, None, [], "a marked point lies in supp(Z - P)")
    values = [f(q) for q in marks]
    if not values:
        return Achievability(True, f, values)
    ref = values[0]
    if any(abs(v - ref) > tol * max(abs(v), abs(ref)) for v in values[1:]):
        return Achievability(False, None, values, "f takes different values on D_inf")
    f.constant = 1.0 / ref
    values = [f(q) for q in marks]
    return Achievability(True, f, values)


# ---------------------------------------------------------------------------
# records


def point_to_record(P: ECPoint):
    if P.is_infinity:
        return "O"
    return [P.x.real, P.x.imag, P.y.real, P.y.imag]


def point_from_record(rec) -> ECPoint:
    if rec == "O":
        return O
    if not (isinstance(rec, list) and len(rec) == 4):
        raise ValueError(f"bad point record {rec!r}")
    return ECPoint.affine(complex(rec[0], rec[1]), complex(rec[2], rec[3]))


def divisor_to_record(D: ECDivisor) -> list:
    """``[{point, mult}, ...]`` with points as ``[x_re, x_im, y_re, y_im]`` or ``"O"``."""
    return [{"point": point_to_record(P), "mult": int(k)} for P, k in D.entries]


def divisor_from_record(rec) -> ECDivisor:
    if not isinstance(rec, list):
        raise ValueError("divisor must be a list of {point, mult} entries")
    entries = []
    for k, item in enumerate(rec):
        if not isinstance(item, dict) or set(item) != {"point", "mult"}:
            raise ValueError(f"entry {k}: expected exactly the fields point and mult")
        mult = item["mult"]
        if not isinstance(mult, int) or isinstance(mult, bool):
            raise ValueError(f"entry {k}: mult must be an integer")
        entries.append((point_from_record(item["point"]), mult))
    return ECDivisor(entries)
