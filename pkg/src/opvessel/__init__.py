"""Operator vessels for overdetermined 2D linear systems.

Transfer functions living on plane algebraic curves, admissible state
feedback, and pole placement through divisors on the curve (genus 0 via
rational interpolation, genus 1 via the elliptic group law).
"""

from .errors import VesselError
from .numeric import DEFAULT_TOL, ToleranceProfile, eig_decompose, nullspace_basis, rank_with_tol
from .vessel import (
    BivariatePoly,
    CurvePoint,
    Direction,
    Vessel,
    curve_fiber,
    discriminant_polys,
    find_regular_direction,
    is_regular_direction,
    minimality_report,
    sample_curve_points,
    similarity_transform,
    validate_vessel,
)
from .transfer import (
    Divisor,
    DivisorEntry,
    RealizedRMF,
    divisor_contains,
    joint_spectrum,
    placement_condition_check,
    restricted_transfer,
    rmf_eval,
    rmf_inverse,
    rmf_pole_divisor,
    rmf_zero_divisor,
    transfer_eval,
    vessel_spectrum,
)
from .feedback import (
    admissible_basis,
    closed_loop,
    controller_vessel,
    factorization_check,
    is_admissible,
)
from .genus0 import (
    LineVesselSpec,
    ackermann_oracle,
    basis_L_genus0,
    build_f,
    build_line_vessel,
    feedback_dimension,
    nf_determinant,
    place_poles_genus0,
    solve_interpolation,
)
from .elliptic import (
    ECDivisor,
    ECPoint,
    EllipticCurve,
    ec_group_op,
    forbidden_point,
    genus1_achievability,
    is_principal,
    miller_build,
    phi_of_divisor,
)

from .families import random_line_vessel, random_pencil_vessel

__version__ = "0.1.0"
