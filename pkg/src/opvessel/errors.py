"""Exception hierarchy.

Every exception carries a module-qualified ``code`` string so that batch
front ends can report failures without parsing messages.
"""


class VesselError(ValueError):
    code = "opvessel.error"

    def __init__(self, message, payload=None):
        super().__init__(message)
        self.payload = dict(payload or {})


class DimensionError(VesselError):
    code = "vessel.dimension"


class NotSquareError(VesselError):
    code = "numeric.not_square"


class NoRegularDirectionError(VesselError):
    code = "vessel.no_regular_direction"


class OffCurveError(VesselError):
    code = "vessel.off_curve"


class NumericalInconsistencyError(VesselError):
    code = "vessel.numerical_inconsistency"


class TransversalityError(VesselError):
    code = "vessel.transversality"


class SingularMatrixError(VesselError):
    code = "numeric.singular"


class NonCommutingError(VesselError):
    code = "transfer.non_commuting"


class SpectrumPointError(VesselError):
    """Evaluation requested at (or numerically on top of) a pole."""

    code = "transfer.pole"


class NonMinimalError(VesselError):
    code = "transfer.non_minimal"


class InadmissibleFeedbackError(VesselError):
    code = "feedback.inadmissible"


class NFTupleError(VesselError):
    """The interpolation points lie in the no-feedback set."""

    code = "placement.nf_tuple"


class PlacementError(VesselError):
    code = "placement.failed"


class OffEllipticCurveError(VesselError):
    code = "elliptic.off_curve"


class NotPrincipalError(VesselError):
    code = "elliptic.not_principal"


class ConfigError(VesselError):
    code = "cli.config"
