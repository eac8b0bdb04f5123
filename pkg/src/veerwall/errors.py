"""Exception hierarchy.

Every error raised by the library derives from :class:`VeerwallError`.
Errors that would falsify one of the structural theorems checked by the
pipeline derive from :class:`TheoremViolation` so callers can trap them
separately from bad input.
"""


class VeerwallError(Exception):
    """Base class for all library errors."""


# -- input / codec ---------------------------------------------------------

class InputError(VeerwallError):
    """The input could not be interpreted."""


class MalformedSignature(InputError):
    pass


class AngleLengthMismatch(InputError):
    def __init__(self, digits, tet_count):
        super().__init__(
            f"angle string has {digits} digits but the triangulation "
            f"has {tet_count} tetrahedra")
        self.digits = digits
        self.tet_count = tet_count


class NonInvolutiveGluing(InputError):
    pass


# -- structure validation --------------------------------------------------

class StructureError(VeerwallError):
    """The triangulation lacks a required structure (taut, veering, ...)."""


class NotTaut(StructureError):
    def __init__(self, edge_id, angle_sum):
        super().__init__(
            f"edge {edge_id} has angle sum {angle_sum}*pi (expected 2*pi)")
        self.edge_id = edge_id
        self.angle_sum = angle_sum


class NotTransverseTaut(StructureError):
    pass


class NotVeering(StructureError):
    pass


class DomainError(VeerwallError, ValueError):
    pass


class MissingInput(VeerwallError, ValueError):
    pass


class ZeroIntersection(VeerwallError, ValueError):
    pass


class NotIrreducible(VeerwallError, ValueError):
    pass


class NoConvergence(VeerwallError, ArithmeticError):
    def __init__(self, residual, iterations):
        super().__init__(
            f"power iteration did not converge after {iterations} "
            f"iterations (residual {residual:.3e})")
        self.residual = residual
        self.iterations = iterations


# -- theorem violations ----------------------------------------------------

class TheoremViolation(VeerwallError):
    """A computed object contradicts a structural theorem.

    ``bundle`` carries enough data to reproduce the failure.
    """

    def __init__(self, message, bundle=None):
        super().__init__(message)
        self.bundle = bundle or {}


class StackPatternViolation(TheoremViolation):
    pass


class ReductionNotStronglyConnected(TheoremViolation):
    pass


class UncoveredInfinitesimalComponent(TheoremViolation):
    pass


class MalformedInfinitesimalComponent(TheoremViolation):
    pass


class AccountingMismatch(TheoremViolation):
    pass


class UnclassifiableRegion(TheoremViolation):
    pass
