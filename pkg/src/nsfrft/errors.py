"""Exception types shared across the package."""


class NsfrftError(Exception):
    """Base class for all errors raised by this package."""


class IdentityPointError(NsfrftError):
    """Operation undefined at the identity parameter point (1,0,0,0,0)."""


class ZeroTError(NsfrftError):
    """The scalar T vanishes; the transform is degenerate for these parameters."""


class NotARotationError(NsfrftError):
    """Matrix is not orthogonal with determinant +1 within tolerance."""


class NonSymmetricError(NsfrftError):
    """A chirp matrix that must be symmetric is not."""


class NonSymmetricFactorError(NsfrftError):
    """A matrix factor required to be symmetric by a decomposition is not."""


class SingularMatrixError(NsfrftError):
    """A matrix that must be invertible is singular or near-singular."""


class DecompositionFailureError(NsfrftError):
    """No valid operator decomposition exists for the requested spec."""


class DimensionMismatchError(NsfrftError):
    """Operands have incompatible shapes."""


class GeometryMismatchError(NsfrftError):
    """Grid geometry is incompatible with the requested operation."""


class TooLargeError(NsfrftError):
    """Input exceeds the size limit of an O(N^4) computation."""
