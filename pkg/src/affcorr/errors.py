"""Exception types raised by affcorr.

Every error carries a short ``reason`` code. The CLI writes it to the
sidecar stream when a record fails, so the codes are part of the record
format and should not be renamed.
"""


class AffCorrError(ValueError):
    reason = "error"


class InvalidRotation(AffCorrError):
    reason = "invalid-rotation"


class InvalidValue(AffCorrError):
    reason = "invalid-value"


class DegeneratePlane(AffCorrError):
    reason = "degenerate-plane"


class PointAtInfinity(AffCorrError):
    reason = "point-at-infinity"


class DegenerateDenominator(AffCorrError):
    reason = "degenerate-denominator"


class ZeroTranslation(AffCorrError):
    reason = "zero-translation"


class RayParallelToPlane(AffCorrError):
    reason = "ray-parallel-to-plane"


class NegativeDepth(AffCorrError):
    reason = "negative-depth"


class UninformativeTranslation(AffCorrError):
    reason = "uninformative-translation"


class IllConditioned(AffCorrError):
    reason = "ill-conditioned"


class PlaneBehindCamera(AffCorrError):
    reason = "plane-behind-camera"


class DegenerateAffine(AffCorrError):
    reason = "degenerate-affine"


class ExhaustedRejection(AffCorrError):
    reason = "exhausted-rejection"


class MissingField(AffCorrError):
    reason = "missing-field"


class InvalidRecord(AffCorrError):
    reason = "invalid-record"
