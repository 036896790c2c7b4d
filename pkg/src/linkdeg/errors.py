"""Exception hierarchy.

Every error carries an ``exit_code`` so the CLI can map failures onto its
exit-code contract without a lookup table: 2 for precondition violations,
3 for numerical non-convergence.
"""


class LinkdegError(Exception):
    exit_code = 4


class PreconditionError(LinkdegError, ValueError):
    exit_code = 2


class UnsupportedDimension(PreconditionError):
    pass


class DimensionMismatch(PreconditionError):
    pass


class OutOfBall(PreconditionError):
    pass


class OutOfDomain(PreconditionError):
    pass


class EmptySubdomain(PreconditionError):
    pass


class WindowEmpty(PreconditionError):
    pass


class InvalidMesh(PreconditionError):
    pass


class BoundaryHit(PreconditionError):
    pass


class SingularPreimage(PreconditionError):
    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class DegenerateSimplex(PreconditionError):
    pass


class ZeroVertex(PreconditionError):
    pass


class NearZero(PreconditionError):
    pass


class ImagesIntersect(PreconditionError):
    def __init__(self, message, separation=None):
        super().__init__(message)
        self.separation = separation


class SingularJacobian(PreconditionError):
    pass


class NotInverse(PreconditionError):
    pass


class UnknownEntry(PreconditionError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class NotConverged(LinkdegError):
    exit_code = 3

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result
