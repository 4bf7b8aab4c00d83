"""Exception hierarchy shared by all invgeo modules."""


class GeodesicError(Exception):
    """Base class for every error raised by invgeo."""


class InvalidDomain(GeodesicError, ValueError):
    pass


class OutOfDomain(GeodesicError, ValueError):
    pass


class NonpositiveOmega(GeodesicError, ValueError):
    pass


class SingularOrbit(GeodesicError, ValueError):
    """The Killing field vanishes at the point, so the orbit degenerates."""


class Unsupported(GeodesicError, NotImplementedError):
    pass


class IntegratorStall(GeodesicError, RuntimeError):
    pass


class SlantRegionViolation(GeodesicError, ValueError):
    """omega <= |c| somewhere strictly inside a quadrature segment."""


class NotApplicable(GeodesicError, ValueError):
    pass


class BranchDomainError(GeodesicError, ValueError):
    """A closed-form argument left the domain of arcsin/ln/artanh/sqrt."""
