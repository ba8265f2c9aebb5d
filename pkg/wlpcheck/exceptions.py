"""Exceptions raised by ``wlpcheck``."""


class WlpCheckException(Exception):
    """Base class for exceptions raised by wlpcheck"""

    pass


class UnboundedSeriesException(WlpCheckException):
    """Raise if a bracket series is requested that never turns non-positive and no cap was given"""

    pass


class ZeroSeriesException(WlpCheckException):
    """Raise if the degree of the zero series is requested"""

    pass


class NoValidSException(WlpCheckException):
    """Raise if no half-integer satisfies the difference sequence hypotheses"""

    pass


class InvalidFieldException(WlpCheckException):
    """Raise if a modulus is not a prime in the supported range"""

    pass


class SizeMismatchException(WlpCheckException):
    """Raise if the number of nodes or coefficients does not match the arity"""

    pass


class ZeroFormException(WlpCheckException):
    """Raise if a linear form with only zero coefficients is constructed"""

    pass


class RepeatedNodesException(WlpCheckException):
    """Raise if nodes that must be pairwise distinct coincide"""

    pass


class EvenArityException(WlpCheckException):
    """Raise if a form that only exists for an odd number of variables is requested for even n"""

    pass


class NonArtinianException(WlpCheckException):
    """Raise if the quotient does not vanish below the degree cap"""

    pass


class InfeasibleSizesException(WlpCheckException):
    """Raise if cover family sizes do not add up to multiplicity times universe size"""

    pass


class ParityException(WlpCheckException):
    """Raise if a subset size does not correspond to an integral mixed form degree"""

    pass


class VerificationException(WlpCheckException):
    """Raise if a computed certificate fails its own verification"""

    pass
