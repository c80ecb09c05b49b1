"""Exception hierarchy shared by all modules.

Each class carries the CLI exit code it maps to: 1 for bad input, 2 for a
mathematical degeneracy, 3 for a violated internal invariant.
"""


class SolitonSurfError(Exception):
    exit_code = 3


class InputError(SolitonSurfError):
    exit_code = 1


class ParseError(InputError):
    pass


class ZeroSeed(InputError):
    pass


class CommonFactorSeed(InputError):
    """Seed components share a nonconstant polynomial factor."""


class NotHolomorphicSeed(InputError):
    pass


class IndexOutOfRange(InputError, IndexError):
    pass


class LengthMismatch(InputError, ValueError):
    pass


class DimensionTooSmall(InputError, ValueError):
    pass


class DegeneracyError(SolitonSurfError):
    exit_code = 2


class Annihilated(DegeneracyError):
    """A ladder operator maps its argument to zero."""


class PrematureAnnihilation(DegeneracyError):
    pass


class DegenerateProjector(DegeneracyError):
    pass


class RankDeficient(DegeneracyError):
    pass


class PoleAtPoint(DegeneracyError):
    pass


class StencilOutOfGrid(InputError):
    pass


class NotHermitian(InputError, ValueError):
    pass


class NoConvergence(SolitonSurfError):
    pass


class PropositionViolated(SolitonSurfError):
    """Raised when a combinatorial statement about the spectrum fails."""
