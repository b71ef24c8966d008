"""Exception taxonomy.

Every failure mode of the pipeline maps to one of these classes; the CLI
translates them to documented exit codes (see cli.EXIT_*).
"""


class SpeclatError(Exception):
    """Base class for all library errors."""


class InvalidSize(SpeclatError):
    """Lattice parameters out of range (N < 2 or M < 1)."""


class NeedsFloating(SpeclatError):
    """Operation requires fractional powers of values; exact-rational mode refused."""


class NotPolynomialInZ(SpeclatError):
    """A Laurent polynomial has exponents not divisible by the root order."""


class FloatingConditioning(SpeclatError):
    """Interpolation nodes for the floating determinant are too ill-conditioned."""


class DegenerateRoots(SpeclatError):
    """Root finder detected a multiple root but the caller asked for simple roots."""


class ChainMismatch(SpeclatError):
    """Chain products disagree: the state lies outside the equal-chain-product sector."""


class StepRejected(SpeclatError):
    """A time step drove some V_n out of (0, inf); dt is too large."""


class CollapseFailure(SpeclatError):
    """A monodromy entry kept a zeta exponent not divisible by N (implementation fault)."""


class DegreeMismatch(SpeclatError):
    """deg B != g; the state is degenerate (e.g. vanishing zero mode)."""


class ZeroB(SpeclatError):
    """The separating polynomial B(z) vanished identically."""


class DegenerateDivisor(SpeclatError):
    """Divisor points collide below tolerance."""


class RamificationPoint(DegenerateDivisor):
    """A divisor point sits at a ramification point of the curve (dF/dw = 0)."""


class SingularS(SpeclatError):
    """The gauge matrix S is singular; the representative is undefined here."""


class DegenerateState(SpeclatError):
    """A leading diagonal entry of mu_0 vanished; centrality checks reject the state."""


class SectorViolation(SpeclatError):
    """Parameters leave the constrained sector a worked example requires."""


class PoleAtOne(SpeclatError):
    """The r-matrix was evaluated at x = 1."""


class StateFormatError(SpeclatError):
    """A state file is malformed."""
