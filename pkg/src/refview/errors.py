"""Exception hierarchy shared across the package.

Every error raised by refview derives from RefViewError so callers (and the
CLI exit-code mapping) can distinguish library failures from bugs.
"""


class RefViewError(Exception):
    """Base class for all refview errors."""


class ConfigError(RefViewError):
    """Scenario config file is missing, malformed, or has unknown keys."""


# --- view grid ---------------------------------------------------------------

class NonIntegralPosition(RefViewError):
    """A view position does not land on the tick lattice."""


class EmptyCameraSet(RefViewError):
    """Fewer than two camera views were supplied."""


# --- distortion --------------------------------------------------------------

class InvalidOrdering(RefViewError):
    """Synthesis target is not enclosed by its reference pair."""


class Unsynthesizable(RefViewError):
    """A virtual view lies outside the camera hull and cannot be built."""


class DuplicateKey(RefViewError):
    """A tabulated distortion file repeats a (u, v_l, v_r) triple."""


class NegativeDistortion(RefViewError):
    """A tabulated distortion value is negative."""


# --- solvers -----------------------------------------------------------------

class NoValidProbe(RefViewError):
    """No tick lies strictly between the compared left references and the probe right reference."""


class Infeasible(RefViewError):
    """No reference selection satisfies the budget and coverage constraints."""


class CoverageGap(RefViewError):
    """A reference set leaves window ticks without any enclosing pair."""

    def __init__(self, uncovered):
        self.uncovered = tuple(uncovered)
        super().__init__(f"uncovered ticks: {self.uncovered}")


class TooLarge(RefViewError):
    """Instance exceeds the enumeration guard of the exact solvers."""


# --- reduction ---------------------------------------------------------------

class InvalidParameters(RefViewError):
    """Gadget construction parameters are out of range."""


# --- gauss-markov ------------------------------------------------------------

class IndexOutOfRange(RefViewError):
    """A chain index is outside 1..N."""
