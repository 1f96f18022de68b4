"""Exception types shared across the package.

Two broad classes of failure exist and the CLI maps them to different exit
codes: input/argument problems (bad ranges, caps, domains) and violations of
mathematical invariants that the algorithms are supposed to maintain.  The
latter are never silently swallowed; they indicate either a precision bug or
a base beta outside the validity region of a construction.
"""


class BetaPrefixError(Exception):
    """Base class for all package errors."""


class NoRootFound(BetaPrefixError):
    """No sign change detected while scanning (1, 2) for a polynomial root."""


class InvalidPoint(BetaPrefixError):
    """A point lies outside the admissible interval [0, 1/(beta-1)]."""


class CapExceeded(BetaPrefixError):
    """A brute-force operation was asked to exceed its hard size cap."""


class MemoryGuard(BetaPrefixError):
    """An enumeration would exceed its survivor/array budget; aborted."""


class Unreachable(BetaPrefixError):
    """No orbit word within the depth cap maps a point into the target
    interval.  Mathematically the target must be reachable, so this signals
    a precision or bookkeeping bug and is raised loudly."""


class ContainmentViolation(BetaPrefixError):
    """A generated extension left its steering interval.  This falsifies the
    defining inequality of the construction for the given beta."""


class NoSteeringWord(BetaPrefixError):
    """No steering word of the required length returns the orbit to the
    steering interval; the paired-branch construction fails for this beta."""


class DepthExceeded(BetaPrefixError):
    """Measure recursion asked for a depth beyond the supported maximum."""


class OutOfDomain(BetaPrefixError):
    """A formula or construction was evaluated outside its validity range."""
