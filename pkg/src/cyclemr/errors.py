"""Error types shared across the package."""


class CycleMRError(Exception):
    """Base class for all cyclemr errors."""


class CapExceeded(CycleMRError):
    """An exhaustive enumeration would exceed the configured node cap."""


class LeafNode(CycleMRError):
    """Requested children of a leaf partition."""


class NotInSubspace(CycleMRError):
    """Instance does not descend from the given partition."""


class IndexOutOfRange(CycleMRError):
    """Arc index outside the valid range for its level."""


class BadSize(CycleMRError):
    """Point count incompatible with the requested topology."""


class UnknownID(CycleMRError):
    """Point ID outside the instance."""


class MixedInstance(CycleMRError):
    """Path operation across two different instances."""


class NotIntersecting(CycleMRError):
    """Merge requested for paths whose union is not a path."""


class CapacityInfeasible(CycleMRError):
    """Initial placement cannot fit within machine memory."""


class MemoryExceeded(CycleMRError):
    """A machine inbox exceeded its memory cap.

    Caught by the run loop and recorded in the trace; only escapes when
    a single round is driven directly.
    """

    def __init__(self, machine: int, round_no: int, count: int, cap: int):
        self.machine = machine
        self.round_no = round_no
        self.count = count
        self.cap = cap
        super().__init__(
            f"machine {machine} holds {count} paths in round {round_no}, cap is {cap}"
        )


class NoCommonPath(CycleMRError):
    """The supplied path is not present in both instances."""


class EmptyRouting(CycleMRError):
    """A strategy failed to route a path to at least one machine."""


class Underdetermined(CycleMRError):
    """Not enough decided cells to fit a regression."""
