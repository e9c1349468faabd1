"""Exception hierarchy shared across the package."""


class EuclidSRError(Exception):
    """Base class for all package errors."""


class ContractViolation(EuclidSRError):
    """An operation was called outside its stated precondition."""


class UnknownAgentError(EuclidSRError):
    """An agent id could not be resolved in the instance."""


class InvalidInstanceError(EuclidSRError):
    """Instance-level invariant broken (bad d, duplicate ids, non-finite coords)."""


class PartitionError(EuclidSRError):
    """Base for matching-construction failures."""


class CoalitionSizeError(PartitionError):
    """A coalition does not have exactly d members."""


class OverlapError(PartitionError):
    """Two coalitions share an agent."""


class CoverageError(PartitionError):
    """Some agent is left unmatched (or is not part of the instance)."""


class ConstructionError(EuclidSRError):
    """A gadget builder was given parameters it cannot realize."""


class LayoutError(EuclidSRError):
    """An orthogonal layout is malformed or cannot be processed."""


class ChainFitError(EuclidSRError):
    """No epsilon sequence fits the chain onto the requested path."""


class ReductionError(EuclidSRError):
    """The reduction post-validator rejected a built instance."""


class BudgetExhausted(EuclidSRError):
    """A bounded search ran out of node budget before finishing."""
