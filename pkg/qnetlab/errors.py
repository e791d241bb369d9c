"""
Exception hierarchy for qnetlab
"""
from typing import Optional


class QnetlabError(Exception):
    """Base class for every fault raised by the library"""


class ConfigError(QnetlabError):
    """Invalid experiment, topology, region, potential or policy declaration"""


class TopologyError(ConfigError):
    pass


class ReducibleChainError(ConfigError):
    pass


class RegionError(ConfigError):
    pass


class EnumerationLimitError(RegionError):
    pass


class PotentialAlgebraError(ConfigError):
    """A composition rule was violated; `clause` names the failed precondition"""

    def __init__(self, clause: str, message: Optional[str] = None):
        self.clause = clause
        super().__init__(message or clause)


class PolicyConfigError(ConfigError):
    pass


class InfeasibleDepartureError(QnetlabError):
    """A departure vector exceeded the queue state (a policy bug)"""

    def __init__(self, message: str, slot: Optional[int] = None):
        self.slot = slot
        if slot is not None:
            message = f"slot {slot}: {message}"
        super().__init__(message)


class UnknownConstraintStateError(QnetlabError):
    pass


class InsufficientDataError(QnetlabError):
    pass
