"""Exception hierarchy.

Exit-code convention for the CLI: mathematical domain errors map to exit
code 2, resource/feature limits (budgets, unsupported charts or
characteristics) map to exit code 3.
"""


class BrFibreError(Exception):
    exit_code = 2


class DomainError(BrFibreError):
    """Input outside the mathematical domain of an operation."""


class UnsupportedCharacter(DomainError):
    """Character order does not divide the order of the unit group."""


class DegenerateResidue(DomainError):
    """Residue function vanishes identically on the special fibre."""


class IndeterminateAtPoint(DomainError):
    """Every registered representative of a torsor is 0 or undefined there."""


class SingularReduction(DomainError):
    """Point reduces to a singular point of the special fibre."""


class NonIsolated(DomainError):
    """Singular locus is (or may be) positive-dimensional."""


class NotADE(DomainError):
    """Isolated singularity falls outside the A-D-E range."""


class TableMiss(DomainError):
    """No shipped table row for this (degree, singularity type)."""


class ComponentError(DomainError):
    """Smooth locus of the special fibre is visibly disconnected."""


class NoDeterminatePoints(DomainError):
    """Enumeration found no smooth point where the torsor is determinate."""


class CacheError(BrFibreError):
    """Point-count cache file is unreadable or inconsistent."""


class BudgetExceeded(BrFibreError):
    exit_code = 3


class UnsupportedChart(BrFibreError):
    exit_code = 3


class UnsupportedCharacteristic(BrFibreError):
    exit_code = 3


class Unsupported(BrFibreError):
    exit_code = 3
