"""Exception classes; each carries the CLI exit code of its failure class."""


class SubadicError(Exception):
    exit_code = 5


class InvalidInput(SubadicError):
    """Malformed substitution/rule text, foreign letters, bad parameters."""
    exit_code = 2


class GateError(SubadicError):
    """A hypothesis needed by a later stage does not hold (or is not applicable)."""
    exit_code = 3


class BudgetExceeded(SubadicError):
    exit_code = 4


class InternalInconsistency(SubadicError):
    exit_code = 5
