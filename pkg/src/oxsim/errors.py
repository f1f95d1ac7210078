"""Exception types shared across the simulator.

Each maps to a CLI exit code (see cli.py): ConfigError -> 1,
TopologyError -> 2, EvaluationError -> 3, InfeasibleError -> 4.
"""


class OxsimError(Exception):
    """Base class for all simulator errors."""


class ConfigError(OxsimError):
    """Bad configuration: unknown key, invalid value, unreadable file."""


class TopologyError(OxsimError):
    """Bad network topology file: missing, malformed row, invalid dims."""


class EvaluationError(OxsimError):
    """A model evaluation failed; message names the offending config."""


class InfeasibleError(OxsimError):
    """An optimization constraint cannot be met; message names the step."""
