"""Exception types.  The CLI maps each family onto its own exit code."""


class PairAnnealError(Exception):
    pass


class ConfigError(PairAnnealError, ValueError):
    """Invalid input: bad ranges, mismatched lengths, malformed config."""


class EigenSolverError(PairAnnealError, RuntimeError):
    pass


class DegenerateGroundState(ConfigError):
    """The initial Hamiltonian has no unique ground state to start from."""


class NumericalAbort(PairAnnealError, RuntimeError):
    """A conservation monitor left its tolerance during integration."""
