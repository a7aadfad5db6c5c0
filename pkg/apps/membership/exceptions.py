from apps.schemes.exceptions import SchemeError


class SimulationError(SchemeError):
    """A Monte-Carlo setup that cannot produce the requested estimate."""
