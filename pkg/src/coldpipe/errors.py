"""Exception types shared across the package."""


class ColdpipeError(Exception):
    """Base class for coldpipe-specific failures."""


class ConfigError(ColdpipeError):
    """Scenario config file is missing, malformed, or carries unknown keys."""


class DegenerateScenarioError(ColdpipeError):
    """A device ended up with zero effective compute or a zero link rate."""


class PlanError(ColdpipeError):
    """A plan violates contiguity, device-uniqueness, or memory constraints."""


class InfeasibleError(ColdpipeError):
    """No plan satisfies the per-device memory constraints."""
