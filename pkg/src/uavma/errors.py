"""Exception types raised across the package."""


class ParameterError(ValueError):
    """An input value lies outside its admissible range."""


class InfeasibleLinkError(ValueError):
    """A link cannot carry data (zero rate)."""


class UsageError(RuntimeError):
    """An object was used out of order, e.g. stepping a finished episode."""


class TrainingError(RuntimeError):
    """A numerical failure during learning (non-finite loss or gradient)."""


class ConfigError(ValueError):
    """Experiment configuration failed validation.

    ``problems`` maps each offending dotted key to a message.
    """

    def __init__(self, problems):
        self.problems = dict(problems)
        msg = "; ".join(f"{k}: {v}" for k, v in self.problems.items())
        super().__init__(msg)
