"""Exception hierarchy shared by all ppbf modules."""


class PPBFError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameterError(PPBFError, ValueError):
    pass


class ContractError(PPBFError, AssertionError):
    """A documented precondition or postcondition did not hold."""


class TemplateOverflowError(PPBFError, OverflowError):
    pass


class DecoderConfigurationError(PPBFError, RuntimeError):
    """The decoder cannot proceed with the given depth / template."""
