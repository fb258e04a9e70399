"""Exception base shared by all modules."""


class NdposError(ValueError):
    """Base class; ``tag`` is the stable error identifier used in reports."""

    tag = "Error"
