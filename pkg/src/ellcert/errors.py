"""Shared exception types."""


class PreconditionFailure(ValueError):
    """A named hypothesis check failed before any certification could start.

    ``reason`` is a short machine-readable tag; the message carries detail.
    Certificate builders catch this and record a fail entry instead of
    propagating.
    """

    def __init__(self, reason: str, detail: str = ""):
        self.reason = reason
        super().__init__(f"{reason}: {detail}" if detail else reason)
