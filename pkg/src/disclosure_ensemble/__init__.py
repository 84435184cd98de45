"""Disclosure/support label ensembling, evaluation and corpus analysis."""

__version__ = "0.1.0"

LABELS = (
    "emotional_disclosure",
    "informational_disclosure",
    "support",
    "general_support",
    "informational_support",
    "emotional_support",
)


class DataError(ValueError):
    """Input violates a data contract (bad value, duplicate id, missing cell...)."""


class ParseError(ValueError):
    """An input file could not be parsed.

    ``source`` and ``line`` are filled in when known so the CLI can point at
    the offending location.
    """

    def __init__(self, message, source=None, line=None):
        self.source = source
        self.line = line
        where = ""
        if source is not None:
            where = f"{source}:"
            if line is not None:
                where += f"{line}:"
            where += " "
        elif line is not None:
            where = f"line {line}: "
        super().__init__(where + message)
