"""
Exceptions raised by scheme construction and evaluation.
"""


class SchemeError(ValueError):
    """Invalid parameters, mismatched dimensions or inconsistent distributions."""


class IntractableTypeSpace(SchemeError):
    """The type space is larger than the configured enumeration cap."""

    def __init__(self, alphabet_size, group_size, type_count, cap):
        self.alphabet_size = alphabet_size
        self.group_size = group_size
        self.type_count = type_count
        self.cap = cap
        super().__init__(
            f"{type_count} types for |X|={alphabet_size}, n={group_size} "
            f"exceeds the enumeration cap of {cap}"
        )


class UnverifiableScheme(SchemeError):
    """A scheme with V <= 0 cannot reach any false-positive target."""
