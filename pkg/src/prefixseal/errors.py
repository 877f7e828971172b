"""Exception types shared across the prefixseal package.

Codes matter: the HTTP service reports the class name of a domain error as
its ``{"error": ...}`` payload, and the CLI maps classes to exit codes, so
renaming one of these is a wire-format change.
"""


class PrefixSealError(Exception):
    """Base class for all prefixseal errors."""


class EmptyPassword(PrefixSealError):
    """Password is empty after UTF-8 encoding."""


class InvalidParams(PrefixSealError):
    """KDF parameters violate the cost or salt constraints."""


class InvalidContext(PrefixSealError):
    """Encryption context fields out of range (field id, pref_len, token width)."""


class EmptyTerm(PrefixSealError):
    """Search term is empty; no query token can be built."""


class MalformedCiphertext(PrefixSealError):
    """Serialized ciphertext violates the wire grammar.

    ``reason`` is one of: bad_version, bad_header, bad_tag_width,
    bad_encoding, bad_section_count.
    """

    def __init__(self, reason: str, detail: str = ""):
        self.reason = reason
        super().__init__(f"{reason}: {detail}" if detail else reason)


class AuthenticationFailed(PrefixSealError):
    """AEAD rejected the body: wrong key or tampered ciphertext/header/tags."""


class SchemaViolation(PrefixSealError):
    """Record or input does not conform to the declared store schema."""


class ValidationFailed(PrefixSealError):
    """Per-entry encrypt/decrypt/compare cycle failed during batch encryption."""

    def __init__(self, row: int, field: str, message: str = ""):
        self.row = row
        self.field = field
        detail = f"row {row}, field {field!r}"
        super().__init__(f"{detail}: {message}" if message else detail)


class UnknownUser(PrefixSealError):
    """No stored material for this user."""


class UnknownField(PrefixSealError):
    """Field id is not declared in the store schema."""


class NotEncryptedField(PrefixSealError):
    """Field is declared clear; prefix-token queries do not apply."""


class InvalidSalt(PrefixSealError):
    """Salt is not exactly 16 bytes of hex."""


class MissingPassword(PrefixSealError):
    """No password available from the environment or an interactive prompt."""
