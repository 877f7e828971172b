"""Client-side field encryption with server-searchable prefix tags.

Plaintext never leaves the client. Each field value is serialized as a
version header, a run of deterministic per-character prefix tags, and a
randomized authenticated body; the server answers prefix queries by plain
string matching on that serialized form and can neither read values nor
forge them.
"""

from .cipher import EncryptionContext, decrypt_text, encrypt_text, make_query_token
from .codec import FieldCiphertext, normalize, parse, serialize
from .errors import (
    AuthenticationFailed,
    EmptyPassword,
    EmptyTerm,
    InvalidContext,
    InvalidParams,
    InvalidSalt,
    MalformedCiphertext,
    MissingPassword,
    NotEncryptedField,
    PrefixSealError,
    SchemaViolation,
    UnknownField,
    UnknownUser,
    ValidationFailed,
)
from .keyring import (
    CheckWordSet,
    KdfParams,
    KeyRing,
    derive_keyring,
    derive_master_key,
    derive_subkeys,
    make_check_words,
    verify_password,
)
from .search import match_prefix, oracle_search, search_corpus
from .store import FieldSpec, RecordStore, StoreSchema

__version__ = "0.1.0"

__all__ = [
    "AuthenticationFailed",
    "CheckWordSet",
    "EmptyPassword",
    "EmptyTerm",
    "EncryptionContext",
    "FieldCiphertext",
    "FieldSpec",
    "InvalidContext",
    "InvalidParams",
    "InvalidSalt",
    "KdfParams",
    "KeyRing",
    "MalformedCiphertext",
    "MissingPassword",
    "NotEncryptedField",
    "PrefixSealError",
    "RecordStore",
    "SchemaViolation",
    "StoreSchema",
    "UnknownField",
    "UnknownUser",
    "ValidationFailed",
    "decrypt_text",
    "derive_keyring",
    "derive_master_key",
    "derive_subkeys",
    "encrypt_text",
    "make_check_words",
    "make_query_token",
    "match_prefix",
    "normalize",
    "oracle_search",
    "parse",
    "search_corpus",
    "serialize",
    "verify_password",
]
