"""Password-based key material: Argon2id master key, HKDF subkeys, check-words.

- Master key: Argon2id over the UTF-8 password (plus an optional
  application-wide pepper), 32 bytes out. The salt is per-user, random,
  16 bytes, stored server-side in clear so the same key can be re-derived
  on any device.
- Subkeys: HKDF-SHA-256 with fixed, distinct info labels. Prefix tags,
  field bodies, and check-words never share a raw AES key.
- Check-words: a fixed word triple encrypted with prefix length zero under
  a reserved field id. Decrypting them successfully proves the entered
  password is the provisioning password; the server stores only ciphertext.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from cryptography.hazmat.primitives.hashes import SHA256
from cryptography.hazmat.primitives.kdf.argon2 import Argon2id
from cryptography.hazmat.primitives.kdf.hkdf import HKDF

from .errors import EmptyPassword, InvalidParams, MalformedCiphertext

MASTER_KEY_SIZE = 32
SALT_SIZE = 16
DEFAULT_MEMORY_COST_KIB = 65536
DEFAULT_TIME_COST = 3
DEFAULT_PARALLELISM = 1

HKDF_INFO_PREFIX = b"prefixseal/v1/prefix"
HKDF_INFO_BODY = b"prefixseal/v1/body"
HKDF_INFO_CHECK = b"prefixseal/v1/check"

# Reserved field id for check-word ciphertexts; their bodies are encrypted
# under k_check instead of k_body (see cipher.EncryptionContext).
CHECK_FIELD_ID = "__check__"
CANONICAL_CHECK_WORDS = ("check-alpha", "check-beta", "check-gamma")


@dataclass(frozen=True)
class KdfParams:
    """Argon2id cost parameters plus the per-user salt.

    Defaults are an interactive-login profile (64 MiB, 3 passes, 1 lane);
    output length is pinned at 32 bytes for the AES-256-GCM-SIV keys built
    on top.
    """

    salt: bytes
    memory_cost: int = DEFAULT_MEMORY_COST_KIB  # KiB
    time_cost: int = DEFAULT_TIME_COST
    parallelism: int = DEFAULT_PARALLELISM
    output_length: int = MASTER_KEY_SIZE

    def __post_init__(self):
        if self.output_length != MASTER_KEY_SIZE:
            raise InvalidParams(f"output_length must be {MASTER_KEY_SIZE}")
        if len(self.salt) != SALT_SIZE:
            raise InvalidParams(f"salt must be {SALT_SIZE} bytes, got {len(self.salt)}")
        if self.parallelism < 1:
            raise InvalidParams("parallelism must be at least 1")
        if self.memory_cost < 8 * self.parallelism:
            raise InvalidParams("memory_cost must be at least 8 KiB per lane")
        if self.time_cost < 1:
            raise InvalidParams("time_cost must be at least 1")

    @classmethod
    def with_fresh_salt(cls, **overrides) -> "KdfParams":
        """Parameters with a new random salt, for provisioning."""
        return cls(salt=os.urandom(SALT_SIZE), **overrides)


@dataclass(frozen=True, repr=False)
class KeyRing:
    """Derived secret material for one session. Immutable; safe to share
    across threads. repr never prints key bytes."""

    master: bytes
    k_prefix: bytes
    k_body: bytes
    k_check: bytes

    def __repr__(self) -> str:
        return "KeyRing(<secret>)"


def derive_master_key(password: str, params: KdfParams, pepper: str | None = None) -> bytes:
    """Argon2id(password [+ pepper], salt, costs) -> 32 bytes. Deterministic.

    The optional pepper is an application-wide secret appended to the
    password bytes before stretching; it is off by default.
    """
    secret = password.encode("utf-8")
    if not secret:
        raise EmptyPassword("password is empty")
    if pepper:
        secret += pepper.encode("utf-8")
    kdf = Argon2id(
        salt=params.salt,
        length=params.output_length,
        iterations=params.time_cost,
        lanes=params.parallelism,
        memory_cost=params.memory_cost,
    )
    return kdf.derive(secret)


def _hkdf_subkey(master: bytes, info: bytes) -> bytes:
    return HKDF(algorithm=SHA256(), length=32, salt=None, info=info).derive(master)


def derive_subkeys(master: bytes) -> KeyRing:
    """Expand a 32-byte master key into the domain-separated key ring."""
    if len(master) != MASTER_KEY_SIZE:
        raise InvalidParams(f"master key must be {MASTER_KEY_SIZE} bytes")
    return KeyRing(
        master=master,
        k_prefix=_hkdf_subkey(master, HKDF_INFO_PREFIX),
        k_body=_hkdf_subkey(master, HKDF_INFO_BODY),
        k_check=_hkdf_subkey(master, HKDF_INFO_CHECK),
    )


def derive_keyring(password: str, params: KdfParams, pepper: str | None = None) -> KeyRing:
    """Password to full key ring in one step. KDF-heavy; run once per session."""
    return derive_subkeys(derive_master_key(password, params, pepper))


@dataclass(frozen=True)
class CheckWordSet:
    """Ordered check-word ciphertexts as stored on the server."""

    words: tuple[str, ...] = field(default=())

    @classmethod
    def from_words(cls, words) -> "CheckWordSet":
        """Validate a stored list structurally: at least three entries, each
        parsing as a v1 ciphertext with declared prefix length zero."""
        from . import codec

        words = tuple(words)
        if len(words) < 3:
            raise MalformedCiphertext("bad_section_count", "check-word set needs >= 3 entries")
        for entry in words:
            ct = codec.parse(entry)
            if ct.declared_pref_len != 0:
                raise MalformedCiphertext("bad_header", "check-word must use prefix length 0")
        return cls(words)


def make_check_words(ring: KeyRing) -> CheckWordSet:
    """Encrypt the canonical word list under the check subkey, prefix length 0.

    Each call draws fresh body nonces, so two invocations produce different
    ciphertexts that both verify.
    """
    from .cipher import EncryptionContext, encrypt_text

    ctx = EncryptionContext(ring=ring, field_id=CHECK_FIELD_ID, pref_len=0)
    return CheckWordSet(tuple(encrypt_text(ctx, word) for word in CANONICAL_CHECK_WORDS))


def verify_password(ring: KeyRing, stored: CheckWordSet) -> bool:
    """True iff every stored entry decrypts under this ring to the
    corresponding canonical word.

    A wrong password fails the AEAD tag and returns False; it never raises.
    MalformedCiphertext still propagates for structurally broken entries,
    which is a storage problem rather than a password problem.
    """
    from .cipher import EncryptionContext, decrypt_text
    from .errors import AuthenticationFailed

    if len(stored.words) != len(CANONICAL_CHECK_WORDS):
        return False
    ctx = EncryptionContext(ring=ring, field_id=CHECK_FIELD_ID, pref_len=0)
    for entry, expected in zip(stored.words, CANONICAL_CHECK_WORDS):
        try:
            if decrypt_text(ctx, entry) != expected:
                return False
        except AuthenticationFailed:
            return False
    return True
