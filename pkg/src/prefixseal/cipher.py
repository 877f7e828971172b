"""Field encryption: deterministic prefix tags plus a randomized sealed body.

Everything runs under AES-256-GCM-SIV, split across subkeys:

- Prefix tags (k_prefix): one short deterministic token per prefix
  character, computed with a fixed all-zero nonce. GCM-SIV is nonce-misuse
  resistant, so a repeated nonce with unique associated data is a safe
  deterministic construction. The AAD chains field id, position, and all
  preceding characters, so equal tokens at position i mean equal prefixes
  through position i, and per-character frequency analysis across different
  prefixes gets nothing. Tokens are truncated to a few bytes and are not
  decryptable; collisions are rare and only widen a search result set.
- Body (k_body, or k_check for the reserved check-word field): the full
  plaintext sealed with a fresh random 12-byte nonce per call, with the
  serialized header-plus-tag-section string as AAD. Splicing a tag section
  or header onto another record's body therefore fails authentication.

Decryption reads only the body. Repeated encryption of the same text keeps
the tag section identical and varies everything after it.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives.ciphers.aead import AESGCMSIV

from . import codec
from .errors import AuthenticationFailed, EmptyTerm, InvalidContext
from .keyring import CHECK_FIELD_ID, KeyRing

ZERO_NONCE = b"\x00" * codec.NONCE_SIZE
_AAD_SEP = b"\x1f"


@dataclass(frozen=True)
class EncryptionContext:
    """One field's encryption configuration bound to a derived key ring.

    Immutable and thread-safe; cipher objects are built once at
    construction. The password itself is never handled here, only derived
    keys.
    """

    ring: KeyRing
    field_id: str
    pref_len: int
    token_width: int = codec.DEFAULT_TOKEN_WIDTH

    def __post_init__(self):
        if not codec.is_valid_field_id(self.field_id):
            raise InvalidContext(f"bad field id {self.field_id!r}")
        if not 0 <= self.pref_len <= codec.MAX_PREF_LEN:
            raise InvalidContext(f"pref_len {self.pref_len} out of range 0..255")
        if not codec.MIN_TOKEN_WIDTH <= self.token_width <= codec.MAX_TOKEN_WIDTH:
            raise InvalidContext(f"token_width {self.token_width} out of range 1..16")
        body_key = self.ring.k_check if self.field_id == CHECK_FIELD_ID else self.ring.k_body
        object.__setattr__(self, "_prefix_aead", AESGCMSIV(self.ring.k_prefix))
        object.__setattr__(self, "_body_aead", AESGCMSIV(body_key))


def make_prefix_tags(ctx: EncryptionContext, chars: str) -> tuple[bytes, ...]:
    """Deterministic search tokens for a partitioned prefix.

    Token i is the first token_width bytes of sealing the single character
    chars[i] under k_prefix with the zero nonce and AAD
    ``field_id 1F BE32(i) 1F chars[:i]``.
    """
    tags = []
    field_part = ctx.field_id.encode("ascii") + _AAD_SEP
    for i, ch in enumerate(chars):
        aad = field_part + i.to_bytes(4, "big") + _AAD_SEP + chars[:i].encode("utf-8")
        sealed = ctx._prefix_aead.encrypt(ZERO_NONCE, ch.encode("utf-8"), aad)
        tags.append(sealed[: ctx.token_width])
    return tuple(tags)


def encrypt_text(ctx: EncryptionContext, text: str) -> str:
    """Encrypt a field value to its serialized v1 wire form.

    The plaintext is NFC-normalized first; decryption returns the normalized
    form. Empty input is legal and produces a tagless ciphertext whose body
    decrypts to "".
    """
    normalized = codec.normalize(text)
    prefix_chars, _ = codec.partition(normalized, ctx.pref_len)
    tags = make_prefix_tags(ctx, prefix_chars)
    aad = codec.envelope(ctx.pref_len, tags).encode("ascii")
    nonce = os.urandom(codec.NONCE_SIZE)
    body = nonce + ctx._body_aead.encrypt(nonce, normalized.encode("utf-8"), aad)
    return codec.serialize(
        codec.FieldCiphertext(declared_pref_len=ctx.pref_len, prefix_tags=tags, body=body)
    )


def decrypt_text(ctx: EncryptionContext, serialized: str) -> str:
    """Recover the plaintext of a serialized ciphertext.

    Only the body is decrypted; the header and tag section participate as
    AAD, so any tampering there fails authentication even though the tags
    themselves are never inverted.
    """
    ct = codec.parse(serialized, ctx.token_width)
    aad = codec.envelope(ct.declared_pref_len, ct.prefix_tags).encode("ascii")
    nonce, sealed = ct.body[: codec.NONCE_SIZE], ct.body[codec.NONCE_SIZE :]
    try:
        plaintext = ctx._body_aead.decrypt(nonce, sealed, aad)
    except InvalidTag:
        raise AuthenticationFailed("body authentication failed") from None
    return plaintext.decode("utf-8")


def make_query_token(ctx: EncryptionContext, term: str) -> str:
    """Serialize the searchable prefix of a term: header plus tags, no body.

    The term is normalized and truncated to the context's prefix length;
    the result is a string prefix of every matching stored ciphertext.
    Callers must post-filter decrypted results when the original term was
    longer than the prefix length.
    """
    if term == "":
        raise EmptyTerm("search term is empty")
    prefix_chars, _ = codec.partition(codec.normalize(term), ctx.pref_len)
    tags = make_prefix_tags(ctx, prefix_chars)
    return codec.envelope(ctx.pref_len, tags)
