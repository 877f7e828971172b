"""Text normalization, prefix partitioning, and the v1 ciphertext wire format.

A serialized field ciphertext is a dotted, four-section ASCII string:

    "v1" "." HEX2(declared_pref_len) "." tag-section "." body-section

The tag section is the concatenation of each prefix token rendered
individually as unpadded base64url; all tokens in one ciphertext have the
same byte width, so the section is a fixed multiple of the per-token
character width. The body section is unpadded base64url of
``nonce(12) || AEAD ciphertext+tag``. "." never occurs in the base64url
alphabet, so section boundaries are unambiguous and a server can prefix-match
serialized ciphertexts as plain strings.

A query token is the same string cut after the tag section, with no trailing
separator: ``"v1" "." HEX2 "." tags``. By construction it is a string prefix
of every ciphertext whose plaintext starts with the queried characters under
the same key, field and configuration.

Base64url decoding here is strict: padding characters and non-zero trailing
bits are rejected, so every byte string has exactly one serialized spelling
and any single-character mutation changes the decoded bytes or fails to
parse. Decryption depends on this for tamper evidence.
"""

from __future__ import annotations

import base64
import re
import unicodedata
from dataclasses import dataclass

from .errors import MalformedCiphertext

VERSION = "v1"
SEPARATOR = "."
DEFAULT_TOKEN_WIDTH = 3
MIN_TOKEN_WIDTH = 1
MAX_TOKEN_WIDTH = 16
NONCE_SIZE = 12
AEAD_TAG_SIZE = 16
MAX_PREF_LEN = 255

_B64_RE = re.compile(r"[A-Za-z0-9_-]*\Z")
_HEX2_RE = re.compile(r"[0-9a-f]{2}\Z")
FIELD_ID_RE = re.compile(r"[A-Za-z0-9_]{1,64}\Z")


def normalize(raw: str) -> str:
    """NFC-normalize a Unicode string. Idempotent; prefix matching and all
    plaintext comparisons happen in this canonical form."""
    return unicodedata.normalize("NFC", raw)


def partition(text: str, pref_len: int) -> tuple[str, int]:
    """Split normalized text into its searchable prefix.

    Returns ``(prefix, effective_k)`` where ``effective_k`` is
    ``min(pref_len, number of characters)`` and ``prefix`` holds the first
    ``effective_k`` Unicode scalar values. Counting is per scalar value,
    never per byte; Python str indexing already guarantees this.
    """
    k = min(pref_len, len(text))
    return text[:k], k


def b64url_encode(data: bytes) -> str:
    """Unpadded base64url."""
    return base64.urlsafe_b64encode(data).rstrip(b"=").decode("ascii")


def b64url_decode(text: str) -> bytes:
    """Strict inverse of :func:`b64url_encode`.

    Rejects padding characters, impossible lengths, characters outside the
    alphabet, and non-canonical trailing bits (re-encode must reproduce the
    input exactly).
    """
    if not _B64_RE.match(text):
        raise ValueError("character outside base64url alphabet")
    if len(text) % 4 == 1:
        raise ValueError("impossible base64url length")
    pad = "=" * (-len(text) % 4)
    data = base64.urlsafe_b64decode(text + pad)
    if b64url_encode(data) != text:
        raise ValueError("non-canonical base64url (trailing bits set)")
    return data


def token_char_width(token_width: int) -> int:
    """Characters one token of ``token_width`` bytes occupies in the tag
    section: ceil(4w/3), e.g. 4 chars for the default 3-byte token."""
    return (token_width * 8 + 5) // 6


@dataclass(frozen=True)
class FieldCiphertext:
    """Parsed form of one encrypted field value.

    ``prefix_tags`` are search-only and non-invertible; ``body`` is
    ``nonce || ciphertext+tag`` of the full plaintext and is the only
    section decryption reads.
    """

    declared_pref_len: int
    prefix_tags: tuple[bytes, ...]
    body: bytes
    version: str = VERSION


def envelope(declared_pref_len: int, prefix_tags: tuple[bytes, ...]) -> str:
    """Header plus tag section, no trailing separator: ``v1.03.XXXX...``.

    This string doubles as the query-token serialization and as the AEAD
    associated data for the body, which binds header and tags to it.
    """
    tag_chars = "".join(b64url_encode(tag) for tag in prefix_tags)
    return f"{VERSION}{SEPARATOR}{declared_pref_len:02x}{SEPARATOR}{tag_chars}"


def serialize(ct: FieldCiphertext) -> str:
    """Emit the canonical four-section wire string for a ciphertext."""
    return envelope(ct.declared_pref_len, ct.prefix_tags) + SEPARATOR + b64url_encode(ct.body)


def parse(serialized: str, token_width: int = DEFAULT_TOKEN_WIDTH) -> FieldCiphertext:
    """Parse and validate a serialized ciphertext.

    ``token_width`` is configuration, not wire data: the tag section carries
    no width marker, so the caller's context supplies it (the default matches
    the default encryption configuration).

    Raises MalformedCiphertext with reason bad_section_count, bad_version,
    bad_header, bad_tag_width, or bad_encoding.
    """
    sections = serialized.split(SEPARATOR)
    if len(sections) != 4:
        raise MalformedCiphertext("bad_section_count", f"{len(sections)} sections")
    version, header, tag_section, body_section = sections
    if version != VERSION:
        raise MalformedCiphertext("bad_version", repr(version))
    if not _HEX2_RE.match(header):
        raise MalformedCiphertext("bad_header", repr(header))
    declared_pref_len = int(header, 16)

    width = token_char_width(token_width)
    if not _B64_RE.match(tag_section):
        raise MalformedCiphertext("bad_encoding", "tag section alphabet")
    if len(tag_section) % width != 0:
        raise MalformedCiphertext(
            "bad_tag_width", f"{len(tag_section)} chars not a multiple of {width}"
        )
    count = len(tag_section) // width
    if count > declared_pref_len:
        raise MalformedCiphertext(
            "bad_tag_width", f"{count} tokens exceed declared prefix length {declared_pref_len}"
        )
    try:
        tags = tuple(
            b64url_decode(tag_section[i * width : (i + 1) * width]) for i in range(count)
        )
    except ValueError as exc:
        raise MalformedCiphertext("bad_encoding", str(exc)) from None

    try:
        body = b64url_decode(body_section)
    except ValueError as exc:
        raise MalformedCiphertext("bad_encoding", str(exc)) from None
    if len(body) < NONCE_SIZE + AEAD_TAG_SIZE:
        raise MalformedCiphertext("bad_encoding", "body shorter than nonce plus tag")

    return FieldCiphertext(declared_pref_len=declared_pref_len, prefix_tags=tags, body=body)


def is_valid_field_id(field_id: str) -> bool:
    """True iff field_id matches the identifier grammar [A-Za-z0-9_]{1,64}."""
    return bool(FIELD_ID_RE.match(field_id))
