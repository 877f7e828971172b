"""Prefix matching between query tokens and serialized ciphertexts.

The server-side primitive is plain string starts-with over the serialized
form: no key material, no parsing. Any backend that can do a string range
scan (SQL LIKE 'tok%', a sorted index, a linear scan) is conformant.
search_corpus is the reference linear scan; oracle_search is the plaintext
brute-force equivalent used to test them against each other.
"""

from __future__ import annotations

from typing import Iterable

from .codec import normalize


def match_prefix(serialized_ct: str, token: str) -> bool:
    """True iff the ciphertext string starts with the token string.

    Malformed inputs simply fail to match; nothing here raises.
    """
    return serialized_ct.startswith(token)


def search_corpus(corpus: Iterable[tuple[str, str]], token: str) -> list[str]:
    """Record ids whose ciphertext matches the token, in input order,
    deduplicated by id (first occurrence wins)."""
    seen = set()
    out = []
    for record_id, serialized_ct in corpus:
        if record_id in seen:
            continue
        if match_prefix(serialized_ct, token):
            seen.add(record_id)
            out.append(record_id)
    return out


def oracle_search(
    plain_corpus: Iterable[tuple[str, str]], term: str, pref_len: int
) -> list[str]:
    """Plaintext brute force: ids whose normalized text starts with the
    normalized term truncated to pref_len characters. Same ordering and
    dedup rules as search_corpus."""
    needle = normalize(term)[:pref_len]
    seen = set()
    out = []
    for record_id, text in plain_corpus:
        if record_id in seen:
            continue
        if normalize(text).startswith(needle):
            seen.add(record_id)
            out.append(record_id)
    return out
