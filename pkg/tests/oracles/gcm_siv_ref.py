"""Pure-Python AES-GCM-SIV (RFC 8452), built on the local AES oracle.

Independent reference route for the test suite: POLYVAL is integer
arithmetic over GF(2^128) with the little-endian field convention, key
derivation and counter mode follow the RFC text directly, and no part of
the production library (or OpenSSL) is imported here.
"""

from __future__ import annotations

from .aes_ref import aes_encrypt_block

# x^128 + x^127 + x^126 + x^121 + 1, bit i of an int = coefficient of x^i
_POLY = (1 << 128) | (1 << 127) | (1 << 126) | (1 << 121) | 1


def _clmul(a: int, b: int) -> int:
    r = 0
    i = 0
    while b >> i:
        if (b >> i) & 1:
            r ^= a << i
        i += 1
    return r


def _reduce(x: int) -> int:
    for i in range(x.bit_length() - 1, 127, -1):
        if (x >> i) & 1:
            x ^= _POLY << (i - 128)
    return x


def _gf_mul(a: int, b: int) -> int:
    return _reduce(_clmul(a, b))


def _gf_pow(a: int, e: int) -> int:
    r = 1
    while e:
        if e & 1:
            r = _gf_mul(r, a)
        a = _gf_mul(a, a)
        e >>= 1
    return r


# Multiplicative inverse of x^128: the field has 2^128 elements, so
# a^(2^128 - 2) = a^-1 for a != 0.
_X128 = _reduce(1 << 128)
_X128_INV = _gf_pow(_X128, (1 << 128) - 2)


def _dot(a: int, b: int) -> int:
    return _gf_mul(_gf_mul(a, b), _X128_INV)


def polyval(h: bytes, data: bytes) -> bytes:
    """POLYVAL of a whole number of 16-byte blocks."""
    if len(data) % 16:
        raise ValueError("data must be a multiple of 16 bytes")
    h_int = int.from_bytes(h, "little")
    s = 0
    for off in range(0, len(data), 16):
        block = int.from_bytes(data[off : off + 16], "little")
        s = _dot(s ^ block, h_int)
    return s.to_bytes(16, "little")


def _le32(x: int) -> bytes:
    return x.to_bytes(4, "little")


def _le64(x: int) -> bytes:
    return x.to_bytes(8, "little")


def derive_keys(key: bytes, nonce: bytes) -> tuple[bytes, bytes]:
    """Per-nonce message-authentication and message-encryption keys."""
    if len(nonce) != 12:
        raise ValueError("nonce must be 12 bytes")
    blocks = 4 if len(key) == 16 else 6
    halves = [
        aes_encrypt_block(key, _le32(i) + nonce)[:8] for i in range(blocks)
    ]
    return halves[0] + halves[1], b"".join(halves[2:])


def _pad16(data: bytes) -> bytes:
    if len(data) % 16 == 0:
        return data
    return data + b"\x00" * (16 - len(data) % 16)


def _ctr_stream(key: bytes, initial_block: bytes, length: int) -> bytes:
    counter = bytearray(initial_block)
    out = bytearray()
    while len(out) < length:
        out += aes_encrypt_block(key, bytes(counter))
        ctr32 = (int.from_bytes(counter[:4], "little") + 1) & 0xFFFFFFFF
        counter[:4] = _le32(ctr32)
    return bytes(out[:length])


def _tag(auth_key: bytes, enc_key: bytes, nonce: bytes, plaintext: bytes, aad: bytes) -> bytes:
    length_block = _le64(len(aad) * 8) + _le64(len(plaintext) * 8)
    s = bytearray(polyval(auth_key, _pad16(aad) + _pad16(plaintext) + length_block))
    for i in range(12):
        s[i] ^= nonce[i]
    s[15] &= 0x7F
    return aes_encrypt_block(enc_key, bytes(s))


def encrypt(key: bytes, nonce: bytes, plaintext: bytes, aad: bytes = b"") -> bytes:
    """AEAD seal; returns ciphertext with the 16-byte tag appended."""
    auth_key, enc_key = derive_keys(key, nonce)
    tag = _tag(auth_key, enc_key, nonce, plaintext, aad)
    counter = bytearray(tag)
    counter[15] |= 0x80
    stream = _ctr_stream(enc_key, bytes(counter), len(plaintext))
    ct = bytes(p ^ k for p, k in zip(plaintext, stream))
    return ct + tag


def decrypt(key: bytes, nonce: bytes, sealed: bytes, aad: bytes = b"") -> bytes:
    """AEAD open; raises ValueError when the tag does not verify."""
    if len(sealed) < 16:
        raise ValueError("sealed input shorter than the tag")
    ct, tag = sealed[:-16], sealed[-16:]
    auth_key, enc_key = derive_keys(key, nonce)
    counter = bytearray(tag)
    counter[15] |= 0x80
    stream = _ctr_stream(enc_key, bytes(counter), len(ct))
    plaintext = bytes(c ^ k for c, k in zip(ct, stream))
    if _tag(auth_key, enc_key, nonce, plaintext, aad) != tag:
        raise ValueError("authentication failed")
    return plaintext
