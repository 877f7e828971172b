/** AES-GCM-SIV authenticated encryption (128- and 256-bit keys). */

import { Aes } from "./aes.js";
import { concat, equalBytes, u32le } from "./bytes.js";

export class AuthTagMismatch extends Error {}

export const NONCE_SIZE = 12;
export const TAG_SIZE = 16;

// x^128 + x^127 + x^126 + x^121 + 1, the POLYVAL field polynomial
const POLY = (1n << 128n) | (1n << 127n) | (1n << 126n) | (1n << 121n) | 1n;

function bitLen(x: bigint): number {
  return x === 0n ? 0 : x.toString(2).length;
}

function clmul(a: bigint, b: bigint): bigint {
  let r = 0n;
  let i = 0n;
  while (a) {
    if (a & 1n) r ^= b << i;
    a >>= 1n;
    i++;
  }
  return r;
}

function polyMod(x: bigint): bigint {
  let len = bitLen(x);
  while (len > 128) {
    x ^= POLY << BigInt(len - 129);
    len = bitLen(x);
  }
  return x;
}

function mulMod(a: bigint, b: bigint): bigint {
  return polyMod(clmul(a, b));
}

function powMod(a: bigint, e: bigint): bigint {
  let r = 1n;
  while (e) {
    if (e & 1n) r = mulMod(r, a);
    a = mulMod(a, a);
    e >>= 1n;
  }
  return r;
}

// POLYVAL's per-block factor of x^-128
const X128_INV = powMod(polyMod(1n << 128n), (1n << 128n) - 2n);

function leBytesToBig(b: Uint8Array): bigint {
  let r = 0n;
  for (let i = b.length - 1; i >= 0; i--) r = (r << 8n) | BigInt(b[i]);
  return r;
}

function bigToLeBytes(x: bigint): Uint8Array {
  const out = new Uint8Array(16);
  for (let i = 0; i < 16; i++) {
    out[i] = Number(x & 0xffn);
    x >>= 8n;
  }
  return out;
}

function polyval(h: bigint, data: Uint8Array): bigint {
  let s = 0n;
  for (let off = 0; off < data.length; off += 16) {
    s = mulMod(mulMod(s ^ leBytesToBig(data.subarray(off, off + 16)), h), X128_INV);
  }
  return s;
}

function pad16(b: Uint8Array): Uint8Array {
  const rem = b.length % 16;
  return rem === 0 ? b : concat(b, new Uint8Array(16 - rem));
}

function le64Bits(byteLen: number): Uint8Array {
  const out = new Uint8Array(8);
  new DataView(out.buffer).setBigUint64(0, BigInt(byteLen) * 8n, true);
  return out;
}

function deriveKeys(key: Uint8Array, nonce: Uint8Array) {
  const master = new Aes(key);
  const chunk = (i: number) =>
    master.encryptBlock(concat(u32le(i), nonce)).subarray(0, 8);
  const authKey = concat(chunk(0), chunk(1));
  const encKeyLen = key.length === 16 ? [2, 3] : [2, 3, 4, 5];
  const encKey = concat(...encKeyLen.map(chunk));
  return { authKey: leBytesToBig(authKey), enc: new Aes(encKey) };
}

function ctrStream(enc: Aes, tag: Uint8Array, length: number): Uint8Array {
  const block = Uint8Array.from(tag);
  block[15] |= 0x80;
  const out = new Uint8Array(length);
  const view = new DataView(block.buffer);
  for (let off = 0; off < length; off += 16) {
    const ks = enc.encryptBlock(block);
    out.set(ks.subarray(0, Math.min(16, length - off)), off);
    view.setUint32(0, (view.getUint32(0, true) + 1) >>> 0, true);
  }
  return out;
}

function computeTag(
  authKey: bigint,
  enc: Aes,
  nonce: Uint8Array,
  plaintext: Uint8Array,
  aad: Uint8Array,
): Uint8Array {
  const input = concat(pad16(aad), pad16(plaintext), le64Bits(aad.length), le64Bits(plaintext.length));
  const s = bigToLeBytes(polyval(authKey, input));
  for (let i = 0; i < NONCE_SIZE; i++) s[i] ^= nonce[i];
  s[15] &= 0x7f;
  return enc.encryptBlock(s);
}

export function gcmSivEncrypt(
  key: Uint8Array,
  nonce: Uint8Array,
  plaintext: Uint8Array,
  aad: Uint8Array = new Uint8Array(0),
): Uint8Array {
  if (nonce.length !== NONCE_SIZE) throw new Error("nonce must be 12 bytes");
  const { authKey, enc } = deriveKeys(key, nonce);
  const tag = computeTag(authKey, enc, nonce, plaintext, aad);
  const keystream = ctrStream(enc, tag, plaintext.length);
  const ct = new Uint8Array(plaintext.length);
  for (let i = 0; i < plaintext.length; i++) ct[i] = plaintext[i] ^ keystream[i];
  return concat(ct, tag);
}

export function gcmSivDecrypt(
  key: Uint8Array,
  nonce: Uint8Array,
  sealed: Uint8Array,
  aad: Uint8Array = new Uint8Array(0),
): Uint8Array {
  if (nonce.length !== NONCE_SIZE) throw new Error("nonce must be 12 bytes");
  if (sealed.length < TAG_SIZE) throw new AuthTagMismatch("ciphertext shorter than tag");
  const { authKey, enc } = deriveKeys(key, nonce);
  const ct = sealed.subarray(0, sealed.length - TAG_SIZE);
  const tag = sealed.subarray(sealed.length - TAG_SIZE);
  const keystream = ctrStream(enc, tag, ct.length);
  const pt = new Uint8Array(ct.length);
  for (let i = 0; i < ct.length; i++) pt[i] = ct[i] ^ keystream[i];
  const expected = computeTag(authKey, enc, nonce, pt, aad);
  if (!equalBytes(expected, tag)) {
    throw new AuthTagMismatch("authentication tag mismatch");
  }
  return pt;
}
