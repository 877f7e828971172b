/** Canonical unpadded base64url, matching the wire grammar exactly. */

const ALPHABET =
  "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_";

const CHAR_VALUE = new Map<string, number>(
  [...ALPHABET].map((c, i) => [c, i]),
);

export class Base64urlError extends Error {}

export function b64urlEncode(data: Uint8Array): string {
  let out = "";
  let i = 0;
  for (; i + 2 < data.length; i += 3) {
    const n = (data[i] << 16) | (data[i + 1] << 8) | data[i + 2];
    out +=
      ALPHABET[n >> 18] +
      ALPHABET[(n >> 12) & 63] +
      ALPHABET[(n >> 6) & 63] +
      ALPHABET[n & 63];
  }
  const rest = data.length - i;
  if (rest === 1) {
    const n = data[i] << 16;
    out += ALPHABET[n >> 18] + ALPHABET[(n >> 12) & 63];
  } else if (rest === 2) {
    const n = (data[i] << 16) | (data[i + 1] << 8);
    out += ALPHABET[n >> 18] + ALPHABET[(n >> 12) & 63] + ALPHABET[(n >> 6) & 63];
  }
  return out;
}

/**
 * Decode, rejecting padding, foreign characters, impossible lengths, and
 * non-canonical trailing bits. Every accepted string re-encodes to itself.
 */
export function b64urlDecode(s: string): Uint8Array {
  if (s.length % 4 === 1) {
    throw new Base64urlError("impossible base64url length");
  }
  const values: number[] = [];
  for (const c of s) {
    const v = CHAR_VALUE.get(c);
    if (v === undefined) {
      throw new Base64urlError(`character outside base64url alphabet: ${c}`);
    }
    values.push(v);
  }
  const out = new Uint8Array(Math.floor((values.length * 6) / 8));
  let acc = 0;
  let bits = 0;
  let w = 0;
  for (const v of values) {
    acc = (acc << 6) | v;
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out[w++] = (acc >> bits) & 0xff;
    }
  }
  if (b64urlEncode(out) !== s) {
    throw new Base64urlError("non-canonical base64url encoding");
  }
  return out;
}
