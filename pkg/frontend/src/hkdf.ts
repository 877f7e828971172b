/** HKDF-SHA-256 subkey expansion over WebCrypto. */

export async function hkdfSha256(
  master: Uint8Array,
  info: Uint8Array,
  length: number,
): Promise<Uint8Array> {
  const key = await crypto.subtle.importKey("raw", master as BufferSource, "HKDF", false, [
    "deriveBits",
  ]);
  // empty salt hashes identically to a zero-filled one under HMAC padding
  const bits = await crypto.subtle.deriveBits(
    { name: "HKDF", hash: "SHA-256", salt: new Uint8Array(0), info: info as BufferSource },
    key,
    8 * length,
  );
  return new Uint8Array(bits);
}
