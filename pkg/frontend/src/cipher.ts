/** Field encryption: deterministic prefix tags plus a randomized body. */

import { concat, randomBytes, u32be, utf8, utf8Decode } from "./bytes.js";
import * as codec from "./codec.js";
import { AuthTagMismatch, gcmSivDecrypt, gcmSivEncrypt } from "./gcmSiv.js";
import { CANONICAL_CHECK_WORDS, CHECK_FIELD_ID, KeyRing } from "./keyring.js";

export class AuthenticationFailed extends Error {}
export class EmptyTerm extends Error {}

const ZERO_NONCE = new Uint8Array(codec.NONCE_SIZE);
const AAD_SEP = Uint8Array.of(0x1f);

export interface EncryptionContext {
  ring: KeyRing;
  fieldId: string;
  prefLen: number;
  tokenWidth: number;
}

export function makeContext(
  ring: KeyRing,
  fieldId: string,
  prefLen: number,
  tokenWidth: number = codec.DEFAULT_TOKEN_WIDTH,
): EncryptionContext {
  if (!codec.isValidFieldId(fieldId)) {
    throw new Error(`invalid field id: ${fieldId}`);
  }
  if (prefLen < 0 || prefLen > codec.MAX_PREF_LEN) {
    throw new Error(`prefix length out of range: ${prefLen}`);
  }
  if (tokenWidth < codec.MIN_TOKEN_WIDTH || tokenWidth > codec.MAX_TOKEN_WIDTH) {
    throw new Error(`token width out of range: ${tokenWidth}`);
  }
  return { ring, fieldId, prefLen, tokenWidth };
}

function bodyKey(ctx: EncryptionContext): Uint8Array {
  return ctx.fieldId === CHECK_FIELD_ID ? ctx.ring.kCheck : ctx.ring.kBody;
}

/**
 * Deterministic tag per prefix character: the AAD chains the field id,
 * the position, and all preceding characters, so equal prefixes and only
 * equal prefixes produce equal tag runs.
 */
export function makePrefixTags(ctx: EncryptionContext, chars: string[]): Uint8Array[] {
  const fieldId = utf8(ctx.fieldId);
  const tags: Uint8Array[] = [];
  for (let i = 0; i < chars.length; i++) {
    const aad = concat(fieldId, AAD_SEP, u32be(i), AAD_SEP, utf8(chars.slice(0, i).join("")));
    const sealed = gcmSivEncrypt(ctx.ring.kPrefix, ZERO_NONCE, utf8(chars[i]), aad);
    tags.push(sealed.subarray(0, ctx.tokenWidth));
  }
  return tags;
}

export function encryptText(ctx: EncryptionContext, text: string): string {
  const normalized = codec.normalize(text);
  const [chars] = codec.partition(normalized, ctx.prefLen);
  const tags = makePrefixTags(ctx, chars);
  const aad = utf8(codec.envelope(ctx.prefLen, tags));
  const nonce = randomBytes(codec.NONCE_SIZE);
  const sealed = gcmSivEncrypt(bodyKey(ctx), nonce, utf8(normalized), aad);
  return codec.serialize({
    declaredPrefLen: ctx.prefLen,
    prefixTags: tags,
    body: concat(nonce, sealed),
  });
}

export function decryptText(ctx: EncryptionContext, serialized: string): string {
  const ct = codec.parse(serialized, ctx.tokenWidth);
  const aad = utf8(codec.envelope(ct.declaredPrefLen, ct.prefixTags));
  const nonce = ct.body.subarray(0, codec.NONCE_SIZE);
  const sealed = ct.body.subarray(codec.NONCE_SIZE);
  try {
    return utf8Decode(gcmSivDecrypt(bodyKey(ctx), nonce, sealed, aad));
  } catch (err) {
    if (err instanceof AuthTagMismatch) {
      throw new AuthenticationFailed("body authentication failed");
    }
    throw err;
  }
}

/** Serialized searchable prefix of the term, a literal string prefix of matches. */
export function makeQueryToken(ctx: EncryptionContext, term: string): string {
  if (term.length === 0) throw new EmptyTerm("search term must not be empty");
  const [chars] = codec.partition(term, ctx.prefLen);
  return codec.envelope(ctx.prefLen, makePrefixTags(ctx, chars));
}

/** Fresh check-word ciphertexts for provisioning a user. */
export function makeCheckWords(ring: KeyRing): string[] {
  const ctx = makeContext(ring, CHECK_FIELD_ID, 0);
  return CANONICAL_CHECK_WORDS.map((w) => encryptText(ctx, w));
}

/**
 * True when every stored check-word decrypts to its canonical value.
 * A wrong password returns false; structurally broken entries still throw.
 */
export function verifyPassword(ring: KeyRing, words: string[]): boolean {
  if (words.length !== CANONICAL_CHECK_WORDS.length) return false;
  const ctx = makeContext(ring, CHECK_FIELD_ID, 0);
  try {
    return CANONICAL_CHECK_WORDS.every((w, i) => decryptText(ctx, words[i]) === w);
  } catch (err) {
    if (err instanceof AuthenticationFailed) return false;
    throw err;
  }
}
