/** Password to key-ring derivation and check-word password validation. */

import { argon2id } from "./argon2.js";
import { hexToBytes, utf8 } from "./bytes.js";
import { hkdfSha256 } from "./hkdf.js";

export const SALT_SIZE = 16;
export const DEFAULT_MEMORY_COST_KIB = 65536;
export const DEFAULT_TIME_COST = 3;
export const DEFAULT_PARALLELISM = 1;

export const CHECK_FIELD_ID = "__check__";
export const CANONICAL_CHECK_WORDS = ["check-alpha", "check-beta", "check-gamma"];

export interface KdfParams {
  salt: Uint8Array;
  memoryCost: number;
  timeCost: number;
  parallelism: number;
}

export interface KeyRing {
  master: Uint8Array;
  kPrefix: Uint8Array;
  kBody: Uint8Array;
  kCheck: Uint8Array;
}

export function kdfParams(
  salt: Uint8Array | string,
  overrides: Partial<Omit<KdfParams, "salt">> = {},
): KdfParams {
  const saltBytes = typeof salt === "string" ? hexToBytes(salt) : salt;
  if (saltBytes.length !== SALT_SIZE) {
    throw new Error(`salt must be ${SALT_SIZE} bytes`);
  }
  return {
    salt: saltBytes,
    memoryCost: overrides.memoryCost ?? DEFAULT_MEMORY_COST_KIB,
    timeCost: overrides.timeCost ?? DEFAULT_TIME_COST,
    parallelism: overrides.parallelism ?? DEFAULT_PARALLELISM,
  };
}

export async function deriveKeyring(
  password: string,
  params: KdfParams,
): Promise<KeyRing> {
  if (password.length === 0) throw new Error("password must not be empty");
  const master = argon2id(utf8(password), params.salt, {
    timeCost: params.timeCost,
    memoryCost: params.memoryCost,
    parallelism: params.parallelism,
    tagLength: 32,
  });
  const [kPrefix, kBody, kCheck] = await Promise.all([
    hkdfSha256(master, utf8("prefixseal/v1/prefix"), 32),
    hkdfSha256(master, utf8("prefixseal/v1/body"), 32),
    hkdfSha256(master, utf8("prefixseal/v1/check"), 32),
  ]);
  return { master, kPrefix, kBody, kCheck };
}
