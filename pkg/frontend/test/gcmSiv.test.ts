import { readFileSync } from "node:fs";

import { describe, expect, it } from "vitest";

import { AuthTagMismatch, gcmSivDecrypt, gcmSivEncrypt } from "../src/gcmSiv.js";
import { bytesToHex, hexToBytes } from "../src/bytes.js";

interface Vector {
  key: string;
  nonce: string;
  plaintext: string;
  aad: string;
  result: string;
  source: string;
}

const VECTORS: Vector[] = JSON.parse(
  readFileSync(new URL("./vectors/gcm_siv_vectors.json", import.meta.url), "utf8"),
);

describe("gcmSivEncrypt", () => {
  it.each(VECTORS.map((v, i) => [i, v] as const))(
    "vector %i reproduces the pinned ciphertext",
    (_i, v) => {
      const out = gcmSivEncrypt(
        hexToBytes(v.key),
        hexToBytes(v.nonce),
        hexToBytes(v.plaintext),
        hexToBytes(v.aad),
      );
      expect(bytesToHex(out)).toBe(v.result);
    },
  );
});

describe("gcmSivDecrypt", () => {
  it.each(VECTORS.map((v, i) => [i, v] as const))("vector %i round trips", (_i, v) => {
    const pt = gcmSivDecrypt(
      hexToBytes(v.key),
      hexToBytes(v.nonce),
      hexToBytes(v.result),
      hexToBytes(v.aad),
    );
    expect(bytesToHex(pt)).toBe(v.plaintext);
  });

  it("rejects every single-bit flip of a short message", () => {
    const key = hexToBytes("01".repeat(32));
    const nonce = hexToBytes("02".repeat(12));
    const aad = hexToBytes("a0a1a2");
    const ct = gcmSivEncrypt(key, nonce, hexToBytes("5468697274792e"), aad);
    for (let byte = 0; byte < ct.length; byte++) {
      for (const bit of [0x01, 0x80]) {
        const bad = Uint8Array.from(ct);
        bad[byte] ^= bit;
        expect(() => gcmSivDecrypt(key, nonce, bad, aad)).toThrow(AuthTagMismatch);
      }
    }
  });

  it("rejects a ciphertext under changed aad", () => {
    const key = hexToBytes("03".repeat(32));
    const nonce = hexToBytes("04".repeat(12));
    const ct = gcmSivEncrypt(key, nonce, hexToBytes("00ff00ff"), hexToBytes("aa"));
    expect(() => gcmSivDecrypt(key, nonce, ct, hexToBytes("ab"))).toThrow(AuthTagMismatch);
  });

  it("rejects truncated input shorter than a tag", () => {
    const key = hexToBytes("05".repeat(32));
    const nonce = hexToBytes("06".repeat(12));
    expect(() => gcmSivDecrypt(key, nonce, new Uint8Array(15), new Uint8Array(0))).toThrow(
      AuthTagMismatch,
    );
  });
});
