/** AES block cipher, encrypt direction only (all uses here are CTR or MAC). */

// S-box built from the GF(2^8) inverse plus the affine map rather than a
// pasted table, so a transcription slip is impossible
const SBOX = (() => {
  const mul = (a: number, b: number): number => {
    let r = 0;
    while (b) {
      if (b & 1) r ^= a;
      a <<= 1;
      if (a & 0x100) a ^= 0x11b;
      b >>= 1;
    }
    return r;
  };
  const pow = (a: number, e: number): number => {
    let r = 1;
    while (e) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  };
  const rotl8 = (x: number, n: number) => ((x << n) | (x >> (8 - n))) & 0xff;
  const box = new Uint8Array(256);
  for (let i = 0; i < 256; i++) {
    const inv = i === 0 ? 0 : pow(i, 254);
    box[i] =
      inv ^ rotl8(inv, 1) ^ rotl8(inv, 2) ^ rotl8(inv, 3) ^ rotl8(inv, 4) ^ 0x63;
  }
  return box;
})();

const RCON = (() => {
  const out = new Uint8Array(11);
  let x = 1;
  for (let i = 1; i <= 10; i++) {
    out[i] = x;
    x <<= 1;
    if (x & 0x100) x ^= 0x11b;
  }
  return out;
})();

function xtime(x: number): number {
  x <<= 1;
  return x & 0x100 ? (x ^ 0x11b) & 0xff : x;
}

export class Aes {
  private readonly roundKeys: Uint8Array;
  private readonly rounds: number;

  constructor(key: Uint8Array) {
    if (key.length !== 16 && key.length !== 24 && key.length !== 32) {
      throw new Error(`unsupported AES key length ${key.length}`);
    }
    const nk = key.length / 4;
    this.rounds = nk + 6;
    const words = 4 * (this.rounds + 1);
    const w = new Uint8Array(words * 4);
    w.set(key);
    for (let i = nk; i < words; i++) {
      let t = w.slice(4 * (i - 1), 4 * i);
      if (i % nk === 0) {
        t = Uint8Array.from([
          SBOX[t[1]] ^ RCON[i / nk],
          SBOX[t[2]],
          SBOX[t[3]],
          SBOX[t[0]],
        ]);
      } else if (nk === 8 && i % nk === 4) {
        t = Uint8Array.from([SBOX[t[0]], SBOX[t[1]], SBOX[t[2]], SBOX[t[3]]]);
      }
      for (let j = 0; j < 4; j++) {
        w[4 * i + j] = w[4 * (i - nk) + j] ^ t[j];
      }
    }
    this.roundKeys = w;
  }

  encryptBlock(block: Uint8Array): Uint8Array {
    if (block.length !== 16) throw new Error("AES block must be 16 bytes");
    const rk = this.roundKeys;
    let s = new Uint8Array(16);
    for (let i = 0; i < 16; i++) s[i] = block[i] ^ rk[i];

    for (let round = 1; round <= this.rounds; round++) {
      // combined SubBytes + ShiftRows: row r rotates left by r
      const t = new Uint8Array(16);
      for (let c = 0; c < 4; c++) {
        for (let r = 0; r < 4; r++) {
          t[4 * c + r] = SBOX[s[4 * ((c + r) % 4) + r]];
        }
      }
      if (round < this.rounds) {
        for (let c = 0; c < 4; c++) {
          const a0 = t[4 * c], a1 = t[4 * c + 1], a2 = t[4 * c + 2], a3 = t[4 * c + 3];
          const all = a0 ^ a1 ^ a2 ^ a3;
          t[4 * c] = a0 ^ all ^ xtime(a0 ^ a1);
          t[4 * c + 1] = a1 ^ all ^ xtime(a1 ^ a2);
          t[4 * c + 2] = a2 ^ all ^ xtime(a2 ^ a3);
          t[4 * c + 3] = a3 ^ all ^ xtime(a3 ^ a0);
        }
      }
      for (let i = 0; i < 16; i++) t[i] ^= rk[16 * round + i];
      s = t;
    }
    return s;
  }
}
