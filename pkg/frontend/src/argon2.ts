/** Argon2id key derivation (version 0x13), sized for in-browser use.
 *
 * Blocks are 128 64-bit words stored as (lo, hi) uint32 pairs; the whole
 * arena is a single allocation of memory_cost KiB plus three scratch
 * blocks for address generation.
 */

import { blake2b } from "./blake2b.js";
import { concat, u32le } from "./bytes.js";

const BLOCK_WORDS = 256; // 128 u64 as u32 pairs
const VERSION = 0x13;
const TYPE_ID = 2;

/** Exact 32x32 -> 64 bit product as (lo, hi), no precision loss. */
function mulLo(a: number, b: number): number {
  return Math.imul(a, b) >>> 0;
}

function mulHi(a: number, b: number): number {
  const aL = a & 0xffff, aH = a >>> 16;
  const bL = b & 0xffff, bH = b >>> 16;
  const t1 = aH * bL + ((aL * bL) >>> 16);
  const t2 = aL * bH + (t1 & 0xffff);
  return (aH * bH + (t1 >>> 16) + (t2 >>> 16)) >>> 0;
}

/** v[x] = v[x] + v[y] + 2 * (lo32(v[x]) * lo32(v[y])) mod 2^64 */
function mix64(v: Uint32Array, xi: number, yi: number): void {
  const pLo = mulLo(v[xi], v[yi]);
  const pHi = mulHi(v[xi], v[yi]);
  const dLo = (pLo << 1) >>> 0;
  const dHi = ((pHi << 1) | (pLo >>> 31)) >>> 0;
  const lo = v[xi] + v[yi] + dLo;
  v[xi + 1] = (v[xi + 1] + v[yi + 1] + dHi + Math.floor(lo / 0x100000000)) >>> 0;
  v[xi] = lo >>> 0;
}

/** v[x] = rotr64(v[x] ^ v[y], n) for n in {16, 24, 32, 63} */
function xorRotr(v: Uint32Array, xi: number, yi: number, n: number): void {
  const x = v[xi] ^ v[yi];
  const y = v[xi + 1] ^ v[yi + 1];
  if (n === 32) {
    v[xi] = y;
    v[xi + 1] = x;
  } else if (n === 63) {
    v[xi] = ((x << 1) | (y >>> 31)) >>> 0;
    v[xi + 1] = ((y << 1) | (x >>> 31)) >>> 0;
  } else {
    v[xi] = ((x >>> n) | (y << (32 - n))) >>> 0;
    v[xi + 1] = ((y >>> n) | (x << (32 - n))) >>> 0;
  }
}

function gb(v: Uint32Array, ai: number, bi: number, ci: number, di: number): void {
  mix64(v, ai, bi);
  xorRotr(v, di, ai, 32);
  mix64(v, ci, di);
  xorRotr(v, bi, ci, 24);
  mix64(v, ai, bi);
  xorRotr(v, di, ai, 16);
  mix64(v, ci, di);
  xorRotr(v, bi, ci, 63);
}

/** One BLAKE2b-style round over 16 words selected by idx, message-free. */
function pRound(v: Uint32Array, idx: number[]): void {
  const i = idx;
  gb(v, i[0], i[4], i[8], i[12]);
  gb(v, i[1], i[5], i[9], i[13]);
  gb(v, i[2], i[6], i[10], i[14]);
  gb(v, i[3], i[7], i[11], i[15]);
  gb(v, i[0], i[5], i[10], i[15]);
  gb(v, i[1], i[6], i[11], i[12]);
  gb(v, i[2], i[7], i[8], i[13]);
  gb(v, i[3], i[4], i[9], i[14]);
}

// rows are 16 consecutive words; column i takes word pairs (2i, 2i+1)
// from each of the 8 rows
const ROW_IDX: number[][] = [];
const COL_IDX: number[][] = [];
for (let i = 0; i < 8; i++) {
  ROW_IDX.push(Array.from({ length: 16 }, (_, k) => 2 * (16 * i + k)));
  COL_IDX.push(
    Array.from({ length: 16 }, (_, k) => 2 * (16 * (k >> 1) + 2 * i + (k & 1))),
  );
}

/** out = P(X ^ Y) ^ X ^ Y; with xorOut the result lands as out ^= ... */
function gMix(
  arena: Uint32Array,
  outOff: number,
  xOff: number,
  yOff: number,
  xorOut: boolean,
): void {
  const r = new Uint32Array(BLOCK_WORDS);
  for (let i = 0; i < BLOCK_WORDS; i++) r[i] = arena[xOff + i] ^ arena[yOff + i];
  const z = Uint32Array.from(r);
  for (const idx of ROW_IDX) pRound(z, idx);
  for (const idx of COL_IDX) pRound(z, idx);
  if (xorOut) {
    for (let i = 0; i < BLOCK_WORDS; i++) arena[outOff + i] ^= z[i] ^ r[i];
  } else {
    for (let i = 0; i < BLOCK_WORDS; i++) arena[outOff + i] = z[i] ^ r[i];
  }
}

function hPrime(input: Uint8Array, outLen: number): Uint8Array {
  const prefixed = concat(u32le(outLen), input);
  if (outLen <= 64) return blake2b(prefixed, outLen);
  const r = Math.ceil(outLen / 32) - 2;
  const out = new Uint8Array(outLen);
  let v = blake2b(prefixed, 64);
  for (let i = 0; i < r; i++) {
    out.set(v.subarray(0, 32), 32 * i);
    v = i + 1 < r ? blake2b(v, 64) : blake2b(v, outLen - 32 * r);
  }
  out.set(v, 32 * r);
  return out;
}

function blockFromBytes(arena: Uint32Array, off: number, bytes: Uint8Array): void {
  const dv = new DataView(bytes.buffer, bytes.byteOffset, 1024);
  for (let i = 0; i < BLOCK_WORDS; i++) arena[off + i] = dv.getUint32(4 * i, true);
}

function blockToBytes(arena: Uint32Array, off: number): Uint8Array {
  const out = new Uint8Array(1024);
  const dv = new DataView(out.buffer);
  for (let i = 0; i < BLOCK_WORDS; i++) dv.setUint32(4 * i, arena[off + i], true);
  return out;
}

export interface Argon2Options {
  timeCost: number;
  memoryCost: number; // KiB
  parallelism: number;
  tagLength?: number;
  secret?: Uint8Array;
  ad?: Uint8Array;
}

export function argon2id(
  password: Uint8Array,
  salt: Uint8Array,
  opts: Argon2Options,
): Uint8Array {
  const { timeCost, memoryCost, parallelism } = opts;
  const tagLength = opts.tagLength ?? 32;
  const secret = opts.secret ?? new Uint8Array(0);
  const ad = opts.ad ?? new Uint8Array(0);
  if (parallelism < 1 || timeCost < 1 || memoryCost < 8 * parallelism) {
    throw new Error("parameters below the Argon2 minimums");
  }

  const h0 = blake2b(
    concat(
      u32le(parallelism), u32le(tagLength), u32le(memoryCost), u32le(timeCost),
      u32le(VERSION), u32le(TYPE_ID),
      u32le(password.length), password,
      u32le(salt.length), salt,
      u32le(secret.length), secret,
      u32le(ad.length), ad,
    ),
    64,
  );

  const mPrime = 4 * parallelism * Math.floor(memoryCost / (4 * parallelism));
  const q = mPrime / parallelism;             // lane length in blocks
  const segLen = q / 4;
  const arena = new Uint32Array((mPrime + 3) * BLOCK_WORDS);
  const zeroOff = mPrime * BLOCK_WORDS;
  const addrOff = zeroOff + BLOCK_WORDS;
  const inputOff = zeroOff + 2 * BLOCK_WORDS;
  const blockOff = (lane: number, col: number) => (lane * q + col) * BLOCK_WORDS;

  for (let lane = 0; lane < parallelism; lane++) {
    for (let col = 0; col < 2; col++) {
      blockFromBytes(
        arena,
        blockOff(lane, col),
        hPrime(concat(h0, u32le(col), u32le(lane)), 1024),
      );
    }
  }

  for (let pass = 0; pass < timeCost; pass++) {
    for (let slice = 0; slice < 4; slice++) {
      for (let lane = 0; lane < parallelism; lane++) {
        const dataIndependent = pass === 0 && slice < 2;
        const start = pass === 0 && slice === 0 ? 2 : 0;
        let counter = 0;
        for (let idx = start; idx < segLen; idx++) {
          const col = slice * segLen + idx;
          const prevCol = col === 0 ? q - 1 : col - 1;

          let j1: number, j2: number;
          if (dataIndependent) {
            if (idx === start || idx % 128 === 0) {
              counter++;
              arena.fill(0, inputOff, inputOff + BLOCK_WORDS);
              const vals = [pass, lane, slice, mPrime, timeCost, TYPE_ID, counter];
              vals.forEach((x, i) => { arena[inputOff + 2 * i] = x >>> 0; });
              arena.fill(0, zeroOff, zeroOff + BLOCK_WORDS);
              gMix(arena, addrOff, zeroOff, inputOff, false);
              gMix(arena, addrOff, zeroOff, addrOff, false);
            }
            j1 = arena[addrOff + 2 * (idx % 128)];
            j2 = arena[addrOff + 2 * (idx % 128) + 1];
          } else {
            const prevOff = blockOff(lane, prevCol);
            j1 = arena[prevOff];
            j2 = arena[prevOff + 1];
          }

          const refLane = pass === 0 && slice === 0 ? lane : j2 % parallelism;
          const sameLane = refLane === lane;
          let area: number;
          if (pass === 0) {
            area = sameLane ? slice * segLen + idx - 1
                            : slice * segLen + (idx === 0 ? -1 : 0);
          } else {
            area = sameLane ? q - segLen + idx - 1
                            : q - segLen + (idx === 0 ? -1 : 0);
          }

          // x = j1^2 >> 32; y = (area * x) >> 32; pick area - 1 - y backwards
          const x = mulHi(j1, j1);
          const y = mulHi(area, x);
          const z = area - 1 - y;
          const firstCol = pass === 0 ? 0 : ((slice + 1) * segLen) % q;
          const refCol = (firstCol + z) % q;

          gMix(
            arena,
            blockOff(lane, col),
            blockOff(lane, prevCol),
            blockOff(refLane, refCol),
            pass > 0,
          );
        }
      }
    }
  }

  const finalOff = blockOff(0, q - 1);
  for (let lane = 1; lane < parallelism; lane++) {
    const off = blockOff(lane, q - 1);
    for (let i = 0; i < BLOCK_WORDS; i++) arena[finalOff + i] ^= arena[off + i];
  }
  return hPrime(blockToBytes(arena, finalOff), tagLength);
}
