/** Keyless BLAKE2b with selectable digest length, the hash inside Argon2. */

// 64-bit words live as (lo, hi) uint32 pairs at indexes (2i, 2i+1)

const IV_HEX = [
  "6a09e667f3bcc908", "bb67ae8584caa73b", "3c6ef372fe94f82b", "a54ff53a5f1d36f1",
  "510e527fade682d1", "9b05688c2b3e6c1f", "1f83d9abfb41bd6b", "5be0cd19137e2179",
];

const IV = new Uint32Array(16);
IV_HEX.forEach((h, i) => {
  IV[2 * i] = parseInt(h.slice(8), 16);
  IV[2 * i + 1] = parseInt(h.slice(0, 8), 16);
});

const SIGMA = [
  [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15],
  [14, 10, 4, 8, 9, 15, 13, 6, 1, 12, 0, 2, 11, 7, 5, 3],
  [11, 8, 12, 0, 5, 2, 15, 13, 10, 14, 3, 6, 7, 1, 9, 4],
  [7, 9, 3, 1, 13, 12, 11, 14, 2, 6, 5, 10, 4, 0, 15, 8],
  [9, 0, 5, 7, 2, 4, 10, 15, 14, 1, 11, 12, 6, 8, 3, 13],
  [2, 12, 6, 10, 0, 11, 8, 3, 4, 13, 7, 5, 15, 14, 1, 9],
  [12, 5, 1, 15, 14, 13, 4, 10, 0, 7, 6, 3, 9, 2, 8, 11],
  [13, 11, 7, 14, 12, 1, 3, 9, 5, 0, 15, 4, 8, 6, 2, 10],
  [6, 15, 14, 9, 11, 3, 0, 8, 12, 2, 13, 7, 1, 4, 10, 5],
  [10, 2, 8, 4, 7, 6, 1, 5, 15, 11, 9, 14, 3, 12, 13, 0],
  [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15],
  [14, 10, 4, 8, 9, 15, 13, 6, 1, 12, 0, 2, 11, 7, 5, 3],
];

function compress(
  h: Uint32Array,
  block: Uint8Array,
  tLo: number,
  tHi: number,
  last: boolean,
): void {
  const v = new Uint32Array(32);
  v.set(h, 0);
  v.set(IV, 16);
  v[24] ^= tLo;
  v[25] ^= tHi;
  if (last) {
    v[28] = ~v[28];
    v[29] = ~v[29];
  }

  const m = new Uint32Array(32);
  const dv = new DataView(block.buffer, block.byteOffset, 128);
  for (let i = 0; i < 16; i++) {
    m[2 * i] = dv.getUint32(8 * i, true);
    m[2 * i + 1] = dv.getUint32(8 * i + 4, true);
  }

  const g = (a: number, b: number, c: number, d: number, xi: number, yi: number) => {
    let alo = v[2 * a], ahi = v[2 * a + 1];
    let blo = v[2 * b], bhi = v[2 * b + 1];
    let clo = v[2 * c], chi = v[2 * c + 1];
    let dlo = v[2 * d], dhi = v[2 * d + 1];

    let lo = alo + blo + m[2 * xi];
    ahi = (ahi + bhi + m[2 * xi + 1] + Math.floor(lo / 0x100000000)) >>> 0;
    alo = lo >>> 0;
    let x = dlo ^ alo, y = dhi ^ ahi;        // rotr 32: swap halves
    dlo = y >>> 0; dhi = x >>> 0;            // xor yields signed int32, renormalize
    lo = clo + dlo;
    chi = (chi + dhi + Math.floor(lo / 0x100000000)) >>> 0;
    clo = lo >>> 0;
    x = blo ^ clo; y = bhi ^ chi;            // rotr 24
    blo = ((x >>> 24) | (y << 8)) >>> 0;
    bhi = ((y >>> 24) | (x << 8)) >>> 0;

    lo = alo + blo + m[2 * yi];
    ahi = (ahi + bhi + m[2 * yi + 1] + Math.floor(lo / 0x100000000)) >>> 0;
    alo = lo >>> 0;
    x = dlo ^ alo; y = dhi ^ ahi;            // rotr 16
    dlo = ((x >>> 16) | (y << 16)) >>> 0;
    dhi = ((y >>> 16) | (x << 16)) >>> 0;
    lo = clo + dlo;
    chi = (chi + dhi + Math.floor(lo / 0x100000000)) >>> 0;
    clo = lo >>> 0;
    x = blo ^ clo; y = bhi ^ chi;            // rotr 63 = rotl 1
    blo = ((x << 1) | (y >>> 31)) >>> 0;
    bhi = ((y << 1) | (x >>> 31)) >>> 0;

    v[2 * a] = alo; v[2 * a + 1] = ahi;
    v[2 * b] = blo; v[2 * b + 1] = bhi;
    v[2 * c] = clo; v[2 * c + 1] = chi;
    v[2 * d] = dlo; v[2 * d + 1] = dhi;
  };

  for (const s of SIGMA) {
    g(0, 4, 8, 12, s[0], s[1]);
    g(1, 5, 9, 13, s[2], s[3]);
    g(2, 6, 10, 14, s[4], s[5]);
    g(3, 7, 11, 15, s[6], s[7]);
    g(0, 5, 10, 15, s[8], s[9]);
    g(1, 6, 11, 12, s[10], s[11]);
    g(2, 7, 8, 13, s[12], s[13]);
    g(3, 4, 9, 14, s[14], s[15]);
  }

  for (let i = 0; i < 16; i++) h[i] ^= v[i] ^ v[16 + i];
}

export function blake2b(data: Uint8Array, outLen: number): Uint8Array {
  if (outLen < 1 || outLen > 64) throw new Error("digest length must be 1..64");
  const h = Uint32Array.from(IV);
  h[0] ^= 0x01010000 ^ outLen;

  let t = 0;
  let off = 0;
  // every block except the last is compressed with a full counter
  while (data.length - off > 128) {
    t += 128;
    compress(h, data.subarray(off, off + 128), t >>> 0, Math.floor(t / 0x100000000), false);
    off += 128;
  }
  const lastLen = data.length - off;
  const last = new Uint8Array(128);
  last.set(data.subarray(off));
  t += lastLen;
  compress(h, last, t >>> 0, Math.floor(t / 0x100000000), true);

  const out = new Uint8Array(outLen);
  const full = new Uint8Array(64);
  const dv = new DataView(full.buffer);
  for (let i = 0; i < 8; i++) {
    dv.setUint32(8 * i, h[2 * i], true);
    dv.setUint32(8 * i + 4, h[2 * i + 1], true);
  }
  out.set(full.subarray(0, outLen));
  return out;
}
