/** Text normalization, prefix partitioning, and the versioned wire grammar.
 *
 * Serialized form: "v1" "." HEX2(declared prefix length) "." tag section
 * "." body section. A query token is the same string cut after the tag
 * section, which is what makes server-side matching a plain string
 * prefix comparison.
 */

import { b64urlDecode, b64urlEncode, Base64urlError } from "./base64url.js";

export const WIRE_VERSION = "v1";
export const SEPARATOR = ".";
export const DEFAULT_TOKEN_WIDTH = 3;
export const MIN_TOKEN_WIDTH = 1;
export const MAX_TOKEN_WIDTH = 16;
export const NONCE_SIZE = 12;
export const AEAD_TAG_SIZE = 16;
export const MAX_PREF_LEN = 255;

const FIELD_ID_RE = /^[A-Za-z0-9_]{1,64}$/;
const HEX2_RE = /^[0-9a-f]{2}$/;

export class MalformedCiphertext extends Error {
  constructor(
    public readonly reason: string,
    detail: string,
  ) {
    super(`${reason}: ${detail}`);
  }
}

export function isValidFieldId(fieldId: string): boolean {
  return FIELD_ID_RE.test(fieldId);
}

export function normalize(text: string): string {
  return text.normalize("NFC");
}

/**
 * Split a normalized text into its searchable prefix characters and the
 * effective prefix length. Characters are Unicode code points, not UTF-16
 * units, so astral-plane text partitions the same everywhere.
 */
export function partition(text: string, prefLen: number): [string[], number] {
  const chars = Array.from(normalize(text));
  const k = Math.min(prefLen, chars.length);
  return [chars.slice(0, k), k];
}

export function tokenCharWidth(tokenWidth: number): number {
  return Math.floor((tokenWidth * 8 + 5) / 6);
}

export interface FieldCiphertext {
  declaredPrefLen: number;
  prefixTags: Uint8Array[];
  body: Uint8Array;
}

function hex2(n: number): string {
  return n.toString(16).padStart(2, "0");
}

/** Header plus tag section, the string every matching ciphertext starts with. */
export function envelope(declaredPrefLen: number, tags: Uint8Array[]): string {
  const tagSection = tags.map(b64urlEncode).join("");
  return `${WIRE_VERSION}${SEPARATOR}${hex2(declaredPrefLen)}${SEPARATOR}${tagSection}`;
}

export function serialize(ct: FieldCiphertext): string {
  return `${envelope(ct.declaredPrefLen, ct.prefixTags)}${SEPARATOR}${b64urlEncode(ct.body)}`;
}

export function parse(
  serialized: string,
  tokenWidth: number = DEFAULT_TOKEN_WIDTH,
): FieldCiphertext {
  const sections = serialized.split(SEPARATOR);
  if (sections.length !== 4) {
    throw new MalformedCiphertext(
      "bad_section_count",
      `expected 4 dot-separated sections, got ${sections.length}`,
    );
  }
  const [version, header, tagSection, bodySection] = sections;
  if (version !== WIRE_VERSION) {
    throw new MalformedCiphertext("bad_version", `unsupported version ${version}`);
  }
  if (!HEX2_RE.test(header)) {
    throw new MalformedCiphertext("bad_header", "prefix length is not two lowercase hex digits");
  }
  const declaredPrefLen = parseInt(header, 16);

  const width = tokenCharWidth(tokenWidth);
  if (tagSection.length % width !== 0) {
    throw new MalformedCiphertext(
      "bad_tag_width",
      `tag section length ${tagSection.length} is not a multiple of ${width}`,
    );
  }
  const count = tagSection.length / width;
  if (count > declaredPrefLen) {
    throw new MalformedCiphertext(
      "bad_tag_width",
      `${count} tags exceed declared prefix length ${declaredPrefLen}`,
    );
  }
  const prefixTags: Uint8Array[] = [];
  try {
    for (let i = 0; i < count; i++) {
      const tag = b64urlDecode(tagSection.slice(i * width, (i + 1) * width));
      if (tag.length !== tokenWidth) {
        throw new MalformedCiphertext("bad_tag_width", "token decodes to wrong byte width");
      }
      prefixTags.push(tag);
    }
    const body = b64urlDecode(bodySection);
    if (body.length < NONCE_SIZE + AEAD_TAG_SIZE) {
      throw new MalformedCiphertext(
        "bad_encoding",
        `body too short for nonce and tag (${body.length} bytes)`,
      );
    }
    return { declaredPrefLen, prefixTags, body };
  } catch (err) {
    if (err instanceof Base64urlError) {
      throw new MalformedCiphertext("bad_encoding", err.message);
    }
    throw err;
  }
}
