/** Demo page bootstrap: session password, key derivation, and wiring. */

import { bytesToHex, randomBytes } from "./bytes.js";
import {
  EncryptionContext,
  encryptText,
  makeCheckWords,
  makeContext,
  verifyPassword,
} from "./cipher.js";
import { RecordStoreClient, ServiceError } from "./client.js";
import { attachLiveSearch, decryptSpansOnLoad, wireForm } from "./demo.js";
import { KeyRing, deriveKeyring, kdfParams } from "./keyring.js";

const PASSWORD_KEY = "prefixseal.password";

function banner(text: string, tone: "info" | "error" = "info"): void {
  const el = document.getElementById("banner");
  if (!el) return;
  el.textContent = text;
  el.className = tone;
  el.hidden = text === "";
}

function setReadOnly(readOnly: boolean): void {
  for (const input of document.querySelectorAll<HTMLInputElement>("input.encrypted")) {
    input.readOnly = readOnly;
  }
}

async function obtainRing(
  client: RecordStoreClient,
  user: string,
  password: string,
  memoryCost: number,
  timeCost: number,
): Promise<KeyRing | null> {
  let saltHex: string;
  let provisioned = false;
  try {
    saltHex = await client.getSalt(user);
  } catch (err) {
    if (!(err instanceof ServiceError && err.status === 404)) throw err;
    saltHex = bytesToHex(randomBytes(16));
    await client.putSalt(user, saltHex);
    provisioned = true;
  }

  banner("deriving keys, this runs once per session...");
  const ring = await deriveKeyring(password, kdfParams(saltHex, { memoryCost, timeCost }));

  if (provisioned) {
    await client.putCheckwords(user, makeCheckWords(ring));
    return ring;
  }
  const words = await client.getCheckwords(user);
  return verifyPassword(ring, words) ? ring : null;
}

function demoSpans(ring: KeyRing, ctxFor: (f: string) => EncryptionContext | undefined): void {
  // seed the marked spans with fresh ciphertexts, then decrypt them the
  // way a server-rendered page would on DOMContentLoaded
  const samples: Record<string, string> = {
    first_name: "Rosalind",
    last_name: "Franklin",
  };
  for (const span of document.querySelectorAll("span.encrypted")) {
    const field = span.getAttribute("data-field") ?? "";
    const ctx = ctxFor(field);
    const value = samples[field];
    if (ctx && value) span.textContent = encryptText(ctx, value);
  }
  const { decrypted, failed } = decryptSpansOnLoad(document, ctxFor);
  const status = document.getElementById("span-status");
  if (status) status.textContent = `${decrypted} decrypted, ${failed} failed`;
}

async function init(): Promise<void> {
  const cfg = document.body.dataset;
  const server = cfg.server ?? "http://127.0.0.1:8000";
  const user = cfg.user ?? "demo";
  const memoryCost = Number(cfg.kdfMemory ?? 65536);
  const timeCost = Number(cfg.kdfTime ?? 3);
  const client = new RecordStoreClient(server);

  const passwordForm = document.getElementById("password-form") as HTMLFormElement | null;
  passwordForm?.addEventListener("submit", (event) => {
    event.preventDefault();
    const input = document.getElementById("password") as HTMLInputElement;
    if (input.value) {
      sessionStorage.setItem(PASSWORD_KEY, input.value);
      location.reload();
    }
  });

  const password = sessionStorage.getItem(PASSWORD_KEY);
  if (!password) {
    setReadOnly(true);
    banner("no password in this session: enter one below to unlock the form", "error");
    return;
  }
  if (passwordForm) passwordForm.hidden = true;

  let ring: KeyRing | null;
  try {
    ring = await obtainRing(client, user, password, memoryCost, timeCost);
  } catch (err) {
    setReadOnly(true);
    banner(`cannot reach the record service at ${server}: ${(err as Error).message}`, "error");
    return;
  }
  if (!ring) {
    setReadOnly(true);
    sessionStorage.removeItem(PASSWORD_KEY);
    banner("wrong password for this user's check-words; reload to try again", "error");
    return;
  }
  banner("");
  setReadOnly(false);

  const contexts = new Map<string, EncryptionContext>();
  for (const input of document.querySelectorAll<HTMLInputElement>("input.encrypted")) {
    const prefLen = Number(input.dataset.prefLen ?? 3);
    if (input.name && !contexts.has(input.name)) {
      contexts.set(input.name, makeContext(ring, input.name, prefLen));
    }
  }
  const ctxFor = (fieldId: string) => contexts.get(fieldId);

  const form = document.getElementById("record-form") as HTMLFormElement | null;
  if (form) wireForm(form, ctxFor, client);

  demoSpans(ring, ctxFor);

  const searchInput = document.getElementById("search") as HTMLInputElement | null;
  const resultsEl = document.getElementById("results");
  const countEl = document.getElementById("count");
  const statusEl = document.getElementById("search-status");
  if (searchInput && resultsEl && countEl) {
    const field = searchInput.dataset.field ?? "first_name";
    const prefLen = Number(searchInput.dataset.prefLen ?? 3);
    attachLiveSearch(searchInput, {
      client,
      ctx: makeContext(ring, field, prefLen),
      fieldId: field,
      resultsEl,
      countEl,
      statusEl: statusEl ?? undefined,
    });
  }
}

document.addEventListener("DOMContentLoaded", () => {
  void init();
});
