/** DOM wiring for the demo page: encrypt on blur, decrypt on focus,
 * decrypt marked spans at load, and a live prefix search box.
 */

import {
  AuthenticationFailed,
  EncryptionContext,
  decryptText,
  encryptText,
  makeQueryToken,
} from "./cipher.js";
import { MalformedCiphertext, normalize } from "./codec.js";
import { RecordOut, RecordStoreClient } from "./client.js";

export type ContextLookup = (fieldId: string) => EncryptionContext | undefined;

/** Matches the wire shape without attempting a parse. */
export function looksLikeCiphertext(value: string): boolean {
  return value.startsWith("v1.") && value.split(".").length === 4;
}

function flagDecryptFailure(el: Element): void {
  el.classList.add("decrypt-failed");
}

/**
 * Bind focus/blur handlers to every input.encrypted inside the form and
 * intercept submission so only ciphertext ever leaves the page.
 */
export class FormController {
  /** Resolves to the ingested record id; tests await it after submit. */
  lastSubmission: Promise<string> | null = null;

  constructor(
    private readonly form: HTMLFormElement,
    private readonly ctxFor: ContextLookup,
    private readonly client: RecordStoreClient,
  ) {
    form.addEventListener("focusin", (event) => {
      const input = event.target;
      if (input instanceof HTMLInputElement && input.classList.contains("encrypted")) {
        this.reveal(input);
      }
    });
    form.addEventListener("focusout", (event) => {
      const input = event.target;
      if (input instanceof HTMLInputElement && input.classList.contains("encrypted")) {
        this.conceal(input);
      }
    });
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      this.lastSubmission = this.submit();
      // surface rejections to the console instead of as unhandled
      this.lastSubmission.catch(() => undefined);
    });
  }

  private context(input: HTMLInputElement): EncryptionContext | undefined {
    return this.ctxFor(input.name);
  }

  reveal(input: HTMLInputElement): void {
    const ctx = this.context(input);
    if (!ctx || !looksLikeCiphertext(input.value)) return;
    try {
      input.value = decryptText(ctx, input.value);
      input.classList.remove("decrypt-failed");
    } catch (err) {
      if (err instanceof AuthenticationFailed || err instanceof MalformedCiphertext) {
        flagDecryptFailure(input);
        return;
      }
      throw err;
    }
  }

  conceal(input: HTMLInputElement): void {
    const ctx = this.context(input);
    if (!ctx || input.value === "" || looksLikeCiphertext(input.value)) return;
    input.value = encryptText(ctx, input.value);
  }

  private async submit(): Promise<string> {
    const fields: Record<string, string> = {};
    for (const el of Array.from(this.form.elements)) {
      if (!(el instanceof HTMLInputElement) || !el.name) continue;
      if (el.type === "submit") continue;
      if (el.classList.contains("encrypted")) this.conceal(el);
      fields[el.name] = el.value;
    }
    const id = crypto.randomUUID();
    await this.client.ingest([{ id, fields }]);
    return id;
  }
}

export function wireForm(
  form: HTMLFormElement,
  ctxFor: ContextLookup,
  client: RecordStoreClient,
): FormController {
  return new FormController(form, ctxFor, client);
}

/**
 * Replace the ciphertext text of every span.encrypted under root with its
 * plaintext. Failures are isolated per span and flagged via a CSS class.
 */
export function decryptSpansOnLoad(
  root: ParentNode,
  ctxFor: ContextLookup,
): { decrypted: number; failed: number } {
  let decrypted = 0;
  let failed = 0;
  for (const span of Array.from(root.querySelectorAll("span.encrypted"))) {
    const ctx = ctxFor(span.getAttribute("data-field") ?? "");
    if (!ctx) {
      flagDecryptFailure(span);
      failed++;
      continue;
    }
    try {
      span.textContent = decryptText(ctx, span.textContent ?? "");
      decrypted++;
    } catch (err) {
      if (err instanceof AuthenticationFailed || err instanceof MalformedCiphertext) {
        flagDecryptFailure(span);
        failed++;
        continue;
      }
      throw err;
    }
  }
  return { decrypted, failed };
}

export interface LiveSearchOptions {
  client: RecordStoreClient;
  ctx: EncryptionContext;
  fieldId: string;
  resultsEl: HTMLElement;
  countEl: HTMLElement;
  statusEl?: HTMLElement;
  debounceMs?: number;
}

/**
 * Search-as-you-type over the encrypted corpus. Requests are debounced
 * and sequence-numbered so a slow earlier response never overwrites a
 * newer one; terms longer than the indexed prefix are post-filtered
 * against the decrypted values.
 */
export class LiveSearch {
  private seq = 0;
  private timer: ReturnType<typeof setTimeout> | null = null;
  private inflight: Promise<void> = Promise.resolve();

  constructor(
    private readonly input: HTMLInputElement,
    private readonly opts: LiveSearchOptions,
  ) {
    input.addEventListener("input", () => this.schedule());
  }

  private schedule(): void {
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = setTimeout(() => {
      this.timer = null;
      this.inflight = this.execute(this.input.value);
    }, this.opts.debounceMs ?? 150);
  }

  /** Run any pending query now and wait for the rendering to settle. */
  async flush(): Promise<void> {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
      this.inflight = this.execute(this.input.value);
    }
    await this.inflight;
  }

  private render(records: { id: string; value: string }[]): void {
    const { resultsEl, countEl } = this.opts;
    resultsEl.replaceChildren(
      ...records.map((r) => {
        const li = this.input.ownerDocument.createElement("li");
        li.textContent = r.value;
        li.setAttribute("data-id", r.id);
        return li;
      }),
    );
    countEl.textContent = String(records.length);
  }

  private async execute(term: string): Promise<void> {
    const mySeq = ++this.seq;
    const { client, ctx, fieldId, countEl, resultsEl, statusEl } = this.opts;
    if (term === "") {
      resultsEl.replaceChildren();
      countEl.textContent = "";
      return;
    }
    let records: RecordOut[];
    try {
      records = await client.search(fieldId, makeQueryToken(ctx, term));
    } catch (err) {
      if (mySeq === this.seq && statusEl) {
        statusEl.textContent = `search failed: ${(err as Error).message}`;
      }
      return; // keep the last rendered results
    }
    if (mySeq !== this.seq) return;

    const needle = normalize(term);
    const rows: { id: string; value: string }[] = [];
    for (const record of records) {
      const stored = record.fields[fieldId];
      if (typeof stored !== "string") continue;
      let value: string;
      try {
        value = decryptText(ctx, stored);
      } catch {
        continue; // foreign or corrupt entry, not ours to show
      }
      if (Array.from(needle).length > ctx.prefLen && !value.startsWith(needle)) {
        continue;
      }
      rows.push({ id: record.id, value });
    }
    if (statusEl) statusEl.textContent = "";
    this.render(rows);
  }
}

export function attachLiveSearch(
  input: HTMLInputElement,
  opts: LiveSearchOptions,
): LiveSearch {
  return new LiveSearch(input, opts);
}
