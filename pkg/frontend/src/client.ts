/** Thin fetch wrapper over the record service's JSON API. */

export interface RecordOut {
  id: string;
  fields: Record<string, string>;
}

export class ServiceError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
  ) {
    super(`service returned ${status}: ${code}`);
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class RecordStoreClient {
  private readonly fetchFn: FetchLike;

  constructor(
    public readonly baseUrl: string,
    fetchFn?: FetchLike,
  ) {
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  private async request(path: string, init?: RequestInit): Promise<unknown> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    let body: unknown = null;
    try {
      body = await response.json();
    } catch {
      // non-JSON body falls through to the status check
    }
    if (!response.ok) {
      const code =
        body && typeof body === "object" && "error" in body
          ? String((body as { error: unknown }).error)
          : `HTTP ${response.status}`;
      throw new ServiceError(response.status, code);
    }
    return body;
  }

  private json(payload: unknown, method = "PUT"): RequestInit {
    return {
      method,
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    };
  }

  async getSalt(user: string): Promise<string> {
    const body = (await this.request(`/v1/users/${encodeURIComponent(user)}/salt`)) as {
      salt: string;
    };
    return body.salt;
  }

  async putSalt(user: string, saltHex: string): Promise<void> {
    await this.request(
      `/v1/users/${encodeURIComponent(user)}/salt`,
      this.json({ salt: saltHex }),
    );
  }

  async getCheckwords(user: string): Promise<string[]> {
    const body = (await this.request(
      `/v1/users/${encodeURIComponent(user)}/checkwords`,
    )) as { words: string[] };
    return body.words;
  }

  async putCheckwords(user: string, words: string[]): Promise<void> {
    await this.request(
      `/v1/users/${encodeURIComponent(user)}/checkwords`,
      this.json({ words }),
    );
  }

  async ingest(records: RecordOut[]): Promise<number> {
    const body = (await this.request(
      "/v1/records",
      this.json({ records }, "POST"),
    )) as { ingested: number };
    return body.ingested;
  }

  async search(field: string, token: string): Promise<RecordOut[]> {
    const params = new URLSearchParams({ field, token });
    const body = (await this.request(`/v1/search?${params}`)) as {
      records: RecordOut[];
    };
    return body.records;
  }

  async health(): Promise<{ status: string; records: number }> {
    return (await this.request("/healthz")) as { status: string; records: number };
  }
}
