/** Thin client for the chronology service.
 *
 * Every mutation round-trips through the service; the UI never edits
 * chronology data locally. The fetch implementation is injectable so
 * tests can substitute an in-memory service.
 */

import type { ChronologyDocument, RelationType, ViewDocument } from "./types.js";

export type Fetcher = (url: string, init?: RequestInit) => Promise<Response>;

export interface Tagged<T> {
  document: T;
  etag: string;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
  ) {
    super(message);
  }
}

async function expectOk(response: Response): Promise<Response> {
  if (!response.ok) {
    const text = await response.text();
    throw new ApiError(response.status, text || response.statusText);
  }
  return response;
}

export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetcher: Fetcher = (url, init) => fetch(url, init),
  ) {}

  async getView(
    chronologyId: string,
    options: { perspective?: string; includedTypes?: RelationType[] } = {},
  ): Promise<Tagged<ViewDocument>> {
    // A relation-type toggle becomes an ad-hoc perspective the service applies.
    let perspective = options.perspective;
    if (!perspective && options.includedTypes) {
      perspective = await this.ensureTogglePerspective(options.includedTypes);
    }
    const query = perspective ? `?perspective=${encodeURIComponent(perspective)}` : "";
    const response = await expectOk(
      await this.fetcher(`${this.baseUrl}/chronologies/${chronologyId}/timeflow${query}`),
    );
    return { document: await response.json(), etag: response.headers.get("ETag") ?? "" };
  }

  async getChronology(chronologyId: string): Promise<Tagged<ChronologyDocument>> {
    const response = await expectOk(
      await this.fetcher(`${this.baseUrl}/chronologies/${chronologyId}`),
    );
    return { document: await response.json(), etag: response.headers.get("ETag") ?? "" };
  }

  async putChronology(
    chronologyId: string,
    document: ChronologyDocument,
    etag: string,
  ): Promise<string> {
    const response = await expectOk(
      await this.fetcher(`${this.baseUrl}/chronologies/${chronologyId}`, {
        method: "PUT",
        headers: { "Content-Type": "application/json", "If-Match": etag },
        body: JSON.stringify(document),
      }),
    );
    return response.headers.get("ETag") ?? "";
  }

  async mergeEvents(chronologyId: string, eventIds: string[]): Promise<string> {
    const response = await expectOk(
      await this.fetcher(`${this.baseUrl}/chronologies/${chronologyId}/merge`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ event_ids: eventIds }),
      }),
    );
    return response.headers.get("ETag") ?? "";
  }

  private async ensureTogglePerspective(includedTypes: RelationType[]): Promise<string> {
    const response = await expectOk(
      await this.fetcher(`${this.baseUrl}/perspectives`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({
          name: `toggle ${[...includedTypes].sort().join(" ")}`,
          included_rel_types: includedTypes,
        }),
      }),
    );
    return (await response.json()).id;
  }
}
