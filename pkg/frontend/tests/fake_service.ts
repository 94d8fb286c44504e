/** In-memory stand-in for the chronology service, backed by captured
 * service responses. It honours the same contract the client relies on:
 * perspectives filter relation types out of delivered views, merges swap
 * in the merged document, and writes are guarded by version tags. */

import { readFileSync } from "node:fs";
import type { Fetcher } from "../src/api.js";
import type { ChronologyDocument, ViewDocument } from "../src/types.js";

function fixture<T>(name: string): T {
  return JSON.parse(readFileSync(new URL(`./fixtures/${name}`, import.meta.url), "utf-8")) as T;
}

export const GOLDEN_VIEW = fixture<ViewDocument>("golden_view.json");
export const GOLDEN_CHRONOLOGY = fixture<ChronologyDocument>("golden_chronology.json");
export const MERGED_VIEW = fixture<ViewDocument>("merged_view.json");
export const MERGED_CHRONOLOGY = fixture<ChronologyDocument>("merged_chronology.json");
export const TAGS = fixture<{ etag: string; merged_etag: string }>("tags.json");

interface Stored {
  view: ViewDocument;
  chronology: ChronologyDocument;
  etag: string;
}

export class FakeService {
  private state: Stored = {
    view: GOLDEN_VIEW,
    chronology: GOLDEN_CHRONOLOGY,
    etag: TAGS.etag,
  };
  private perspectives = new Map<string, string[]>();
  readonly requests: string[] = [];

  fetcher: Fetcher = async (url, init) => {
    this.requests.push(`${init?.method ?? "GET"} ${url}`);
    const { pathname, searchParams } = new URL(url, "http://service");
    const method = init?.method ?? "GET";

    if (method === "POST" && pathname === "/perspectives") {
      const body = JSON.parse(String(init?.body));
      const id = `persp-${this.perspectives.size + 1}`;
      this.perspectives.set(id, body.included_rel_types);
      return json(201, { id });
    }
    if (method === "GET" && /^\/chronologies\/[^/]+\/timeflow$/.test(pathname)) {
      const perspective = searchParams.get("perspective");
      let view = this.state.view;
      if (perspective) {
        const included = this.perspectives.get(perspective);
        if (!included) {
          return json(404, { detail: "unknown perspective" });
        }
        view = filterView(view, new Set(included));
      }
      return json(200, view, this.state.etag);
    }
    if (method === "GET" && /^\/chronologies\/[^/]+$/.test(pathname)) {
      return json(200, this.state.chronology, this.state.etag);
    }
    if (method === "PUT" && /^\/chronologies\/[^/]+$/.test(pathname)) {
      const ifMatch = new Headers(init?.headers).get("If-Match");
      if (ifMatch !== this.state.etag) {
        return json(409, { detail: "stale tag" });
      }
      const body = JSON.parse(String(init?.body)) as ChronologyDocument;
      const isGolden = JSON.stringify(body) === JSON.stringify(GOLDEN_CHRONOLOGY);
      this.state = isGolden
        ? { view: GOLDEN_VIEW, chronology: GOLDEN_CHRONOLOGY, etag: TAGS.etag }
        : { ...this.state, chronology: body, etag: `tag-${this.requests.length}` };
      return json(200, this.state.chronology, this.state.etag);
    }
    if (method === "POST" && /^\/chronologies\/[^/]+\/merge$/.test(pathname)) {
      const body = JSON.parse(String(init?.body));
      if (!Array.isArray(body.event_ids) || body.event_ids.length < 2) {
        return json(422, { detail: "need at least two events" });
      }
      const previous = this.state.etag;
      this.state = { view: MERGED_VIEW, chronology: MERGED_CHRONOLOGY, etag: TAGS.merged_etag };
      return json(200, { previous_tag: previous }, this.state.etag);
    }
    return json(404, { detail: `no route for ${method} ${pathname}` });
  };
}

function filterView(view: ViewDocument, included: Set<string>): ViewDocument {
  const relations = view.relations.filter((r) => included.has(r.rel_type));
  const keep = new Set(relations.map((r) => r.id));
  return {
    ...view,
    relations,
    layout: {
      ...view.layout,
      edges: view.layout.edges.filter((e) => keep.has(e.relation_id)),
    },
  };
}

function json(status: number, body: unknown, etag?: string): Response {
  const headers: Record<string, string> = { "Content-Type": "application/json" };
  if (etag) {
    headers["ETag"] = etag;
  }
  return new Response(JSON.stringify(body), { status, headers });
}
