/**
 * Thin client for the gateway HTTP API. All negotiation happens on the
 * gateway; this module only moves requests and JSON.
 */

import type { TimeMapDoc, TraceDoc } from './model.js';

export interface TravelOutcome {
  ok: boolean;
  status: number;
  body: string;
  travelId: string | null;
}

export type FetchLike = (input: string) => Promise<Response>;

export class GatewayClient {
  constructor(private base: string,
              private fetchFn: FetchLike = (input) => fetch(input)) {}

  private url(path: string): string {
    return `${this.base}${path}`;
  }

  async travel(uri: string, datetime: string): Promise<TravelOutcome> {
    const query = `uri=${encodeURIComponent(uri)}` +
      `&datetime=${encodeURIComponent(datetime)}`;
    const response = await this.fetchFn(this.url(`/travel?${query}`));
    return {
      ok: response.status === 200,
      status: response.status,
      body: await response.text(),
      travelId: response.headers.get('X-Travel-Id'),
    };
  }

  async trace(travelId: string): Promise<TraceDoc | null> {
    const response = await this.fetchFn(this.url(`/trace/${travelId}`));
    if (response.status !== 200) return null;
    return await response.json() as TraceDoc;
  }

  async timemap(uri: string): Promise<TimeMapDoc | null> {
    const response = await this.fetchFn(
      this.url(`/timemap?uri=${encodeURIComponent(uri)}`));
    if (response.status !== 200) return null;
    return await response.json() as TimeMapDoc;
  }
}
