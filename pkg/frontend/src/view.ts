/**
 * The travel view: one form, three panels, zero negotiation logic.
 *
 * Every decision comes back from the gateway; this controller only
 * submits travel requests, projects the returned memento/trace/timemap
 * into the DOM, and turns timeline clicks and rewritten-link clicks into
 * the next travel request. At most one travel is in flight: stale
 * responses are dropped, never rendered.
 */

import { GatewayClient } from './api.js';
import { isHttpDate } from './httpdate.js';
import { interceptClicks } from './links.js';
import type { TimeMapDoc, TimeMapEntry, TraceDoc } from './model.js';
import {
  renderBanner,
  renderProvenanceLegend,
  renderTimeline,
  renderTraceTable,
} from './render.js';

export interface ViewSlots {
  banner: HTMLElement;
  memento: HTMLElement;
  trace: HTMLElement;
  timeline: HTMLElement;
  provenance: HTMLElement;
}

export class TravelView {
  currentUri: string | null = null;
  currentDatetime: string | null = null;
  currentFinalUri: string | null = null;
  private seq = 0;

  constructor(private slots: ViewSlots, private client: GatewayClient) {}

  private doc(): Document {
    return this.slots.banner.ownerDocument;
  }

  async submitTravel(uri: string, datetime: string): Promise<void> {
    if (!uri) {
      this.showBanner('enter a URI to travel to', 'error');
      return;
    }
    if (!isHttpDate(datetime)) {
      this.showBanner(
        `not an HTTP-date: ${datetime} (expected e.g. ` +
        `"Fri, 09 Sep 2005 12:00:00 GMT")`, 'error');
      return;
    }
    const ticket = ++this.seq;
    let outcome;
    try {
      outcome = await this.client.travel(uri, datetime);
    } catch {
      if (ticket === this.seq) {
        this.showBanner('gateway unreachable', 'error');
      }
      return;
    }
    if (ticket !== this.seq) return; // superseded by a newer submission
    if (!outcome.ok) {
      this.showBanner(`no memento found for ${uri}`, 'error');
      this.clearPanels();
      return;
    }
    this.clearBanner();
    this.currentUri = uri;
    this.currentDatetime = datetime;
    this.showMemento(outcome.body);

    const [trace, timemap] = await Promise.all([
      outcome.travelId ? this.client.trace(outcome.travelId)
                       : Promise.resolve(null),
      this.client.timemap(uri),
    ]);
    if (ticket !== this.seq) return;
    this.currentFinalUri = trace?.final_uri ?? null;
    this.showTrace(trace);
    this.showTimeline(timemap);
  }

  async timelineJump(entry: TimeMapEntry): Promise<void> {
    if (!this.currentUri) return;
    await this.submitTravel(this.currentUri, entry.datetime);
  }

  // -- panel plumbing ----------------------------------------------------

  private showMemento(html: string): void {
    const doc = this.doc();
    this.slots.memento.textContent = '';
    const frame = doc.createElement('iframe');
    // faithful display without execution: same-origin for the click
    // interceptor, no allow-scripts
    frame.setAttribute('sandbox', 'allow-same-origin');
    frame.className = 'memento-frame';
    this.slots.memento.appendChild(frame);
    const inner = frame.contentDocument;
    if (inner) {
      inner.open();
      inner.write(html);
      inner.close();
      interceptClicks(inner, (link) => {
        void this.submitTravel(link.uri, link.datetime);
      });
    } else {
      frame.setAttribute('srcdoc', html);
    }
  }

  private showTrace(trace: TraceDoc | null): void {
    this.slots.trace.textContent = '';
    if (trace) {
      this.slots.trace.appendChild(renderTraceTable(this.doc(), trace));
    }
  }

  private showTimeline(timemap: TimeMapDoc | null): void {
    this.slots.timeline.textContent = '';
    this.slots.provenance.textContent = '';
    if (!timemap) return;
    this.slots.timeline.appendChild(
      renderTimeline(this.doc(), timemap, this.currentFinalUri, {
        onJump: (entry) => void this.timelineJump(entry),
      }));
    this.slots.provenance.appendChild(
      renderProvenanceLegend(this.doc(), timemap));
    const current = timemap.mementos.find(
      (m) => m.uri === this.currentFinalUri);
    if (current?.archive) {
      const label = this.doc().createElement('span');
      label.className = 'serving-archive';
      label.textContent = `served by ${current.archive}`;
      this.slots.provenance.appendChild(label);
    }
  }

  private showBanner(message: string, kind: 'error' | 'info'): void {
    this.slots.banner.textContent = '';
    this.slots.banner.appendChild(renderBanner(this.doc(), message, kind));
  }

  private clearBanner(): void {
    this.slots.banner.textContent = '';
  }

  private clearPanels(): void {
    this.slots.memento.textContent = '';
    this.slots.trace.textContent = '';
    this.slots.timeline.textContent = '';
    this.slots.provenance.textContent = '';
  }
}
