/**
 * DOM builders for the three panels: hop trace, timeline strip, banners.
 * Pure projections of the gateway's JSON; no negotiation logic here.
 */

import type { TimeMapDoc, TimeMapEntry, TraceDoc } from './model.js';

const PALETTE = ['#2b6cb0', '#c05621', '#2f855a', '#805ad5', '#b83280'];

/** Stable archive -> colour assignment in first-appearance order. */
export function archiveColors(timemap: TimeMapDoc): Map<string, string> {
  const colors = new Map<string, string>();
  for (const entry of timemap.mementos) {
    const archive = entry.archive ?? 'unknown';
    if (!colors.has(archive)) {
      colors.set(archive, PALETTE[colors.size % PALETTE.length]);
    }
  }
  return colors;
}

const TRACE_COLUMNS = ['#', 'uri', 'status', 'tcn', 'location',
                       'archive interval'] as const;

/** Lossless projection of the trace JSON into a table. */
export function renderTraceTable(doc: Document, trace: TraceDoc): HTMLTableElement {
  const table = doc.createElement('table');
  table.className = 'trace-table';
  const head = table.createTHead().insertRow();
  for (const column of TRACE_COLUMNS) {
    const th = doc.createElement('th');
    th.textContent = column;
    head.appendChild(th);
  }
  const body = table.createTBody();
  trace.hops.forEach((hop, index) => {
    const row = body.insertRow();
    row.dataset.status = String(hop.status);
    row.dataset.uri = hop.uri;
    const cells = [
      String(index + 1),
      hop.uri,
      hop.status === 0 ? 'failed' : String(hop.status),
      hop.tcn ?? '',
      hop.location ?? '',
      hop.archive_interval ?? '',
    ];
    for (const text of cells) {
      row.insertCell().textContent = text;
    }
  });
  return table;
}

export interface TimelineCallbacks {
  onJump: (entry: TimeMapEntry) => void;
}

/**
 * The memento timeline: one button per entry, provenance-coloured,
 * sorted by datetime (the TimeMap arrives sorted and stays untouched),
 * with the currently shown memento highlighted.
 */
export function renderTimeline(doc: Document, timemap: TimeMapDoc,
                               currentUri: string | null,
                               callbacks: TimelineCallbacks): HTMLElement {
  const strip = doc.createElement('div');
  strip.className = 'timeline';
  const colors = archiveColors(timemap);
  for (const entry of timemap.mementos) {
    const item = doc.createElement('button');
    item.type = 'button';
    item.className = 'timeline-entry';
    const archive = entry.archive ?? 'unknown';
    item.dataset.uri = entry.uri;
    item.dataset.archive = archive;
    item.dataset.color = colors.get(archive) ?? '';
    item.style.borderColor = colors.get(archive) ?? '';
    item.textContent = entry.datetime;
    item.title = `${archive}: ${entry.uri}`;
    if (currentUri !== null && entry.uri === currentUri) {
      item.classList.add('current');
    }
    item.addEventListener('click', () => callbacks.onJump(entry));
    strip.appendChild(item);
  }
  return strip;
}

export function renderBanner(doc: Document, message: string,
                             kind: 'error' | 'info'): HTMLElement {
  const banner = doc.createElement('div');
  banner.className = `banner banner-${kind}`;
  banner.textContent = message;
  return banner;
}

export function renderProvenanceLegend(doc: Document,
                                       timemap: TimeMapDoc): HTMLElement {
  const legend = doc.createElement('div');
  legend.className = 'legend';
  for (const [archive, color] of archiveColors(timemap)) {
    const item = doc.createElement('span');
    item.className = 'legend-entry';
    item.dataset.archive = archive;
    item.style.color = color;
    item.textContent = archive;
    legend.appendChild(item);
  }
  return legend;
}
