/**
 * Rewritten-link handling inside the memento pane.
 *
 * The gateway rewrites every absolute link in a memento to
 * `{gateway}/travel?uri=...&datetime=...`; clicking one must become the
 * next travel request instead of a raw navigation, so the datetime rides
 * along unchanged.
 */

export interface TravelLink {
  uri: string;
  datetime: string;
}

/** Extract the travel parameters from a rewritten href, if it is one. */
export function parseTravelLink(href: string): TravelLink | null {
  const queryStart = href.indexOf('?');
  const path = queryStart < 0 ? href : href.slice(0, queryStart);
  if (!path.endsWith('/travel')) return null;
  const params = new URLSearchParams(
    queryStart < 0 ? '' : href.slice(queryStart + 1));
  const uri = params.get('uri');
  const datetime = params.get('datetime');
  if (!uri || !datetime) return null;
  return { uri, datetime };
}

/**
 * Intercept anchor clicks in a document; travel links go to the handler,
 * everything else is inert (the pane never navigates on its own).
 */
export function interceptClicks(doc: Document,
                                onTravel: (link: TravelLink) => void): void {
  doc.addEventListener('click', (event) => {
    const target = event.target as Element | null;
    const anchor = target?.closest('a');
    if (!anchor) return;
    event.preventDefault();
    const href = anchor.getAttribute('href');
    if (!href) return;
    const link = parseTravelLink(href);
    if (link) onTravel(link);
  });
}
