/** Page bootstrap: bind the form to a TravelView against the gateway. */

import { GatewayClient } from './api.js';
import { formatHttpDate } from './httpdate.js';
import { TravelView } from './view.js';

function requireElement(id: string): HTMLElement {
  const element = document.getElementById(id);
  if (!element) throw new Error(`missing #${id}`);
  return element;
}

export function boot(): TravelView {
  const params = new URLSearchParams(window.location.search);
  const base = params.get('gateway') ?? '';
  const view = new TravelView({
    banner: requireElement('banner'),
    memento: requireElement('memento-pane'),
    trace: requireElement('trace-panel'),
    timeline: requireElement('timeline-strip'),
    provenance: requireElement('provenance'),
  }, new GatewayClient(base));

  const uriInput = requireElement('uri-input') as HTMLInputElement;
  const datetimeInput = requireElement('datetime-input') as HTMLInputElement;
  if (!datetimeInput.value) {
    datetimeInput.value = formatHttpDate(new Date());
  }
  requireElement('travel-form').addEventListener('submit', (event) => {
    event.preventDefault();
    void view.submitTravel(uriInput.value.trim(), datetimeInput.value.trim());
  });
  return view;
}

if (typeof document !== 'undefined' && document.getElementById('travel-form')) {
  boot();
}
