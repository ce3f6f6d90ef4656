/**
 * Canned gateway responses captured from the backend's split-coverage
 * scenario (two archives holding alternating snapshots of one page).
 */

import type { TimeMapDoc, TraceDoc } from '../src/model.js';

export const NOAA = 'http://www.noaa.gov/';
export const REQUEST_DATETIME = 'Fri, 09 Sep 2005 12:00:00 GMT';

export const C_URI =
  'http://internet-archive.example/memento/20050909015848/http://www.noaa.gov/';
export const D_URI =
  'http://archive-it.example/memento/20050910081147/http://www.noaa.gov/';
export const D_DATETIME = 'Sat, 10 Sep 2005 08:11:47 GMT';

export const C_BODY =
  '<html><body><h1>noaa snapshot C</h1>' +
  '<a href="http://gw.example/travel?uri=http%3A%2F%2Fwww.noaa.gov%2F' +
  '&datetime=Fri%2C%2009%20Sep%202005%2012%3A00%3A00%20GMT">home</a> ' +
  '<a href="#top">top</a></body></html>';

export const D_BODY =
  '<html><body><h1>noaa snapshot D</h1>' +
  '<a href="http://gw.example/travel?uri=http%3A%2F%2Fwww.noaa.gov%2F' +
  '&datetime=Sat%2C%2010%20Sep%202005%2008%3A11%3A47%20GMT">home</a> ' +
  '<a href="#top">top</a></body></html>';

const BYPASS = {
  'X-Accept-Datetime': `{${REQUEST_DATETIME}}`,
  'Cache-Control': 'no-cache',
  'If-Modified-Since': 'Thu, 01 Jan 1970 00:00:00 GMT',
};

export const TRACE_C: TraceDoc = {
  id: '1',
  uri_r: NOAA,
  datetime: REQUEST_DATETIME,
  error: null,
  remediated: true,
  final_uri: C_URI,
  memento_datetime: 'Fri, 09 Sep 2005 01:58:48 GMT',
  hops: [
    {
      uri: NOAA,
      sent_headers: BYPASS,
      status: 200,
      tcn: null,
      location: null,
      content_location: null,
      archive_interval: null,
      link: null,
    },
    {
      uri: 'http://aggr.example/timegate/http://www.noaa.gov/',
      sent_headers: BYPASS,
      status: 302,
      tcn: 'choice',
      location: C_URI,
      content_location: null,
      archive_interval:
        '{Thu, 08 Sep 2005 17:48:47 GMT} - {Sat, 10 Sep 2005 08:11:47 GMT}',
      link: '<http://aggr.example/timebundle/http://www.noaa.gov/>; ' +
        'rel="timebundle"',
    },
    {
      uri: C_URI,
      sent_headers: BYPASS,
      status: 200,
      tcn: 'choice',
      location: null,
      content_location: null,
      archive_interval: null,
      link: null,
    },
  ],
};

export const TRACE_D: TraceDoc = {
  ...TRACE_C,
  id: '2',
  datetime: D_DATETIME,
  final_uri: D_URI,
  memento_datetime: D_DATETIME,
  hops: [
    TRACE_C.hops[0],
    { ...TRACE_C.hops[1], location: D_URI },
    { ...TRACE_C.hops[2], uri: D_URI },
  ],
};

export const TIMEMAP: TimeMapDoc = {
  original: NOAA,
  timegate: 'http://aggr.example/timegate/http://www.noaa.gov/',
  timebundle: 'http://aggr.example/timebundle/http://www.noaa.gov/',
  archive_interval: {
    from: 'Thu, 08 Sep 2005 17:48:47 GMT',
    until: 'Sat, 10 Sep 2005 08:11:47 GMT',
  },
  digest_algorithm: 'sha256',
  mementos: [
    {
      uri: 'http://archive-it.example/memento/20050908174847/http://www.noaa.gov/',
      datetime: 'Thu, 08 Sep 2005 17:48:47 GMT',
      media_type: 'text/html',
      language: null,
      digest: 'b3b20f12f8d1660a600a290be3598fe4440730886e4a1a34752701f46d526299',
      validity: null,
      archive: 'archive-it',
    },
    {
      uri: 'http://internet-archive.example/memento/20050908210705/http://www.noaa.gov/',
      datetime: 'Thu, 08 Sep 2005 21:07:05 GMT',
      media_type: 'text/html',
      language: null,
      digest: '324af7967036d164fa2ed83c5873edba5f8a6a8d64fe727df51f209c9e27463c',
      validity: null,
      archive: 'internet-archive',
    },
    {
      uri: C_URI,
      datetime: 'Fri, 09 Sep 2005 01:58:48 GMT',
      media_type: 'text/html',
      language: null,
      digest: '2e7b2916d457fbb5d100acc6c4f1085ee0e322f0df64535e7ccc43be5b75df99',
      validity: null,
      archive: 'internet-archive',
    },
    {
      uri: D_URI,
      datetime: D_DATETIME,
      media_type: 'text/html',
      language: null,
      digest: 'e79bd7637606ee632e002deb947e52dd181b52506dba5e7b32e9ed6821193c93',
      validity: null,
      archive: 'archive-it',
    },
  ],
};

/**
 * A fetch stand-in behaving like the gateway over the fixture scenario:
 * travels resolve by datetime, traces by travel id, timemaps by URI.
 */
export function fakeGateway() {
  const log: string[] = [];
  const byDatetime: Record<string, { body: string; trace: TraceDoc }> = {
    [REQUEST_DATETIME]: { body: C_BODY, trace: TRACE_C },
    [D_DATETIME]: { body: D_BODY, trace: TRACE_D },
  };
  const traces: Record<string, TraceDoc> = { '1': TRACE_C, '2': TRACE_D };

  const fetchFn = async (input: string): Promise<Response> => {
    log.push(input);
    const url = new URL(input, 'http://ui.example');
    if (url.pathname === '/travel') {
      const uri = url.searchParams.get('uri');
      const datetime = url.searchParams.get('datetime') ?? '';
      const hit = uri === NOAA ? byDatetime[datetime] : undefined;
      if (!hit) {
        return new Response(`no memento found for ${uri}\n`, { status: 404 });
      }
      return new Response(hit.body, {
        status: 200,
        headers: { 'Content-Type': 'text/html', 'X-Travel-Id': hit.trace.id },
      });
    }
    if (url.pathname.startsWith('/trace/')) {
      const doc = traces[url.pathname.slice('/trace/'.length)];
      if (!doc) return new Response('unknown travel id\n', { status: 404 });
      return new Response(JSON.stringify(doc), {
        status: 200, headers: { 'Content-Type': 'application/json' },
      });
    }
    if (url.pathname === '/timemap') {
      if (url.searchParams.get('uri') !== NOAA) {
        return new Response('no archive holds it\n', { status: 404 });
      }
      return new Response(JSON.stringify(TIMEMAP), {
        status: 200, headers: { 'Content-Type': 'application/json' },
      });
    }
    return new Response('unknown path\n', { status: 404 });
  };

  return { fetchFn, log };
}
