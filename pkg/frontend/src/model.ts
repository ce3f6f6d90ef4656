/** Shapes of the gateway's JSON responses; mirrored, never reinterpreted. */

export interface TraceHop {
  uri: string;
  sent_headers: Record<string, string>;
  status: number;
  tcn: string | null;
  location: string | null;
  content_location: string | null;
  archive_interval: string | null;
  link: string | null;
}

export interface TraceDoc {
  id: string;
  uri_r: string;
  datetime: string;
  error: string | null;
  remediated: boolean | null;
  final_uri: string | null;
  memento_datetime: string | null;
  hops: TraceHop[];
}

export interface IntervalDoc {
  from: string;
  until: string;
}

export interface TimeMapEntry {
  uri: string;
  datetime: string;
  media_type: string;
  language: string | null;
  digest: string;
  validity: IntervalDoc | null;
  archive?: string;
}

export interface TimeMapDoc {
  original: string;
  timegate: string;
  timebundle: string;
  archive_interval: IntervalDoc;
  digest_algorithm: string;
  mementos: TimeMapEntry[];
}
