/**
 * Fixed-width GMT HTTP-date text, the only datetime syntax the protocol
 * speaks. The picker both renders and accepts this form; no timezone
 * selector exists because everything is GMT.
 */

const WEEKDAYS = ['Sun', 'Mon', 'Tue', 'Wed', 'Thu', 'Fri', 'Sat'];
const MONTHS = ['Jan', 'Feb', 'Mar', 'Apr', 'May', 'Jun',
                'Jul', 'Aug', 'Sep', 'Oct', 'Nov', 'Dec'];

const HTTP_DATE_RE = new RegExp(
  '^(Mon|Tue|Wed|Thu|Fri|Sat|Sun), ' +
  '(\\d{2}) (Jan|Feb|Mar|Apr|May|Jun|Jul|Aug|Sep|Oct|Nov|Dec) ' +
  '(\\d{4}) (\\d{2}):(\\d{2}):(\\d{2}) GMT$');

const pad = (n: number) => String(n).padStart(2, '0');

export function formatHttpDate(date: Date): string {
  return `${WEEKDAYS[date.getUTCDay()]}, ${pad(date.getUTCDate())} ` +
    `${MONTHS[date.getUTCMonth()]} ${date.getUTCFullYear()} ` +
    `${pad(date.getUTCHours())}:${pad(date.getUTCMinutes())}:` +
    `${pad(date.getUTCSeconds())} GMT`;
}

/** Strict parse; returns null on any deviation, including a wrong weekday. */
export function parseHttpDate(text: string): Date | null {
  const m = HTTP_DATE_RE.exec(text);
  if (!m) return null;
  const [, weekday, day, month, year, hour, minute, second] = m;
  const date = new Date(Date.UTC(
    Number(year), MONTHS.indexOf(month), Number(day),
    Number(hour), Number(minute), Number(second)));
  // Date.UTC silently rolls over impossible dates; formatting back
  // catches those along with inconsistent weekday names.
  if (formatHttpDate(date) !== text) return null;
  if (WEEKDAYS[date.getUTCDay()] !== weekday) return null;
  return date;
}

export function isHttpDate(text: string): boolean {
  return parseHttpDate(text) !== null;
}
