/** Date rendering: the API speaks ISO (YYYY-MM-DD), the screens speak
 * DD-MM-YYYY. Pure string work — no Date objects, no timezones. */

const ISO = /^(\d{4})-(\d{2})-(\d{2})$/;

/** "2019-04-12" -> "12-04-2019". Anything non-ISO is returned as-is. */
export function formatDate(iso: string): string {
  const m = ISO.exec(iso);
  if (!m) return iso;
  return `${m[3]}-${m[2]}-${m[1]}`;
}

/** "12-04-2019" -> "2019-04-12"; null when the text is not a date. */
export function parseDisplayDate(text: string): string | null {
  const m = /^(\d{2})-(\d{2})-(\d{4})$/.exec(text.trim());
  if (!m) return null;
  return `${m[3]}-${m[2]}-${m[1]}`;
}

/** Unix seconds -> "DD-MM-YYYY HH:MM" in UTC, for feedback threads. */
export function formatTimestamp(seconds: number): string {
  const d = new Date(seconds * 1000);
  const pad = (n: number) => String(n).padStart(2, "0");
  return (
    `${pad(d.getUTCDate())}-${pad(d.getUTCMonth() + 1)}-${d.getUTCFullYear()}` +
    ` ${pad(d.getUTCHours())}:${pad(d.getUTCMinutes())}`
  );
}
