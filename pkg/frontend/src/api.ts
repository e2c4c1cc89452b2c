/** Typed client for the staircode query API.
 *
 * Every payload keeps the exact response text alongside the parsed value so
 * the UI can render straight from what the server sent — panels never
 * re-serialize or recompute anything.
 */

export type Step = { sigma: number; u: number | "inf" };

export type ConquerorRun = { sigma_from: number; id: string };

export type StaircaseEntry = {
  id: string;
  birth_sigma: number;
  steps: Step[];
  conqueror: ConquerorRun[];
};

export type BettiTable = {
  b0: [number, number][];
  b1: [number, number][];
  b2: [number, number][];
};

export type StaircodeDocument = {
  order: string[];
  staircases: StaircaseEntry[];
  betti: BettiTable;
  meta: Record<string, unknown>;
};

export type Bar = {
  owner: string;
  birth_t: number;
  death_t: number | "inf";
  birth_grade: [number, number] | null;
  death_grade: [number, number] | null;
};

export type Barcode = { bars: Bar[] };

export type Merge = { height: number; left: string; right: string };

export type Treegram = { leaves: string[]; births: number[]; merges: Merge[] };

export type Point = { sigma: number; eps: number };

/** Parsed response plus the exact bytes it was parsed from. */
export type Payload<T> = { url: string; raw: string; data: T };

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

/** Format a line for the `l=` query parameter, anchor at the smaller sigma.
 *
 * Throws unless the two points span a strictly positive, finite slope; this
 * is the last gate before a URL exists, so no request can ever carry a flat,
 * vertical, or negative line.
 */
export function lineSpec(p0: Point, p1: Point): string {
  const [a, b] = p0.sigma <= p1.sigma ? [p0, p1] : [p1, p0];
  const ds = b.sigma - a.sigma;
  const de = b.eps - a.eps;
  if (!Number.isFinite(ds) || !Number.isFinite(de) || ds <= 0 || de <= 0) {
    throw new Error(`line through (${p0.sigma},${p0.eps}) and (${p1.sigma},${p1.eps}) must have positive slope`);
  }
  return `${a.sigma},${a.eps}:${b.sigma},${b.eps}`;
}

export class Client {
  constructor(readonly base: string = "") {}

  private async get<T>(path: string, signal?: AbortSignal): Promise<Payload<T>> {
    const res = await fetch(this.base + path, {
      headers: { Accept: "application/json" },
      signal,
    });
    const raw = await res.text();
    if (!res.ok) {
      let message = `HTTP ${res.status}`;
      try {
        const body = JSON.parse(raw) as { error?: string };
        if (body.error) message = body.error;
      } catch {
        // non-JSON error body; keep the status line
      }
      throw new ApiError(res.status, message);
    }
    return { url: path, raw, data: JSON.parse(raw) as T };
  }

  meta(signal?: AbortSignal): Promise<Payload<Record<string, unknown>>> {
    return this.get("/api/meta", signal);
  }

  staircode(signal?: AbortSignal): Promise<Payload<StaircodeDocument>> {
    return this.get("/api/staircode", signal);
  }

  betti(signal?: AbortSignal): Promise<Payload<BettiTable>> {
    return this.get("/api/betti", signal);
  }

  barcode(p0: Point, p1: Point, signal?: AbortSignal): Promise<Payload<Barcode>> {
    return this.get(`/api/barcode?l=${encodeURIComponent(lineSpec(p0, p1))}`, signal);
  }

  treegram(p0: Point, p1: Point, signal?: AbortSignal): Promise<Payload<Treegram>> {
    return this.get(`/api/treegram?l=${encodeURIComponent(lineSpec(p0, p1))}`, signal);
  }

  dim(sigma: number, eps: number, signal?: AbortSignal): Promise<Payload<{ dim: number }>> {
    return this.get(`/api/dim?g=${sigma},${eps}`, signal);
  }
}

/** At most one request in flight: issuing a new one aborts the previous, and
 * a response that is no longer the latest resolves to null instead of data.
 */
export class LatestWins {
  private controller: AbortController | null = null;
  private seq = 0;

  async run<T>(task: (signal: AbortSignal) => Promise<T>): Promise<T | null> {
    this.controller?.abort();
    const controller = new AbortController();
    this.controller = controller;
    const ticket = ++this.seq;
    try {
      const out = await task(controller.signal);
      return ticket === this.seq ? out : null;
    } catch (err) {
      if (ticket !== this.seq || controller.signal.aborted) return null;
      throw err;
    }
  }
}
