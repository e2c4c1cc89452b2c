import { afterAll, afterEach, beforeAll, describe, expect, test, vi } from "vitest";

import { Client, type StaircodeDocument } from "../src/api.js";
import { LineTool, clampPositiveSlope } from "../src/line_tool.js";
import { boot, type App } from "../src/main.js";
import { StaircodeView } from "../src/staircode_view.js";
import { startServer, type LiveServer } from "./live_server.js";

function slopeOfLineParam(url: string): number {
  const l = new URLSearchParams(url.split("?")[1]).get("l")!;
  const [a, b] = l.split(":");
  const [s0, e0] = a.split(",").map(Number);
  const [s1, e1] = b.split(",").map(Number);
  return (e1 - e0) / (s1 - s0);
}

describe("clampPositiveSlope", () => {
  test("orders by sigma and leaves valid lines alone", () => {
    const [a, b] = clampPositiveSlope({ sigma: 3, eps: 2 }, { sigma: 1, eps: 1 }, 1e-3);
    expect([a.sigma, a.eps, b.sigma, b.eps]).toEqual([1, 1, 3, 2]);
  });

  test("lifts flat, vertical, and inverted lines to a positive slope", () => {
    for (const [p0, p1] of [
      [{ sigma: 0, eps: 1 }, { sigma: 2, eps: 1 }], // horizontal
      [{ sigma: 1, eps: 0 }, { sigma: 1, eps: 3 }], // vertical
      [{ sigma: 0, eps: 2 }, { sigma: 2, eps: 0 }], // negative
    ] as const) {
      const [a, b] = clampPositiveSlope({ ...p0 }, { ...p1 }, 0.01);
      // adding delta to a coordinate can round the difference a few ulp short
      expect(b.sigma - a.sigma).toBeGreaterThanOrEqual(0.0099);
      expect(b.eps - a.eps).toBeGreaterThanOrEqual(0.0099);
      expect((b.eps - a.eps) / (b.sigma - a.sigma)).toBeGreaterThan(0);
    }
  });
});

describe("line tool against a live server", () => {
  let srv: LiveServer;
  let host: HTMLElement;
  let app: App;

  beforeAll(async () => {
    srv = await startServer();
    host = document.createElement("div");
    document.body.append(host);
    app = (await boot(host, new Client(srv.base)))!;
    expect(app).not.toBeNull();
  });

  afterAll(() => srv.stop());

  test("boot draws the scene, the line, and filled panels", () => {
    expect(host.querySelectorAll(".staircase")).toHaveLength(4);
    expect(host.querySelectorAll(".query-line")).toHaveLength(1);
    expect(host.querySelectorAll(".handle")).toHaveLength(3);
    expect(host.querySelector(".barcode-panel")!.childElementCount).toBeGreaterThan(0);
    expect(host.querySelector(".treegram-panel")!.childElementCount).toBeGreaterThan(0);
  });

  test("the diagonal shows exactly three bars, on the line and flat", async () => {
    app.tool.setLineThrough({ sigma: 0, eps: 0 }, { sigma: 1, eps: 1 });
    await app.tool.flush();

    const rows = [...host.querySelectorAll<SVGLineElement>(".bar-row")];
    expect(rows).toHaveLength(3);
    expect(rows.map((r) => r.getAttribute("data-owner"))).toEqual(["x1", "x2", "x3"]);
    expect(rows[0].classList.contains("inf")).toBe(true);
    expect(host.querySelector(".barcode-panel .inf-mark")).not.toBeNull();

    const onLine = [...host.querySelectorAll<SVGLineElement>(".line-bar")];
    expect(onLine).toHaveLength(3);
    expect(onLine.map((r) => r.getAttribute("data-owner"))).toEqual(["x1", "x2", "x3"]);
  });

  test("treegram panel lists every leaf birth and merge from the response", async () => {
    app.tool.setLineThrough({ sigma: 0, eps: 0 }, { sigma: 1, eps: 1 });
    await app.tool.flush();

    const leaves = [...host.querySelectorAll(".leaf-row")].map((li) => li.textContent!);
    expect(leaves).toHaveLength(4);
    expect(leaves[0]).toContain("x1 born at t = 1.4142135623730951");
    const merges = [...host.querySelectorAll(".merge-row")].map((li) => li.textContent!);
    expect(merges).toHaveLength(3);
    expect(merges[0]).toContain("x2 joins x1");
    expect(merges[0]).toContain("4.242640687119286");
  });

  test("panels hold byte-identical copies of concurrent direct API calls", async () => {
    app.tool.setLineThrough({ sigma: 1.5, eps: 0.5 }, { sigma: 4.5, eps: 3.5 });
    await app.tool.flush();

    const barcodePanel = host.querySelector<HTMLElement>(".barcode-panel")!;
    const treegramPanel = host.querySelector<HTMLElement>(".treegram-panel")!;
    const [directBars, directTree] = await Promise.all([
      fetch(srv.base + barcodePanel.dataset.url).then((r) => r.text()),
      fetch(srv.base + treegramPanel.dataset.url).then((r) => r.text()),
    ]);
    expect(barcodePanel.dataset.raw).toBe(directBars);
    expect(treegramPanel.dataset.raw).toBe(directTree);
    expect(app.tool.lastBarcode!.raw).toBe(directBars);
    expect(app.tool.lastTreegram!.raw).toBe(directTree);
  });

  test("rotating the line keeps panels in lockstep with the server", async () => {
    // sweep the endpoint around a fixed anchor; after every step the panel
    // bytes must be exactly what the server would say right now
    const anchor = { sigma: 0.5, eps: 0.25 };
    const barcodePanel = host.querySelector<HTMLElement>(".barcode-panel")!;
    const treegramPanel = host.querySelector<HTMLElement>(".treegram-panel")!;
    const seen: number[] = [];
    for (const angle of [10, 30, 45, 60, 80]) {
      const rad = (angle * Math.PI) / 180;
      app.tool.setLineThrough(anchor, {
        sigma: anchor.sigma + 3 * Math.cos(rad),
        eps: anchor.eps + 3 * Math.sin(rad),
      });
      await app.tool.flush();
      const [bars, tree] = await Promise.all([
        fetch(srv.base + barcodePanel.dataset.url).then((r) => r.text()),
        fetch(srv.base + treegramPanel.dataset.url).then((r) => r.text()),
      ]);
      expect(barcodePanel.dataset.raw).toBe(bars);
      expect(treegramPanel.dataset.raw).toBe(tree);
      seen.push(app.tool.lastBarcode!.data.bars.length);
    }
    // the sweep crosses staircases, so at least two angles disagree on bars
    expect(new Set(seen).size).toBeGreaterThan(1);
  });

  test("dragging the middle handle translates the whole line", async () => {
    app.tool.setLineThrough({ sigma: 0, eps: 0 }, { sigma: 1, eps: 1 });
    await app.tool.flush();
    const { x, y } = app.view.frame;
    const before = { p0: { ...app.tool.p0 }, p1: { ...app.tool.p1 } };

    const mid = host.querySelector<SVGCircleElement>(".handle-mid")!;
    const startX = Number(mid.getAttribute("cx"));
    const startY = Number(mid.getAttribute("cy"));
    mid.dispatchEvent(new MouseEvent("mousedown", { clientX: startX, clientY: startY, cancelable: true }));
    window.dispatchEvent(new MouseEvent("mousemove", { clientX: startX + 40, clientY: startY }));
    window.dispatchEvent(new MouseEvent("mouseup"));

    const dSigma = x.value(startX + 40) - x.value(startX);
    expect(app.tool.p0.sigma).toBeCloseTo(before.p0.sigma + dSigma, 9);
    expect(app.tool.p1.sigma).toBeCloseTo(before.p1.sigma + dSigma, 9);
    expect(app.tool.p0.eps).toBeCloseTo(before.p0.eps, 9);

    await app.tool.flush();
    expect(slopeOfLineParam(app.tool.lastBarcode!.url)).toBeGreaterThan(0);
    expect(y.value(startY)).toBeCloseTo((app.tool.p0.eps + app.tool.p1.eps) / 2, 9);
  });

  test("endpoint drags cannot push the slope to zero or negative", async () => {
    app.tool.setLineThrough({ sigma: 0, eps: 0 }, { sigma: 1, eps: 1 });
    await app.tool.flush();
    const span = app.view.frame.x.d1 - app.view.frame.x.d0;

    const p1Handle = host.querySelector<SVGCircleElement>(".handle-p1")!;
    const cx = Number(p1Handle.getAttribute("cx"));
    const cy = Number(p1Handle.getAttribute("cy"));
    p1Handle.dispatchEvent(new MouseEvent("mousedown", { clientX: cx, clientY: cy, cancelable: true }));
    // drag far left of and below the anchor: would invert the line if unclamped
    window.dispatchEvent(new MouseEvent("mousemove", { clientX: cx - 900, clientY: cy + 900 }));
    window.dispatchEvent(new MouseEvent("mouseup"));

    expect(app.tool.p1.sigma).toBeGreaterThan(app.tool.p0.sigma);
    expect(app.tool.p1.eps).toBeGreaterThan(app.tool.p0.eps);
    expect(app.tool.p1.sigma - app.tool.p0.sigma).toBeLessThan(0.01 * span);

    await app.tool.flush();
    expect(slopeOfLineParam(app.tool.lastBarcode!.url)).toBeGreaterThan(0);

    // listeners were detached on mouseup: further moves change nothing
    const frozen = { ...app.tool.p1 };
    window.dispatchEvent(new MouseEvent("mousemove", { clientX: cx + 300, clientY: cy }));
    expect(app.tool.p1).toEqual(frozen);
  });
});

// ---- mocked-transport behavior ------------------------------------------

const DOC: StaircodeDocument = {
  order: ["a", "b"],
  staircases: [
    { id: "a", birth_sigma: 0, steps: [{ sigma: 0, u: "inf" }], conqueror: [{ sigma_from: 0, id: "a" }] },
    { id: "b", birth_sigma: 1, steps: [{ sigma: 1, u: 2 }], conqueror: [{ sigma_from: 1, id: "a" }] },
  ],
  betti: { b0: [[0, 0], [1, 0]], b1: [[1, 2]], b2: [] },
  meta: {},
};

function jsonResponse(body: string, status = 200): Response {
  return new Response(body, { status, headers: { "Content-Type": "application/json" } });
}

function mountTool(debounceMs = 50) {
  const host = document.createElement("div");
  document.body.append(host);
  const view = new StaircodeView(host, DOC);
  const barcodePanel = document.createElement("div");
  const treegramPanel = document.createElement("div");
  const toastHost = document.createElement("div");
  host.append(barcodePanel, treegramPanel, toastHost);
  const tool = new LineTool(view, new Client("http://stub"), {
    barcodePanel,
    treegramPanel,
    toastHost,
    debounceMs,
  });
  return { tool, barcodePanel, treegramPanel, toastHost };
}

const EMPTY_BARS = '{"bars":[]}\n';
const EMPTY_TREE = '{"births":[],"leaves":[],"merges":[]}\n';

describe("request discipline (mocked transport)", () => {
  afterEach(() => {
    vi.unstubAllGlobals();
    vi.useRealTimers();
  });

  test("rapid drags collapse into one request pair after 50 ms", async () => {
    vi.useFakeTimers();
    const calls: string[] = [];
    vi.stubGlobal(
      "fetch",
      vi.fn(async (url: string) => {
        calls.push(String(url));
        return jsonResponse(String(url).includes("barcode") ? EMPTY_BARS : EMPTY_TREE);
      }),
    );
    const { tool } = mountTool();

    for (let i = 1; i <= 5; i++) {
      tool.setLineThrough({ sigma: 0, eps: 0 }, { sigma: i, eps: 1 });
      // stay under the debounce window between drags, nothing after the last
      if (i < 5) await vi.advanceTimersByTimeAsync(20);
    }
    expect(calls).toHaveLength(0);

    await vi.advanceTimersByTimeAsync(49);
    expect(calls).toHaveLength(0);
    await vi.advanceTimersByTimeAsync(1);
    expect(calls).toHaveLength(2);
    expect(calls.some((u) => u.includes("/api/barcode?l="))).toBe(true);
    expect(calls.some((u) => u.includes("/api/treegram?l="))).toBe(true);
    // only the final line was queried
    for (const u of calls) expect(decodeURIComponent(u)).toContain("0,0:5,1");
  });

  test("a stale response never overwrites a newer one", async () => {
    const release: Array<() => void> = [];
    const bodies = ['{"bars":[{"birth_grade":null,"birth_t":0.0,"death_grade":null,"death_t":1.0,"owner":"a"}]}\n', EMPTY_BARS];
    let barcodeCall = 0;
    vi.stubGlobal(
      "fetch",
      vi.fn((url: string) => {
        if (String(url).includes("treegram")) return Promise.resolve(jsonResponse(EMPTY_TREE));
        const body = bodies[barcodeCall++];
        return new Promise<Response>((resolve) => {
          release.push(() => resolve(jsonResponse(body)));
        });
      }),
    );
    const { tool, barcodePanel } = mountTool();

    const first = tool.flush();
    tool.setLineThrough({ sigma: 0, eps: 0 }, { sigma: 2, eps: 2 });
    const second = tool.flush();
    // resolve out of order: newest first, stale afterwards
    release[1]();
    await second;
    release[0]();
    await first;

    expect(barcodePanel.dataset.raw).toBe(EMPTY_BARS);
    expect(tool.lastBarcode!.raw).toBe(EMPTY_BARS);
  });

  test("an empty barcode empties the panel", async () => {
    vi.stubGlobal(
      "fetch",
      vi.fn(async (url: string) =>
        jsonResponse(String(url).includes("barcode") ? EMPTY_BARS : EMPTY_TREE),
      ),
    );
    const { tool, barcodePanel, treegramPanel } = mountTool();
    await tool.flush();

    expect(barcodePanel.querySelectorAll(".bar-row")).toHaveLength(0);
    expect(barcodePanel.querySelector(".panel-empty")!.textContent).toMatch(/no bars/);
    expect(treegramPanel.querySelector(".panel-empty")).not.toBeNull();
  });

  test("a 400 becomes a toast and the previous panel content survives", async () => {
    let fail = false;
    vi.stubGlobal(
      "fetch",
      vi.fn(async (url: string) => {
        if (fail) return jsonResponse('{"error":"line must look like \'sigma1,eps1:sigma2,eps2\'"}\n', 400);
        return jsonResponse(String(url).includes("barcode") ? EMPTY_BARS : EMPTY_TREE);
      }),
    );
    const { tool, barcodePanel, toastHost } = mountTool();
    await tool.flush();
    const kept = barcodePanel.dataset.raw;

    fail = true;
    tool.setLineThrough({ sigma: 0, eps: 0 }, { sigma: 3, eps: 1 });
    await tool.flush();

    const toasts = [...toastHost.querySelectorAll(".toast")];
    expect(toasts.length).toBeGreaterThan(0);
    expect(toasts[0].textContent).toContain("line must look like");
    expect(barcodePanel.dataset.raw).toBe(kept);
  });

  test("no manipulation sequence can issue a request with slope <= 0", async () => {
    const calls: string[] = [];
    vi.stubGlobal(
      "fetch",
      vi.fn(async (url: string) => {
        calls.push(decodeURIComponent(String(url)));
        return jsonResponse(String(url).includes("barcode") ? EMPTY_BARS : EMPTY_TREE);
      }),
    );
    const { tool } = mountTool();

    tool.setLineThrough({ sigma: 2, eps: 0 }, { sigma: 0, eps: 2 }); // negative
    await tool.flush();
    tool.setLineThrough({ sigma: 1, eps: 1 }, { sigma: 1, eps: 4 }); // vertical
    await tool.flush();
    tool.setLineThrough({ sigma: 0, eps: 2 }, { sigma: 5, eps: 2 }); // horizontal
    await tool.flush();

    expect(calls.length).toBeGreaterThanOrEqual(6);
    for (const u of calls) {
      expect(slopeOfLineParam(u)).toBeGreaterThan(0);
    }
  });
});
