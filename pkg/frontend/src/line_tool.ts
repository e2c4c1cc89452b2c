/** Interactive positive-slope line over the staircase scene.
 *
 * Dragging the middle handle translates the line, dragging an endpoint
 * rotates/stretches it; every shape change is debounced and then asks the
 * server for the fibered barcode and treegram along the line. Bars are drawn
 * both on the line itself and in a flat panel; the panels always hold the
 * exact bytes of the response they render.
 */
import { ApiError, Client, LatestWins, lineSpec } from "./api.js";
import type { Bar, Barcode, Payload, Point, Treegram } from "./api.js";
import type { StaircodeView } from "./staircode_view.js";
import { el, svgEl } from "./svg.js";
import { showToast } from "./toast.js";

export type LineToolOptions = {
  barcodePanel: HTMLElement;
  treegramPanel: HTMLElement;
  toastHost: HTMLElement;
  debounceMs?: number;
};

/** Order by sigma and push the far point up/right until the slope is a
 * strictly positive finite number; `delta` is the minimum separation.
 */
export function clampPositiveSlope(p0: Point, p1: Point, delta: number): [Point, Point] {
  const [a, b] = p0.sigma <= p1.sigma ? [{ ...p0 }, { ...p1 }] : [{ ...p1 }, { ...p0 }];
  if (!(b.sigma - a.sigma >= delta)) b.sigma = a.sigma + delta;
  if (!(b.eps - a.eps >= delta)) b.eps = a.eps + delta;
  return [a, b];
}

const ROW_H = 22;

export class LineTool {
  p0: Point;
  p1: Point;
  lastBarcode: Payload<Barcode> | null = null;
  lastTreegram: Payload<Treegram> | null = null;

  private readonly view: StaircodeView;
  private readonly client: Client;
  private readonly barcodePanel: HTMLElement;
  private readonly treegramPanel: HTMLElement;
  private readonly toastHost: HTMLElement;
  private readonly debounceMs: number;
  private readonly delta: number;
  private readonly barcodeGate = new LatestWins();
  private readonly treegramGate = new LatestWins();
  private readonly lineLayer: SVGGElement;
  private readonly barLayer: SVGGElement;
  private timer: ReturnType<typeof setTimeout> | undefined;

  constructor(view: StaircodeView, client: Client, opts: LineToolOptions) {
    this.view = view;
    this.client = client;
    this.barcodePanel = opts.barcodePanel;
    this.treegramPanel = opts.treegramPanel;
    this.toastHost = opts.toastHost;
    this.debounceMs = opts.debounceMs ?? 50;
    const { x, y } = view.frame;
    this.delta = (x.d1 - x.d0) * 1e-3;
    this.barLayer = svgEl("g", { class: "line-bars" });
    this.lineLayer = svgEl("g", { class: "line-tool" });
    view.overlay.append(this.barLayer, this.lineLayer);

    const xc = (x.d0 + x.d1) / 2;
    const yc = (y.d0 + y.d1) / 2;
    const q = Math.min(x.d1 - x.d0, y.d1 - y.d0) / 4;
    [this.p0, this.p1] = clampPositiveSlope(
      { sigma: xc - q, eps: yc - q },
      { sigma: xc + q, eps: yc + q },
      this.delta,
    );
    this.drawLine();
  }

  /** Place the line through two points (clamped), then query after the
   * debounce window.
   */
  setLineThrough(p0: Point, p1: Point): void {
    [this.p0, this.p1] = clampPositiveSlope(p0, p1, this.delta);
    this.drawLine();
    this.schedule();
  }

  /** Run any pending query now and wait for it; for tests and boot. */
  flush(): Promise<void> {
    if (this.timer !== undefined) {
      clearTimeout(this.timer);
      this.timer = undefined;
    }
    return this.refresh();
  }

  private schedule(): void {
    if (this.timer !== undefined) clearTimeout(this.timer);
    this.timer = setTimeout(() => {
      this.timer = undefined;
      void this.refresh();
    }, this.debounceMs);
  }

  private moveEndpoint(which: "p0" | "p1", to: Point): void {
    if (which === "p1") {
      this.p1 = {
        sigma: Math.max(to.sigma, this.p0.sigma + this.delta),
        eps: Math.max(to.eps, this.p0.eps + this.delta),
      };
    } else {
      this.p0 = {
        sigma: Math.min(to.sigma, this.p1.sigma - this.delta),
        eps: Math.min(to.eps, this.p1.eps - this.delta),
      };
    }
    this.drawLine();
    this.schedule();
  }

  private async refresh(): Promise<void> {
    const p0 = { ...this.p0 };
    const p1 = { ...this.p1 };
    await Promise.all([
      this.barcodeGate
        .run((signal) => this.client.barcode(p0, p1, signal))
        .then((payload) => {
          if (payload === null) return;
          this.lastBarcode = payload;
          this.renderBarcodePanel(payload);
          this.drawBarsOnLine(payload.data.bars);
        })
        .catch((err) => this.report(err)),
      this.treegramGate
        .run((signal) => this.client.treegram(p0, p1, signal))
        .then((payload) => {
          if (payload === null) return;
          this.lastTreegram = payload;
          this.renderTreegramPanel(payload);
        })
        .catch((err) => this.report(err)),
    ]);
  }

  private report(err: unknown): void {
    const message = err instanceof ApiError ? err.message : String(err);
    showToast(this.toastHost, message);
  }

  // ---- geometry ----------------------------------------------------------

  /** Arc-length position along the line, measured from the lower anchor. */
  private pointAt(t: number): Point {
    const ds = this.p1.sigma - this.p0.sigma;
    const de = this.p1.eps - this.p0.eps;
    const norm = Math.hypot(ds, de);
    return { sigma: this.p0.sigma + (ds / norm) * t, eps: this.p0.eps + (de / norm) * t };
  }

  /** The [tEnter, tExit] range where the line crosses the view domain. */
  private visibleRange(): [number, number] {
    const { x, y } = this.view.frame;
    const ds = this.p1.sigma - this.p0.sigma;
    const de = this.p1.eps - this.p0.eps;
    const norm = Math.hypot(ds, de);
    const tEnter = Math.max(((x.d0 - this.p0.sigma) * norm) / ds, ((y.d0 - this.p0.eps) * norm) / de);
    const tExit = Math.min(((x.d1 - this.p0.sigma) * norm) / ds, ((y.d1 - this.p0.eps) * norm) / de);
    return [tEnter, tExit];
  }

  private px(p: Point): { x: number; y: number } {
    return { x: this.view.frame.x.px(p.sigma), y: this.view.frame.y.px(p.eps) };
  }

  private drawLine(): void {
    this.lineLayer.replaceChildren();
    const [tEnter, tExit] = this.visibleRange();
    const a = this.px(this.pointAt(tEnter));
    const b = this.px(this.pointAt(tExit));
    this.lineLayer.append(
      svgEl("line", { class: "query-line", x1: a.x, y1: a.y, x2: b.x, y2: b.y }),
    );
    const mid = { sigma: (this.p0.sigma + this.p1.sigma) / 2, eps: (this.p0.eps + this.p1.eps) / 2 };
    for (const [which, p] of [
      ["p0", this.p0],
      ["p1", this.p1],
      ["mid", mid],
    ] as const) {
      const at = this.px(p);
      const handle = svgEl("circle", {
        class: `handle handle-${which}`,
        cx: at.x,
        cy: at.y,
        r: which === "mid" ? 6 : 7,
      });
      this.attachDrag(handle, which);
      this.lineLayer.append(handle);
    }
  }

  private attachDrag(handle: SVGElement, which: "p0" | "p1" | "mid"): void {
    handle.addEventListener("mousedown", (ev) => {
      ev.preventDefault();
      const down = ev as MouseEvent;
      const start = this.view.localPoint(down);
      const s0 = { ...this.p0 };
      const s1 = { ...this.p1 };
      const { x, y } = this.view.frame;
      const move = (mv: Event) => {
        const at = this.view.localPoint(mv as MouseEvent);
        const dSigma = x.value(at.x) - x.value(start.x);
        const dEps = y.value(at.y) - y.value(start.y);
        if (which === "mid") {
          this.setLineThrough(
            { sigma: s0.sigma + dSigma, eps: s0.eps + dEps },
            { sigma: s1.sigma + dSigma, eps: s1.eps + dEps },
          );
        } else if (which === "p1") {
          this.moveEndpoint("p1", { sigma: s1.sigma + dSigma, eps: s1.eps + dEps });
        } else {
          this.moveEndpoint("p0", { sigma: s0.sigma + dSigma, eps: s0.eps + dEps });
        }
      };
      const up = () => {
        window.removeEventListener("mousemove", move);
        window.removeEventListener("mouseup", up);
      };
      window.addEventListener("mousemove", move);
      window.addEventListener("mouseup", up);
    });
  }

  // ---- rendering ---------------------------------------------------------

  private drawBarsOnLine(bars: Bar[]): void {
    this.barLayer.replaceChildren();
    const [, tExit] = this.visibleRange();
    const a = this.px(this.p0);
    const b = this.px(this.p1);
    const norm = Math.hypot(b.x - a.x, b.y - a.y);
    const perp = { x: -(b.y - a.y) / norm, y: (b.x - a.x) / norm };
    bars.forEach((bar, i) => {
      const lift = (i + 1) * 7;
      const start = this.px(this.pointAt(bar.birth_t));
      const endT = bar.death_t === "inf" ? tExit : Math.min(bar.death_t, tExit);
      const end = this.px(this.pointAt(endT));
      this.barLayer.append(
        svgEl("line", {
          class: `line-bar${bar.death_t === "inf" ? " inf" : ""}`,
          "data-owner": bar.owner,
          x1: start.x + perp.x * lift,
          y1: start.y + perp.y * lift,
          x2: end.x + perp.x * lift,
          y2: end.y + perp.y * lift,
          stroke: this.view.hueOf(bar.owner),
        }),
      );
    });
  }

  private stamp(panel: HTMLElement, payload: Payload<unknown>): void {
    panel.dataset.url = payload.url;
    panel.dataset.raw = payload.raw;
  }

  private renderBarcodePanel(payload: Payload<Barcode>): void {
    this.stamp(this.barcodePanel, payload);
    const bars = payload.data.bars;
    if (bars.length === 0) {
      this.barcodePanel.replaceChildren(el("div", "panel-empty", "no bars on this line"));
      return;
    }
    const tMax = Math.max(...bars.map((b) => (b.death_t === "inf" ? b.birth_t : b.death_t)));
    const width = 360;
    const right = width - 16;
    const scale = (t: number) => 90 + (t / (tMax || 1)) * (right - 90);
    const plot = svgEl("svg", {
      class: "barcode-plot",
      width,
      height: bars.length * ROW_H + 8,
    });
    bars.forEach((bar, i) => {
      const yMid = (i + 0.5) * ROW_H + 4;
      const label = svgEl("text", { class: "bar-label", x: 4, y: yMid + 4 });
      label.textContent = bar.owner;
      const x2 = bar.death_t === "inf" ? right : scale(bar.death_t);
      const row = svgEl("line", {
        class: `bar-row${bar.death_t === "inf" ? " inf" : ""}`,
        "data-owner": bar.owner,
        x1: scale(bar.birth_t),
        y1: yMid,
        x2,
        y2: yMid,
        stroke: this.view.hueOf(bar.owner),
      });
      plot.append(label, row);
      if (bar.death_t === "inf") {
        const infMark = svgEl("text", { class: "inf-mark", x: right + 2, y: yMid + 4 });
        infMark.textContent = "∞";
        plot.append(infMark);
      }
    });
    this.barcodePanel.replaceChildren(plot);
  }

  private renderTreegramPanel(payload: Payload<Treegram>): void {
    this.stamp(this.treegramPanel, payload);
    const { leaves, births, merges } = payload.data;
    if (leaves.length === 0) {
      this.treegramPanel.replaceChildren(el("div", "panel-empty", "no blocks on this line"));
      return;
    }
    const list = el("ul", "treegram-rows");
    leaves.forEach((id, i) => {
      list.append(el("li", "leaf-row", `${id} born at t = ${births[i]}`));
    });
    for (const m of merges) {
      list.append(el("li", "merge-row", `${m.left} joins ${m.right} at t = ${m.height}`));
    }
    this.treegramPanel.replaceChildren(list);
  }
}
