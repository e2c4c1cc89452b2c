/** SVG scene for a staircode document: one translucent staircase region per
 * point, graded Betti supports as glyphs, and a toggleable grid at the
 * critical values. Everything drawn comes verbatim from the document.
 */
import type { StaircaseEntry, StaircodeDocument } from "./api.js";
import { Scale, el, svgEl, ticks } from "./svg.js";

export type Frame = {
  x: Scale;
  y: Scale;
  width: number;
  height: number;
};

export type ViewOptions = { width?: number; height?: number };

const PAD = { left: 52, right: 16, top: 14, bottom: 40 };

const GLYPH_STYLE = [
  { key: "b0", label: "β0", fill: "#2563eb", mark: "●" },
  { key: "b1", label: "β1", fill: "#d97706", mark: "★" },
  { key: "b2", label: "β2", fill: "#dc2626", mark: "■" },
] as const;

export function hueFor(index: number, count: number): string {
  return `hsl(${Math.round((index * 360) / Math.max(1, count))}, 65%, 45%)`;
}

export function renderEmptyState(container: HTMLElement, message: string): void {
  container.replaceChildren(el("div", "empty-state", message));
}

function starPath(cx: number, cy: number, outer: number, inner: number): string {
  const pts: string[] = [];
  for (let i = 0; i < 10; i++) {
    const r = i % 2 === 0 ? outer : inner;
    const a = -Math.PI / 2 + (i * Math.PI) / 5;
    pts.push(`${cx + r * Math.cos(a)},${cy + r * Math.sin(a)}`);
  }
  return `M ${pts.join(" L ")} Z`;
}

function bounds(doc: StaircodeDocument): { sMin: number; sMax: number; eMax: number } {
  let sMin = Infinity;
  let sMax = -Infinity;
  let eMax = 0;
  for (const sc of doc.staircases) {
    sMin = Math.min(sMin, sc.birth_sigma);
    for (const st of sc.steps) {
      sMax = Math.max(sMax, st.sigma);
      if (st.u !== "inf") eMax = Math.max(eMax, st.u);
    }
  }
  for (const key of ["b0", "b1", "b2"] as const) {
    for (const [s, e] of doc.betti[key]) {
      sMin = Math.min(sMin, s);
      sMax = Math.max(sMax, s);
      eMax = Math.max(eMax, e);
    }
  }
  if (!Number.isFinite(sMin)) sMin = 0;
  if (!Number.isFinite(sMax) || sMax <= sMin) sMax = sMin + 1;
  if (eMax <= 0) eMax = 1;
  return { sMin, sMax, eMax };
}

/** Outline of {(σ,ε): σ ≥ birth, 0 ≤ ε < u(σ)} clipped to the view domain. */
export function staircasePath(sc: StaircaseEntry, frame: Frame): string {
  const X = (v: number) => frame.x.px(v);
  const Y = (v: number) => frame.y.px(v);
  const top = frame.y.d1;
  const right = frame.x.d1;
  const first = sc.steps[0];
  let prev = first.u === "inf" ? top : first.u;
  let d = `M ${X(sc.birth_sigma)} ${Y(0)} L ${X(sc.birth_sigma)} ${Y(prev)}`;
  for (const st of sc.steps.slice(1)) {
    const u = st.u === "inf" ? top : st.u;
    d += ` L ${X(st.sigma)} ${Y(prev)} L ${X(st.sigma)} ${Y(u)}`;
    prev = u;
  }
  return d + ` L ${X(right)} ${Y(prev)} L ${X(right)} ${Y(0)} Z`;
}

function conquerorText(sc: StaircaseEntry, sigma: number): string {
  let active = sc.conqueror[0];
  for (const run of sc.conqueror) {
    if (run.sigma_from <= sigma) active = run;
  }
  const runs = sc.conqueror.map((r) => `${r.id} (σ ≥ ${r.sigma_from})`).join(", ");
  return active ? `conqueror ${active.id} — runs: ${runs}` : "no conqueror";
}

export class StaircodeView {
  readonly doc: StaircodeDocument;
  readonly frame: Frame;
  readonly svg: SVGSVGElement;
  /** Group the line tool draws into, above staircases and glyphs. */
  readonly overlay: SVGGElement;
  private readonly tooltip: HTMLDivElement;
  private readonly hues = new Map<string, string>();

  constructor(container: HTMLElement, doc: StaircodeDocument, opts: ViewOptions = {}) {
    this.doc = doc;
    const width = opts.width ?? 760;
    const height = opts.height ?? 480;
    const { sMin, sMax, eMax } = bounds(doc);
    const sSpan = sMax - sMin;
    this.frame = {
      x: new Scale(sMin - 0.12 * sSpan, sMax + 0.3 * sSpan, PAD.left, width - PAD.right),
      y: new Scale(-0.05 * eMax, 1.32 * eMax, height - PAD.bottom, PAD.top),
      width,
      height,
    };

    const root = el("div", "staircode-view");
    this.svg = svgEl("svg", {
      class: "scene",
      width,
      height,
      viewBox: `0 0 ${width} ${height}`,
    });
    this.tooltip = el("div", "tooltip");
    this.tooltip.hidden = true;

    doc.order.forEach((id, i) => this.hues.set(id, hueFor(i, doc.order.length)));

    const grid = this.buildRankGrid();
    grid.setAttribute("display", "none");
    this.svg.append(this.buildAxes(), grid, this.buildStaircases(), this.buildGlyphs());
    this.overlay = svgEl("g", { class: "overlay" });
    this.svg.append(this.overlay);

    root.append(this.buildToolbar(grid), this.svg, this.tooltip);
    container.replaceChildren(root);
  }

  hueOf(id: string): string {
    return this.hues.get(id) ?? "#555";
  }

  /** Pixel position of a mouse event relative to the svg origin. */
  localPoint(ev: MouseEvent): { x: number; y: number } {
    const rect = this.svg.getBoundingClientRect();
    return { x: ev.clientX - rect.left, y: ev.clientY - rect.top };
  }

  showTooltip(text: string, ev: MouseEvent): void {
    const at = this.localPoint(ev);
    this.tooltip.textContent = text;
    this.tooltip.style.left = `${at.x + 14}px`;
    this.tooltip.style.top = `${at.y + 14}px`;
    this.tooltip.hidden = false;
  }

  hideTooltip(): void {
    this.tooltip.hidden = true;
  }

  private buildToolbar(grid: SVGGElement): HTMLDivElement {
    const bar = el("div", "view-bar");
    const label = el("label", "grid-toggle");
    const box = el("input");
    box.type = "checkbox";
    box.className = "rank-grid-toggle";
    box.addEventListener("change", () => {
      grid.setAttribute("display", box.checked ? "inline" : "none");
    });
    label.append(box, document.createTextNode(" rank grid"));
    const legend = el("span", "legend");
    for (const g of GLYPH_STYLE) {
      const item = el("span", `legend-item legend-${g.key}`);
      item.textContent = `${g.mark} ${g.label} ×${this.doc.betti[g.key].length}`;
      item.style.color = g.fill;
      legend.append(item);
    }
    bar.append(label, legend);
    return bar;
  }

  private buildAxes(): SVGGElement {
    const { x, y, width, height } = this.frame;
    const g = svgEl("g", { class: "axes" });
    const x0 = PAD.left;
    const y0 = height - PAD.bottom;
    g.append(
      svgEl("line", { class: "axis", x1: x0, y1: y0, x2: width - PAD.right, y2: y0 }),
      svgEl("line", { class: "axis", x1: x0, y1: y0, x2: x0, y2: PAD.top }),
    );
    for (const v of ticks(x.d0, x.d1)) {
      const t = svgEl("text", { class: "tick", x: x.px(v), y: y0 + 16, "text-anchor": "middle" });
      t.textContent = String(v);
      g.append(t, svgEl("line", { class: "axis", x1: x.px(v), y1: y0, x2: x.px(v), y2: y0 + 4 }));
    }
    for (const v of ticks(y.d0, y.d1)) {
      if (v < 0) continue;
      const t = svgEl("text", { class: "tick", x: x0 - 7, y: y.px(v) + 4, "text-anchor": "end" });
      t.textContent = String(v);
      g.append(t, svgEl("line", { class: "axis", x1: x0 - 4, y1: y.px(v), x2: x0, y2: y.px(v) }));
    }
    const xs = svgEl("text", { class: "axis-name", x: width - PAD.right, y: y0 + 30, "text-anchor": "end" });
    xs.textContent = "σ";
    const ys = svgEl("text", { class: "axis-name", x: x0 - 36, y: PAD.top + 10 });
    ys.textContent = "ε";
    g.append(xs, ys);
    return g;
  }

  /** Gridlines at every critical value named by the document: birth and step
   * sigmas plus Betti sigmas on one axis, step heights and Betti epsilons on
   * the other. These are the real grades behind the rank grid.
   */
  private buildRankGrid(): SVGGElement {
    const { x, y, width, height } = this.frame;
    const g = svgEl("g", { class: "rank-grid" });
    const sigmas = new Set<number>();
    const epsilons = new Set<number>([0]);
    for (const sc of this.doc.staircases) {
      sigmas.add(sc.birth_sigma);
      for (const st of sc.steps) {
        sigmas.add(st.sigma);
        if (st.u !== "inf") epsilons.add(st.u);
      }
    }
    for (const key of ["b0", "b1", "b2"] as const) {
      for (const [s, e] of this.doc.betti[key]) {
        sigmas.add(s);
        epsilons.add(e);
      }
    }
    for (const v of sigmas) {
      g.append(
        svgEl("line", {
          class: "grid-line",
          x1: x.px(v),
          y1: height - PAD.bottom,
          x2: x.px(v),
          y2: PAD.top,
        }),
      );
    }
    for (const v of epsilons) {
      g.append(
        svgEl("line", {
          class: "grid-line",
          x1: PAD.left,
          y1: y.px(v),
          x2: width - PAD.right,
          y2: y.px(v),
        }),
      );
    }
    return g;
  }

  private buildStaircases(): SVGGElement {
    const g = svgEl("g", { class: "staircases" });
    for (const sc of this.doc.staircases) {
      const hue = this.hueOf(sc.id);
      const path = svgEl("path", {
        class: "staircase",
        d: staircasePath(sc, this.frame),
        fill: hue,
        stroke: hue,
        "fill-opacity": 0.3,
        "data-id": sc.id,
      });
      path.addEventListener("mousemove", (ev) => {
        const sigma = this.frame.x.value(this.localPoint(ev).x);
        this.showTooltip(`${sc.id} · ${conquerorText(sc, sigma)}`, ev);
      });
      path.addEventListener("mouseleave", () => this.hideTooltip());
      g.append(path);
    }
    return g;
  }

  private buildGlyphs(): SVGGElement {
    const g = svgEl("g", { class: "glyphs" });
    const seen = new Map<string, number>();
    for (const style of GLYPH_STYLE) {
      for (const [s, e] of this.doc.betti[style.key]) {
        const stack = seen.get(`${s}:${e}`) ?? 0;
        seen.set(`${s}:${e}`, stack + 1);
        const cx = this.frame.x.px(s) + stack * 5;
        const cy = this.frame.y.px(e);
        let shape: SVGElement;
        if (style.key === "b0") {
          shape = svgEl("circle", { cx, cy, r: 5.5 });
        } else if (style.key === "b1") {
          shape = svgEl("path", { d: starPath(cx, cy, 8, 3.4) });
        } else {
          shape = svgEl("rect", { x: cx - 5, y: cy - 5, width: 10, height: 10 });
        }
        shape.setAttribute("class", `glyph glyph-${style.key}`);
        shape.setAttribute("fill", style.fill);
        shape.addEventListener("mousemove", (ev: Event) => {
          this.showTooltip(`${style.label} at (${s}, ${e})`, ev as MouseEvent);
        });
        shape.addEventListener("mouseleave", () => this.hideTooltip());
        g.append(shape);
      }
    }
    return g;
  }
}
