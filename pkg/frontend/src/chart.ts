import { bundleYears } from "./data.js";
import type { ViewState } from "./state.js";
import type { Bundle, Keyframe, Slice } from "./types.js";

// Layered percentile chart: one slice per state at its benchmark x, slice
// width proportional to thickness, one block per bucket with height the
// bucket's dollar value. Buckets step back-and-up in depth order so the
// high-percentile wall stands behind the low ones, drawn back to front.

export const CHART = {
  width: 960,
  height: 540,
  marginLeft: 70,
  marginRight: 40,
  marginTop: 30,
  marginBottom: 40,
  depthDx: 6,
  depthDy: 6,
  thicknessUnit: 9, // px of slice width per unit of thickness
};

const SVG_NS = "http://www.w3.org/2000/svg";

export interface BlockGeometry {
  state: string;
  year: number;
  k: number;
  x: number;
  y: number;
  width: number;
  height: number;
  carried: boolean;
}

interface Scales {
  x: (benchmark: number) => number;
  xRank: (rank: number, count: number) => number;
  y: (dollars: number) => number;
  baseline: number;
  maxDepth: number;
}

/** Scales span the whole bundle (not one year) so playback does not rescale. */
export function computeScales(bundle: Bundle): Scales {
  let minBench = Infinity;
  let maxBench = -Infinity;
  let maxHeight = 0;
  let maxThickness = 1;
  let maxDepth = 0;
  for (const frame of Object.values(bundle.years)) {
    for (const s of frame.slices) {
      minBench = Math.min(minBench, s.benchmark);
      maxBench = Math.max(maxBench, s.benchmark);
      maxThickness = Math.max(maxThickness, s.thickness);
      maxDepth = Math.max(maxDepth, s.buckets.length);
      for (const b of s.buckets) {
        if (b.height !== null) maxHeight = Math.max(maxHeight, b.height);
      }
    }
  }
  const reserved =
    maxThickness * CHART.thicknessUnit + maxDepth * CHART.depthDx;
  const x0 = CHART.marginLeft;
  const x1 = CHART.width - CHART.marginRight - reserved;
  const benchSpan = maxBench - minBench || 1;
  const baseline = CHART.height - CHART.marginBottom;
  const yTop = CHART.marginTop + maxDepth * CHART.depthDy;
  const ySpan = maxHeight || 1;
  return {
    x: (bench) => x0 + ((bench - minBench) / benchSpan) * (x1 - x0),
    xRank: (rank, count) => x0 + ((rank - 1) / Math.max(count - 1, 1)) * (x1 - x0),
    y: (dollars) => baseline - (Math.max(dollars, 0) / ySpan) * (baseline - yTop),
    baseline,
    maxDepth,
  };
}

/** Stable color per state code. */
export function stateColor(code: string): string {
  let h = 0;
  for (let i = 0; i < code.length; i++) h = (h * 131 + code.charCodeAt(i)) % 360;
  return `hsl(${h}, 62%, 52%)`;
}

function blockGeometry(s: Slice, year: number, scales: Scales, mode: string, count: number): BlockGeometry[] {
  const sliceX = mode === "ranking" ? scales.xRank(s.rank, count) : scales.x(s.benchmark);
  const width = s.thickness * CHART.thicknessUnit;
  const out: BlockGeometry[] = [];
  s.buckets.forEach((b, i) => {
    if (b.height === null) return; // missing: flagged upstream, never invented
    const top = scales.y(b.height) - i * CHART.depthDy;
    out.push({
      state: s.state,
      year,
      k: b.k,
      x: sliceX + i * CHART.depthDx,
      y: top,
      width,
      height: Math.max(scales.baseline - i * CHART.depthDy - top, 0),
      carried: b.carried,
    });
  });
  return out;
}

function makeRect(doc: Document, geom: BlockGeometry, fill: string, opacity: number, se?: number, seScale?: (d: number) => number): SVGRectElement {
  const rect = doc.createElementNS(SVG_NS, "rect") as SVGRectElement;
  rect.setAttribute("x", geom.x.toFixed(2));
  rect.setAttribute("y", geom.y.toFixed(2));
  rect.setAttribute("width", geom.width.toFixed(2));
  rect.setAttribute("height", geom.height.toFixed(2));
  rect.setAttribute("fill", fill);
  rect.setAttribute("opacity", String(opacity));
  rect.setAttribute("class", "block");
  rect.dataset.state = geom.state;
  rect.dataset.year = String(geom.year);
  rect.dataset.k = String(geom.k);
  if (geom.carried) rect.dataset.carried = "1";
  return rect;
}

/** Render one keyframe into the container. Idempotent per ViewState; on a
 * schema mismatch an error banner is shown and nothing partial renders. */
export function renderChart(container: HTMLElement, bundle: Bundle, view: ViewState): void {
  const doc = container.ownerDocument;
  container.textContent = "";

  const major = parseInt(String(bundle.schema_version).split(".")[0] ?? "", 10);
  if (bundle.kind !== "keyframe-bundle" || major !== 1) {
    const banner = doc.createElement("div");
    banner.className = "error-banner";
    banner.textContent = `Cannot render: unsupported bundle schema ${bundle.schema_version}`;
    container.appendChild(banner);
    return;
  }
  const frame: Keyframe | undefined = bundle.years[String(view.year)];
  if (!frame) {
    const banner = doc.createElement("div");
    banner.className = "error-banner";
    banner.textContent = `No keyframe for year ${view.year}`;
    container.appendChild(banner);
    return;
  }

  const scales = computeScales(bundle);
  const svg = doc.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${CHART.width} ${CHART.height}`);
  svg.setAttribute("width", String(CHART.width));
  svg.setAttribute("height", String(CHART.height));
  svg.setAttribute("role", "img");

  // baseline axis
  const axis = doc.createElementNS(SVG_NS, "line");
  axis.setAttribute("x1", String(CHART.marginLeft));
  axis.setAttribute("x2", String(CHART.width - CHART.marginRight));
  axis.setAttribute("y1", String(scales.baseline));
  axis.setAttribute("y2", String(scales.baseline));
  axis.setAttribute("class", "axis");
  axis.setAttribute("stroke", "#555");
  svg.appendChild(axis);

  const highlighting = view.highlights.length > 0;
  const count = frame.slices.length;

  // depth order: slices drawn back (largest benchmark) to front
  const ordered = [...frame.slices].sort((a, b) =>
    view.benchmarkMode === "ranking" ? b.rank - a.rank : b.benchmark - a.benchmark
  );
  for (const s of ordered) {
    const fill = stateColor(s.state);
    const highlighted = !highlighting || view.highlights.includes(s.state);
    const group = doc.createElementNS(SVG_NS, "g");
    group.setAttribute("class", "slice");
    group.dataset.state = s.state;
    const blocks = blockGeometry(s, frame.year, scales, view.benchmarkMode, count);
    // back-to-front within the slice as well
    for (let i = blocks.length - 1; i >= 0; i--) {
      const geom = blocks[i];
      let opacity = highlighted ? 1.0 : 0.18;
      if (geom.carried) opacity *= 0.35;
      const rect = makeRect(doc, geom, fill, opacity);
      group.appendChild(rect);
      const bucket = s.buckets.find((b) => b.k === geom.k);
      if (bucket?.se !== undefined && bucket.height !== null) {
        const whisker = doc.createElementNS(SVG_NS, "line");
        const cx = geom.x + geom.width / 2;
        const yCenter = geom.y;
        const half = Math.abs(scales.y(bucket.height) - scales.y(bucket.height + bucket.se));
        whisker.setAttribute("x1", cx.toFixed(2));
        whisker.setAttribute("x2", cx.toFixed(2));
        whisker.setAttribute("y1", (yCenter - half).toFixed(2));
        whisker.setAttribute("y2", (yCenter + half).toFixed(2));
        whisker.setAttribute("class", "se-whisker");
        whisker.setAttribute("stroke", "#222");
        whisker.setAttribute("opacity", String(highlighted ? 0.8 : 0.15));
        group.appendChild(whisker);
      }
    }
    svg.appendChild(group);
  }

  // year label
  const label = doc.createElementNS(SVG_NS, "text");
  label.setAttribute("x", String(CHART.width - CHART.marginRight));
  label.setAttribute("y", String(CHART.marginTop));
  label.setAttribute("text-anchor", "end");
  label.setAttribute("class", "year-label");
  label.textContent = String(frame.year) + (frame.rpp_backcast ? " (backcast prices)" : "");
  svg.appendChild(label);

  container.appendChild(svg);
}

/** All rendered block geometries for a year; the snapshot tests diff this. */
export function chartGeometry(bundle: Bundle, view: ViewState): BlockGeometry[] {
  const frame = bundle.years[String(view.year)];
  if (!frame) return [];
  const scales = computeScales(bundle);
  const out: BlockGeometry[] = [];
  for (const s of frame.slices) {
    out.push(...blockGeometry(s, frame.year, scales, view.benchmarkMode, frame.slices.length));
  }
  return out;
}

export { bundleYears };
