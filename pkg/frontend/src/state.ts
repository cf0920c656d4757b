import type { BenchmarkMode, Manifest } from "./types.js";

export interface ViewState {
  year: number;
  variant: string;
  filter: string;
  highlights: string[]; // state codes; empty = highlight nothing special
  benchmarkMode: BenchmarkMode;
  speed: number; // playback speed multiplier
}

export const DEFAULT_VIEW: ViewState = {
  year: 1976,
  variant: "RHH",
  filter: "all",
  highlights: [],
  benchmarkMode: "position",
  speed: 1,
};

/** Clamp a view into what the manifest and bundle actually offer. */
export function sanitizeView(view: ViewState, manifest: Manifest, years: number[]): ViewState {
  const pairs = new Set(manifest.bundles.map((b) => `${b.variant}/${b.filter}`));
  let { variant, filter } = view;
  if (!pairs.has(`${variant}/${filter}`)) {
    const first = manifest.bundles[0];
    variant = first.variant;
    filter = first.filter;
  }
  const lo = years[0];
  const hi = years[years.length - 1];
  const year = Math.min(Math.max(view.year, lo), hi);
  const speed = [0.5, 1, 2, 4].includes(view.speed) ? view.speed : 1;
  const benchmarkMode: BenchmarkMode =
    view.benchmarkMode === "ranking" ? "ranking" : "position";
  return { ...view, variant, filter, year, speed, benchmarkMode };
}

/** URL-hash codec so views are shareable links. */
export function encodeHash(view: ViewState): string {
  const params = new URLSearchParams();
  params.set("year", String(view.year));
  params.set("variant", view.variant);
  params.set("filter", view.filter);
  if (view.highlights.length) params.set("hl", view.highlights.join(","));
  params.set("mode", view.benchmarkMode);
  if (view.speed !== 1) params.set("speed", String(view.speed));
  return "#" + params.toString();
}

export function decodeHash(hash: string): ViewState {
  const params = new URLSearchParams(hash.replace(/^#/, ""));
  const view = { ...DEFAULT_VIEW };
  const year = parseInt(params.get("year") ?? "", 10);
  if (Number.isFinite(year)) view.year = year;
  view.variant = params.get("variant") ?? view.variant;
  view.filter = params.get("filter") ?? view.filter;
  const hl = params.get("hl");
  view.highlights = hl ? hl.split(",").filter(Boolean) : [];
  view.benchmarkMode = params.get("mode") === "ranking" ? "ranking" : "position";
  const speed = parseFloat(params.get("speed") ?? "1");
  view.speed = Number.isFinite(speed) ? speed : 1;
  return view;
}
