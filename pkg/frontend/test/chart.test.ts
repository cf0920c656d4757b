import { readFileSync } from "node:fs";
import { join } from "node:path";
import { beforeEach, describe, expect, it } from "vitest";

import { chartGeometry, renderChart } from "../src/chart.js";
import { DEFAULT_VIEW, ViewState } from "../src/state.js";
import type { Bundle } from "../src/types.js";
import { GOLDEN_DIR, goldenBundle, miniBundle } from "./helpers.js";

const PIXEL_TOLERANCE = 0.5;

function view(overrides: Partial<ViewState> = {}): ViewState {
  return { ...DEFAULT_VIEW, ...overrides };
}

function render(bundle: Bundle, v: ViewState): HTMLElement {
  const host = document.createElement("div");
  document.body.appendChild(host);
  renderChart(host, bundle, v);
  return host;
}

describe("chart rendering", () => {
  beforeEach(() => {
    document.body.innerHTML = "";
  });

  it("matches the stored golden geometry within pixel tolerance", () => {
    const bundle = goldenBundle();
    const golden = JSON.parse(
      readFileSync(join(GOLDEN_DIR, "chart_geometry_1976.json"), "utf8")
    ) as ReturnType<typeof chartGeometry>;
    const got = chartGeometry(bundle, view({ year: 1976 }));
    expect(got.length).toBe(golden.length);
    for (let i = 0; i < golden.length; i++) {
      expect(got[i].state).toBe(golden[i].state);
      expect(got[i].k).toBe(golden[i].k);
      for (const field of ["x", "y", "width", "height"] as const) {
        expect(Math.abs(got[i][field] - golden[i][field])).toBeLessThanOrEqual(
          PIXEL_TOLERANCE
        );
      }
    }
  });

  it("renders one rect per non-missing bucket", () => {
    const bundle = miniBundle();
    const host = render(bundle, view({ year: 2019 }));
    const rects = host.querySelectorAll("rect.block");
    expect(rects.length).toBe(5); // NY k=5 is missing, so 2 + 3
  });

  it("slice widths are proportional to thickness", () => {
    const host = render(miniBundle(), view({ year: 2019 }));
    const widthOf = (state: string) =>
      parseFloat(
        (host.querySelector(`rect.block[data-state="${state}"]`) as SVGRectElement).getAttribute(
          "width"
        )!
      );
    expect(widthOf("CA") / widthOf("NY")).toBeCloseTo(3.0, 6);
  });

  it("taller buckets render taller blocks", () => {
    const host = render(miniBundle(), view({ year: 2019 }));
    const heights = Array.from(
      host.querySelectorAll('rect.block[data-state="CA"]')
    ).map((r) => parseFloat(r.getAttribute("height")!));
    // drawn back to front (k=95 first); pixel heights must decrease
    expect(heights[0]).toBeGreaterThan(heights[1]);
    expect(heights[1]).toBeGreaterThan(heights[2]);
  });

  it("dims carried blocks", () => {
    const host = render(miniBundle(), view({ year: 2019 }));
    const carried = host.querySelector('rect.block[data-carried="1"]')!;
    const solid = host.querySelector('rect.block[data-state="CA"][data-k="50"]')!;
    expect(parseFloat(carried.getAttribute("opacity")!)).toBeLessThan(
      parseFloat(solid.getAttribute("opacity")!)
    );
  });

  it("desaturates non-highlighted slices", () => {
    const host = render(miniBundle(), view({ year: 2019, highlights: ["CA"] }));
    const ca = host.querySelector('rect.block[data-state="CA"][data-k="50"]')!;
    const ny = host.querySelector('rect.block[data-state="NY"][data-k="50"]')!;
    expect(parseFloat(ny.getAttribute("opacity")!)).toBeLessThan(
      parseFloat(ca.getAttribute("opacity")!)
    );
  });

  it("draws se whiskers when bundles carry errors", () => {
    const host = render(miniBundle(), view({ year: 2019 }));
    expect(host.querySelectorAll("line.se-whisker").length).toBe(1);
  });

  it("shows an error banner on schema mismatch, with no partial render", () => {
    const doc = JSON.parse(JSON.stringify(miniBundle())) as Bundle;
    (doc as { schema_version: string }).schema_version = "2.0.0";
    const host = document.createElement("div");
    document.body.appendChild(host);
    renderChart(host, doc, view({ year: 2019 }));
    expect(host.querySelector(".error-banner")).not.toBeNull();
    expect(host.querySelector("svg")).toBeNull();
  });

  it("rank mode spaces slices evenly instead of by benchmark distance", () => {
    // a middle state sits at a benchmark-proportional x in position mode but
    // at an evenly spaced grid point in ranking mode
    const bundle = goldenBundle();
    const positioned = chartGeometry(bundle, view({ year: 1976, benchmarkMode: "position" }));
    const ranked = chartGeometry(bundle, view({ year: 1976, benchmarkMode: "ranking" }));
    const dcPos = positioned.find((g) => g.state === "DC" && g.k === 50)!;
    const dcRank = ranked.find((g) => g.state === "DC" && g.k === 50)!;
    expect(Math.abs(dcPos.x - dcRank.x)).toBeGreaterThan(1);
    const baseX = (geom: typeof ranked) => {
      const per = new Map<string, number>();
      for (const g of geom) per.set(g.state, Math.min(per.get(g.state) ?? Infinity, g.x));
      return [...per.values()].sort((a, b) => a - b);
    };
    const xs = baseX(ranked);
    const gaps = xs.slice(1).map((x, i) => x - xs[i]);
    for (const gap of gaps) expect(gap).toBeCloseTo(gaps[0], 6);
  });

  it("every rendered block's data attributes resolve to a bundle value", () => {
    const bundle = goldenBundle();
    const host = render(bundle, view({ year: 2019 }));
    for (const rect of host.querySelectorAll("rect.block")) {
      const state = rect.getAttribute("data-state")!;
      const year = rect.getAttribute("data-year")!;
      const k = parseInt(rect.getAttribute("data-k")!, 10);
      const slice = bundle.years[year].slices.find((s) => s.state === state)!;
      const bucket = slice.buckets.find((b) => b.k === k)!;
      expect(bucket.height).not.toBeNull();
    }
  });
});
