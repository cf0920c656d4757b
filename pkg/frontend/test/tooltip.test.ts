import { beforeEach, describe, expect, it } from "vitest";

import { renderChart } from "../src/chart.js";
import { DEFAULT_VIEW } from "../src/state.js";
import { attachTooltip, tooltipLines } from "../src/tooltip.js";
import { goldenBundle, goldenBundleRaw, miniBundle } from "./helpers.js";

function mount(bundle = miniBundle(), year = 2019) {
  const host = document.createElement("div");
  const tooltip = document.createElement("div");
  document.body.append(host, tooltip);
  renderChart(host, bundle, { ...DEFAULT_VIEW, year });
  attachTooltip(host, bundle, tooltip);
  return { host, tooltip };
}

function hover(el: Element) {
  el.dispatchEvent(new MouseEvent("mouseover", { bubbles: true, clientX: 10, clientY: 20 }));
}

describe("tooltip", () => {
  beforeEach(() => {
    document.body.innerHTML = "";
  });

  it("shows the block's exported values verbatim", () => {
    const { host, tooltip } = mount();
    const rect = host.querySelector('rect.block[data-state="CA"][data-k="50"]')!;
    hover(rect);
    expect(tooltip.style.display).toBe("block");
    const lines = Array.from(tooltip.children).map((c) => c.textContent);
    expect(lines).toEqual([
      "state: CA",
      "year: 2019",
      "k: 50",
      "height: 55000",
      "se: 1234.5",
    ]);
  });

  it("notes carry-forward on flagged blocks", () => {
    const { host, tooltip } = mount();
    const rect = host.querySelector('rect.block[data-carried="1"]')!;
    hover(rect);
    const lines = Array.from(tooltip.children).map((c) => c.textContent);
    expect(lines).toContain("carried forward from previous bucket");
  });

  it("hides over empty regions", () => {
    const { host, tooltip } = mount();
    hover(host.querySelector("line.axis")!);
    expect(tooltip.style.display).toBe("none");
  });

  it("matches the bundle JSON for every block of every golden year", () => {
    // the automated DOM-vs-JSON diff: each displayed number must equal the
    // parsed bundle value stringified, for all ~2400 blocks
    const bundle = goldenBundle();
    for (const [yearKey, frame] of Object.entries(bundle.years)) {
      for (const slice of frame.slices) {
        for (const bucket of slice.buckets) {
          if (bucket.height === null) continue;
          const lines = tooltipLines(bundle, slice.state, frame.year, bucket.k);
          expect(lines[0]).toBe(`state: ${slice.state}`);
          expect(lines[1]).toBe(`year: ${yearKey}`);
          expect(lines[2]).toBe(`k: ${String(bucket.k)}`);
          expect(lines[3]).toBe(`height: ${String(bucket.height)}`);
          if (bucket.se !== undefined) {
            expect(lines[4]).toBe(`se: ${String(bucket.se)}`);
          }
        }
      }
    }
  });

  it("displays height strings identical to the raw JSON literals", () => {
    // spot-check that String(parsed) reproduces the serialized literal, so
    // "verbatim" holds all the way down to the file bytes
    const raw = goldenBundleRaw();
    const bundle = goldenBundle();
    const frame = bundle.years["2019"];
    for (const slice of frame.slices) {
      for (const bucket of slice.buckets.slice(0, 3)) {
        if (bucket.height === null) continue;
        const literal = String(bucket.height);
        expect(raw).toContain(`"height":${literal}`);
      }
    }
  });

  it("hover on a DOM rect reproduces the JSON for the golden bundle", () => {
    const bundle = goldenBundle();
    const { host, tooltip } = mount(bundle, 1976);
    const rects = host.querySelectorAll("rect.block");
    expect(rects.length).toBeGreaterThan(30);
    for (const rect of rects) {
      hover(rect);
      const state = rect.getAttribute("data-state")!;
      const k = parseInt(rect.getAttribute("data-k")!, 10);
      const slice = bundle.years["1976"].slices.find((s) => s.state === state)!;
      const bucket = slice.buckets.find((b) => b.k === k)!;
      const lines = Array.from(tooltip.children).map((c) => c.textContent);
      expect(lines).toContain(`height: ${String(bucket.height)}`);
    }
  });
});
