import { describe, expect, it } from "vitest";

import { assertSupportedManifest } from "../src/data.js";
import { DEFAULT_VIEW, decodeHash, encodeHash, sanitizeView } from "../src/state.js";
import type { Manifest } from "../src/types.js";

const manifest: Manifest = assertSupportedManifest({
  schema_version: "1.0.0",
  kind: "manifest",
  bundles: [
    { variant: "RHH", filter: "all", path: "a.json", scheme: "decile", years: [1976, 2019] },
    { variant: "ERHH", filter: "female", path: "b.json", scheme: "decile", years: [1976, 2019] },
  ],
});

describe("view state", () => {
  it("hash roundtrip preserves the view", () => {
    const view = {
      ...DEFAULT_VIEW,
      year: 1998,
      variant: "ERHH",
      filter: "female",
      highlights: ["CA", "DC"],
      benchmarkMode: "ranking" as const,
      speed: 2,
    };
    expect(decodeHash(encodeHash(view))).toEqual(view);
  });

  it("decode tolerates junk", () => {
    const view = decodeHash("#year=abc&mode=nonsense&speed=zoom");
    expect(view.year).toBe(DEFAULT_VIEW.year);
    expect(view.benchmarkMode).toBe("position");
  });

  it("sanitize clamps year into the bundle range", () => {
    const years = [1976, 1977, 2019];
    expect(sanitizeView({ ...DEFAULT_VIEW, year: 1900 }, manifest, years).year).toBe(1976);
    expect(sanitizeView({ ...DEFAULT_VIEW, year: 2050 }, manifest, years).year).toBe(2019);
  });

  it("sanitize falls back to the first manifest bundle", () => {
    const view = sanitizeView(
      { ...DEFAULT_VIEW, variant: "BOGUS", filter: "nope" },
      manifest,
      [1976]
    );
    expect(view.variant).toBe("RHH");
    expect(view.filter).toBe("all");
  });

  it("manifest bundles are frozen read-only", () => {
    expect(Object.isFrozen(manifest.bundles[0])).toBe(true);
  });
});
