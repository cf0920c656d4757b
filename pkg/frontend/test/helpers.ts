import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { assertSupportedBundle } from "../src/data.js";
import type { Bundle } from "../src/types.js";

export const GOLDEN_DIR = join(dirname(fileURLToPath(import.meta.url)), "golden");

export function goldenBundleRaw(): string {
  return readFileSync(join(GOLDEN_DIR, "keyframes_RHH_all.json"), "utf8");
}

export function goldenBundle(): Bundle {
  return assertSupportedBundle(JSON.parse(goldenBundleRaw()));
}

/** A tiny two-state bundle for geometry-focused tests. */
export function miniBundle(): Bundle {
  return assertSupportedBundle({
    schema_version: "1.0.0",
    kind: "keyframe-bundle",
    variant: "RHH",
    filter: "all",
    scheme: "decile",
    metadata: {
      reference_year: 2019,
      reference_median: 50000.0,
      states: [
        { fips: 6, state: "CA" },
        { fips: 36, state: "NY" },
      ],
    },
    years: {
      "2019": {
        year: 2019,
        rpp_backcast: false,
        slices: [
          {
            fips: 36,
            state: "NY",
            benchmark: -10000.0,
            rank: 1,
            thickness: 1.0,
            n_households: 91,
            buckets: [
              { k: 5, height: null, carried: false },
              { k: 50, height: 40000.0, carried: false },
              { k: 95, height: 90000.0, carried: true },
            ],
          },
          {
            fips: 6,
            state: "CA",
            benchmark: 5000.0,
            rank: 2,
            thickness: 3.0,
            n_households: 182,
            buckets: [
              { k: 5, height: 20000.0, carried: false },
              { k: 50, height: 55000.0, carried: false, se: 1234.5 },
              { k: 95, height: 150000.0, carried: false },
            ],
          },
        ],
      },
    },
  });
}
