/** Keyframe bundle contract (schema 1.x). Mirrors the pipeline's published
 * JSON schema; the explorer never computes statistics, it only renders
 * values that exist verbatim in these documents. */

export interface Bucket {
  k: number;
  height: number | null;
  carried: boolean;
  se?: number;
}

export interface Slice {
  fips: number;
  state: string;
  benchmark: number;
  rank: number;
  thickness: number;
  n_households: number;
  buckets: Bucket[];
}

export interface Keyframe {
  year: number;
  rpp_backcast: boolean;
  slices: Slice[];
}

export interface BundleMetadata {
  reference_year: number;
  reference_median: number;
  age_mode?: string | null;
  age_seed?: number | null;
  bootstrap?: { B: number; seed: number } | null;
  deflators?: { rpp_observed_from: number; backcast: boolean };
  states: { fips: number; state: string }[];
  dropped_states?: number[];
}

export interface Bundle {
  schema_version: string;
  kind: "keyframe-bundle";
  variant: string;
  filter: string;
  scheme: string;
  metadata: BundleMetadata;
  years: Record<string, Keyframe>;
}

export interface ManifestEntry {
  variant: string;
  filter: string;
  path: string;
  scheme: string;
  years: number[];
}

export interface Manifest {
  schema_version: string;
  kind: "manifest";
  bundles: ManifestEntry[];
}

export type BenchmarkMode = "position" | "ranking";
