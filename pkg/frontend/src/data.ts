import type { Bundle, Manifest } from "./types.js";

const SUPPORTED_MAJOR = 1;

export class SchemaMismatchError extends Error {
  constructor(found: string) {
    super(`unsupported bundle schema version ${found} (explorer supports ${SUPPORTED_MAJOR}.x)`);
    this.name = "SchemaMismatchError";
  }
}

export function assertSupportedBundle(doc: unknown): Bundle {
  const bundle = doc as Bundle;
  if (!bundle || bundle.kind !== "keyframe-bundle") {
    throw new SchemaMismatchError(String(bundle?.schema_version ?? "missing"));
  }
  const major = parseInt(String(bundle.schema_version).split(".")[0] ?? "", 10);
  if (major !== SUPPORTED_MAJOR) {
    throw new SchemaMismatchError(String(bundle.schema_version));
  }
  return deepFreeze(bundle);
}

export function assertSupportedManifest(doc: unknown): Manifest {
  const manifest = doc as Manifest;
  if (!manifest || manifest.kind !== "manifest") {
    throw new SchemaMismatchError(String(manifest?.schema_version ?? "missing"));
  }
  return deepFreeze(manifest);
}

/** Bundles are shared between views; switching variant or filter must never
 * mutate them, so everything loaded is frozen recursively. */
export function deepFreeze<T>(value: T): T {
  if (value && typeof value === "object" && !Object.isFrozen(value)) {
    Object.freeze(value);
    for (const key of Object.getOwnPropertyNames(value)) {
      deepFreeze((value as Record<string, unknown>)[key]);
    }
  }
  return value;
}

export async function loadManifest(url: string): Promise<Manifest> {
  const resp = await fetch(url);
  if (!resp.ok) throw new Error(`fetch ${url}: ${resp.status}`);
  return assertSupportedManifest(await resp.json());
}

export async function loadBundle(url: string): Promise<Bundle> {
  const resp = await fetch(url);
  if (!resp.ok) throw new Error(`fetch ${url}: ${resp.status}`);
  return assertSupportedBundle(await resp.json());
}

export function bundleYears(bundle: Bundle): number[] {
  return Object.keys(bundle.years)
    .map((y) => parseInt(y, 10))
    .sort((a, b) => a - b);
}
