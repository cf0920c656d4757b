import type { Bundle } from "./types.js";

/** CSV of one keyframe, values verbatim from the bundle. Missing buckets
 * (no height) are omitted: there is no value to export. */
export function keyframeCsv(bundle: Bundle, year: number): string {
  const frame = bundle.years[String(year)];
  if (!frame) throw new Error(`no keyframe for year ${year}`);
  const rows = ["state,year,k,height,se,carried"];
  for (const s of frame.slices) {
    for (const b of s.buckets) {
      if (b.height === null) continue;
      rows.push(
        [
          s.state,
          String(frame.year),
          String(b.k),
          String(b.height),
          b.se === undefined ? "" : String(b.se),
          b.carried ? "1" : "0",
        ].join(",")
      );
    }
  }
  return rows.join("\n") + "\n";
}

export function downloadFilename(bundle: Bundle, year: number): string {
  return `keyframe_${bundle.variant}_${bundle.filter}_${year}.csv`;
}

/** Browser download trigger (no-op target environment for tests). */
export function triggerDownload(doc: Document, filename: string, text: string): void {
  const blob = new Blob([text], { type: "text/csv" });
  const url = URL.createObjectURL(blob);
  const anchor = doc.createElement("a");
  anchor.href = url;
  anchor.download = filename;
  doc.body.appendChild(anchor);
  anchor.click();
  anchor.remove();
  URL.revokeObjectURL(url);
}
