import type { Bundle } from "./types.js";

/** Tooltip lines for one block. Every number is the bundle value passed
 * through String() untouched, so the popup is auditable against the JSON. */
export function tooltipLines(bundle: Bundle, state: string, year: number, k: number): string[] {
  const frame = bundle.years[String(year)];
  if (!frame) return [];
  const slice = frame.slices.find((s) => s.state === state);
  if (!slice) return [];
  const bucket = slice.buckets.find((b) => b.k === k);
  if (!bucket || bucket.height === null) return [];
  const lines = [
    `state: ${slice.state}`,
    `year: ${String(frame.year)}`,
    `k: ${String(bucket.k)}`,
    `height: ${String(bucket.height)}`,
  ];
  if (bucket.se !== undefined) lines.push(`se: ${String(bucket.se)}`);
  if (bucket.carried) lines.push("carried forward from previous bucket");
  return lines;
}

/** Delegated hover handling: any .block rect shows the tooltip, empty
 * regions hide it. */
export function attachTooltip(root: Element, bundle: Bundle, tooltip: HTMLElement): void {
  const show = (target: Element, clientX: number, clientY: number) => {
    const el = target as HTMLElement;
    const { state, year, k } = el.dataset;
    if (state === undefined || year === undefined || k === undefined) return false;
    const lines = tooltipLines(bundle, state, parseInt(year, 10), parseInt(k, 10));
    if (!lines.length) return false;
    tooltip.textContent = "";
    for (const line of lines) {
      const div = tooltip.ownerDocument.createElement("div");
      div.textContent = line;
      tooltip.appendChild(div);
    }
    tooltip.style.display = "block";
    tooltip.style.left = `${clientX + 12}px`;
    tooltip.style.top = `${clientY + 12}px`;
    return true;
  };

  root.addEventListener("mouseover", (event) => {
    const target = event.target as Element;
    if (!(target instanceof Element) || !target.classList.contains("block")) {
      tooltip.style.display = "none";
      return;
    }
    const me = event as MouseEvent;
    if (!show(target, me.clientX ?? 0, me.clientY ?? 0)) {
      tooltip.style.display = "none";
    }
  });
  root.addEventListener("mouseout", () => {
    tooltip.style.display = "none";
  });
}
