import { renderChart } from "./chart.js";
import { bundleYears, loadBundle, loadManifest } from "./data.js";
import { downloadFilename, keyframeCsv, triggerDownload } from "./download.js";
import { Player } from "./playback.js";
import { DEFAULT_VIEW, decodeHash, encodeHash, sanitizeView, ViewState } from "./state.js";
import { attachTooltip } from "./tooltip.js";
import type { Bundle, Manifest } from "./types.js";

const DATA_BASE = "./";

const bundleCache = new Map<string, Bundle>();

async function bundleFor(manifest: Manifest, variant: string, filter: string): Promise<Bundle> {
  const entry = manifest.bundles.find((b) => b.variant === variant && b.filter === filter);
  if (!entry) throw new Error(`no bundle for ${variant}/${filter}`);
  const cached = bundleCache.get(entry.path);
  if (cached) return cached;
  const bundle = await loadBundle(DATA_BASE + entry.path);
  bundleCache.set(entry.path, bundle);
  return bundle;
}

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing #${id}`);
  return found as T;
}

async function boot(): Promise<void> {
  const chartHost = el<HTMLDivElement>("chart");
  const tooltip = el<HTMLDivElement>("tooltip");
  const variantSelect = el<HTMLSelectElement>("variant");
  const filterSelect = el<HTMLSelectElement>("filter");
  const yearSlider = el<HTMLInputElement>("year");
  const yearLabel = el<HTMLSpanElement>("year-label");
  const playButton = el<HTMLButtonElement>("play");
  const speedSelect = el<HTMLSelectElement>("speed");
  const modeSelect = el<HTMLSelectElement>("mode");
  const highlightsHost = el<HTMLDivElement>("highlights");
  const downloadButton = el<HTMLButtonElement>("download");
  const status = el<HTMLDivElement>("status");

  let manifest: Manifest;
  try {
    manifest = await loadManifest(DATA_BASE + "manifest.json");
  } catch (err) {
    status.textContent = `Failed to load manifest: ${err}`;
    status.className = "error-banner";
    return;
  }

  for (const variant of [...new Set(manifest.bundles.map((b) => b.variant))]) {
    variantSelect.add(new Option(variant, variant));
  }
  for (const filter of [...new Set(manifest.bundles.map((b) => b.filter))]) {
    filterSelect.add(new Option(filter, filter));
  }

  let view: ViewState = { ...DEFAULT_VIEW, ...decodeHash(location.hash) };
  let bundle = await bundleFor(manifest, view.variant, view.filter);
  let years = bundleYears(bundle);
  let player: Player | null = null;

  const applyView = () => {
    view = sanitizeView(view, manifest, years);
    variantSelect.value = view.variant;
    filterSelect.value = view.filter;
    yearSlider.min = String(years[0]);
    yearSlider.max = String(years[years.length - 1]);
    yearSlider.value = String(view.year);
    yearLabel.textContent = String(view.year);
    speedSelect.value = String(view.speed);
    modeSelect.value = view.benchmarkMode;
    renderHighlights();
    renderChart(chartHost, bundle, view);
    attachTooltip(chartHost, bundle, tooltip);
    history.replaceState(null, "", encodeHash(view));
  };

  const renderHighlights = () => {
    highlightsHost.textContent = "";
    for (const s of bundle.metadata.states) {
      const label = document.createElement("label");
      const box = document.createElement("input");
      box.type = "checkbox";
      box.value = s.state;
      box.checked = view.highlights.includes(s.state);
      box.addEventListener("change", () => {
        view.highlights = box.checked
          ? [...view.highlights, s.state]
          : view.highlights.filter((code) => code !== s.state);
        applyView();
      });
      label.appendChild(box);
      label.appendChild(document.createTextNode(s.state));
      highlightsHost.appendChild(label);
    }
  };

  const switchBundle = async () => {
    stopPlayback();
    bundle = await bundleFor(manifest, view.variant, view.filter);
    years = bundleYears(bundle);
    applyView();
  };

  const stopPlayback = () => {
    player?.stop();
    player = null;
    playButton.textContent = "Play";
  };

  variantSelect.addEventListener("change", () => {
    view.variant = variantSelect.value;
    void switchBundle();
  });
  filterSelect.addEventListener("change", () => {
    view.filter = filterSelect.value;
    void switchBundle();
  });
  yearSlider.addEventListener("input", () => {
    view.year = parseInt(yearSlider.value, 10);
    if (player) player.scrub(view.year);
    applyView();
  });
  speedSelect.addEventListener("change", () => {
    view.speed = parseFloat(speedSelect.value);
    if (player?.status === "playing") player.play(view.speed);
    applyView();
  });
  modeSelect.addEventListener("change", () => {
    view.benchmarkMode = modeSelect.value === "ranking" ? "ranking" : "position";
    applyView();
  });
  playButton.addEventListener("click", () => {
    if (player?.status === "playing") {
      player.pause();
      playButton.textContent = "Resume";
      return;
    }
    if (player?.status === "paused") {
      player.resume();
      playButton.textContent = "Pause";
      return;
    }
    player = new Player(
      years,
      (year) => {
        view.year = year;
        applyView();
      },
      () => {
        playButton.textContent = "Play";
      }
    );
    player.scrub(view.year);
    player.play(view.speed);
    playButton.textContent = "Pause";
  });
  downloadButton.addEventListener("click", () => {
    triggerDownload(
      document,
      downloadFilename(bundle, view.year),
      keyframeCsv(bundle, view.year)
    );
  });
  window.addEventListener("hashchange", () => {
    view = { ...view, ...decodeHash(location.hash) };
    void switchBundle();
  });

  applyView();
  status.textContent = "";
}

void boot();
