import { ApiClient, ApiError } from "./api";
import { renderChoropleth } from "./choropleth";
import { renderUnitDetail, renderUnitNotFound } from "./detail";
import { initialState } from "./state";
import type {
  CatalogResponse,
  ChoroplethCollection,
  LayerId,
  Level,
  ResultRow,
} from "./types";
import { WhatifPanel } from "./whatif";

declare global {
  interface Window {
    VULNATLAS_API_BASE?: string;
  }
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing #${id}`);
  }
  return node as T;
}

export async function bootstrap(): Promise<void> {
  const api = new ApiClient(window.VULNATLAS_API_BASE ?? "");
  const map = el<HTMLElement>("map");
  const banner = el<HTMLElement>("banner");
  const detailPane = el<HTMLElement>("detail");
  const whatifPane = el<HTMLElement>("whatif");
  const firePane = el<HTMLElement>("fire");
  const levelSelect = el<HTMLSelectElement>("level-select");
  const layerSelect = el<HTMLSelectElement>("layer-select");

  const showError = (message: string) => {
    banner.textContent = message;
    banner.hidden = false;
  };
  const clearError = () => {
    banner.hidden = true;
  };

  let catalog: CatalogResponse;
  try {
    catalog = await api.catalog();
  } catch (err) {
    showError(err instanceof Error ? err.message : "API unreachable");
    return;
  }

  const state = initialState(catalog.default_weights);
  const collections = new Map<Level, ChoroplethCollection>();
  // Batch rows per level; replaced wholesale by what-if responses.
  let rows = new Map<Level, ResultRow[]>();

  async function loadLevel(level: Level): Promise<void> {
    if (!collections.has(level)) {
      collections.set(level, await api.choropleth(level));
    }
    if (!rows.has(level)) {
      rows.set(level, await api.results(level));
    }
  }

  async function redraw(): Promise<void> {
    try {
      await loadLevel(state.level);
      const fc = collections.get(state.level)!;
      const data = {
        layer: state.layer,
        rows: rows.get(state.level),
        zscores:
          state.layer === "hotspot"
            ? (await api.hotspots(state.level)).zscores
            : undefined,
      };
      renderChoropleth(map, fc, data);
      clearError();
    } catch (err) {
      // stale map stays in place
      showError(err instanceof Error ? err.message : "failed to load map data");
    }
  }

  const whatif = new WhatifPanel(api, catalog.default_weights, (response) => {
    rows = new Map(
      (Object.entries(response.results) as [Level, ResultRow[]][]).map(([lvl, rs]) => [
        lvl,
        rs,
      ]),
    );
    void redraw();
  });
  whatif.mount(whatifPane);

  levelSelect.addEventListener("change", () => {
    state.level = levelSelect.value as Level;
    void redraw();
  });
  layerSelect.addEventListener("change", () => {
    state.layer = layerSelect.value as LayerId;
    void redraw();
  });

  map.addEventListener("click", async (event) => {
    const path = (event.target as Element).closest("path[data-unit-id]");
    if (!path) {
      return;
    }
    const unitId = path.getAttribute("data-unit-id")!;
    state.selectedUnit = unitId;
    try {
      renderUnitDetail(detailPane, await api.unit(unitId), catalog);
    } catch (err) {
      if (err instanceof ApiError && err.status === 404) {
        renderUnitNotFound(detailPane, unitId);
      } else {
        showError(err instanceof Error ? err.message : "failed to load unit");
      }
    }
  });

  try {
    const fire = await api.fireSummary();
    firePane.innerHTML =
      `<h2>Fire risk</h2><table><thead><tr><th>Class</th><th>Area (km²)</th></tr></thead><tbody>` +
      fire.classes
        .map((c) => `<tr><td>${c.class}</td><td>${c.area_km2.toFixed(3)}</td></tr>`)
        .join("") +
      `</tbody></table><p>Total: ${fire.total_area_km2.toFixed(3)} km²</p>`;
  } catch {
    firePane.innerHTML = `<h2>Fire risk</h2><p>No fire-risk outputs in this workspace.</p>`;
  }

  await redraw();
}

if (typeof document !== "undefined" && document.getElementById("map")) {
  void bootstrap();
}
