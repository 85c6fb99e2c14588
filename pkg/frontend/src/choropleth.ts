import type {
  ChoroplethCollection,
  ChoroplethFeature,
  LayerId,
  ResultRow,
  Ring,
} from "./types";

// 5-class sequential scheme, light to dark; class 1 = least vulnerable.
export const CLASS_COLORS = ["#fee5d9", "#fcae91", "#fb6a4a", "#de2d26", "#a50f15"];
export const NO_DATA_FILL = "url(#no-data)";

export const HOTSPOT_THRESHOLD = 1.96; // two-sided 5% significance
export const HOT_COLOR = "#b2182b";
export const COLD_COLOR = "#2166ac";
export const NEUTRAL_COLOR = "#cccccc";

const VIEW_SIZE = 640;
const PADDING = 8;

export interface LayerData {
  layer: LayerId;
  /** Per-unit results; required for determinant layers, optional for "vi"
   *  (falls back to the class baked into the GeoJSON properties). */
  rows?: ResultRow[];
  /** Gi* z-scores; required for the "hotspot" layer. */
  zscores?: Record<string, number>;
}

export function classColor(cls: number | null | undefined): string {
  if (cls == null || cls < 1 || cls > CLASS_COLORS.length) {
    return NO_DATA_FILL;
  }
  return CLASS_COLORS[cls - 1];
}

export function hotspotColor(z: number | undefined): string {
  if (z === undefined) {
    return NO_DATA_FILL;
  }
  if (z >= HOTSPOT_THRESHOLD) {
    return HOT_COLOR;
  }
  if (z <= -HOTSPOT_THRESHOLD) {
    return COLD_COLOR;
  }
  return NEUTRAL_COLOR;
}

/** Fill for one feature under the active layer; hatched when the value is missing. */
export function featureFill(feature: ChoroplethFeature, data: LayerData): string {
  const props = feature.properties;
  const row = rowFor(feature, data);
  switch (data.layer) {
    case "vi":
      return classColor(row ? row.class : props.class);
    case "hotspot":
      return hotspotColor(data.zscores?.[props.unit_id]);
    default:
      return classColor(row?.determinant_classes[data.layer]);
  }
}

export function featureValue(feature: ChoroplethFeature, data: LayerData): number | null {
  const props = feature.properties;
  const row = rowFor(feature, data);
  switch (data.layer) {
    case "vi":
      return row ? row.vi : props.vi;
    case "hotspot":
      return data.zscores?.[props.unit_id] ?? null;
    default:
      return row ? row.determinants[data.layer] : null;
  }
}

function rowFor(feature: ChoroplethFeature, data: LayerData): ResultRow | undefined {
  return data.rows?.find((r) => r.unit_id === feature.properties.unit_id);
}

function polygonsOf(feature: ChoroplethFeature): Ring[][] {
  const geom = feature.geometry;
  return geom.type === "Polygon" ? [geom.coordinates] : geom.coordinates;
}

function collectionBbox(fc: ChoroplethCollection): [number, number, number, number] {
  let minX = Infinity;
  let minY = Infinity;
  let maxX = -Infinity;
  let maxY = -Infinity;
  for (const feature of fc.features) {
    for (const polygon of polygonsOf(feature)) {
      for (const ring of polygon) {
        for (const [x, y] of ring) {
          minX = Math.min(minX, x);
          minY = Math.min(minY, y);
          maxX = Math.max(maxX, x);
          maxY = Math.max(maxY, y);
        }
      }
    }
  }
  return [minX, minY, maxX, maxY];
}

/** Path data for a feature in view coordinates (planar input, y flipped for SVG). */
export function featurePath(
  feature: ChoroplethFeature,
  bbox: [number, number, number, number],
): string {
  const [minX, minY, maxX, maxY] = bbox;
  const span = Math.max(maxX - minX, maxY - minY) || 1;
  const scale = (VIEW_SIZE - 2 * PADDING) / span;
  const px = (x: number) => PADDING + (x - minX) * scale;
  const py = (y: number) => PADDING + (maxY - y) * scale;
  const parts: string[] = [];
  for (const polygon of polygonsOf(feature)) {
    for (const ring of polygon) {
      const coords = ring.map(([x, y]) => `${px(x).toFixed(2)} ${py(y).toFixed(2)}`);
      parts.push(`M ${coords.join(" L ")} Z`);
    }
  }
  return parts.join(" ");
}

function legendHtml(layer: LayerId): string {
  const items: string[] = [];
  if (layer === "hotspot") {
    items.push(swatch(HOT_COLOR, `hotspot (z ≥ ${HOTSPOT_THRESHOLD})`));
    items.push(swatch(NEUTRAL_COLOR, "not significant"));
    items.push(swatch(COLD_COLOR, `coldspot (z ≤ -${HOTSPOT_THRESHOLD})`));
  } else {
    CLASS_COLORS.forEach((color, i) => {
      items.push(swatch(color, `class ${i + 1}`));
    });
  }
  items.push(
    `<span class="legend-item"><span class="legend-swatch legend-nodata"></span>no data</span>`,
  );
  return `<div class="legend">${items.join("")}</div>`;
}

function swatch(color: string, label: string): string {
  return (
    `<span class="legend-item">` +
    `<span class="legend-swatch" style="background:${color}"></span>${label}</span>`
  );
}

const HATCH_DEFS =
  `<defs><pattern id="no-data" width="8" height="8" patternUnits="userSpaceOnUse">` +
  `<rect width="8" height="8" fill="#f2f2f2"></rect>` +
  `<path d="M 0 8 L 8 0" stroke="#999" stroke-width="1.5"></path>` +
  `</pattern></defs>`;

/**
 * Draw the collection into the container as an SVG, one path per feature,
 * colored by the active layer's class. Replaces any previous rendering, so
 * switching level or layer is just another call.
 */
export function renderChoropleth(
  container: HTMLElement,
  fc: ChoroplethCollection,
  data: LayerData,
): void {
  const bbox = collectionBbox(fc);
  const paths = fc.features
    .map((feature) => {
      const fill = featureFill(feature, data);
      const value = featureValue(feature, data);
      const label = value === null ? "no data" : value.toFixed(3);
      return (
        `<path data-unit-id="${feature.properties.unit_id}" ` +
        `d="${featurePath(feature, bbox)}" fill="${fill}" fill-rule="evenodd" ` +
        `stroke="#444" stroke-width="1">` +
        `<title>${feature.properties.name}: ${label}</title></path>`
      );
    })
    .join("");
  container.innerHTML =
    `<svg viewBox="0 0 ${VIEW_SIZE} ${VIEW_SIZE}" role="img">` +
    HATCH_DEFS +
    paths +
    `</svg>` +
    legendHtml(data.layer);
}
