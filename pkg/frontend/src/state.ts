import type { LayerId, Level, WeightGroup, WeightsDoc } from "./types";

export interface ViewState {
  level: Level;
  layer: LayerId;
  scenario: WeightsDoc;
  selectedUnit: string | null;
}

export function initialState(defaults: WeightsDoc): ViewState {
  return {
    level: "village",
    layer: "vi",
    scenario: cloneWeights(defaults),
    selectedUnit: null,
  };
}

export function cloneWeights(doc: WeightsDoc): WeightsDoc {
  return JSON.parse(JSON.stringify(doc)) as WeightsDoc;
}

/**
 * Set one weight and rescale its siblings so the group sums to 1 again.
 *
 * The edited key is clamped to [0,1]; the remainder is split across the other
 * keys in proportion to their previous values, so untouched sliders keep
 * their mutual ratios. A group whose other entries are all zero splits the
 * remainder evenly.
 */
export function renormalizeGroup(
  group: WeightGroup,
  edited: string,
  value: number,
): WeightGroup {
  if (!(edited in group)) {
    throw new Error(`unknown weight '${edited}'`);
  }
  const keys = Object.keys(group);
  const v = Math.min(1, Math.max(0, value));
  if (keys.length === 1) {
    return { [edited]: 1 };
  }
  const rest = 1 - v;
  const others = keys.filter((k) => k !== edited);
  const mass = others.reduce((sum, k) => sum + group[k], 0);
  const out: WeightGroup = {};
  for (const k of keys) {
    if (k === edited) {
      out[k] = v;
    } else if (mass > 0) {
      out[k] = (group[k] / mass) * rest;
    } else {
      out[k] = rest / others.length;
    }
  }
  return out;
}

/** Group total as displayed next to the sliders: always "1.000" after an edit. */
export function groupSumLabel(group: WeightGroup): string {
  const sum = Object.values(group).reduce((s, v) => s + v, 0);
  return sum.toFixed(3);
}

/** Look up a mutable weight group inside a scenario by its panel path. */
export function scenarioGroup(scenario: WeightsDoc, path: string): WeightGroup {
  if (path === "determinants") {
    return scenario.determinants;
  }
  const slash = path.indexOf("/");
  const kind = slash === -1 ? path : path.slice(0, slash);
  const key = path.slice(slash + 1);
  const pool =
    kind === "components"
      ? scenario.components
      : kind === "subcomponents"
        ? scenario.subcomponents
        : kind === "indicators"
          ? scenario.indicators
          : undefined;
  if (!pool || !(key in pool)) {
    throw new Error(`unknown weight group '${path}'`);
  }
  return pool[key];
}
