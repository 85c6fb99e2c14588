import { describe, expect, it } from "vitest";

import {
  cloneWeights,
  groupSumLabel,
  renormalizeGroup,
  scenarioGroup,
} from "../src/state";
import type { WeightsDoc } from "../src/types";

import catalogFixture from "../src/__fixtures__/catalog.json";

const defaults = catalogFixture.default_weights as WeightsDoc;

// Small deterministic PRNG so the property loops are reproducible.
function lcg(seed: number): () => number {
  let s = seed >>> 0;
  return () => {
    s = (s * 1664525 + 1013904223) >>> 0;
    return s / 2 ** 32;
  };
}

describe("renormalizeGroup", () => {
  it("always displays a group sum of 1.000 after an edit", () => {
    const rand = lcg(914408);
    let group = { ...defaults.determinants };
    for (let i = 0; i < 200; i++) {
      const keys = Object.keys(group);
      const edited = keys[Math.floor(rand() * keys.length)];
      group = renormalizeGroup(group, edited, rand());
      expect(groupSumLabel(group)).toBe("1.000");
      const sum = Object.values(group).reduce((s, v) => s + v, 0);
      expect(Math.abs(sum - 1)).toBeLessThan(1e-9);
    }
  });

  it("preserves the ratios of unedited siblings", () => {
    const group = { a: 0.1, b: 0.3, c: 0.6 };
    const out = renormalizeGroup(group, "a", 0.5);
    expect(out.a).toBeCloseTo(0.5, 12);
    // b:c stays 1:2
    expect(out.b / out.c).toBeCloseTo(0.3 / 0.6, 12);
    expect(out.b + out.c).toBeCloseTo(0.5, 12);
  });

  it("splits evenly when the untouched siblings had no mass", () => {
    const out = renormalizeGroup({ a: 1, b: 0, c: 0 }, "a", 0.4);
    expect(out.b).toBeCloseTo(0.3, 12);
    expect(out.c).toBeCloseTo(0.3, 12);
  });

  it("clamps the edited value into [0, 1]", () => {
    expect(renormalizeGroup({ a: 0.5, b: 0.5 }, "a", 1.7)).toEqual({ a: 1, b: 0 });
    const low = renormalizeGroup({ a: 0.5, b: 0.5 }, "a", -2);
    expect(low.a).toBe(0);
    expect(low.b).toBeCloseTo(1, 12);
  });

  it("forces a singleton group to exactly 1", () => {
    expect(renormalizeGroup({ only: 0.2 }, "only", 0.7)).toEqual({ only: 1 });
  });

  it("rejects unknown keys", () => {
    expect(() => renormalizeGroup({ a: 1 }, "zzz", 0.5)).toThrow("unknown weight");
  });
});

describe("scenario helpers", () => {
  it("clones deeply: edits do not leak into the defaults", () => {
    const scenario = cloneWeights(defaults);
    scenario.determinants.Exposure = 0.9;
    expect(defaults.determinants.Exposure).toBeCloseTo(1 / 3, 12);
  });

  it("resolves group paths", () => {
    const scenario = cloneWeights(defaults);
    expect(scenarioGroup(scenario, "determinants")).toBe(scenario.determinants);
    const det = Object.keys(scenario.components)[0];
    expect(scenarioGroup(scenario, `components/${det}`)).toBe(scenario.components[det]);
    expect(() => scenarioGroup(scenario, "components/Nope")).toThrow("unknown weight group");
  });
});
