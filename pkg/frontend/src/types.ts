// Shapes of the HTTP API payloads. Field names mirror the JSON exactly.

export type Level = "department" | "municipality" | "village";

export type LayerId =
  | "vi"
  | "Exposure"
  | "Sensitivity"
  | "AdaptiveCapacity"
  | "hotspot";

export interface IndicatorDef {
  code: string;
  name: string;
  determinant: string;
  component: string;
  subcomponent: string;
  unit: string;
  source: string;
  polarity: string;
  aggregation: string;
  survey_field: string | null;
}

export type WeightGroup = Record<string, number>;

export interface WeightsDoc {
  id?: string;
  determinants: WeightGroup;
  components: Record<string, WeightGroup>;
  subcomponents: Record<string, WeightGroup>;
  indicators: Record<string, WeightGroup>;
}

export interface CatalogResponse {
  indicators: IndicatorDef[];
  hierarchy: Record<string, Record<string, Record<string, string[]>>>;
  default_weights: WeightsDoc;
  weight_config_id: string;
}

export interface ResultRow {
  unit_id: string;
  level: string;
  household_count: number;
  vi: number | null;
  class: number | null;
  rank: number;
  determinants: Record<string, number | null>;
  determinant_classes: Record<string, number | null>;
  components: Record<string, number | null>;
  subcomponents: Record<string, number | null>;
  indicators: Record<string, number | null>;
  weight_config_id: string;
}

export interface ChoroplethProperties {
  unit_id: string;
  name: string;
  vi: number | null;
  exposure_index: number | null;
  sensitivity_index: number | null;
  adaptive_capacity_index: number | null;
  class: number | null;
  rank: number | null;
}

export type Position = [number, number];
export type Ring = Position[];

export interface ChoroplethFeature {
  type: "Feature";
  geometry:
    | { type: "Polygon"; coordinates: Ring[] }
    | { type: "MultiPolygon"; coordinates: Ring[][] };
  properties: ChoroplethProperties;
}

export interface ChoroplethCollection {
  type: "FeatureCollection";
  features: ChoroplethFeature[];
}

export interface UnitSummary {
  unit_id: string;
  name: string;
  level: string;
  parent_id: string | null;
  household_count: number;
}

export interface UnitDetail extends UnitSummary {
  surveyed_households: number;
  raw_indicators: Record<string, number | null>;
  result: ResultRow | null;
  children: { unit_id: string; name: string; level: string }[];
}

export interface WhatifResponse {
  weight_config_id: string;
  results: Record<string, ResultRow[]>;
  rankings: Record<string, string[]>;
}

export interface FireSummary {
  classes: { class: number; area_km2: number }[];
  total_area_km2: number;
}

export interface HotspotResponse {
  level: string;
  zscores: Record<string, number>;
}
