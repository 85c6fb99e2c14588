import type { CatalogResponse, UnitDetail } from "./types";

export interface IndicatorRow {
  code: string;
  name: string;
  value: number | null;
  display: string;
}

/** One row per catalog indicator, in catalog order; missing values say so. */
export function indicatorRows(detail: UnitDetail, catalog: CatalogResponse): IndicatorRow[] {
  return catalog.indicators.map((ind) => {
    const value = detail.result ? (detail.result.indicators[ind.code] ?? null) : null;
    return {
      code: ind.code,
      name: ind.name,
      value,
      display: value === null ? "missing" : value.toFixed(3),
    };
  });
}

function csvEscape(value: string): string {
  return /[",\n]/.test(value) ? `"${value.replace(/"/g, '""')}"` : value;
}

/**
 * Flatten the /api/unit payload to CSV, one `section,key,value` row per
 * scalar, so the download carries exactly what the endpoint returned.
 */
export function detailToCsv(detail: UnitDetail): string {
  const rows: [string, string, string][] = [["section", "key", "value"]];
  const meta: [string, string | number | null][] = [
    ["unit_id", detail.unit_id],
    ["name", detail.name],
    ["level", detail.level],
    ["parent_id", detail.parent_id],
    ["household_count", detail.household_count],
    ["surveyed_households", detail.surveyed_households],
  ];
  for (const [key, value] of meta) {
    rows.push(["meta", key, value === null ? "" : String(value)]);
  }
  for (const [code, value] of Object.entries(detail.raw_indicators)) {
    rows.push(["raw_indicator", code, value === null ? "" : String(value)]);
  }
  if (detail.result) {
    rows.push(["result", "vi", detail.result.vi === null ? "" : String(detail.result.vi)]);
    rows.push(["result", "class", detail.result.class === null ? "" : String(detail.result.class)]);
    rows.push(["result", "rank", String(detail.result.rank)]);
    rows.push(["result", "weight_config_id", detail.result.weight_config_id]);
    for (const [det, value] of Object.entries(detail.result.determinants)) {
      rows.push(["determinant", det, value === null ? "" : String(value)]);
    }
    for (const [code, value] of Object.entries(detail.result.indicators)) {
      rows.push(["indicator", code, value === null ? "" : String(value)]);
    }
  }
  for (const child of detail.children) {
    rows.push(["child", child.unit_id, child.name]);
  }
  return rows.map((r) => r.map(csvEscape).join(",")).join("\n") + "\n";
}

export function renderUnitDetail(
  container: HTMLElement,
  detail: UnitDetail,
  catalog: CatalogResponse,
): void {
  const result = detail.result;
  const summary = result
    ? `<dl class="unit-meta">` +
      `<dt>Vulnerability index</dt><dd>${result.vi === null ? "missing" : result.vi.toFixed(3)}</dd>` +
      `<dt>Class</dt><dd>${result.class ?? "missing"}</dd>` +
      `<dt>Rank</dt><dd>${result.rank}</dd>` +
      `<dt>Households (declared)</dt><dd>${detail.household_count}</dd>` +
      `<dt>Households (surveyed)</dt><dd>${detail.surveyed_households}</dd>` +
      `</dl>`
    : `<p>No computed result for this unit.</p>`;

  const indicators = indicatorRows(detail, catalog)
    .map(
      (row) =>
        `<tr data-code="${row.code}"><td>${row.code}</td>` +
        `<td>${row.name}</td><td class="value">${row.display}</td></tr>`,
    )
    .join("");

  const children = detail.children.length
    ? `<h3>Children</h3><table class="children"><tbody>` +
      detail.children
        .map(
          (c) =>
            `<tr data-child="${c.unit_id}"><td>${c.unit_id}</td>` +
            `<td>${c.name}</td><td>${c.level}</td></tr>`,
        )
        .join("") +
      `</tbody></table>`
    : "";

  container.innerHTML =
    `<h2>${detail.name} <small>(${detail.level})</small></h2>` +
    summary +
    `<button type="button" data-action="export-csv">Export CSV</button>` +
    `<h3>Indicators</h3>` +
    `<table class="indicators"><thead><tr><th>Code</th><th>Name</th><th>Value</th></tr></thead>` +
    `<tbody>${indicators}</tbody></table>` +
    children;

  const button = container.querySelector('[data-action="export-csv"]');
  button?.addEventListener("click", () => {
    downloadCsv(`${detail.unit_id}.csv`, detailToCsv(detail));
  });
}

export function renderUnitNotFound(container: HTMLElement, unitId: string): void {
  container.innerHTML = `<p class="error">Unit not found: ${unitId}</p>`;
}

function downloadCsv(filename: string, text: string): void {
  const blob = new Blob([text], { type: "text/csv" });
  const url = URL.createObjectURL(blob);
  const a = document.createElement("a");
  a.href = url;
  a.download = filename;
  a.click();
  URL.revokeObjectURL(url);
}
