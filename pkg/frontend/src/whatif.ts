import { ApiClient, ApiError } from "./api";
import { cloneWeights, groupSumLabel, renormalizeGroup, scenarioGroup } from "./state";
import type { WeightsDoc, WhatifResponse } from "./types";

/**
 * Weight-scenario panel. Holds the current scenario, renormalizes a slider's
 * group when it is released, and posts the scenario to /api/whatif. Only one
 * request is in flight at a time; releasing another slider aborts the
 * superseded request. A rejected scenario (HTTP 422) surfaces as an inline
 * message and the previous results stay on screen.
 */
export class WhatifPanel {
  scenario: WeightsDoc;
  lastResponse: WhatifResponse | null = null;
  errorMessage: string | null = null;

  private inflight: AbortController | null = null;
  private container: HTMLElement | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly defaults: WeightsDoc,
    private readonly onResults: (response: WhatifResponse) => void,
  ) {
    this.scenario = cloneWeights(defaults);
  }

  /** Renormalize `groupPath` around setting `key` to `value`. Pure state change. */
  setWeight(groupPath: string, key: string, value: number): void {
    const group = scenarioGroup(this.scenario, groupPath);
    const updated = renormalizeGroup(group, key, value);
    for (const k of Object.keys(updated)) {
      group[k] = updated[k];
    }
  }

  /** Slider released: submit the scenario, aborting any superseded request. */
  async release(): Promise<void> {
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    try {
      const response = await this.api.whatif(this.scenario, controller.signal);
      if (controller.signal.aborted) {
        return; // a newer release won
      }
      this.lastResponse = response;
      this.errorMessage = null;
      this.onResults(response);
    } catch (err) {
      if (controller.signal.aborted) {
        return;
      }
      if (err instanceof ApiError) {
        this.errorMessage = err.message; // previous results retained
      } else {
        this.errorMessage = "request failed; showing previous results";
      }
    } finally {
      if (this.inflight === controller) {
        this.inflight = null;
      }
      this.refresh();
    }
  }

  async reset(): Promise<void> {
    this.scenario = cloneWeights(this.defaults);
    await this.release();
  }

  /** Build determinant-group sliders into the container and keep them live. */
  mount(container: HTMLElement): void {
    this.container = container;
    this.refresh();
    container.addEventListener("input", (event) => {
      const slider = event.target as HTMLInputElement;
      if (slider.dataset.group && slider.dataset.key) {
        const label = container.querySelector(
          `[data-value-for="${slider.dataset.group}:${slider.dataset.key}"]`,
        );
        if (label) {
          label.textContent = Number(slider.value).toFixed(3);
        }
      }
    });
    container.addEventListener("change", (event) => {
      const slider = event.target as HTMLInputElement;
      if (slider.dataset.group && slider.dataset.key) {
        this.setWeight(slider.dataset.group, slider.dataset.key, Number(slider.value));
        void this.release();
      }
    });
    container.addEventListener("click", (event) => {
      if ((event.target as HTMLElement).dataset.action === "reset") {
        void this.reset();
      }
    });
  }

  refresh(): void {
    if (!this.container) {
      return;
    }
    const groups: string[] = ["determinants"];
    for (const det of Object.keys(this.scenario.components)) {
      groups.push(`components/${det}`);
    }
    const sections = groups.map((path) => this.groupHtml(path)).join("");
    const error = this.errorMessage
      ? `<p class="whatif-error" role="alert">${this.errorMessage}</p>`
      : "";
    this.container.innerHTML =
      `<h2>What-if weights</h2>${error}${sections}` +
      `<button type="button" data-action="reset">Reset to defaults</button>`;
  }

  private groupHtml(path: string): string {
    const group = scenarioGroup(this.scenario, path);
    const rows = Object.keys(group)
      .map((key) => {
        const v = group[key];
        return (
          `<label class="slider-row">${key}` +
          `<input type="range" min="0" max="1" step="0.01" value="${v}" ` +
          `data-group="${path}" data-key="${key}">` +
          `<span data-value-for="${path}:${key}">${v.toFixed(3)}</span></label>`
        );
      })
      .join("");
    const title = path === "determinants" ? "Determinants" : path.split("/")[1];
    return (
      `<fieldset data-group-box="${path}"><legend>${title} ` +
      `(sum <span class="group-sum">${groupSumLabel(group)}</span>)</legend>${rows}</fieldset>`
    );
  }
}
