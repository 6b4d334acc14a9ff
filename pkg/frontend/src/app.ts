/** Console wiring: one scenario session plus its what-if forks.
 *
 * Every chart and readout value re-renders from the series endpoint
 * after each step; server errors surface in the banner without losing
 * pending interventions; each branch allows one in-flight step at a
 * time (the advance control is disabled while a request runs). */

import { ApiClient, ApiError } from "./api";
import { renderCharts, renderReadout } from "./charts";
import { buildInterventionForm, InterventionForm } from "./form";
import { ConsoleState, forkRangeError, seriesFromFrames } from "./state";
import type { Intervention } from "./types";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export class PolicyConsole {
  readonly state = new ConsoleState();
  private form: InterventionForm | null = null;

  private scenarioPicker = el("select", "scenario-picker");
  private createButton = el("button", "create", "create session");
  private errorBanner = el("div", "error-banner");
  private branchBar = el("div", "branch-bar");
  private forkInput = el("input", "fork-step");
  private forkButton = el("button", "fork", "fork");
  private formSlot = el("div", "form-slot");
  private pendingList = el("ul", "pending-list");
  private advanceButton = el("button", "advance", "advance quarter");
  private readout = el("div", "readout");
  private charts = el("div", "charts");

  constructor(
    private root: HTMLElement,
    private api: ApiClient,
  ) {
    this.forkInput.setAttribute("type", "number");
    this.forkInput.setAttribute("min", "0");
    this.forkInput.setAttribute("placeholder", "fork at step");

    const header = el("div", "header");
    header.appendChild(this.scenarioPicker);
    header.appendChild(this.createButton);
    const forkBox = el("span", "fork-box");
    forkBox.appendChild(this.forkInput);
    forkBox.appendChild(this.forkButton);
    header.appendChild(forkBox);

    const controls = el("div", "controls");
    controls.appendChild(this.formSlot);
    controls.appendChild(this.pendingList);
    controls.appendChild(this.advanceButton);

    for (const node of [
      header,
      this.errorBanner,
      this.branchBar,
      controls,
      this.readout,
      this.charts,
    ]) {
      this.root.appendChild(node);
    }

    this.createButton.addEventListener("click", () => {
      void this.createSession(this.scenarioPicker.value);
    });
    this.advanceButton.addEventListener("click", () => {
      void this.advanceQuarter();
    });
    this.forkButton.addEventListener("click", () => {
      void this.forkAndCompare(Number(this.forkInput.value));
    });
    this.render();
  }

  async init(): Promise<void> {
    try {
      const scenarios = await this.api.listScenarios();
      this.scenarioPicker.textContent = "";
      for (const scenario of scenarios) {
        const option = el("option", undefined, `${scenario.name} (${scenario.steps} steps)`);
        option.value = scenario.name;
        this.scenarioPicker.appendChild(option);
      }
      this.state.error = null;
    } catch (err) {
      this.state.error = describe(err);
    }
    this.render();
  }

  async createSession(scenario: string): Promise<void> {
    try {
      const session = await this.api.createSession(scenario);
      const series = await this.api.series(session.id);
      this.state.clear();
      this.state.addBranch(series.session, seriesFromFrames(series.frames));
      this.mountForm();
      this.state.error = null;
    } catch (err) {
      this.state.error = describe(err);
    }
    this.render();
  }

  /** Advance the active branch one quarter with its pending interventions. */
  async advanceQuarter(): Promise<void> {
    const branch = this.state.active;
    if (!branch || branch.inFlight) return;
    branch.inFlight = true;
    this.render();
    try {
      await this.api.step(branch.session.id, branch.pending);
      const series = await this.api.series(branch.session.id);
      branch.session = series.session;
      branch.series = seriesFromFrames(series.frames);
      branch.pending = [];
      this.state.error = null;
    } catch (err) {
      // Charts and pending interventions stay untouched on failure.
      this.state.error = describe(err);
    } finally {
      branch.inFlight = false;
      this.render();
    }
  }

  /** Fork the active branch at a past step and overlay both series. */
  async forkAndCompare(atStep: number): Promise<void> {
    const branch = this.state.active;
    if (!branch) return;
    const rangeError = forkRangeError(branch, atStep);
    if (rangeError !== null) {
      this.state.error = rangeError;
      this.render();
      return;
    }
    try {
      const child = await this.api.fork(branch.session.id, atStep);
      const series = await this.api.series(child.id);
      this.state.addBranch(series.session, seriesFromFrames(series.frames));
      this.state.error = null;
    } catch (err) {
      this.state.error = describe(err);
    }
    this.render();
  }

  setActiveBranch(index: number): void {
    if (index >= 0 && index < this.state.branches.length) {
      this.state.activeIndex = index;
      this.render();
    }
  }

  addIntervention(intervention: Intervention): void {
    const branch = this.state.active;
    if (!branch) return;
    branch.pending.push(intervention);
    this.form?.reset();
    this.render();
  }

  removeIntervention(index: number): void {
    const branch = this.state.active;
    if (!branch) return;
    branch.pending.splice(index, 1);
    this.render();
  }

  private mountForm(): void {
    const branch = this.state.active;
    this.formSlot.textContent = "";
    this.form = null;
    if (!branch) return;
    this.form = buildInterventionForm(branch.session.taxonomy, (intervention) =>
      this.addIntervention(intervention),
    );
    this.formSlot.appendChild(this.form.root);
  }

  render(): void {
    const branch = this.state.active;

    this.errorBanner.textContent = this.state.error ?? "";
    this.errorBanner.style.display = this.state.error ? "block" : "none";

    this.branchBar.textContent = "";
    this.state.branches.forEach((b, i) => {
      const tab = el("button", "branch-tab", `${b.label} · step ${b.session.step}`);
      tab.dataset.branch = b.session.id;
      tab.style.borderColor = b.color;
      if (i === this.state.activeIndex) tab.classList.add("active");
      tab.addEventListener("click", () => this.setActiveBranch(i));
      this.branchBar.appendChild(tab);
    });

    this.pendingList.textContent = "";
    if (branch) {
      branch.pending.forEach((p, i) => {
        const item = el(
          "li",
          "pending-item",
          `${p.kind} ${p.magnitude} -> sectors [${p.sectors.join(", ")}] agents [${p.agents.join(", ")}]`,
        );
        const remove = el("button", "remove", "x");
        remove.addEventListener("click", () => this.removeIntervention(i));
        item.appendChild(remove);
        this.pendingList.appendChild(item);
      });
    }

    const exhausted = branch !== null && branch.session.step >= branch.session.steps;
    this.advanceButton.disabled = !branch || branch.inFlight || exhausted;
    this.forkButton.disabled = !branch;

    renderReadout(this.readout, this.state.branches);
    renderCharts(this.charts, this.state.branches);
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError) {
    return `${err.code}: ${err.message}`;
  }
  return String(err);
}
