/** Intervention form generated from the session's taxonomy.
 *
 * Sector and agent options come from scenario metadata, never from
 * hardcoded lists; the add button stays disabled until the magnitude is
 * a number >= 0 and both target selections are non-empty. */

import type { Intervention, InterventionKind, TaxonomyInfo } from "./types";
import { INTERVENTION_KINDS } from "./types";

export interface InterventionForm {
  root: HTMLElement;
  /** Currently valid form contents, or null when incomplete. */
  read(): Intervention | null;
  reset(): void;
}

function multiSelect(name: string, labels: string[]): HTMLSelectElement {
  const select = document.createElement("select");
  select.multiple = true;
  select.name = name;
  select.size = Math.min(labels.length, 4);
  for (const label of labels) {
    const option = document.createElement("option");
    option.value = label;
    option.textContent = label;
    select.appendChild(option);
  }
  return select;
}

function selected(select: HTMLSelectElement): string[] {
  return Array.from(select.selectedOptions).map((o) => o.value);
}

export function buildInterventionForm(
  taxonomy: TaxonomyInfo,
  onAdd: (intervention: Intervention) => void,
): InterventionForm {
  const root = document.createElement("form");
  root.className = "intervention-form";

  const kind = document.createElement("select");
  kind.name = "kind";
  for (const k of INTERVENTION_KINDS) {
    const option = document.createElement("option");
    option.value = k;
    option.textContent = k.replace("_", " ");
    kind.appendChild(option);
  }

  const magnitude = document.createElement("input");
  magnitude.type = "number";
  magnitude.name = "magnitude";
  magnitude.min = "0";
  magnitude.step = "any";
  magnitude.placeholder = "magnitude";

  const sectors = multiSelect("sectors", taxonomy.sectors);
  const agents = multiSelect("agents", taxonomy.agents);

  const add = document.createElement("button");
  add.type = "submit";
  add.textContent = "add intervention";
  add.disabled = true;

  const read = (): Intervention | null => {
    const mag = Number(magnitude.value);
    if (magnitude.value === "" || !Number.isFinite(mag) || mag < 0) {
      return null;
    }
    const pickedSectors = selected(sectors);
    const pickedAgents = selected(agents);
    if (pickedSectors.length === 0 || pickedAgents.length === 0) {
      return null;
    }
    return {
      kind: kind.value as InterventionKind,
      magnitude: mag,
      sectors: pickedSectors,
      agents: pickedAgents,
    };
  };

  const refresh = () => {
    add.disabled = read() === null;
  };
  for (const el of [kind, magnitude, sectors, agents]) {
    el.addEventListener("change", refresh);
    el.addEventListener("input", refresh);
  }

  root.addEventListener("submit", (event) => {
    event.preventDefault();
    const intervention = read();
    if (intervention !== null) {
      onAdd(intervention);
    }
  });

  const label = (text: string, el: HTMLElement) => {
    const wrap = document.createElement("label");
    wrap.textContent = text;
    wrap.appendChild(el);
    return wrap;
  };
  root.appendChild(label("kind", kind));
  root.appendChild(label("magnitude", magnitude));
  root.appendChild(label("sectors", sectors));
  root.appendChild(label("agents", agents));
  root.appendChild(add);

  return {
    root,
    read,
    reset() {
      magnitude.value = "";
      for (const option of sectors.options) option.selected = false;
      for (const option of agents.options) option.selected = false;
      refresh();
    },
  };
}
