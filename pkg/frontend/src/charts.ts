/** SVG line charts with branch overlays.
 *
 * Geometry (scaling to pixels) is the only arithmetic here; the plotted
 * values are carried verbatim from the series payload and exposed on
 * each polyline as data-values for end-to-end traceability. */

import {
  BranchView,
  INDICATOR_KEYS,
  INDICATOR_LABELS,
  IndicatorKey,
} from "./state";

const SVG_NS = "http://www.w3.org/2000/svg";
const WIDTH = 320;
const HEIGHT = 150;
const PAD = 8;

function svgEl<K extends keyof SVGElementTagNameMap>(
  tag: K,
): SVGElementTagNameMap[K] {
  return document.createElementNS(SVG_NS, tag);
}

function scale(
  lo: number,
  hi: number,
  outLo: number,
  outHi: number,
): (v: number) => number {
  const span = hi - lo;
  if (span === 0) {
    return () => (outLo + outHi) / 2;
  }
  return (v: number) => outLo + ((v - lo) / span) * (outHi - outLo);
}

function extent(branches: BranchView[], pick: (b: BranchView) => number[]) {
  let lo = Infinity;
  let hi = -Infinity;
  for (const branch of branches) {
    for (const v of pick(branch)) {
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
  }
  if (lo === Infinity) {
    lo = 0;
    hi = 1;
  }
  return { lo, hi };
}

function lineChart(key: IndicatorKey, branches: BranchView[]): SVGSVGElement {
  const svg = svgEl("svg");
  svg.setAttribute("viewBox", `0 0 ${WIDTH} ${HEIGHT}`);
  svg.setAttribute("class", "chart");
  svg.dataset.indicator = key;

  const x = extent(branches, (b) => b.series.steps);
  const y = extent(branches, (b) => b.series[key]);
  const sx = scale(x.lo, x.hi, PAD, WIDTH - PAD);
  const sy = scale(y.lo, y.hi, HEIGHT - PAD, PAD);

  for (const branch of branches) {
    const values = branch.series[key];
    const steps = branch.series.steps;
    const line = svgEl("polyline");
    line.setAttribute("fill", "none");
    line.setAttribute("stroke", branch.color);
    line.setAttribute("stroke-width", "1.6");
    line.setAttribute(
      "points",
      steps.map((s, i) => `${sx(s)},${sy(values[i])}`).join(" "),
    );
    line.dataset.branch = branch.session.id;
    line.dataset.values = JSON.stringify(values);
    svg.appendChild(line);
  }
  return svg;
}

function actionsChart(branches: BranchView[]): SVGSVGElement {
  const svg = svgEl("svg");
  svg.setAttribute("viewBox", `0 0 ${WIDTH} ${HEIGHT}`);
  svg.setAttribute("class", "chart");
  svg.dataset.indicator = "actions";

  const x = extent(branches, (b) => b.series.steps);
  let maxMag = 1;
  for (const branch of branches) {
    for (const actions of branch.series.actions) {
      for (const a of actions) {
        if (a.magnitude > maxMag) maxMag = a.magnitude;
      }
    }
  }
  const sx = scale(x.lo, x.hi, PAD, WIDTH - PAD);
  const sy = scale(0, maxMag, HEIGHT - PAD, PAD);

  for (const branch of branches) {
    branch.series.actions.forEach((actions, i) => {
      for (const action of actions) {
        const dot = svgEl("circle");
        dot.setAttribute("cx", String(sx(branch.series.steps[i])));
        dot.setAttribute("cy", String(sy(action.magnitude)));
        dot.setAttribute("r", "3.5");
        dot.setAttribute("fill", branch.color);
        dot.dataset.branch = branch.session.id;
        dot.dataset.kind = action.kind;
        dot.dataset.magnitude = String(action.magnitude);
        svg.appendChild(dot);
      }
    });
  }
  return svg;
}

/** Rebuild all six panels (five indicator lines plus agent actions). */
export function renderCharts(container: HTMLElement, branches: BranchView[]): void {
  container.textContent = "";
  for (const key of INDICATOR_KEYS) {
    const panel = document.createElement("div");
    panel.className = "panel";
    const title = document.createElement("h3");
    title.textContent = INDICATOR_LABELS[key];
    panel.appendChild(title);
    panel.appendChild(lineChart(key, branches));
    container.appendChild(panel);
  }
  const panel = document.createElement("div");
  panel.className = "panel";
  const title = document.createElement("h3");
  title.textContent = "Agent actions";
  panel.appendChild(title);
  panel.appendChild(actionsChart(branches));
  container.appendChild(panel);
}

/** Latest-value readout: exact payload numbers, one row per branch. */
export function renderReadout(container: HTMLElement, branches: BranchView[]): void {
  container.textContent = "";
  for (const branch of branches) {
    const row = document.createElement("div");
    row.className = "readout-row";
    row.dataset.branch = branch.session.id;
    const name = document.createElement("span");
    name.className = "readout-label";
    name.style.color = branch.color;
    name.textContent = branch.label;
    row.appendChild(name);
    const n = branch.series.steps.length;
    for (const key of INDICATOR_KEYS) {
      const cell = document.createElement("span");
      cell.className = "readout-value";
      cell.dataset.indicator = key;
      cell.textContent = n === 0 ? "-" : String(branch.series[key][n - 1]);
      row.appendChild(cell);
    }
    container.appendChild(row);
  }
}
