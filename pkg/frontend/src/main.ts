// DOM wiring: config form -> one gamble card at a time -> curve screen.
// All numbers come from the service; this file only renders them.

import { SessionApi } from "./api.js";
import { curveSvg } from "./chart.js";
import { SessionFlow, type FlowState } from "./flow.js";
import { formatChance, gambleOnLeft } from "./format.js";
import type { FitMethod, Gamble, UtilityPointWire } from "./types.js";

const DEFAULT_C = "0.5, 0.6, 0.7, 0.8, 0.9";
const DEFAULT_P = "0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95";

const app = document.getElementById("app");
if (!app) {
  throw new Error("missing #app container");
}
const root: HTMLElement = app;

const api = new SessionApi(`${window.location.protocol}//${window.location.hostname}:8765`);
const flow = new SessionFlow(api);
let method: FitMethod = "mle";
let curve: UtilityPointWire[] = [];

function parseGrid(text: string): number[] {
  return text
    .split(",")
    .map((part) => Number(part.trim()))
    .filter((v) => !Number.isNaN(v));
}

function el(html: string): HTMLElement {
  const template = document.createElement("template");
  template.innerHTML = html.trim();
  return template.content.firstElementChild as HTMLElement;
}

function renderConfig(): void {
  root.replaceChildren(
    el(`
      <section class="card config">
        <h1>Value a chance</h1>
        <p>You will face a series of either/or questions: keep a sure chance,
           or take a gamble on a better one.</p>
        <label>Sure-chance grid <input id="c-grid" value="${DEFAULT_C}"></label>
        <label>Gamble-chance grid <input id="p-grid" value="${DEFAULT_P}"></label>
        <label>Seed <input id="seed" type="number" value="0"></label>
        <button id="start">Start session</button>
        <p class="error" id="config-error"></p>
      </section>
    `),
  );
  const button = root.querySelector("#start") as HTMLButtonElement;
  button.addEventListener("click", () => {
    const cGrid = parseGrid((root.querySelector("#c-grid") as HTMLInputElement).value);
    const pGrid = parseGrid((root.querySelector("#p-grid") as HTMLInputElement).value);
    const seed = Number((root.querySelector("#seed") as HTMLInputElement).value) || 0;
    flow
      .start({ c_grid: cGrid, p_grid: pGrid, mode: "end_point", seed })
      .then(() => {
        if (flow.id) window.location.hash = flow.id;
      })
      .catch((error) => {
        (root.querySelector("#config-error") as HTMLElement).textContent = String(error);
      });
  });
}

function optionButton(id: string, label: string, sublabel: string): string {
  return `
    <button class="option" id="${id}">
      <span class="label">${label}</span>
      <span class="sublabel">${sublabel}</span>
    </button>`;
}

function renderGamble(gamble: Gamble, answered: number, total: number, busy: boolean): void {
  const sure = optionButton(
    "pick-sure",
    `${formatChance(gamble.c)} for sure`,
    "keep the certain chance",
  );
  const risky = optionButton(
    "pick-gamble",
    `${formatChance(gamble.p)} shot at ${formatChance(gamble.prize_hi)}`,
    `otherwise ${formatChance(gamble.prize_lo)}`,
  );
  const [left, right] = gambleOnLeft(gamble.id) ? [risky, sure] : [sure, risky];
  root.replaceChildren(
    el(`
      <section class="card question" data-gamble="${gamble.id}">
        <progress max="${total}" value="${answered}"></progress>
        <p class="counter">${answered} of ${total} answered</p>
        <h2>Which do you prefer?</h2>
        <div class="options">${left}${right}</div>
      </section>
    `),
  );
  const sureBtn = root.querySelector("#pick-sure") as HTMLButtonElement;
  const gambleBtn = root.querySelector("#pick-gamble") as HTMLButtonElement;
  sureBtn.disabled = busy;
  gambleBtn.disabled = busy;
  sureBtn.addEventListener("click", () => void flow.answer(0));
  gambleBtn.addEventListener("click", () => void flow.answer(1));
}

function renderComplete(points: UtilityPointWire[]): void {
  curve = points;
  root.replaceChildren(
    el(`
      <section class="card done">
        <h2>Session complete</h2>
        <div class="toggle">
          <button id="show-mle" ${method === "mle" ? "disabled" : ""}>maximum likelihood</button>
          <button id="show-bayes" ${method === "bayes" ? "disabled" : ""}>Bayes</button>
        </div>
        <div id="chart">${curveSvg(curve)}</div>
        <ul class="points">
          ${curve
            .map(
              (pt) =>
                `<li>U(${formatChance(pt.c)}) = ${formatChance(pt.u)} &mdash; ${pt.disposition}</li>`,
            )
            .join("")}
        </ul>
      </section>
    `),
  );
  for (const pick of ["mle", "bayes"] as const) {
    (root.querySelector(`#show-${pick}`) as HTMLButtonElement).addEventListener("click", () => {
      method = pick;
      void flow.curve(pick).then(renderComplete);
    });
  }
}

function renderFailed(message: string, canRetry: boolean): void {
  root.replaceChildren(
    el(`
      <section class="card failed">
        <h2>Connection trouble</h2>
        <p class="error">${message}</p>
        ${canRetry ? '<button id="retry">Retry answer</button>' : ""}
      </section>
    `),
  );
  const retry = root.querySelector("#retry");
  if (retry) retry.addEventListener("click", () => void flow.retry());
}

function render(state: FlowState): void {
  switch (state.phase) {
    case "idle":
      renderConfig();
      break;
    case "asking":
      renderGamble(state.gamble, state.progress.answered, state.progress.total, false);
      break;
    case "submitting":
      renderGamble(state.gamble, state.progress.answered, state.progress.total, true);
      break;
    case "complete":
      renderComplete(state.curve);
      break;
    case "failed":
      renderFailed(state.message, state.pending !== null);
      break;
  }
}

flow.onChange(render);

const resumeId = window.location.hash.slice(1);
if (resumeId) {
  flow.resume(resumeId).catch(() => renderConfig());
} else {
  renderConfig();
}
