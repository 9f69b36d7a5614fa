// Page bootstrap: builds the preference form from the service's flag list,
// wires the generate/feedback controls, and keeps everything reload-free.

import { Client } from "./api.js";
import {
  renderBanner,
  renderFieldErrors,
  renderPlanGrid,
  renderScorePanel,
  renderStatusLine,
} from "./render.js";
import { Session } from "./state.js";
import type { Preference } from "./types.js";
import { HORIZON_MAX, HORIZON_MIN, defaultFormState, PreferenceFormState } from "./validate.js";

function apiBase(): string {
  const params = new URLSearchParams(window.location.search);
  return params.get("api") ?? window.location.origin;
}

const TRI_STATE: Array<{ value: Preference; label: string }> = [
  { value: -1, label: "avoid" },
  { value: 0, label: "neutral" },
  { value: 1, label: "prefer" },
];

function buildForm(root: HTMLElement, session: Session, form: PreferenceFormState): void {
  const doc = root.ownerDocument;
  root.replaceChildren();

  const idRow = doc.createElement("label");
  idRow.dataset.field = "userId";
  idRow.textContent = "user id ";
  const idInput = doc.createElement("input");
  idInput.name = "userId";
  idInput.value = form.userId;
  idInput.addEventListener("input", () => (form.userId = idInput.value));
  idRow.append(idInput);
  root.append(idRow);

  for (const flag of Object.keys(form.prefs)) {
    const row = doc.createElement("fieldset");
    row.dataset.field = `prefs.${flag}`;
    row.className = "tri-state";
    const legend = doc.createElement("legend");
    legend.textContent = flag;
    row.append(legend);
    for (const { value, label } of TRI_STATE) {
      const lab = doc.createElement("label");
      const radio = doc.createElement("input");
      radio.type = "radio";
      radio.name = `pref-${flag}`;
      radio.value = String(value);
      radio.checked = form.prefs[flag] === value;
      radio.addEventListener("change", () => {
        form.prefs[flag] = value;
      });
      lab.append(radio, doc.createTextNode(label));
      row.append(lab);
    }
    root.append(row);
  }

  for (const role of Object.keys(form.roleWeights)) {
    const row = doc.createElement("label");
    row.dataset.field = `roleWeights.${role}`;
    row.textContent = `${role} weight `;
    const slider = doc.createElement("input");
    slider.type = "range";
    slider.min = "0";
    slider.max = "2";
    slider.step = "0.1";
    slider.value = String(form.roleWeights[role]);
    slider.addEventListener("input", () => {
      form.roleWeights[role] = Number(slider.value);
    });
    row.append(slider);
    root.append(row);
  }

  const horizonRow = doc.createElement("label");
  horizonRow.dataset.field = "horizon";
  horizonRow.textContent = "days ";
  const horizon = doc.createElement("select");
  for (let d = HORIZON_MIN; d <= HORIZON_MAX; d += 1) {
    const opt = doc.createElement("option");
    opt.value = String(d);
    opt.textContent = String(d);
    opt.selected = d === form.horizon;
    horizon.append(opt);
  }
  horizon.addEventListener("change", () => (form.horizon = Number(horizon.value)));
  horizonRow.append(horizon);
  root.append(horizonRow);

  const algoRow = doc.createElement("label");
  algoRow.dataset.field = "algorithm";
  algoRow.textContent = "algorithm ";
  const algo = doc.createElement("select");
  for (const kind of session.defaults?.algorithms ?? ["random", "sequential", "bandit"]) {
    const opt = doc.createElement("option");
    opt.value = kind;
    opt.textContent = kind;
    opt.selected = kind === form.algorithm;
    algo.append(opt);
  }
  algo.addEventListener("change", () => (form.algorithm = algo.value as typeof form.algorithm));
  algoRow.append(algo);
  root.append(algoRow);

  const penalizeRow = doc.createElement("label");
  penalizeRow.dataset.field = "penalizeMissingPositive";
  const penalize = doc.createElement("input");
  penalize.type = "checkbox";
  penalize.checked = form.penalizeMissingPositive;
  penalize.addEventListener("change", () => (form.penalizeMissingPositive = penalize.checked));
  penalizeRow.append(penalize, doc.createTextNode(" penalize missing preferred ingredients"));
  root.append(penalizeRow);
}

export async function boot(doc: Document): Promise<void> {
  const client = new Client(apiBase());
  const session = new Session(client);
  await session.init();

  const formRoot = doc.getElementById("preference-form")!;
  const planRoot = doc.getElementById("plan-grid")!;
  const scoreRoot = doc.getElementById("score-panel")!;
  const bannerRoot = doc.getElementById("banner")!;
  const statusRoot = doc.getElementById("status-line")!;
  const saveBtn = doc.getElementById("save-profile") as HTMLButtonElement;
  const generateBtn = doc.getElementById("generate-plan") as HTMLButtonElement;
  const feedbackBtn = doc.getElementById("send-feedback") as HTMLButtonElement;

  const form = defaultFormState(
    session.defaults?.flags ?? [],
    session.defaults?.roles ?? [],
  );
  buildForm(formRoot, session, form);

  const redraw = () => {
    renderBanner(bannerRoot, session.banner);
    renderStatusLine(statusRoot, session);
    generateBtn.disabled = session.planRequestInFlight;
    feedbackBtn.disabled = !session.canSendFeedback();
    if (session.plan) {
      renderPlanGrid(planRoot, session.plan, session.recipes, {
        feedbackEnabled: session.feedbackEnabled(),
        selections: session.selections,
        onToggle: (day, meal, slot, accept) => session.toggleSelection(day, meal, slot, accept),
      });
      renderScorePanel(scoreRoot, session.plan.scores);
    }
  };
  session.subscribe(redraw);

  saveBtn.addEventListener("click", async () => {
    const errors = await session.submitProfile(form);
    renderFieldErrors(formRoot, errors);
  });

  generateBtn.addEventListener("click", async () => {
    const errors = await session.submitProfile(form);
    renderFieldErrors(formRoot, errors);
    if (Object.keys(errors).length === 0) {
      await session.requestPlan(form);
    }
  });

  feedbackBtn.addEventListener("click", async () => {
    const sent = await session.sendFeedback();
    if (sent) {
      await session.requestPlan(form); // regenerate with learning
    }
  });

  redraw();
}

if (typeof window !== "undefined" && typeof document !== "undefined") {
  window.addEventListener("DOMContentLoaded", () => {
    void boot(document);
  });
}
