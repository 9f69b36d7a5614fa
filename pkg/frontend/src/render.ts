// DOM rendering. Pure functions of (container, data): each call replaces the
// container's children, which keeps the what-if loop reload-free.

import { Session } from "./state.js";
import type { PlanResponse, RecipeSummary, ScoreReportBody } from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

const score = (value: number): string => value.toFixed(3);

export function renderScorePanel(container: HTMLElement, scores: ScoreReportBody): void {
  const doc = container.ownerDocument;
  container.replaceChildren();
  const panel = el(doc, "div", "score-panel");

  const headline = el(doc, "dl", "score-headline");
  const entries: Array<[string, number]> = [
    ["dm", scores.dm],
    ["mc", scores.mc],
    ["uc", scores.uc],
    ["G", scores.G],
  ];
  for (const [label, value] of entries) {
    const dt = el(doc, "dt", undefined, label);
    const dd = el(doc, "dd", "score-value", score(value));
    headline.append(dt, dd);
  }
  panel.append(headline);

  const combos = el(doc, "ul", "score-combos");
  for (const [name, value] of Object.entries(scores.combos)) {
    combos.append(el(doc, "li", "score-value", `${name}: ${score(value)}`));
  }
  panel.append(combos);

  const perMeal = el(doc, "details", "per-meal");
  perMeal.append(el(doc, "summary", undefined, "per-meal breakdown"));
  const table = el(doc, "table");
  const head = el(doc, "tr");
  for (const caption of ["meal", "duplicate", "coverage", "constraint"]) {
    head.append(el(doc, "th", undefined, caption));
  }
  table.append(head);
  for (const row of scores.per_meal) {
    const tr = el(doc, "tr");
    tr.append(el(doc, "td", undefined, row.meal));
    for (const value of [row.duplicate, row.coverage, row.constraint]) {
      tr.append(el(doc, "td", "score-value", score(value)));
    }
    table.append(tr);
  }
  perMeal.append(table);
  panel.append(perMeal);
  container.append(panel);
}

export interface PlanGridOptions {
  feedbackEnabled: boolean;
  selections: Map<string, boolean>;
  onToggle?: (day: number, meal: string, slot: number, accept: boolean) => void;
}

export function renderPlanGrid(
  container: HTMLElement,
  plan: PlanResponse,
  recipes: Map<string, RecipeSummary>,
  options: PlanGridOptions,
): void {
  const doc = container.ownerDocument;
  container.replaceChildren();
  plan.plan.days.forEach((day, dayIndex) => {
    const dayBox = el(doc, "section", "day");
    dayBox.append(el(doc, "h3", undefined, `day ${dayIndex + 1}`));
    for (const meal of day) {
      const mealBox = el(doc, "div", "meal");
      mealBox.append(el(doc, "h4", undefined, meal.meal));
      meal.recipe_ids.forEach((rid, slotIndex) => {
        const recipe = recipes.get(rid);
        const cell = el(doc, "div", "slot-cell");
        cell.dataset.day = String(dayIndex);
        cell.dataset.meal = meal.meal;
        cell.dataset.slot = String(slotIndex);
        cell.dataset.recipeId = rid;
        cell.append(el(doc, "span", "recipe-name", recipe?.name ?? rid));
        if (recipe) {
          for (const role of recipe.roles) {
            cell.append(el(doc, "span", "badge role-badge", role));
          }
          for (const [flag, on] of Object.entries(recipe.flags)) {
            if (on) cell.append(el(doc, "span", "badge flag-badge", flag));
          }
        }
        if (options.feedbackEnabled) {
          const key = Session.slotKey(dayIndex, meal.meal, slotIndex);
          const chosen = options.selections.get(key);
          for (const accept of [true, false]) {
            const btn = el(
              doc,
              "button",
              `feedback-btn ${accept ? "accept" : "reject"}${chosen === accept ? " active" : ""}`,
              accept ? "accept" : "reject",
            );
            btn.type = "button";
            btn.addEventListener("click", () =>
              options.onToggle?.(dayIndex, meal.meal, slotIndex, accept),
            );
            cell.append(btn);
          }
        }
        mealBox.append(cell);
      });
      dayBox.append(mealBox);
    }
    container.append(dayBox);
  });
}

export function renderBanner(container: HTMLElement, message: string | null): void {
  container.replaceChildren();
  if (message === null) {
    container.classList.add("hidden");
    return;
  }
  container.classList.remove("hidden");
  container.append(el(container.ownerDocument, "span", "banner-text", message));
}

export function renderStatusLine(
  container: HTMLElement,
  session: Session,
): void {
  const doc = container.ownerDocument;
  container.replaceChildren();
  const bits: string[] = [];
  if (session.profileVersion !== null) bits.push(`profile v${session.profileVersion}`);
  if (session.modelVersion !== null) bits.push(`model v${session.modelVersion}`);
  if (session.plan) bits.push(`plan seed ${session.plan.seed} (${session.plan.algorithm})`);
  container.append(el(doc, "span", "status", bits.join(" · ") || "no profile submitted yet"));
}

export function renderFieldErrors(form: HTMLElement, errors: Record<string, string>): void {
  for (const node of Array.from(form.querySelectorAll(".field-error"))) {
    node.remove();
  }
  const doc = form.ownerDocument;
  for (const [field, message] of Object.entries(errors)) {
    const anchor = form.querySelector<HTMLElement>(`[data-field="${field}"]`);
    const note = el(doc, "span", "field-error", message);
    if (anchor) {
      anchor.append(note);
    } else {
      form.append(note);
    }
  }
}
