import type { PlanResponse, RecipeSummary } from "../src/types.js";

export function recipe(
  id: string,
  roles: string[],
  flags: Partial<Record<"hasNuts" | "hasMeat" | "hasDairy", boolean>> = {},
): RecipeSummary {
  return {
    id,
    name: id.replace(/_/g, " "),
    category: "TREAT",
    roles,
    flags: { hasNuts: false, hasMeat: false, hasDairy: false, ...flags },
  };
}

export const SAMPLE_RECIPES: RecipeSummary[] = [
  recipe("omelette", ["main"], { hasMeat: true, hasDairy: true }),
  recipe("toast", ["main", "side"]),
  recipe("salad", ["side"]),
  recipe("fruit_cup", ["side", "dessert"]),
  recipe("brownie", ["dessert"], { hasNuts: true, hasDairy: true }),
  recipe("juice", ["beverage"]),
];

const DAY: Array<{ meal: string; recipe_ids: string[] }> = [
  { meal: "breakfast", recipe_ids: ["omelette", "juice"] },
  { meal: "lunch", recipe_ids: ["toast", "salad", "juice"] },
  { meal: "dinner", recipe_ids: ["omelette", "salad", "brownie", "juice"] },
];

export function samplePlan(horizon: number, algorithm: "random" | "sequential" | "bandit" = "bandit"): PlanResponse {
  return {
    plan_id: "plan-1",
    algorithm,
    horizon,
    seed: 7,
    plan: {
      user_id: "alice",
      horizon,
      days: Array.from({ length: horizon }, () => DAY.map((m) => ({ ...m, recipe_ids: [...m.recipe_ids] }))),
    },
    scores: {
      per_meal: Array.from({ length: horizon * 3 }, (_v, i) => ({
        meal: `day${Math.floor(i / 3)}.${["breakfast", "lunch", "dinner"][i % 3]}`,
        duplicate: 1.0,
        coverage: 0.75,
        constraint: 0.5,
      })),
      dm: 1.0,
      mc: 0.75,
      uc: 0.5,
      combos: { uc_dm: 0.75, uc_mc: 0.625, dm_mc: 0.875, uc_dm_mc: 0.75 },
      G: 0.75,
      role_dup_diag: 0.78,
    },
    ...(algorithm === "bandit" ? { model_version: 1 } : {}),
  };
}

export function recipesMap(): Map<string, RecipeSummary> {
  return new Map(SAMPLE_RECIPES.map((r) => [r.id, r]));
}
