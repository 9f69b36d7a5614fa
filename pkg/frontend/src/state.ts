// Session controller for the what-if loop: edit preferences, generate plans,
// mark slot feedback, regenerate with learning. At most one plan request is
// in flight; extra clicks while waiting are rejected, not queued.

import { ApiError, Client } from "./api.js";
import type { PlanResponse, RecipeSummary, ServiceDefaults, SlotRef } from "./types.js";
import {
  FieldErrors,
  PreferenceFormState,
  fieldForServerMessage,
  profileBody,
  validateForm,
} from "./validate.js";

export type SessionListener = () => void;

export class Session {
  defaults: ServiceDefaults | null = null;
  recipes = new Map<string, RecipeSummary>();
  profileVersion: number | null = null;
  modelVersion: number | null = null;
  plan: PlanResponse | null = null;
  selections = new Map<string, boolean>(); // "day/meal/slot" -> accept
  planRequestInFlight = false;
  banner: string | null = null;

  private listeners: SessionListener[] = [];

  constructor(readonly client: Client) {}

  subscribe(listener: SessionListener): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }

  async init(): Promise<void> {
    this.defaults = await this.client.defaults();
    for (const recipe of await this.client.recipes()) {
      this.recipes.set(recipe.id, recipe);
    }
    this.notify();
  }

  /** Validates locally first; only a clean form reaches the network. */
  async submitProfile(form: PreferenceFormState): Promise<FieldErrors> {
    const errors = validateForm(form);
    if (Object.keys(errors).length > 0) {
      return errors;
    }
    try {
      const response = await this.client.putProfile(form.userId.trim(), profileBody(form));
      this.profileVersion = response.version;
      this.banner = null;
      this.notify();
      return {};
    } catch (err) {
      if (err instanceof ApiError && err.status === 400) {
        const field = fieldForServerMessage(err.message, this.defaults?.flags ?? []);
        return { [field ?? "form"]: err.message };
      }
      throw err;
    }
  }

  async requestPlan(form: PreferenceFormState, seed?: number): Promise<PlanResponse | null> {
    if (this.planRequestInFlight) {
      return null; // one in-flight request at a time
    }
    this.planRequestInFlight = true;
    this.banner = null;
    this.notify();
    try {
      const plan = await this.client.requestPlan({
        user_id: form.userId.trim(),
        horizon: form.horizon,
        algorithm: form.algorithm,
        ...(seed !== undefined ? { seed } : {}),
      });
      this.plan = plan;
      if (plan.model_version !== undefined) {
        this.modelVersion = plan.model_version;
      }
      this.selections.clear();
      return plan;
    } catch (err) {
      if (err instanceof ApiError) {
        this.banner = `${err.code}: ${err.message}`;
        return null;
      }
      throw err;
    } finally {
      this.planRequestInFlight = false;
      this.notify();
    }
  }

  feedbackEnabled(): boolean {
    return this.plan?.algorithm === "bandit";
  }

  static slotKey(day: number, meal: string, slot: number): string {
    return `${day}/${meal}/${slot}`;
  }

  toggleSelection(day: number, meal: string, slot: number, accept: boolean): void {
    if (!this.feedbackEnabled()) return;
    const key = Session.slotKey(day, meal, slot);
    const current = this.selections.get(key);
    if (current === accept) {
      this.selections.delete(key); // clicking the active choice clears it
    } else {
      this.selections.set(key, accept);
    }
    this.notify();
  }

  selectionRefs(): SlotRef[] {
    const refs: SlotRef[] = [];
    for (const [key, accept] of this.selections) {
      const [day, meal, slot] = key.split("/");
      refs.push({ day: Number(day), meal, slot: Number(slot), accept });
    }
    refs.sort((a, b) => a.day - b.day || a.meal.localeCompare(b.meal) || a.slot - b.slot);
    return refs;
  }

  canSendFeedback(): boolean {
    return this.feedbackEnabled() && this.selections.size > 0 && !this.planRequestInFlight;
  }

  async sendFeedback(): Promise<boolean> {
    if (!this.plan || !this.canSendFeedback()) {
      return false;
    }
    try {
      const response = await this.client.sendFeedback(this.plan.plan_id, this.selectionRefs());
      this.modelVersion = response.model_version;
      this.selections.clear();
      this.banner = null;
      this.notify();
      return true;
    } catch (err) {
      if (err instanceof ApiError) {
        // e.g. stale plan id after a service restart
        this.banner = `${err.code}: ${err.message}; regenerate the plan and retry`;
        this.notify();
        return false;
      }
      throw err;
    }
  }

  /** Count of slots in the current plan holding a recipe with the flag set. */
  flaggedSlotCount(flag: string): number {
    if (!this.plan) return 0;
    let count = 0;
    for (const day of this.plan.plan.days) {
      for (const meal of day) {
        for (const rid of meal.recipe_ids) {
          if (this.recipes.get(rid)?.flags[flag]) count += 1;
        }
      }
    }
    return count;
  }
}
