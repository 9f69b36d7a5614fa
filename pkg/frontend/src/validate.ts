// Client-side mirror of the profile invariants, so obvious mistakes surface
// inline before any network call. The service remains the authority.

import type { Algorithm, GoodnessWeights, Preference, ProfileBody } from "./types.js";

export interface PreferenceFormState {
  userId: string;
  prefs: Record<string, Preference>;
  roleWeights: Record<string, number>;
  goodnessWeights: GoodnessWeights;
  horizon: number;
  algorithm: Algorithm;
  penalizeMissingPositive: boolean;
}

export const HORIZON_MIN = 1;
export const HORIZON_MAX = 5;

export function defaultFormState(flags: string[], roles: string[]): PreferenceFormState {
  const prefs: Record<string, Preference> = {};
  for (const flag of flags) prefs[flag] = 0;
  const roleWeights: Record<string, number> = {};
  for (const role of roles) roleWeights[role] = 1.0;
  return {
    userId: "",
    prefs,
    roleWeights,
    goodnessWeights: { dm: 1 / 3, mc: 1 / 3, uc: 1 / 3 },
    horizon: 3,
    algorithm: "bandit",
    penalizeMissingPositive: false,
  };
}

export type FieldErrors = Record<string, string>;

export function validateForm(form: PreferenceFormState): FieldErrors {
  const errors: FieldErrors = {};
  if (!form.userId.trim()) {
    errors.userId = "user id is required";
  }
  for (const [flag, value] of Object.entries(form.prefs)) {
    if (value !== -1 && value !== 0 && value !== 1) {
      errors[`prefs.${flag}`] = "preference must be avoid, neutral, or prefer";
    }
  }
  for (const [role, weight] of Object.entries(form.roleWeights)) {
    if (!Number.isFinite(weight) || weight < 0) {
      errors[`roleWeights.${role}`] = "role weight must be a non-negative number";
    }
  }
  const { dm, mc, uc } = form.goodnessWeights;
  for (const [name, w] of Object.entries({ dm, mc, uc })) {
    if (!Number.isFinite(w) || w < 0) {
      errors[`goodnessWeights.${name}`] = "weight must be a non-negative number";
    }
  }
  if (!errors["goodnessWeights.dm"] && !errors["goodnessWeights.mc"] && !errors["goodnessWeights.uc"]) {
    if (Math.abs(dm + mc + uc - 1.0) > 1e-9) {
      errors.goodnessWeights = "goodness weights must sum to 1";
    }
  }
  if (!Number.isInteger(form.horizon) || form.horizon < HORIZON_MIN || form.horizon > HORIZON_MAX) {
    errors.horizon = `horizon must be a whole number of days between ${HORIZON_MIN} and ${HORIZON_MAX}`;
  }
  return errors;
}

export function profileBody(form: PreferenceFormState): ProfileBody {
  return {
    prefs: { ...form.prefs },
    role_weights: { ...form.roleWeights },
    goodness_weights: { ...form.goodnessWeights },
    penalize_missing_positive: form.penalizeMissingPositive,
  };
}

/** Maps a service-side validation message onto the field it talks about. */
export function fieldForServerMessage(message: string, flags: string[]): string | null {
  for (const flag of flags) {
    if (message.includes(flag)) return `prefs.${flag}`;
  }
  if (message.includes("sum to 1")) return "goodnessWeights";
  if (message.includes("role weight")) return "roleWeights";
  if (message.includes("user_id")) return "userId";
  return null;
}
