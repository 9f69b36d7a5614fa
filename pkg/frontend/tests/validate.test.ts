import { describe, expect, it } from "vitest";

import {
  defaultFormState,
  fieldForServerMessage,
  profileBody,
  validateForm,
} from "../src/validate.js";

const FLAGS = ["hasNuts", "hasMeat", "hasDairy"];
const ROLES = ["main", "side", "dessert", "beverage"];

function filledForm() {
  const form = defaultFormState(FLAGS, ROLES);
  form.userId = "alice";
  return form;
}

describe("defaultFormState", () => {
  it("starts neutral on every flag with unit role weights", () => {
    const form = defaultFormState(FLAGS, ROLES);
    expect(Object.values(form.prefs)).toEqual([0, 0, 0]);
    expect(Object.values(form.roleWeights)).toEqual([1, 1, 1, 1]);
    expect(form.horizon).toBeGreaterThanOrEqual(1);
    expect(form.horizon).toBeLessThanOrEqual(5);
  });
});

describe("validateForm", () => {
  it("accepts a complete form", () => {
    expect(validateForm(filledForm())).toEqual({});
  });

  it("requires a user id", () => {
    const form = filledForm();
    form.userId = "   ";
    expect(validateForm(form)).toHaveProperty("userId");
  });

  it("rejects weights that do not sum to one before any network call", () => {
    const form = filledForm();
    form.goodnessWeights = { dm: 0.5, mc: 0.5, uc: 0.5 };
    const errors = validateForm(form);
    expect(errors.goodnessWeights).toMatch(/sum to 1/);
  });

  it("rejects negative role weights", () => {
    const form = filledForm();
    form.roleWeights.side = -0.5;
    expect(validateForm(form)).toHaveProperty("roleWeights.side");
  });

  it("rejects horizons outside 1..5", () => {
    for (const horizon of [0, 6, 2.5]) {
      const form = filledForm();
      form.horizon = horizon;
      expect(validateForm(form), String(horizon)).toHaveProperty("horizon");
    }
  });

  it("rejects out-of-domain preference values", () => {
    const form = filledForm();
    // values outside the tri-state can only arrive through bad wiring
    (form.prefs as Record<string, number>).hasNuts = 2;
    expect(validateForm(form)).toHaveProperty("prefs.hasNuts");
  });
});

describe("profileBody", () => {
  it("serializes the form into the service profile shape", () => {
    const form = filledForm();
    form.prefs.hasMeat = -1;
    form.penalizeMissingPositive = true;
    const body = profileBody(form);
    expect(body.prefs).toEqual({ hasNuts: 0, hasMeat: -1, hasDairy: 0 });
    expect(body.penalize_missing_positive).toBe(true);
    expect(body.role_weights).toEqual({ main: 1, side: 1, dessert: 1, beverage: 1 });
    const w = body.goodness_weights!;
    expect(w.dm + w.mc + w.uc).toBeCloseTo(1, 9);
  });
});

describe("fieldForServerMessage", () => {
  it("maps flag mentions to the tri-state field", () => {
    expect(fieldForServerMessage("preference for hasNuts must be -1, 0, or +1", FLAGS)).toBe(
      "prefs.hasNuts",
    );
  });

  it("maps weight-sum errors to the weights field", () => {
    expect(fieldForServerMessage("goodness_weights must sum to 1", FLAGS)).toBe("goodnessWeights");
  });

  it("returns null for unknown messages", () => {
    expect(fieldForServerMessage("teapot detected", FLAGS)).toBeNull();
  });
});
