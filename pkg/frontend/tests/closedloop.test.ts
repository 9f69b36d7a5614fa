// @vitest-environment jsdom
//
// Scripted browser session against the real service on the fixture dataset:
// enter an avoid-meat profile, generate a bandit plan, reject every
// meat-flagged slot for five rounds, regenerate, and require strictly fewer
// meat items than round one with every displayed score inside [0, 1].

import { spawn, ChildProcess } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { Client } from "../src/api.js";
import { renderPlanGrid, renderScorePanel } from "../src/render.js";
import { Session } from "../src/state.js";
import { defaultFormState } from "../src/validate.js";

const PORT = 8930 + (process.pid % 53);
const BASE = `http://127.0.0.1:${PORT}`;

let service: ChildProcess | null = null;
let serviceLog = "";

async function waitForHealth(timeoutMs: number): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  let lastError: unknown = null;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${BASE}/health`);
      if (response.ok) return;
    } catch (err) {
      lastError = err;
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  throw new Error(`service did not come up on ${BASE}: ${lastError}\n${serviceLog}`);
}

beforeAll(async () => {
  const dir = mkdtempSync(join(tmpdir(), "mealplan-ui-"));
  const configPath = join(dir, "service.json");
  // few training episodes: round one should still contain meat to reject
  writeFileSync(
    configPath,
    JSON.stringify({
      port: PORT,
      store_dir: join(dir, "store"),
      episodes: 8,
      train_horizon: 5,
    }),
  );
  service = spawn("mealplan", ["serve", "--config", configPath], {
    stdio: ["ignore", "pipe", "pipe"],
  });
  service.stdout?.on("data", (chunk) => (serviceLog += chunk.toString()));
  service.stderr?.on("data", (chunk) => (serviceLog += chunk.toString()));
  await waitForHealth(30_000);
}, 40_000);

afterAll(() => {
  service?.kill("SIGTERM");
});

function displayedScores(root: HTMLElement): number[] {
  return Array.from(root.querySelectorAll(".score-value")).map((node) =>
    Number(node.textContent!.split(": ").pop()),
  );
}

describe("closed feedback loop through the UI", () => {
  it(
    "rejecting meat slots shrinks the meat count and keeps scores in range",
    { timeout: 120_000 },
    async () => {
      const session = new Session(new Client(BASE));
      await session.init();

      const form = defaultFormState(session.defaults!.flags, session.defaults!.roles);
      form.userId = "meat-avoider";
      form.prefs.hasMeat = -1;
      form.horizon = 5;
      form.algorithm = "bandit";

      const errors = await session.submitProfile(form);
      expect(errors).toEqual({});
      expect(session.profileVersion).toBe(1);

      const gridRoot = document.createElement("div");
      const scoreRoot = document.createElement("div");
      document.body.append(gridRoot, scoreRoot);

      const drawAndCheck = () => {
        renderPlanGrid(gridRoot, session.plan!, session.recipes, {
          feedbackEnabled: session.feedbackEnabled(),
          selections: session.selections,
          onToggle: (day, meal, slot, accept) =>
            session.toggleSelection(day, meal, slot, accept),
        });
        renderScorePanel(scoreRoot, session.plan!.scores);
        for (const value of displayedScores(scoreRoot)) {
          expect(value).toBeGreaterThanOrEqual(0);
          expect(value).toBeLessThanOrEqual(1);
        }
      };

      const first = await session.requestPlan(form, 1);
      expect(first).not.toBeNull();
      expect(session.feedbackEnabled()).toBe(true);
      drawAndCheck();
      expect(gridRoot.querySelectorAll(".slot-cell")).toHaveLength(45);

      const roundOneMeat = session.flaggedSlotCount("hasMeat");
      expect(roundOneMeat).toBeGreaterThan(0);

      for (let round = 0; round < 5; round += 1) {
        // click reject on every meat-flagged cell via the rendered buttons
        for (const cell of Array.from(gridRoot.querySelectorAll<HTMLElement>(".slot-cell"))) {
          const rid = cell.dataset.recipeId!;
          if (session.recipes.get(rid)?.flags.hasMeat) {
            (cell.querySelector(".feedback-btn.reject") as HTMLButtonElement).click();
          }
        }
        if (session.selections.size > 0) {
          expect(session.canSendFeedback()).toBe(true);
          const sent = await session.sendFeedback();
          expect(sent).toBe(true);
        }
        const next = await session.requestPlan(form, round + 2);
        expect(next).not.toBeNull();
        drawAndCheck();
      }

      const finalMeat = session.flaggedSlotCount("hasMeat");
      expect(session.modelVersion).not.toBeNull();
      expect(finalMeat).toBeLessThan(roundOneMeat);
    },
  );
});
