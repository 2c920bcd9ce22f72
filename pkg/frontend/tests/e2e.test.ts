/** End-to-end flow against a live campaign service.
 *
 * Creates a 2-categorical + 2-continuous space, tells 20 initial results from
 * a scripted evaluator, answers 10 suggestions, and then checks the console's
 * derived views: monotone incumbent series, 2 x 30 decision-path stripes, and
 * a client CSV export byte-identical to the raw service export.
 *
 * Skipped when CATBOX_E2E=0 or when python/the service cannot be started.
 */

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { CatboxClient } from "../src/api.js";
import { decisionPathSvg } from "../src/charts.js";
import { buildCampaignView } from "../src/model.js";

const RUN_E2E = process.env.CATBOX_E2E !== "0";
const PORT = 8900 + (process.pid % 500);
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess | null = null;
let storeDir = "";

/** Scripted evaluator: negated Ackley over the 4 coordinates, with the two
 * 5-level categoricals grid-encoded onto the Ackley box. */
function scriptedAckley(cat: number[], con: number[]): number {
  const lo = -32.768;
  const hi = 32.768;
  const z = [...cat.map((j) => lo + (j * (hi - lo)) / 4), ...con];
  const d = z.length;
  const rms = Math.sqrt(z.reduce((s, v) => s + v * v, 0) / d);
  const cosMean = z.reduce((s, v) => s + Math.cos(2 * Math.PI * v), 0) / d;
  const value = -20 * Math.exp(-0.2 * rms) - Math.exp(cosMean) + 20 + Math.E;
  return -value;
}

async function waitForService(timeoutMs = 30_000): Promise<boolean> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const resp = await fetch(`${BASE}/campaigns`);
      if (resp.ok) return true;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 250));
  }
  return false;
}

beforeAll(async () => {
  if (!RUN_E2E) return;
  storeDir = mkdtempSync(join(tmpdir(), "catbox-e2e-"));
  server = spawn(
    "python3",
    ["-m", "catbox.cli", "serve", "--host", "127.0.0.1", "--port", String(PORT), "--store-root", storeDir],
    { stdio: "ignore" }
  );
  const up = await waitForService();
  if (!up) throw new Error("campaign service did not come up");
}, 40_000);

afterAll(() => {
  server?.kill("SIGTERM");
  if (storeDir) rmSync(storeDir, { recursive: true, force: true });
});

describe.skipIf(!RUN_E2E)("console end-to-end against a live service", () => {
  it("runs a 20-init + 10-suggestion campaign and the views hold up", async () => {
    const client = new CatboxClient(BASE);
    const space = {
      categoricals: [
        { name: "c1", levels: ["L0", "L1", "L2", "L3", "L4"] },
        { name: "c2", levels: ["L0", "L1", "L2", "L3", "L4"] },
      ],
      continuous: [
        { name: "x1", lower: -32.768, upper: 32.768 },
        { name: "x2", lower: -32.768, upper: 32.768 },
      ],
    };
    const created = await client.createCampaign(space, {
      n_init: 20,
      kernel: { fit_restarts: 2, refit_restarts: 1, fit_maxiter: 15 },
    });
    expect(created.initial_design).toHaveLength(20);

    // run the initial design "at the bench"
    for (const point of created.initial_design) {
      await client.tell(created.id, point, scriptedAckley(point.cat, point.con));
    }

    // answer 10 suggestions
    for (let i = 0; i < 10; i++) {
      const { point } = await client.suggest(created.id);
      await client.tell(created.id, point, scriptedAckley(point.cat, point.con));
    }

    const doc = await client.getCampaign(created.id);
    expect(doc.history).toHaveLength(30);

    const view = buildCampaignView(doc);
    // incumbent chart monotone nondecreasing (maximize campaign)
    for (let i = 1; i < view.incumbentSeries.length; i++) {
      expect(view.incumbentSeries[i]).toBeGreaterThanOrEqual(view.incumbentSeries[i - 1]);
    }
    // history table matches the server's history length, incumbent card the max
    expect(view.historyRows).toHaveLength(30);
    expect(view.incumbent?.y).toBe(Math.max(...doc.history.map((o) => o.y)));

    // decision-path lanes render 2 x 30 stripes
    const svg = decisionPathSvg(view.lanes);
    const stripes = (svg.match(/<rect class="stripe"/g) ?? []).length;
    expect(stripes).toBe(2 * 30);

    // the console's export equals the raw service export byte for byte
    const viaClient = await client.exportCsv(created.id);
    const raw = await (await fetch(`${BASE}/campaigns/${created.id}/export.csv`)).text();
    expect(viaClient).toBe(raw);
    expect(viaClient.split("\n")[0]).toBe("iteration,point_json,raw_y,observed_y,incumbent_y");
  }, 180_000);
});
