/**
 * Integration against a real service instance spawned for the test run.
 * Skipped only when no python interpreter is available on the machine.
 */
import { spawn, spawnSync, ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { renderHeatmap } from "../src/heatmap.js";
import { launchJob } from "../src/jobs.js";
import { designRate } from "../src/rate.js";
import type { Profile } from "../src/types.js";

const fixtures: Record<string, { profile: Profile; design_rate: number }> =
  JSON.parse(readFileSync(new URL("./fixtures.json", import.meta.url), "utf-8"));

const SIX = ["code_a_orig", "code_a_mod", "code_b_orig", "code_b_mod",
             "code_c_orig", "code_c_mod2"];

const python = process.env.STUDIO_PYTHON ?? "python3";
const havePython = spawnSync(python, ["--version"]).status === 0;
const port = 8700 + (process.pid % 200);
const base = `http://127.0.0.1:${port}`;

let proc: ChildProcess | null = null;
const api = new ApiClient(base);

async function waitForHealth(timeoutMs = 30_000): Promise<boolean> {
  const t0 = Date.now();
  while (Date.now() - t0 < timeoutMs) {
    try {
      const h = await api.health();
      if (h.status === "ok") return true;
    } catch {
      await new Promise((r) => setTimeout(r, 200));
    }
  }
  return false;
}

describe.skipIf(!havePython)("live service integration", () => {
  beforeAll(async () => {
    const ws = mkdtempSync(join(tmpdir(), "studio-ws-"));
    proc = spawn(python, ["-m", "sexitlab.cli", "serve", "--host", "127.0.0.1",
                          "--port", String(port), "--workspace", ws],
                 { stdio: "ignore" });
    expect(await waitForHealth()).toBe(true);
  }, 40_000);

  afterAll(() => {
    proc?.kill("SIGTERM");
  });

  it("rate indicator matches the service /profiles rate within 1e-6", async () => {
    for (const name of SIX) {
      await api.saveProfile(name, fixtures[name].profile);
      const out = await api.getProfile(name);
      const local = designRate(out.profile);
      expect(Math.abs(local - out.design_rate), name).toBeLessThanOrEqual(1e-6);
    }
  }, 30_000);

  it("runs a scattered-chart job to completion and renders the 200x200 bundle", async () => {
    const states: string[] = [];
    const watch = await launchJob(api, "sexit", {
      profile_name: "code_a_mod",
      n: 180,
      channel: { kind: "bec", param: 0.25 },
      m: 24,
      n_grid: 200,
      seed: 5,
    }, (s) => {
      if (s.job && states[states.length - 1] !== s.job.status) states.push(s.job.status);
    }, 150);
    const job = await watch.done;
    expect(job.status).toBe("done");
    expect(states[states.length - 1]).toBe("done");
    expect(states).toContain("running");

    const bundle = await api.bundleResult(job.id);
    expect(bundle.n_grid).toBe(200);
    const img = renderHeatmap(bundle);
    expect(img.width).toBe(200);
    expect(img.vndAvailable).toBe(true);
  }, 120_000);

  it("cancels a long job and leaves no artifacts", async () => {
    const watch = await launchJob(api, "ber", {
      profile_name: "code_a_mod",
      n: 180,
      channel_kind: "bec",
      points: [0.01, 0.011],
      min_bit_errors: 1_000_000,
      max_frames: 2_000_000,
      seed: 6,
    }, undefined, 150);
    await new Promise((r) => setTimeout(r, 700));
    await watch.cancel();
    const job = await watch.done;
    expect(job.status).toBe("cancelled");
    await expect(api.bundleResult(job.id)).rejects.toThrow();
  }, 60_000);

  it("serves analytic curves and the BER gain readout", async () => {
    const curves = await api.exitCurves({
      profile_name: "code_a_orig",
      channel: { kind: "bec", param: 0.25 },
      n_points: 41,
    });
    expect(curves.i_a.length).toBe(41);
    expect(curves.i_e_vnd[40]).toBeCloseTo(1.0, 9);

    const mkBer = (name: string, seed: number) => launchJob(api, "ber", {
      profile_name: name, n: 120, channel_kind: "bec",
      points: [0.3, 0.4, 0.5], min_bit_errors: 40, max_frames: 300, seed,
    }, undefined, 150);
    const [wa, wb] = [await mkBer("code_a_orig", 7), await mkBer("code_a_mod", 8)];
    const [ja, jb] = [await wa.done, await wb.done];
    expect(ja.status).toBe("done");
    expect(jb.status).toBe("done");
    const resp = await fetch(`${base}/analytic/ber_gain`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ job_a: ja.id, job_b: jb.id, target: 0.05 }),
    });
    expect(resp.ok).toBe(true);
    const body = await resp.json();
    expect(body.unit).toBe("delta_epsilon");
    expect(typeof body.gain).toBe("number");
  }, 120_000);
});
