/**
 * Full UI flow against a real server: enter the sample grades through the
 * assessment tab's store, finalize, then verify the histogram and summarize
 * tabs on live API data. Requires python3 with the secready package
 * installed (the repo root's `pip install -e .`).
 */

import { type ChildProcess, spawn } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { createServer } from "node:net";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { renderAssessment, renderHistogram, renderSummarize } from "../src/render.js";
import { UiSession } from "../src/state.js";
import { issueRows } from "../src/viewmodel.js";

const CONTROL_GRADES: Record<string, number> = {
  "policy.5.1.1": 4,
  "tools_technology.12.2.1": 3,
  "tools_technology.12.2.2": 3,
  "tools_technology.12.2.3": 3,
  "tools_technology.12.2.4": 3,
  "tools_technology.12.6.1": 3,
  "organization.6.1.3": 4,
  "culture.incident_mgmt.13.2.1": 2,
  "culture.incident_mgmt.13.2.2": 3,
  "culture.incident_mgmt.13.2.3": 4,
  "culture.continuity.14.1.1": 3,
  "culture.continuity.14.1.2": 3,
  "culture.continuity.14.1.3": 3,
  "culture.continuity.14.1.4": 3,
  "culture.continuity.14.1.5": 3,
  "stakeholder.8.2.1": 2,
  "stakeholder.8.2.2": 2,
  "stakeholder.8.2.3": 2,
  "knowledge.15.1.2": 2,
  "knowledge.15.1.3": 3,
  "knowledge.15.1.4": 2,
};

async function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const srv = createServer();
    srv.listen(0, "127.0.0.1", () => {
      const addr = srv.address();
      if (addr && typeof addr === "object") {
        const port = addr.port;
        srv.close(() => resolve(port));
      } else {
        reject(new Error("no address"));
      }
    });
  });
}

let proc: ChildProcess;
let base: string;
let dataDir: string;

beforeAll(async () => {
  const port = await freePort();
  base = `http://127.0.0.1:${port}`;
  dataDir = mkdtempSync(join(tmpdir(), "secready-ui-e2e-"));
  proc = spawn(
    "python3",
    ["-m", "secready.cli", "serve", "--port", String(port), "--data-dir", dataDir],
    { stdio: "ignore" },
  );
  const deadline = Date.now() + 30_000;
  for (;;) {
    if (proc.exitCode !== null) throw new Error(`server exited with ${proc.exitCode}`);
    try {
      const response = await fetch(`${base}/api/frameworks`);
      if (response.ok) break;
    } catch {
      // not up yet
    }
    if (Date.now() > deadline) throw new Error("server did not come up");
    await new Promise((r) => setTimeout(r, 100));
  }
}, 40_000);

afterAll(() => {
  proc?.kill();
  if (dataDir) rmSync(dataDir, { recursive: true, force: true });
});

describe("assessment flow against the live service", () => {
  it("enters grades, finalizes, and shows consistent histogram and summary tabs", async () => {
    const startedAt = Date.now();
    const store = new UiSession(new ApiClient(base));

    await store.login("Flow Tester");
    expect(store.session?.status).toBe("open");
    expect(store.totalLeaves).toBe(42);

    // grade every issue the way the assessment tab does, control by control
    const rows = issueRows(store.framework!);
    expect(rows).toHaveLength(42);
    for (const row of rows) {
      const grade = CONTROL_GRADES[row.controlId];
      expect(grade, `control grade for ${row.controlId}`).toBeDefined();
      store.setGrade(row.leafId, grade!);
    }
    await new Promise<void>((resolve, reject) => {
      const t0 = Date.now();
      const tick = () => {
        if (!store.saving) return resolve();
        if (Date.now() - t0 > 30_000) return reject(new Error("saves never settled"));
        setTimeout(tick, 25);
      };
      tick();
    });

    const assessmentHtml = renderAssessment(store);
    expect(assessmentHtml).toContain("42 / 42 answered (100%)");
    expect(store.tabEnabled("histogram")).toBe(false);

    await store.finalize();
    expect(store.finalized).toBe(true);
    expect(store.globalError).toBeNull();

    // histogram tab: 6 domain pairs and 21 control pairs, complements of 4
    store.setTab("histogram");
    store.setHistogramLevel("domains");
    const domainsHtml = renderHistogram(store);
    expect(domainsHtml.match(/class="barpair/g)).toHaveLength(6);

    store.setHistogramLevel("controls");
    const controlsHtml = renderHistogram(store);
    expect(controlsHtml.match(/class="barpair/g)).toHaveLength(21);

    for (const series of [store.reports!.histogramDomains, store.reports!.histogramControls]) {
      for (const bar of series.bars) {
        const shown =
          Number(bar.achievement.toFixed(2)) + Number(bar.priority.toFixed(2));
        expect(Math.abs(shown - 4)).toBeLessThan(0.005);
      }
    }

    // the weakest domain is flagged in the domain view
    store.setHistogramLevel("domains");
    expect(renderHistogram(store)).toContain('data-bar="stakeholder"');
    expect(renderHistogram(store)).toContain("weakest");

    // summarize tab: percent is achievement/4*100, advice names stakeholder
    // (each wire value rounds to 9 fraction digits independently, and percent
    // is achievement x 25, so the identity holds to ~1e-8 client-side)
    store.setTab("summarize");
    const summary = store.reports!.summary;
    expect(summary.overall_percent).toBeCloseTo((summary.overall_achievement / 4) * 100, 7);
    expect(summary.advice.toLowerCase()).toContain("stakeholder");

    const summaryHtml = renderSummarize(store);
    expect(summaryHtml).toContain("3.06"); // 55/18 at display precision
    expect(summaryHtml).toContain("76.39%");
    expect(summaryHtml).toContain("above average");
    expect(summaryHtml.toLowerCase()).toContain("stakeholder");

    // well inside the five-minute budget for a whole experiment
    expect(Date.now() - startedAt).toBeLessThan(5 * 60_000);
  }, 120_000);

  it("restores a mid-assessment session from the server after a reload", async () => {
    const storage = new Map<string, string>();
    const fakeStorage = {
      getItem: (k: string) => storage.get(k) ?? null,
      setItem: (k: string, v: string) => void storage.set(k, v),
      removeItem: (k: string) => void storage.delete(k),
    } as unknown as Storage;

    const store = new UiSession(new ApiClient(base), fakeStorage);
    await store.login("Reload Tester");
    store.setGrade("policy.5.1.1.q1", 2);
    store.setGrade("policy.5.1.1.q2", 3);
    await new Promise<void>((resolve) => {
      const tick = () => (store.saving ? setTimeout(tick, 25) : resolve());
      tick();
    });

    const reloaded = new UiSession(new ApiClient(base), fakeStorage);
    expect(await reloaded.resume()).toBe(true);
    expect(reloaded.buffer).toEqual({ "policy.5.1.1.q1": 2, "policy.5.1.1.q2": 3 });
    expect(reloaded.session?.session_id).toBe(store.session?.session_id);
  }, 60_000);
});
