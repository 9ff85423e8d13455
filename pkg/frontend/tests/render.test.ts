import { describe, expect, it } from "vitest";

import type { ApiClient } from "../src/api.js";
import { renderApp, renderAssessment, renderHistogram, renderSummarize, renderTabs } from "../src/render.js";
import { UiSession } from "../src/state.js";
import type { FrameworkDoc } from "../src/types.js";

const framework: FrameworkDoc = {
  id: "fw",
  name: "FW",
  version: "1",
  scale: [
    { value: 0, label: "not implementing" },
    { value: 1, label: "below average" },
    { value: 2, label: "average" },
    { value: 3, label: "above average" },
    { value: 4, label: "excellent" },
  ],
  domains: [
    {
      id: "alpha",
      name: "Alpha",
      children: [
        {
          id: "alpha.1",
          name: "C1",
          iso_ref: "1.1",
          children: [{ id: "alpha.1.q1", name: "Q1", question: "Is <it> done?" }],
        },
      ],
    },
  ],
};

function preparedStore(): UiSession {
  const store = new UiSession({} as ApiClient);
  store.user = { user_id: "alice", display_name: "Alice", created_at: "t" };
  store.framework = framework;
  store.session = {
    session_id: "s-1",
    user_id: "alice",
    framework_id: "fw",
    status: "open",
    answers: {},
    started_at: "t",
    finalized_at: null,
  };
  return store;
}

describe("login screen", () => {
  it("renders the name-entry form when no session is active", () => {
    const store = new UiSession({} as ApiClient);
    const html = renderApp(store);
    expect(html).toContain('data-action="login"');
    expect(html).toContain("Start assessment");
  });
});

describe("assessment tab", () => {
  it("renders question, ISO ref and the five labeled grade options", () => {
    const html = renderAssessment(preparedStore());
    expect(html).toContain("Is &lt;it&gt; done?");
    expect(html).toContain('<span class="isoref">1.1</span>');
    for (const label of ["not implementing", "below average", "average", "above average", "excellent"]) {
      expect(html).toContain(label);
    }
    expect(html.match(/type="radio"/g)).toHaveLength(5);
    // radios constrain input to scale values; no free-form entry exists
    expect(html).not.toContain('type="number"');
  });

  it("shows the completion meter and disables finalize until done", () => {
    const store = preparedStore();
    let html = renderAssessment(store);
    expect(html).toContain("0 / 1 answered (0%)");
    expect(html).toMatch(/data-action="finalize" disabled/);

    store.buffer["alpha.1.q1"] = 4;
    html = renderAssessment(store);
    expect(html).toContain("1 / 1 answered (100%)");
    expect(html).not.toMatch(/data-action="finalize" disabled/);
  });

  it("marks a rejected row with the server message", () => {
    const store = preparedStore();
    store.leafStatus["alpha.1.q1"] = { state: "error", message: "invalid_grade: off scale" };
    const html = renderAssessment(store);
    expect(html).toContain("invalid_grade: off scale");
  });
});

describe("tab bar", () => {
  it("disables result tabs before finalize and enables them after", () => {
    const store = preparedStore();
    let html = renderTabs(store);
    expect(html).toMatch(/data-tab="histogram"\s+disabled/);
    expect(html).toMatch(/data-tab="summarize"\s+disabled/);

    store.session = { ...store.session!, status: "finalized", finalized_at: "t1" };
    html = renderTabs(store);
    expect(html).not.toMatch(/data-tab="histogram"\s+disabled/);
  });

  it("result tabs show the finish prompt if somehow selected early", () => {
    const store = preparedStore();
    store.tab = "histogram";
    const html = renderApp(store);
    expect(html).toContain("Finish the assessment first");
  });
});

describe("histogram tab", () => {
  it("renders a bar pair per node and flags the weakest", () => {
    const store = preparedStore();
    store.session = { ...store.session!, status: "finalized", finalized_at: "t1" };
    store.reports = {
      histogramDomains: {
        level: "domains",
        bars: [
          { node_id: "alpha", label: "Alpha", achievement: 4, priority: 0 },
          { node_id: "beta", label: "Beta", achievement: 1, priority: 3 },
        ],
      },
      histogramControls: { level: "controls", bars: [] },
      summary: {
        overall_achievement: 2.5,
        overall_percent: 62.5,
        predicate: "above average",
        strongest_domains: ["alpha"],
        weakest_domains: ["beta"],
        advice: "Beta needs attention.",
      },
      trend: { user_id: "alice", points: [], deltas: [] },
      result: {} as never,
    };
    const html = renderHistogram(store);
    expect(html.match(/class="barpair/g)).toHaveLength(2);
    expect(html).toContain('class="barpair weakest" data-bar="beta"');
    expect(html).toContain("4.00");
    expect(html).toContain("0.00");
  });
});

describe("summarize tab", () => {
  it("shows the four summary features and the trend", () => {
    const store = preparedStore();
    store.session = { ...store.session!, status: "finalized", finalized_at: "t1" };
    store.reports = {
      histogramDomains: { level: "domains", bars: [] },
      histogramControls: { level: "controls", bars: [] },
      summary: {
        overall_achievement: 2.66,
        overall_percent: 66.5,
        predicate: "above average",
        strongest_domains: ["alpha"],
        weakest_domains: ["beta"],
        advice: "Improvement priority: Beta (priority 1.34).",
      },
      trend: {
        user_id: "alice",
        points: [
          { session_id: "a", finalized_at: "t1", overall_achievement: 2 },
          { session_id: "b", finalized_at: "t2", overall_achievement: 3 },
        ],
        deltas: [1],
      },
      result: {} as never,
    };
    const html = renderSummarize(store);
    expect(html).toContain("2.66");
    expect(html).toContain("66.5%");
    expect(html).toContain("above average");
    expect(html).toContain("Improvement priority: Beta");
    expect(html).toContain("sparkline");
    expect(html).toContain("latest change +1.00");
  });
});
