/**
 * HTML renderers: pure string builders over the store state, wired up by
 * event delegation in main.ts. Grade entry is a row of radio buttons labeled
 * with the scale words, so out-of-scale input is impossible by construction.
 */

import type { UiSession, Tab } from "./state.js";
import {
  barPairs,
  deltaText,
  fmtPercent,
  fmtScore,
  issueRows,
  sparklinePoints,
} from "./viewmodel.js";

export function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderApp(state: UiSession): string {
  if (!state.session || !state.framework) {
    return renderLogin(state);
  }
  return `
    <header class="topbar">
      <h1>Readiness assessment</h1>
      <div class="who">${esc(state.user?.display_name ?? "")} · ${esc(state.framework.name)}</div>
    </header>
    ${renderTabs(state)}
    ${state.globalError ? `<div class="error banner">${esc(state.globalError)}</div>` : ""}
    <main>
      ${renderCurrentTab(state)}
    </main>
  `;
}

export function renderLogin(state: UiSession): string {
  return `
    <div class="login">
      <h1>Readiness assessment</h1>
      <p>Enter a name to start or continue your track record.</p>
      <form data-action="login">
        <input name="display_name" placeholder="Your name" required minlength="1" />
        <button type="submit">Start assessment</button>
      </form>
      ${state.globalError ? `<div class="error banner">${esc(state.globalError)}</div>` : ""}
    </div>
  `;
}

const TABS: { id: Tab; title: string }[] = [
  { id: "assessment", title: "Assessment" },
  { id: "histogram", title: "Histogram" },
  { id: "summarize", title: "Summarize" },
];

export function renderTabs(state: UiSession): string {
  const buttons = TABS.map((tab) => {
    const enabled = state.tabEnabled(tab.id);
    const active = state.tab === tab.id ? " active" : "";
    return `<button class="tab${active}" data-action="tab" data-tab="${tab.id}"
      ${enabled ? "" : "disabled"}>${tab.title}</button>`;
  });
  return `<nav class="tabs">${buttons.join("")}</nav>`;
}

function renderCurrentTab(state: UiSession): string {
  switch (state.tab) {
    case "assessment":
      return renderAssessment(state);
    case "histogram":
      return state.finalized ? renderHistogram(state) : renderLockedPrompt();
    case "summarize":
      return state.finalized ? renderSummarize(state) : renderLockedPrompt();
  }
}

function renderLockedPrompt(): string {
  return `<div class="locked"><p>Finish the assessment first: answer every issue
    and press Finalize. Results unlock afterwards.</p></div>`;
}

export function renderAssessment(state: UiSession): string {
  const framework = state.framework!;
  const rows = issueRows(framework);
  const pct = Math.round(state.completion * 100);
  const done = state.answeredCount === state.totalLeaves && state.totalLeaves > 0;

  const groups: string[] = [];
  let currentDomain = "";
  let currentControl = "";
  for (const row of rows) {
    if (row.domainId !== currentDomain) {
      currentDomain = row.domainId;
      currentControl = "";
      groups.push(`<h2 class="domain">${esc(row.domainName)}</h2>`);
    }
    if (row.controlId !== currentControl) {
      currentControl = row.controlId;
      const ref = row.controlIsoRef ? ` <span class="isoref">${esc(row.controlIsoRef)}</span>` : "";
      groups.push(`<h3 class="control">${esc(row.controlName)}${ref}</h3>`);
    }
    groups.push(renderIssueRow(state, row.leafId, row.question));
  }

  return `
    <div class="meter" role="progressbar" aria-valuenow="${pct}">
      <div class="meter-fill" style="width:${pct}%"></div>
      <span class="meter-text">${state.answeredCount} / ${state.totalLeaves} answered (${pct}%)</span>
    </div>
    <div class="issues">${groups.join("\n")}</div>
    <div class="finalize-bar">
      <button data-action="finalize" ${done && !state.finalized ? "" : "disabled"}>Finalize</button>
      ${state.finalized ? "<span>Session finalized.</span>" : ""}
    </div>
  `;
}

function renderIssueRow(state: UiSession, leafId: string, question: string): string {
  const scale = state.framework!.scale;
  const chosen = state.buffer[leafId];
  const status = state.leafStatus[leafId];
  const disabled = state.finalized ? "disabled" : "";

  const options = scale
    .map((level) => {
      const checked = chosen === level.value ? "checked" : "";
      return `<label class="grade">
        <input type="radio" name="grade-${esc(leafId)}" value="${level.value}"
          data-action="grade" data-leaf="${esc(leafId)}" ${checked} ${disabled} />
        <span>${level.value} · ${esc(level.label)}</span>
      </label>`;
    })
    .join("");

  let statusHtml = "";
  if (status?.state === "saving") statusHtml = `<span class="status saving">saving…</span>`;
  else if (status?.state === "saved") statusHtml = `<span class="status saved">saved</span>`;
  else if (status?.state === "error")
    statusHtml = `<span class="status error">${esc(status.message ?? "rejected")}</span>`;

  return `<div class="issue" data-leaf-row="${esc(leafId)}">
    <p class="question">${esc(question)} ${statusHtml}</p>
    <div class="grades">${options}</div>
  </div>`;
}

export function renderHistogram(state: UiSession): string {
  const reports = state.reports;
  if (!reports) return `<div class="locked"><p>Loading results…</p></div>`;
  const series =
    state.histogramLevel === "domains" ? reports.histogramDomains : reports.histogramControls;
  const pairs = barPairs(series.bars, reports.summary.weakest_domains);

  const rows = pairs
    .map(
      (pair) => `
      <div class="barpair${pair.flaggedWeakest ? " weakest" : ""}" data-bar="${esc(pair.nodeId)}">
        <div class="barlabel">${esc(pair.label)}${pair.flaggedWeakest ? " ⚑" : ""}</div>
        <div class="bars">
          <div class="bar achievement" style="width:${pair.achievementWidth}%"></div>
          <span class="barvalue">${pair.achievementText}</span>
        </div>
        <div class="bars">
          <div class="bar priority" style="width:${pair.priorityWidth}%"></div>
          <span class="barvalue">${pair.priorityText}</span>
        </div>
      </div>`,
    )
    .join("\n");

  return `
    <div class="level-toggle">
      <button data-action="level" data-level="domains"
        ${state.histogramLevel === "domains" ? "class='active'" : ""}>6 domains</button>
      <button data-action="level" data-level="controls"
        ${state.histogramLevel === "controls" ? "class='active'" : ""}>21 controls</button>
    </div>
    <div class="legend"><span class="chip achievement"></span> achievement
      <span class="chip priority"></span> priority (gap to ideal)</div>
    <div class="histogram" data-level="${series.level}">${rows}</div>
  `;
}

export function renderSummarize(state: UiSession): string {
  const reports = state.reports;
  if (!reports) return `<div class="locked"><p>Loading results…</p></div>`;
  const summary = reports.summary;
  const trend = reports.trend;
  const spark = sparklinePoints(trend);
  const delta = deltaText(trend.deltas);

  return `
    <div class="summary">
      <dl>
        <dt>Final result (of 4)</dt><dd class="big">${fmtScore(summary.overall_achievement)}</dd>
        <dt>Final result (of 100%)</dt><dd>${fmtPercent(summary.overall_percent)}</dd>
        <dt>Predicate</dt><dd>${esc(summary.predicate)}</dd>
        <dt>Advice</dt><dd class="advice">${esc(summary.advice)}</dd>
      </dl>
      <div class="trend">
        <h3>Experiments</h3>
        ${
          trend.points.length > 0
            ? `<svg viewBox="0 0 160 40" class="sparkline" preserveAspectRatio="none">
                 <polyline points="${spark}" fill="none" stroke="currentColor" stroke-width="2"/>
               </svg>
               <p>${trend.points.length} finalized experiment(s)${
                 delta ? `, latest change ${delta}` : ""
               }</p>`
            : "<p>No earlier experiments.</p>"
        }
      </div>
      <button data-action="new-session">Start another experiment</button>
    </div>
  `;
}
