/**
 * UI session store: login, answer buffer, tab switching, report loading.
 *
 * The buffer mirrors the server: a grade selection is PUT immediately, and a
 * reload restores the buffer from GET /api/sessions/{id}, so no answer ever
 * lives only in the browser. Saves to the same leaf are de-duplicated
 * in-flight with the last selection winning, matching the server's
 * last-write-wins answer semantics. Histogram and Summarize stay locked
 * until the session is finalized; every score they show comes verbatim from
 * a server response.
 */

import { ApiClient, ApiError } from "./api.js";
import type {
  FrameworkDoc,
  HistogramDoc,
  ResultDoc,
  SessionDoc,
  SummaryDoc,
  TrendDoc,
  UserDoc,
} from "./types.js";

export type Tab = "assessment" | "histogram" | "summarize";

export type SaveState = "saving" | "saved" | "error";

export interface LeafStatus {
  state: SaveState;
  message?: string;
}

export interface Reports {
  histogramDomains: HistogramDoc;
  histogramControls: HistogramDoc;
  summary: SummaryDoc;
  trend: TrendDoc;
  result: ResultDoc;
}

export type Listener = () => void;

const SESSION_KEY = "secready.active";

interface PersistedRef {
  userId: string;
  sessionId: string;
  frameworkId: string;
}

/** localStorage is only a pointer to server state, never a data store. */
function loadRef(storage: Storage | undefined): PersistedRef | null {
  try {
    const raw = storage?.getItem(SESSION_KEY);
    return raw ? (JSON.parse(raw) as PersistedRef) : null;
  } catch {
    return null;
  }
}

export class UiSession {
  readonly api: ApiClient;
  private readonly storage: Storage | undefined;
  private listeners: Listener[] = [];

  user: UserDoc | null = null;
  framework: FrameworkDoc | null = null;
  session: SessionDoc | null = null;
  tab: Tab = "assessment";
  histogramLevel: "domains" | "controls" = "domains";

  /** leaf id -> grade, mirroring the server's view of this session */
  buffer: Record<string, number> = {};
  /** per-leaf save status for inline feedback */
  leafStatus: Record<string, LeafStatus> = {};
  reports: Reports | null = null;
  globalError: string | null = null;

  private queued = new Map<string, number>();
  private inflight = new Set<string>();

  constructor(api: ApiClient, storage?: Storage) {
    this.api = api;
    this.storage = storage;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }

  get finalized(): boolean {
    return this.session?.status === "finalized";
  }

  get totalLeaves(): number {
    if (!this.framework) return 0;
    return countLeaves(this.framework);
  }

  get answeredCount(): number {
    return Object.keys(this.buffer).length;
  }

  /** Completion meter fraction: answered / total (not a score). */
  get completion(): number {
    const total = this.totalLeaves;
    return total === 0 ? 0 : this.answeredCount / total;
  }

  tabEnabled(tab: Tab): boolean {
    return tab === "assessment" || this.finalized;
  }

  setTab(tab: Tab): void {
    this.tab = tab;
    this.notify();
  }

  setHistogramLevel(level: "domains" | "controls"): void {
    this.histogramLevel = level;
    this.notify();
  }

  /** Name-entry login: creates or fetches the user, then opens a session. */
  async login(displayName: string, frameworkId = "iso27001"): Promise<void> {
    this.globalError = null;
    try {
      this.user = await this.api.createUser(displayName);
      this.framework = await this.api.getFramework(frameworkId);
      this.session = await this.api.createSession(this.user.user_id, frameworkId);
      this.buffer = { ...this.session.answers };
      this.leafStatus = {};
      this.reports = null;
      this.tab = "assessment";
      this.persistRef();
    } catch (error) {
      this.globalError = describeError(error);
    }
    this.notify();
  }

  /** Reload path: restore the active session entirely from the server. */
  async resume(): Promise<boolean> {
    const ref = loadRef(this.storage);
    if (!ref) return false;
    try {
      this.session = await this.api.getSession(ref.sessionId);
      this.framework = await this.api.getFramework(ref.frameworkId);
      this.user = {
        user_id: ref.userId,
        display_name: ref.userId,
        created_at: "",
      };
      this.buffer = { ...this.session.answers };
      this.leafStatus = {};
      if (this.finalized) {
        await this.loadReports();
        this.tab = "summarize";
      } else {
        this.tab = "assessment";
      }
      this.notify();
      return true;
    } catch {
      this.storage?.removeItem(SESSION_KEY);
      return false;
    }
  }

  private persistRef(): void {
    if (!this.user || !this.session) return;
    try {
      this.storage?.setItem(
        SESSION_KEY,
        JSON.stringify({
          userId: this.user.user_id,
          sessionId: this.session.session_id,
          frameworkId: this.session.framework_id,
        } satisfies PersistedRef),
      );
    } catch {
      // storage unavailable: reload loses the pointer, never the data
    }
  }

  /**
   * Record a grade selection: update the buffer, mark the row saving, PUT to
   * the server. Rapid re-selections of the same leaf collapse to the latest.
   */
  setGrade(leafId: string, grade: number): void {
    if (!this.session || this.finalized) return;
    this.buffer[leafId] = grade;
    this.leafStatus[leafId] = { state: "saving" };
    this.queued.set(leafId, grade);
    this.notify();
    if (!this.inflight.has(leafId)) {
      void this.pump(leafId);
    }
  }

  private async pump(leafId: string): Promise<void> {
    if (!this.session) return;
    this.inflight.add(leafId);
    try {
      while (this.queued.has(leafId)) {
        const grade = this.queued.get(leafId)!;
        this.queued.delete(leafId);
        try {
          const session = await this.api.putAnswer(this.session.session_id, leafId, grade);
          if (!this.queued.has(leafId)) {
            this.session = session;
            this.buffer[leafId] = grade;
            this.leafStatus[leafId] = { state: "saved" };
          }
        } catch (error) {
          if (!this.queued.has(leafId)) {
            this.leafStatus[leafId] = { state: "error", message: describeError(error) };
            // the server rejected it: resync the row with the server's truth
            delete this.buffer[leafId];
            const serverGrade = this.session.answers[leafId];
            if (serverGrade !== undefined) this.buffer[leafId] = serverGrade;
          }
        }
        this.notify();
      }
    } finally {
      this.inflight.delete(leafId);
    }
  }

  /** True while any PUT is queued or on the wire. */
  get saving(): boolean {
    return this.inflight.size > 0 || this.queued.size > 0;
  }

  async finalize(): Promise<void> {
    if (!this.session) return;
    this.globalError = null;
    try {
      await this.api.finalize(this.session.session_id);
      this.session = await this.api.getSession(this.session.session_id);
      await this.loadReports();
      this.tab = "histogram";
    } catch (error) {
      this.globalError = describeError(error);
    }
    this.notify();
  }

  /** Fetch every post-finalize view in one go; all numbers are server-made. */
  async loadReports(): Promise<void> {
    if (!this.session || !this.user) return;
    const sid = this.session.session_id;
    const [histogramDomains, histogramControls, summary, trend, result] = await Promise.all([
      this.api.getHistogram(sid, "domains"),
      this.api.getHistogram(sid, "controls"),
      this.api.getSummary(sid),
      this.api.getTrend(this.user.user_id),
      this.api.getResult(sid),
    ]);
    this.reports = { histogramDomains, histogramControls, summary, trend, result };
  }
}

export function countLeaves(framework: FrameworkDoc): number {
  let count = 0;
  const stack = [...framework.domains];
  while (stack.length > 0) {
    const node = stack.pop()!;
    if (node.children && node.children.length > 0) {
      stack.push(...node.children);
    } else {
      count += 1;
    }
  }
  return count;
}

export function describeError(error: unknown): string {
  if (error instanceof ApiError) {
    const details = error.details?.length ? ` (${error.details.length} items)` : "";
    return `${error.code}: ${error.message}${details}`;
  }
  return String(error);
}
