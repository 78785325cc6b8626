import type {
  CandidateRow,
  CatalogInfo,
  Principle,
  ReportDocument,
  SessionPayload,
  SummaryPayload,
  Verdict,
} from './types';

export type Phase = 'objectives' | 'triage' | 'report';

export interface TriageViewState {
  activeCandidate: string | null;
  filterByElement: string | null;
  filterByPrinciple: string | null;
  progress: { triaged: number; total: number };
}

type Listener = () => void;

/** Single source of truth for the UI. Views render from it and call its
 * mutators; the server stays authoritative via reconcile(). */
export class AppStore {
  phase: Phase = 'objectives';
  selectedPrinciples = new Set<Principle>();
  session: SessionPayload | null = null;
  candidates: CandidateRow[] = [];
  summary: SummaryPayload | null = null;
  report: ReportDocument | null = null;
  diagramSvg = '';
  catalog: CatalogInfo | null = null;
  error = '';
  busy = false;

  // per-session display renames; presentation only, never sent to the server
  readonly aliases = new Map<string, string>();

  view: TriageViewState = {
    activeCandidate: null,
    filterByElement: null,
    filterByPrinciple: null,
    progress: { triaged: 0, total: 0 },
  };

  private listeners: Listener[] = [];

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  togglePrinciple(principle: Principle): void {
    if (this.selectedPrinciples.has(principle)) {
      this.selectedPrinciples.delete(principle);
    } else {
      this.selectedPrinciples.add(principle);
    }
    this.emit();
  }

  get canStartSession(): boolean {
    return this.selectedPrinciples.size > 0;
  }

  setBusy(busy: boolean): void {
    this.busy = busy;
    this.emit();
  }

  setError(message: string): void {
    this.error = message;
    this.emit();
  }

  setCatalog(catalog: CatalogInfo): void {
    this.catalog = catalog;
    this.emit();
  }

  sessionCreated(payload: SessionPayload): void {
    this.session = payload;
    this.candidates = payload.candidates;
    this.summary = null;
    this.report = null;
    this.aliases.clear();
    this.phase = 'triage';
    this.view = {
      activeCandidate: payload.candidates[0]?.candidateId ?? null,
      filterByElement: null,
      filterByPrinciple: null,
      progress: this.computeProgress(payload.candidates),
    };
    this.error = '';
    this.emit();
  }

  private computeProgress(rows: CandidateRow[]): { triaged: number; total: number } {
    // over ALL candidates, never the filtered view
    const triaged = rows.filter((c) => c.verdict !== 'pending').length;
    return { triaged, total: rows.length };
  }

  candidateById(candidateId: string): CandidateRow | undefined {
    return this.candidates.find((c) => c.candidateId === candidateId);
  }

  get activeCandidate(): CandidateRow | undefined {
    return this.view.activeCandidate
      ? this.candidateById(this.view.activeCandidate)
      : undefined;
  }

  get visibleCandidates(): CandidateRow[] {
    return this.candidates.filter((c) => {
      if (this.view.filterByElement && c.elementId !== this.view.filterByElement) {
        return false;
      }
      if (
        this.view.filterByPrinciple &&
        !c.matchedPrinciples.includes(this.view.filterByPrinciple)
      ) {
        return false;
      }
      return true;
    });
  }

  /** Unique elements in candidate order, for the element filter dropdown. */
  get elementOptions(): { elementId: string; name: string }[] {
    const seen = new Set<string>();
    const options: { elementId: string; name: string }[] = [];
    for (const c of this.candidates) {
      if (seen.has(c.elementId)) continue;
      seen.add(c.elementId);
      options.push({ elementId: c.elementId, name: this.displayName(c.elementId, c.elementName) });
    }
    return options;
  }

  setElementFilter(elementId: string | null): void {
    this.view = { ...this.view, filterByElement: elementId };
    this.ensureActiveVisible();
    this.emit();
  }

  setPrincipleFilter(principle: string | null): void {
    this.view = { ...this.view, filterByPrinciple: principle };
    this.ensureActiveVisible();
    this.emit();
  }

  private ensureActiveVisible(): void {
    const visible = this.visibleCandidates;
    if (!visible.some((c) => c.candidateId === this.view.activeCandidate)) {
      this.view.activeCandidate = visible[0]?.candidateId ?? null;
    }
  }

  setActive(candidateId: string): void {
    this.view = { ...this.view, activeCandidate: candidateId };
    this.emit();
  }

  /** Next pending candidate after the given one in the visible list. */
  nextPending(after?: string): string | null {
    const visible = this.visibleCandidates;
    if (visible.length === 0) return null;
    const start = after
      ? visible.findIndex((c) => c.candidateId === after) + 1
      : 0;
    for (let i = 0; i < visible.length; i++) {
      const candidate = visible[(start + i) % visible.length];
      if (candidate.verdict === 'pending') return candidate.candidateId;
    }
    return null;
  }

  /** Optimistic local verdict; returns the previous row so a failed server
   * call can revert. */
  applyVerdict(candidateId: string, verdict: Verdict, rationale: string): CandidateRow {
    const index = this.candidates.findIndex((c) => c.candidateId === candidateId);
    if (index < 0) throw new Error(`unknown candidate ${candidateId}`);
    const previous = this.candidates[index];
    const next = [...this.candidates];
    next[index] = { ...previous, verdict, rationale };
    this.candidates = next;
    this.view = { ...this.view, progress: this.computeProgress(next) };
    this.emit();
    return previous;
  }

  revertVerdict(previous: CandidateRow): void {
    const index = this.candidates.findIndex(
      (c) => c.candidateId === previous.candidateId,
    );
    if (index < 0) return;
    const next = [...this.candidates];
    next[index] = previous;
    this.candidates = next;
    this.view = { ...this.view, progress: this.computeProgress(next) };
    this.emit();
  }

  /** Server summary after a decision batch; server totals win. */
  reconcile(summary: SummaryPayload): void {
    this.summary = summary;
    this.view = {
      ...this.view,
      progress: {
        triaged: summary.totals.accepted + summary.totals.rejected,
        total: summary.totals.candidates,
      },
    };
    this.emit();
  }

  setDiagram(svg: string): void {
    this.diagramSvg = svg;
    this.emit();
  }

  setAlias(elementId: string, alias: string): void {
    const trimmed = alias.trim();
    if (trimmed) {
      this.aliases.set(elementId, trimmed);
    } else {
      this.aliases.delete(elementId);
    }
    this.emit();
  }

  displayName(elementId: string, fallback: string): string {
    return this.aliases.get(elementId) ?? fallback;
  }

  reportReady(report: ReportDocument, svg: string): void {
    this.report = report;
    this.diagramSvg = svg;
    this.phase = 'report';
    this.emit();
  }

  backToTriage(): void {
    this.phase = 'triage';
    this.emit();
  }

  reset(): void {
    const catalog = this.catalog;
    this.phase = 'objectives';
    this.selectedPrinciples = new Set();
    this.session = null;
    this.candidates = [];
    this.summary = null;
    this.report = null;
    this.diagramSvg = '';
    this.aliases.clear();
    this.error = '';
    this.catalog = catalog;
    this.view = {
      activeCandidate: null,
      filterByElement: null,
      filterByPrinciple: null,
      progress: { triaged: 0, total: 0 },
    };
    this.emit();
  }
}
