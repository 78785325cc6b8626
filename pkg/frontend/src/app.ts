import { ApiClient, ApiRequestError } from './api';
import { AppStore, type Phase } from './state';
import type { Verdict } from './types';
import { ObjectivesPane } from './views/objectives';
import { TriagePane } from './views/triage';
import { ReportPane } from './views/report';

function describe(error: unknown): string {
  if (error instanceof ApiRequestError) return `${error.code}: ${error.message}`;
  if (error instanceof Error) return error.message;
  return String(error);
}

/** Wires the store, the HTTP client, and the three screens together. */
export class App {
  readonly store = new AppStore();

  private objectives: ObjectivesPane | null = null;
  private triage: TriagePane | null = null;
  private reportPane: ReportPane | null = null;
  private mountedPhase: Phase | null = null;
  private modelXml = '';

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
  ) {
    this.store.subscribe(() => this.sync());
  }

  async start(): Promise<void> {
    this.sync();
    try {
      this.store.setCatalog(await this.api.getCatalog());
    } catch (error) {
      this.store.setError(`catalog unavailable: ${describe(error)}`);
    }
  }

  private sync(): void {
    if (this.store.phase !== this.mountedPhase) {
      this.mount(this.store.phase);
      return;
    }
    switch (this.store.phase) {
      case 'objectives':
        this.objectives?.update();
        break;
      case 'triage':
        this.triage?.update();
        break;
      case 'report':
        this.reportPane?.render();
        break;
    }
  }

  private mount(phase: Phase): void {
    this.mountedPhase = phase;
    this.root.innerHTML = '';
    this.objectives = null;
    this.triage = null;
    this.reportPane = null;

    if (phase === 'objectives') {
      this.objectives = new ObjectivesPane(this.root, this.store, (input) =>
        void this.createSession(input.file, input.processName, input.notes),
      );
      this.objectives.render();
      return;
    }

    if (phase === 'triage') {
      this.triage = new TriagePane(this.root, this.store, {
        onDecide: (candidateId, verdict, rationale) =>
          void this.decide(candidateId, verdict, rationale),
        onFinish: () => void this.finishReview(),
      });
      this.triage.update();
      // re-mounting (e.g. back from the report) reuses the kept model text
      void this.triage.diagram.showModel(this.modelXml, this.store.diagramSvg);
      return;
    }

    const sessionId = this.store.session?.sessionId ?? '';
    this.reportPane = new ReportPane(
      this.root,
      this.store,
      {
        onBackToTriage: () => this.backToTriage(),
        onNewSession: () => this.store.reset(),
      },
      {
        json: this.api.reportUrl(sessionId, 'json'),
        markdown: this.api.reportUrl(sessionId, 'md'),
        svg: this.api.reportUrl(sessionId, 'svg'),
        session: this.api.sessionFileUrl(sessionId),
      },
    );
    this.reportPane.render();
    this.reportPane.showDiagram(this.store.diagramSvg);
  }

  private async createSession(file: File, processName: string, notes: string): Promise<void> {
    this.store.setBusy(true);
    try {
      const xml = await file.text();
      const session = await this.api.createSession(
        file,
        file.name || 'model.bpmn',
        [...this.store.selectedPrinciples],
        processName,
        notes,
      );
      // untriaged render: neutral fills, but element ids are clickable
      const svg = await this.api.getReportText(session.sessionId, 'svg');
      this.modelXml = xml;
      this.store.diagramSvg = svg;
      this.store.sessionCreated(session);
    } catch (error) {
      this.store.setError(describe(error));
    } finally {
      this.store.setBusy(false);
    }
  }

  private async decide(
    candidateId: string,
    verdict: Verdict,
    rationale: string,
  ): Promise<void> {
    const sessionId = this.store.session?.sessionId;
    if (!sessionId) return;
    const previous = this.store.applyVerdict(candidateId, verdict, rationale);
    const next = this.store.nextPending(candidateId);
    if (next) this.store.setActive(next);
    try {
      const summary = await this.api.postDecisions(sessionId, [
        { candidateId, verdict, rationale },
      ]);
      this.store.reconcile(summary);
    } catch (error) {
      this.store.revertVerdict(previous);
      this.store.setError(`decision not saved: ${describe(error)}`);
    }
  }

  private async finishReview(): Promise<void> {
    const sessionId = this.store.session?.sessionId;
    if (!sessionId) return;
    this.store.setBusy(true);
    try {
      const report = await this.api.getReport(sessionId);
      const svg = await this.api.getReportText(sessionId, 'svg');
      this.store.reportReady(report, svg);
    } catch (error) {
      this.store.setError(`report failed: ${describe(error)}`);
    } finally {
      this.store.setBusy(false);
    }
  }

  private backToTriage(): void {
    this.store.backToTriage();
  }
}
