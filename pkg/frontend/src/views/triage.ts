import type { AppStore } from '../state';
import type { CandidateRow, Verdict } from '../types';
import { escapeHtml, must } from './dom';
import { DiagramPane } from './diagram';

export interface TriageHandlers {
  onDecide(candidateId: string, verdict: Verdict, rationale: string): void;
  onFinish(): void;
}

const VERDICT_LABEL: Record<Verdict, string> = {
  accepted: 'accepted',
  rejected: 'rejected',
  pending: 'pending',
};

/** Candidate walkthrough: diagram on the left, candidate list in the
 * middle, detail pane with verdict controls on the right. */
export class TriagePane {
  readonly diagram: DiagramPane;
  private lastDetailId: string | null = null;

  constructor(
    private readonly container: HTMLElement,
    private readonly store: AppStore,
    private readonly handlers: TriageHandlers,
  ) {
    this.container.innerHTML = `
      <section class="pane triage-pane">
        <header class="triage-header">
          <div>
            <h2 class="process-name"></h2>
            <a class="session-download" download>Download session file</a>
          </div>
          <div class="progress-block">
            <progress class="triage-progress" max="1" value="0"></progress>
            <span class="progress-text"></span>
          </div>
          <button class="finish-review">View report</button>
        </header>
        <div class="triage-columns">
          <div class="diagram-host"></div>
          <div class="candidate-column">
            <div class="filters">
              <select class="element-filter"></select>
              <select class="principle-filter"></select>
              <button class="clear-filters">Clear</button>
            </div>
            <ul class="candidate-list"></ul>
          </div>
          <div class="detail-column"></div>
        </div>
        <p class="error triage-error hidden"></p>
      </section>`;

    this.diagram = new DiagramPane(
      must<HTMLElement>(this.container, '.diagram-host'),
      (elementId) => this.store.setElementFilter(elementId),
    );

    must<HTMLButtonElement>(this.container, '.finish-review').addEventListener(
      'click',
      () => this.handlers.onFinish(),
    );
    must<HTMLButtonElement>(this.container, '.clear-filters').addEventListener(
      'click',
      () => {
        this.store.setElementFilter(null);
        this.store.setPrincipleFilter(null);
      },
    );
    must<HTMLSelectElement>(this.container, '.element-filter').addEventListener(
      'change',
      (event) => {
        const value = (event.target as HTMLSelectElement).value;
        this.store.setElementFilter(value || null);
      },
    );
    must<HTMLSelectElement>(this.container, '.principle-filter').addEventListener(
      'change',
      (event) => {
        const value = (event.target as HTMLSelectElement).value;
        this.store.setPrincipleFilter(value || null);
      },
    );
  }

  render(): void {
    this.update();
  }

  update(): void {
    const store = this.store;
    must<HTMLElement>(this.container, '.process-name').textContent =
      store.session?.processName ?? '';

    const download = must<HTMLAnchorElement>(this.container, '.session-download');
    const selfLink = store.session?.links?.self;
    download.classList.toggle('hidden', !selfLink);
    if (selfLink) download.href = selfLink;

    // progress always reflects every candidate, filters included or not
    const { triaged, total } = store.view.progress;
    const pending = total - triaged;
    const bar = must<HTMLProgressElement>(this.container, '.triage-progress');
    bar.max = Math.max(total, 1);
    bar.value = triaged;
    const filtered = store.view.filterByElement || store.view.filterByPrinciple;
    must<HTMLElement>(this.container, '.progress-text').textContent =
      `${triaged} of ${total} triaged · ${pending} pending` +
      (filtered ? ' (all candidates; a filter is active)' : '');

    this.updateFilters();
    this.updateList();
    this.updateDetail();
    this.diagram.highlight(store.activeCandidate?.elementId ?? null);

    const error = must<HTMLElement>(this.container, '.triage-error');
    error.classList.toggle('hidden', !store.error);
    error.textContent = store.error;
  }

  private updateFilters(): void {
    const store = this.store;
    const elementFilter = must<HTMLSelectElement>(this.container, '.element-filter');
    elementFilter.innerHTML =
      '<option value="">All elements</option>' +
      store.elementOptions
        .map(
          (option) =>
            `<option value="${escapeHtml(option.elementId)}">${escapeHtml(option.name)}</option>`,
        )
        .join('');
    elementFilter.value = store.view.filterByElement ?? '';

    const principles = [
      ...new Set(store.candidates.flatMap((c) => c.matchedPrinciples)),
    ].sort();
    const principleFilter = must<HTMLSelectElement>(this.container, '.principle-filter');
    principleFilter.innerHTML =
      '<option value="">All principles</option>' +
      principles.map((p) => `<option value="${p}">${p}</option>`).join('');
    principleFilter.value = store.view.filterByPrinciple ?? '';
  }

  private updateList(): void {
    const store = this.store;
    const list = must<HTMLUListElement>(this.container, '.candidate-list');
    list.innerHTML = store.visibleCandidates
      .map((candidate) => {
        const active = candidate.candidateId === store.view.activeCandidate;
        return `
        <li class="candidate-item ${active ? 'active' : ''} verdict-${candidate.verdict}"
            data-candidate-id="${escapeHtml(candidate.candidateId)}">
          <span class="abbr">${escapeHtml(candidate.abbreviation)}</span>
          <span class="threat-name">${escapeHtml(candidate.name)}</span>
          <span class="element-name">${escapeHtml(
            store.displayName(candidate.elementId, candidate.elementName),
          )}</span>
          <span class="verdict-chip">${VERDICT_LABEL[candidate.verdict]}</span>
        </li>`;
      })
      .join('');
    for (const item of list.querySelectorAll<HTMLElement>('[data-candidate-id]')) {
      item.addEventListener('click', () => {
        this.store.setActive(item.dataset.candidateId as string);
      });
    }
  }

  private updateDetail(): void {
    const store = this.store;
    const detail = must<HTMLElement>(this.container, '.detail-column');
    const candidate = store.activeCandidate;
    if (!candidate) {
      detail.innerHTML = '<p class="hint">No candidate selected.</p>';
      this.lastDetailId = null;
      return;
    }
    // keep a half-typed rationale if the same candidate is being re-rendered
    const keepRationale =
      this.lastDetailId === candidate.candidateId
        ? detail.querySelector<HTMLTextAreaElement>('.rationale')?.value
        : undefined;
    this.lastDetailId = candidate.candidateId;

    detail.innerHTML = this.detailTemplate(candidate);
    const rationale = must<HTMLTextAreaElement>(detail, '.rationale');
    if (keepRationale !== undefined && keepRationale !== '') {
      rationale.value = keepRationale;
    }

    must<HTMLInputElement>(detail, '.alias-input').addEventListener('change', (event) => {
      store.setAlias(candidate.elementId, (event.target as HTMLInputElement).value);
    });
    for (const button of detail.querySelectorAll<HTMLButtonElement>('[data-verdict]')) {
      button.addEventListener('click', () => {
        this.handlers.onDecide(
          candidate.candidateId,
          button.dataset.verdict as Verdict,
          rationale.value,
        );
      });
    }
  }

  private detailTemplate(candidate: CandidateRow): string {
    const store = this.store;
    const alias = store.aliases.get(candidate.elementId) ?? '';
    return `
      <article class="candidate-detail">
        <h3>${escapeHtml(candidate.abbreviation)} · ${escapeHtml(candidate.name)}</h3>
        <p class="description">${escapeHtml(candidate.description)}</p>
        <dl>
          <dt>Element</dt>
          <dd>${escapeHtml(store.displayName(candidate.elementId, candidate.elementName))}
              <span class="kind">(${escapeHtml(candidate.elementKind)}${
                candidate.laneName ? `, lane ${escapeHtml(candidate.laneName)}` : ''
              })</span></dd>
          <dt>Matched principles</dt>
          <dd class="matched-principles">${candidate.matchedPrinciples
            .map((p) => `<span class="principle-tag">${escapeHtml(p)}</span>`)
            .join(' ')}</dd>
          <dt>Current verdict</dt>
          <dd class="current-verdict">${VERDICT_LABEL[candidate.verdict]}</dd>
        </dl>
        <label>Asset alias (report display name)
          <input type="text" class="alias-input" value="${escapeHtml(alias)}"
                 placeholder="${escapeHtml(candidate.elementName)}">
        </label>
        <label>Rationale
          <textarea class="rationale" rows="3"
            placeholder="why this threat does or does not apply">${escapeHtml(
              candidate.rationale,
            )}</textarea>
        </label>
        <div class="verdict-buttons">
          <button data-verdict="accepted" class="accept">Accept threat</button>
          <button data-verdict="rejected" class="reject">Reject</button>
          <button data-verdict="pending" class="defer">Mark pending</button>
        </div>
      </article>`;
  }
}
