import { afterEach, describe, expect, test, vi } from 'vitest';
import { AppStore } from '../src/state';
import { ObjectivesPane } from '../src/views/objectives';
import { TriagePane } from '../src/views/triage';
import { ReportPane } from '../src/views/report';
import { DiagramPane } from '../src/views/diagram';
import { cannedReport, cannedSession } from './helpers';

let cleanup: (() => void)[] = [];

afterEach(() => {
  for (const fn of cleanup) fn();
  cleanup = [];
});

function host(): HTMLElement {
  const element = document.createElement('div');
  document.body.appendChild(element);
  cleanup.push(() => element.remove());
  return element;
}

/** Keep a pane in sync with its store the way the app shell does. */
function follow(store: AppStore, update: () => void): void {
  cleanup.push(store.subscribe(update));
}

describe('objectives pane', () => {
  test('zero principles selected leaves the action disabled with a hint', () => {
    const store = new AppStore();
    const container = host();
    new ObjectivesPane(container, store, () => undefined).render();

    const button = container.querySelector<HTMLButtonElement>('.start-review')!;
    const hint = container.querySelector<HTMLElement>('.start-hint')!;
    expect(button.disabled).toBe(true);
    expect(hint.classList.contains('hidden')).toBe(false);
    expect(hint.textContent).toContain('at least one security principle');
  });

  test('picking a principle enables the action', () => {
    const store = new AppStore();
    const container = host();
    const pane = new ObjectivesPane(container, store, () => undefined);
    pane.render();
    follow(store, () => pane.update());

    container
      .querySelector<HTMLInputElement>('[data-principle="Integrity"]')!
      .click();

    expect(store.selectedPrinciples.has('Integrity')).toBe(true);
    const button = container.querySelector<HTMLButtonElement>('.start-review')!;
    expect(button.disabled).toBe(false);
    expect(container.querySelector('.start-hint')!.classList.contains('hidden')).toBe(true);
  });

  test('submitting without a file explains what is missing', () => {
    const store = new AppStore();
    store.togglePrinciple('Integrity');
    const container = host();
    const onSubmit = vi.fn();
    new ObjectivesPane(container, store, onSubmit).render();

    container.querySelector<HTMLButtonElement>('.start-review')!.click();

    expect(onSubmit).not.toHaveBeenCalled();
    expect(container.querySelector('.start-hint')!.textContent).toContain(
      'Choose a BPMN diagram file',
    );
  });

  test('submitting with a file hands the form values to the app', () => {
    const store = new AppStore();
    store.togglePrinciple('Confidentiality');
    const container = host();
    const onSubmit = vi.fn();
    new ObjectivesPane(container, store, onSubmit).render();

    const file = new File(['<definitions/>'], 'proc.bpmn');
    const input = container.querySelector<HTMLInputElement>('.model-file')!;
    Object.defineProperty(input, 'files', { value: [file], configurable: true });
    container.querySelector<HTMLInputElement>('.process-name')!.value = 'Payroll';
    container.querySelector<HTMLInputElement>('.session-notes')!.value = 'pilot';

    container.querySelector<HTMLButtonElement>('.start-review')!.click();

    expect(onSubmit).toHaveBeenCalledWith({ file, processName: 'Payroll', notes: 'pilot' });
  });

  test('busy state blocks the action while a session is being created', () => {
    const store = new AppStore();
    store.togglePrinciple('Integrity');
    store.busy = true;
    const container = host();
    const pane = new ObjectivesPane(container, store, () => undefined);
    pane.render();

    expect(container.querySelector<HTMLButtonElement>('.start-review')!.disabled).toBe(true);
    expect(container.querySelector('.start-hint')!.textContent).toBe('Working…');
  });
});

function mountTriage(handlers = { onDecide: vi.fn(), onFinish: vi.fn() }) {
  const store = new AppStore();
  store.sessionCreated(cannedSession());
  const container = host();
  const pane = new TriagePane(container, store, handlers);
  pane.update();
  follow(store, () => pane.update());
  return { store, container, pane, handlers };
}

describe('triage pane', () => {
  test('lists every candidate and counts progress over all of them', () => {
    const { container } = mountTriage();
    expect(container.querySelectorAll('.candidate-item')).toHaveLength(4);
    expect(container.querySelector('.progress-text')!.textContent).toBe(
      '0 of 4 triaged · 4 pending',
    );
  });

  test('clicking a candidate shows its detail', () => {
    const { container } = mountTriage();
    container
      .querySelector<HTMLElement>('[data-candidate-id="data-corruption:task_check"]')!
      .click();

    const detail = container.querySelector('.candidate-detail')!;
    expect(detail.querySelector('h3')!.textContent).toContain('Data corruption');
    expect(detail.querySelector('.kind')!.textContent).toContain('UserTask');
    expect(detail.querySelector('.kind')!.textContent).toContain('lane Clerk');
    expect(
      [...detail.querySelectorAll('.principle-tag')].map((t) => t.textContent),
    ).toEqual(['Integrity']);
  });

  test('verdict buttons forward the typed rationale', () => {
    const { container, handlers } = mountTriage();
    const rationale = container.querySelector<HTMLTextAreaElement>('.rationale')!;
    rationale.value = 'front desk copies';
    container.querySelector<HTMLButtonElement>('[data-verdict="accepted"]')!.click();

    expect(handlers.onDecide).toHaveBeenCalledWith(
      'data-view:ds_register',
      'accepted',
      'front desk copies',
    );
  });

  test('element filter narrows the list but not the progress counts', () => {
    const { store, container } = mountTriage();
    store.setElementFilter('task_check');

    expect(container.querySelectorAll('.candidate-item')).toHaveLength(2);
    expect(container.querySelector('.progress-text')!.textContent).toBe(
      '0 of 4 triaged · 4 pending (all candidates; a filter is active)',
    );
  });

  test('verdicts show up as chips after a store update', () => {
    const { store, container } = mountTriage();
    store.applyVerdict('data-view:ds_register', 'accepted', '');

    const item = container.querySelector('[data-candidate-id="data-view:ds_register"]')!;
    expect(item.classList.contains('verdict-accepted')).toBe(true);
    expect(container.querySelector('.progress-text')!.textContent).toBe(
      '1 of 4 triaged · 3 pending',
    );
  });

  test('the alias input renames the element everywhere it is displayed', () => {
    const { store, container } = mountTriage();
    const alias = container.querySelector<HTMLInputElement>('.alias-input')!;
    alias.value = 'insuree master data';
    alias.dispatchEvent(new Event('change', { bubbles: true }));

    expect(store.aliases.get('ds_register')).toBe('insuree master data');
    const option = container.querySelector<HTMLOptionElement>(
      '.element-filter option[value="ds_register"]',
    )!;
    expect(option.textContent).toBe('insuree master data');
  });

  test('finish button hands off to the app', () => {
    const { container, handlers } = mountTriage();
    container.querySelector<HTMLButtonElement>('.finish-review')!.click();
    expect(handlers.onFinish).toHaveBeenCalled();
  });

  test('the session file download link comes from the server links', () => {
    const { container } = mountTriage();
    const link = container.querySelector<HTMLAnchorElement>('.session-download')!;
    expect(link.classList.contains('hidden')).toBe(false);
    expect(link.getAttribute('href')).toBe('/api/v1/sessions/sess-1');
  });
});

function mountReport() {
  const store = new AppStore();
  store.sessionCreated(cannedSession());
  store.reportReady(cannedReport(), '<svg data-test="overlay"></svg>');
  const container = host();
  const pane = new ReportPane(
    container,
    store,
    { onBackToTriage: vi.fn(), onNewSession: vi.fn() },
    {
      json: '/api/v1/sessions/sess-1/report?format=json',
      markdown: '/api/v1/sessions/sess-1/report?format=md',
      svg: '/api/v1/sessions/sess-1/report?format=svg',
      session: '/api/v1/sessions/sess-1',
    },
  );
  pane.render();
  return { store, container, pane };
}

describe('report pane', () => {
  test('summarizes totals from the server report', () => {
    const { container } = mountReport();
    expect(container.querySelector('.report-title')!.textContent).toBe(
      'Registration: accepted threats',
    );
    expect(container.querySelector('.report-totals')!.textContent).toContain(
      '2 distinct threats across 2 of 3 assets',
    );
    expect(container.querySelector('.caveat')!.textContent).toContain(
      'selected principles only',
    );
  });

  test('threats carry stable ordinal numbers in server order', () => {
    const { container } = mountReport();
    const items = [...container.querySelectorAll<HTMLLIElement>('.walkthrough-item')];
    expect(items).toHaveLength(3);
    expect(items.map((i) => i.getAttribute('value'))).toEqual(['1', '2', '3']);
    expect(items[0].textContent).toContain('Data view');
    expect(items[0].textContent).toContain('at Register');
    expect(items[2].textContent).toContain('Data corruption');
  });

  test('every accepted threat code appears in the legend', () => {
    const { container } = mountReport();
    const entries = [...container.querySelectorAll('.legend-entry')];
    expect(entries).toHaveLength(2);
    expect(entries[0].textContent).toContain('DC');
    expect(entries[0].textContent).toContain('Deliberately wrong data entry.');
    expect(entries[1].textContent).toContain('DV');
  });

  test('the color scale table lists every bucket with its range', () => {
    const { container } = mountReport();
    const rows = [...container.querySelectorAll('.legend-table tbody tr')];
    expect(rows).toHaveLength(4);
    expect(rows[0].textContent).toContain('none');
    expect(rows[2].textContent).toContain('2–3');
    expect(rows[3].textContent).toContain('≥ 4');
  });

  test('asset aliases reach the report walkthrough', () => {
    const store = new AppStore();
    store.sessionCreated(cannedSession());
    store.setAlias('task_check', 'Hand check');
    store.reportReady(cannedReport(), '<svg></svg>');
    const container = host();
    const pane = new ReportPane(
      container,
      store,
      { onBackToTriage: vi.fn(), onNewSession: vi.fn() },
      { json: '', markdown: '', svg: '', session: '' },
    );
    pane.render();

    const second = container.querySelectorAll('.walkthrough-item')[1];
    expect(second.textContent).toContain('at Hand check');
  });

  test('export links point at the server endpoints', () => {
    const { container } = mountReport();
    expect(container.querySelector<HTMLAnchorElement>('.export-md')!.getAttribute('href')).toBe(
      '/api/v1/sessions/sess-1/report?format=md',
    );
    expect(
      container.querySelector<HTMLAnchorElement>('.export-session')!.getAttribute('href'),
    ).toBe('/api/v1/sessions/sess-1');
  });

  test('the embedded diagram is the server-rendered overlay', () => {
    const { container, pane } = mountReport();
    pane.showDiagram('<svg data-test="overlay"><g data-element-id="x"></g></svg>');
    expect(container.querySelector('.diagram-host svg[data-test="overlay"]')).not.toBeNull();
  });
});

describe('diagram pane in svg mode', () => {
  test('clicks resolve to the owning element id', () => {
    const clicks: (string | null)[] = [];
    const container = host();
    const pane = new DiagramPane(container, (id) => clicks.push(id));
    pane.showSvg('<svg><g data-element-id="task_check"><rect></rect></g></svg>');

    container.querySelector<SVGRectElement>('rect')!.dispatchEvent(
      new MouseEvent('click', { bubbles: true }),
    );
    expect(clicks).toEqual(['task_check']);
  });

  test('highlight marks exactly the active element', () => {
    const container = host();
    const pane = new DiagramPane(container, () => undefined);
    pane.showSvg(
      '<svg><g data-element-id="a"></g><g data-element-id="b"></g></svg>',
    );

    pane.highlight('a');
    expect(container.querySelectorAll('.io-active')).toHaveLength(1);
    pane.highlight('b');
    const active = [...container.querySelectorAll('.io-active')];
    expect(active.map((n) => n.getAttribute('data-element-id'))).toEqual(['b']);
    pane.highlight(null);
    expect(container.querySelectorAll('.io-active')).toHaveLength(0);
  });
});
