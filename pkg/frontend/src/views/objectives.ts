import type { AppStore } from '../state';
import { PRINCIPLES, type Principle } from '../types';
import { escapeHtml, must } from './dom';

export interface ObjectivesSubmit {
  file: File;
  processName: string;
  notes: string;
}

/** Landing pane: pick security principles, upload a BPMN file.
 * render() builds the DOM once; update() syncs the dynamic bits so the
 * file selection survives store changes. */
export class ObjectivesPane {
  constructor(
    private readonly container: HTMLElement,
    private readonly store: AppStore,
    private readonly onSubmit: (input: ObjectivesSubmit) => void,
  ) {}

  render(): void {
    this.container.innerHTML = `
      <section class="pane objectives-pane">
        <h2>Start a review</h2>
        <p class="hint catalog-line"></p>
        <fieldset>
          <legend>Security objectives</legend>
          <p class="hint">Pick at least one principle. Start with the one whose
          violation would hurt this process most; you can widen the review
          later with a fresh session.</p>
          <div class="principle-grid">
            ${PRINCIPLES.map(
              (p) => `
              <label class="principle-option">
                <input type="checkbox" data-principle="${p}">
                ${p}
              </label>`,
            ).join('')}
          </div>
        </fieldset>
        <fieldset>
          <legend>Process diagram</legend>
          <input type="file" class="model-file" accept=".bpmn,.xml">
          <label>Process name (optional)
            <input type="text" class="process-name" placeholder="taken from the diagram if empty">
          </label>
          <label>Notes (optional)
            <input type="text" class="session-notes">
          </label>
        </fieldset>
        <button class="start-review">Find candidate threats</button>
        <p class="start-hint"></p>
        <p class="error form-error hidden"></p>
      </section>`;

    for (const box of this.container.querySelectorAll<HTMLInputElement>('[data-principle]')) {
      box.addEventListener('change', () => {
        this.store.togglePrinciple(box.dataset.principle as Principle);
      });
    }
    must<HTMLButtonElement>(this.container, '.start-review').addEventListener(
      'click',
      () => this.submit(),
    );
    this.update();
  }

  update(): void {
    const store = this.store;
    must<HTMLElement>(this.container, '.catalog-line').textContent = store.catalog
      ? `${store.catalog.name} · ${store.catalog.threatCount} threat patterns`
      : 'catalog loading…';
    for (const box of this.container.querySelectorAll<HTMLInputElement>('[data-principle]')) {
      box.checked = store.selectedPrinciples.has(box.dataset.principle as Principle);
    }
    const disabled = !store.canStartSession || store.busy;
    must<HTMLButtonElement>(this.container, '.start-review').disabled = disabled;
    const hint = must<HTMLElement>(this.container, '.start-hint');
    hint.classList.toggle('hidden', !disabled);
    hint.textContent = store.busy
      ? 'Working…'
      : 'Select at least one security principle to enable the review.';
    const error = must<HTMLElement>(this.container, '.form-error');
    error.classList.toggle('hidden', !store.error);
    error.innerHTML = escapeHtml(store.error);
  }

  private submit(): void {
    const store = this.store;
    const fileInput = must<HTMLInputElement>(this.container, '.model-file');
    const file = fileInput.files?.[0];
    if (!store.canStartSession || store.busy) return;
    if (!file) {
      const hint = must<HTMLElement>(this.container, '.start-hint');
      hint.classList.remove('hidden');
      hint.textContent = 'Choose a BPMN diagram file first.';
      return;
    }
    this.onSubmit({
      file,
      processName: must<HTMLInputElement>(this.container, '.process-name').value,
      notes: must<HTMLInputElement>(this.container, '.session-notes').value,
    });
  }
}
