import type { AppStore } from '../state';
import type { ReportDocument } from '../types';
import { assignOrdinals, nonNeutralAssignments } from '../ordinals';
import { escapeHtml, must } from './dom';
import { DiagramPane } from './diagram';

export interface ReportHandlers {
  onBackToTriage(): void;
  onNewSession(): void;
}

/** Final report screen: tinted diagram, numbered threat walkthrough,
 * color legend, and export links. */
export class ReportPane {
  readonly diagram: DiagramPane;

  constructor(
    private readonly container: HTMLElement,
    private readonly store: AppStore,
    private readonly handlers: ReportHandlers,
    exports: { json: string; markdown: string; svg: string; session: string },
  ) {
    this.container.innerHTML = `
      <section class="pane report-pane">
        <header class="report-header">
          <h2 class="report-title"></h2>
          <p class="report-totals"></p>
          <nav class="export-links">
            <a class="export-json" download>Report JSON</a>
            <a class="export-md" download>Markdown</a>
            <a class="export-svg" download>Annotated SVG</a>
            <a class="export-session" download>Session file</a>
          </nav>
          <div class="report-nav">
            <button class="back-to-triage">Back to review</button>
            <button class="new-session">New session</button>
          </div>
        </header>
        <div class="report-columns">
          <div class="diagram-host"></div>
          <aside class="report-sidebar">
            <h3>Identified threats</h3>
            <ol class="threat-walkthrough"></ol>
            <h3>Threat codes</h3>
            <ul class="threat-legend"></ul>
            <h3>Color scale</h3>
            <table class="legend-table">
              <thead><tr><th>Color</th><th>Range</th><th>Meaning</th></tr></thead>
              <tbody></tbody>
            </table>
            <p class="caveat"></p>
          </aside>
        </div>
      </section>`;

    this.diagram = new DiagramPane(
      must<HTMLElement>(this.container, '.diagram-host'),
      () => undefined,
    );
    must<HTMLButtonElement>(this.container, '.back-to-triage').addEventListener(
      'click',
      () => this.handlers.onBackToTriage(),
    );
    must<HTMLButtonElement>(this.container, '.new-session').addEventListener(
      'click',
      () => this.handlers.onNewSession(),
    );
    must<HTMLAnchorElement>(this.container, '.export-json').href = exports.json;
    must<HTMLAnchorElement>(this.container, '.export-md').href = exports.markdown;
    must<HTMLAnchorElement>(this.container, '.export-svg').href = exports.svg;
    must<HTMLAnchorElement>(this.container, '.export-session').href = exports.session;
  }

  render(): void {
    const report = this.store.report;
    if (!report) return;
    must<HTMLElement>(this.container, '.report-title').textContent =
      `${report.processName}: accepted threats`;
    must<HTMLElement>(this.container, '.report-totals').textContent =
      `${report.summary.uniqueThreatCount} distinct threats across ` +
      `${nonNeutralAssignments(report).length} of ${report.summary.assetCount} assets · ` +
      `generated ${report.generatedAt}`;
    this.renderWalkthrough(report);
    this.renderThreatLegend(report);
    this.renderColorScale(report);
    must<HTMLElement>(this.container, '.caveat').textContent = report.summary.caveat;
  }

  private renderWalkthrough(report: ReportDocument): void {
    const store = this.store;
    const ordinals = assignOrdinals(report);
    const list = must<HTMLOListElement>(this.container, '.threat-walkthrough');
    const items: string[] = [];
    for (const asset of report.assets) {
      if (asset.threats.length === 0) continue;
      const name = store.displayName(asset.elementId, asset.elementName);
      for (const threat of asset.threats) {
        items.push(`
          <li class="walkthrough-item" value="${ordinals.get(threat.candidateId)}"
              data-element-id="${escapeHtml(asset.elementId)}">
            <strong>${escapeHtml(threat.abbreviation)}</strong>
            ${escapeHtml(threat.name)}
            <span class="at-element">at ${escapeHtml(name)}</span>
          </li>`);
      }
    }
    list.innerHTML = items.join('');
  }

  private renderThreatLegend(report: ReportDocument): void {
    const list = must<HTMLUListElement>(this.container, '.threat-legend');
    list.innerHTML = report.legend
      .map(
        (entry) => `
        <li class="legend-entry">
          <strong>${escapeHtml(entry.abbreviation)}</strong>
          ${escapeHtml(entry.name)}
          <span class="legend-desc">${escapeHtml(entry.description)}</span>
        </li>`,
      )
      .join('');
  }

  private renderColorScale(report: ReportDocument): void {
    const body = must<HTMLTableSectionElement>(this.container, '.legend-table tbody');
    body.innerHTML = report.colorScale
      .map((bucket) => {
        const range =
          bucket.max === null
            ? `≥ ${bucket.min}`
            : bucket.min === bucket.max
              ? `${bucket.min}`
              : `${bucket.min}–${bucket.max}`;
        return `
        <tr>
          <td><span class="swatch" style="background:${escapeHtml(bucket.color)}"></span></td>
          <td>${range}</td>
          <td>${escapeHtml(bucket.label)}</td>
        </tr>`;
      })
      .join('');
  }

  showDiagram(svg: string): void {
    // the server-rendered SVG already carries tint and badges, so it is
    // the annotation layer rather than a mere fallback
    this.diagram.showSvg(svg);
  }
}
