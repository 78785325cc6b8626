import type { ColorAssignment } from '../types';

type ElementClick = (elementId: string | null) => void;

// minimal slice of the bpmn-js viewer surface this pane touches
interface ViewerHandle {
  importXML(xml: string): Promise<unknown>;
  get(name: string): any;
  destroy(): void;
}

/** Diagram surface. Prefers an embedded bpmn-js viewer; when the viewer
 * cannot start (no SVG measurement in the environment, import failure),
 * falls back to embedding the server-rendered overlay SVG. Both modes
 * support click-to-select and element highlighting. */
export class DiagramPane {
  private viewer: ViewerHandle | null = null;
  private mode: 'viewer' | 'svg' | 'empty' = 'empty';
  private highlighted: string | null = null;

  constructor(
    private readonly container: HTMLElement,
    private readonly onElementClick: ElementClick,
  ) {
    this.container.classList.add('diagram-pane');
    this.container.addEventListener('click', (event) => {
      if (this.mode !== 'svg') return;
      const target = (event.target as Element | null)?.closest?.('[data-element-id]');
      this.onElementClick(target ? target.getAttribute('data-element-id') : null);
    });
  }

  async showModel(xml: string, fallbackSvg: string): Promise<void> {
    this.disposeViewer();
    try {
      const { default: NavigatedViewer } = await import('bpmn-js/lib/NavigatedViewer');
      const viewer = new NavigatedViewer({
        container: this.container,
      }) as unknown as ViewerHandle;
      await viewer.importXML(xml);
      viewer.get('canvas').zoom('fit-viewport');
      viewer.get('eventBus').on('element.click', (event: any) => {
        this.onElementClick(event?.element?.id ?? null);
      });
      this.viewer = viewer;
      this.mode = 'viewer';
    } catch {
      this.showSvg(fallbackSvg);
    }
  }

  /** Replace the surface with a server-rendered SVG string. */
  showSvg(svg: string): void {
    this.disposeViewer();
    this.container.innerHTML = svg;
    this.mode = svg.trim() ? 'svg' : 'empty';
  }

  highlight(elementId: string | null): void {
    if (this.mode === 'viewer' && this.viewer) {
      const canvas = this.viewer.get('canvas');
      if (this.highlighted) {
        try {
          canvas.removeMarker(this.highlighted, 'io-active');
        } catch {
          // element may not exist in the diagram
        }
      }
      if (elementId) {
        try {
          canvas.addMarker(elementId, 'io-active');
        } catch {
          elementId = null;
        }
      }
      this.highlighted = elementId;
      return;
    }
    for (const node of this.container.querySelectorAll('.io-active')) {
      node.classList.remove('io-active');
    }
    if (elementId) {
      for (const node of this.container.querySelectorAll(
        `[data-element-id="${elementId}"]`,
      )) {
        node.classList.add('io-active');
      }
    }
    this.highlighted = elementId;
  }

  /** Tint elements by their report bucket and badge them with counts.
   * In svg mode the server overlay is already tinted, so it is embedded
   * as-is. */
  applyReport(assignments: ColorAssignment[], overlaySvg: string): void {
    if (this.mode !== 'viewer' || !this.viewer) {
      this.showSvg(overlaySvg);
      return;
    }
    const registry = this.viewer.get('elementRegistry');
    const overlays = this.viewer.get('overlays');
    for (const assignment of assignments) {
      const gfx = registry.getGraphics?.(assignment.elementId);
      const visual = gfx?.querySelector?.('.djs-visual > *');
      if (visual) visual.style.fill = assignment.color;
      if (assignment.count > 0) {
        try {
          overlays.add(assignment.elementId, {
            position: { top: -10, right: 10 },
            html: `<div class="io-badge">${assignment.count}</div>`,
          });
        } catch {
          // overlay host missing; tint alone still shows the bucket
        }
      }
    }
  }

  private disposeViewer(): void {
    if (this.viewer) {
      try {
        this.viewer.destroy();
      } catch {
        // already torn down
      }
      this.viewer = null;
    }
    this.container.innerHTML = '';
    this.mode = 'empty';
    this.highlighted = null;
  }
}
