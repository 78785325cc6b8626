import type {
  CatalogInfo,
  DecisionInput,
  ReportDocument,
  SessionPayload,
  SummaryPayload,
} from './types';

export class ApiRequestError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = 'ApiRequestError';
  }
}

type FetchFn = typeof fetch;

/** Thin typed client for the service's /api/v1 endpoints. */
export class ApiClient {
  private readonly fetchFn: FetchFn;

  constructor(
    readonly base: string = '',
    fetchFn?: FetchFn,
  ) {
    this.fetchFn = fetchFn ?? globalThis.fetch.bind(globalThis);
  }

  private url(path: string): string {
    return `${this.base}/api/v1${path}`;
  }

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const response = await this.fetchFn(this.url(path), init);
    if (!response.ok) {
      let code = 'HttpError';
      let message = `${response.status} ${response.statusText}`;
      try {
        const body = await response.json();
        if (body?.error?.code) {
          code = body.error.code;
          message = body.error.message ?? message;
        }
      } catch {
        // non-JSON error body; keep the status line
      }
      throw new ApiRequestError(response.status, code, message);
    }
    return response;
  }

  async createSession(
    model: Blob,
    filename: string,
    principles: string[],
    processName = '',
    notes = '',
  ): Promise<SessionPayload> {
    const form = new FormData();
    form.append('model', model, filename);
    form.append('principles', principles.join(','));
    if (processName) form.append('process_name', processName);
    if (notes) form.append('notes', notes);
    const response = await this.request('/sessions', { method: 'POST', body: form });
    return response.json();
  }

  async getCandidates(sessionId: string): Promise<SessionPayload> {
    const response = await this.request(`/sessions/${sessionId}/candidates`);
    return response.json();
  }

  async postDecisions(
    sessionId: string,
    decisions: DecisionInput[],
  ): Promise<SummaryPayload> {
    const response = await this.request(`/sessions/${sessionId}/decisions`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ decisions }),
    });
    return response.json();
  }

  async getReport(sessionId: string): Promise<ReportDocument> {
    const response = await this.request(`/sessions/${sessionId}/report?format=json`);
    return response.json();
  }

  async getReportText(sessionId: string, format: 'md' | 'svg'): Promise<string> {
    const response = await this.request(`/sessions/${sessionId}/report?format=${format}`);
    return response.text();
  }

  async getCatalog(): Promise<CatalogInfo> {
    const response = await this.request('/catalog');
    return response.json();
  }

  /** Direct hrefs for the export buttons; the server sets download headers. */
  sessionFileUrl(sessionId: string): string {
    return this.url(`/sessions/${sessionId}`);
  }

  reportUrl(sessionId: string, format: 'json' | 'md' | 'svg'): string {
    return this.url(`/sessions/${sessionId}/report?format=${format}`);
  }
}
