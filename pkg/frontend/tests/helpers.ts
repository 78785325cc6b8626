import type {
  CandidateRow,
  ReportDocument,
  SessionPayload,
  SummaryPayload,
} from '../src/types';

export function candidate(overrides: Partial<CandidateRow>): CandidateRow {
  return {
    candidateId: 'data-view:ds_register',
    threatId: 'data-view',
    abbreviation: 'DV',
    name: 'Data view',
    description: 'Someone reads data they have no business reading.',
    elementId: 'ds_register',
    elementName: 'Register',
    elementKind: 'DataStoreReference',
    laneName: null,
    matchedPrinciples: ['Confidentiality'],
    verdict: 'pending',
    rationale: '',
    ...overrides,
  };
}

/** Four candidates over two elements, all pending. */
export function cannedSession(): SessionPayload {
  return {
    sessionId: 'sess-1',
    processName: 'Registration',
    catalogDigest: 'cat-digest',
    modelDigest: 'model-digest',
    candidates: [
      candidate({}),
      candidate({
        candidateId: 'data-deletion:ds_register',
        threatId: 'data-deletion',
        abbreviation: 'DD',
        name: 'Data deletion',
        matchedPrinciples: ['Availability'],
      }),
      candidate({
        candidateId: 'data-view:task_check',
        elementId: 'task_check',
        elementName: 'Check request',
        elementKind: 'UserTask',
        laneName: 'Clerk',
      }),
      candidate({
        candidateId: 'data-corruption:task_check',
        threatId: 'data-corruption',
        abbreviation: 'DC',
        name: 'Data corruption',
        elementId: 'task_check',
        elementName: 'Check request',
        elementKind: 'UserTask',
        laneName: 'Clerk',
        matchedPrinciples: ['Integrity'],
      }),
    ],
    links: { self: '/api/v1/sessions/sess-1' },
  };
}

export function cannedSummary(
  accepted: number,
  rejected: number,
  pending: number,
): SummaryPayload {
  return {
    sessionId: 'sess-1',
    totals: { candidates: accepted + rejected + pending, accepted, rejected, pending },
    rows: [],
  };
}

/** Two assets with accepted threats, one neutral element. */
export function cannedReport(): ReportDocument {
  return {
    formatVersion: '1',
    processName: 'Registration',
    generatedAt: '2026-08-16T12:00:00Z',
    toolVersion: '0.1.0',
    objectives: { principles: ['Confidentiality', 'Integrity'], notes: '' },
    summary: {
      uniqueThreatCount: 2,
      assetCount: 3,
      acceptedCount: 3,
      unfilteredCandidateCount: 6,
      caveat:
        'Findings reflect the selected principles only; widen the objectives to re-check excluded threats.',
    },
    assets: [
      {
        elementId: 'ds_register',
        elementName: 'Register',
        elementKind: 'DataStoreReference',
        laneName: null,
        acceptedCount: 1,
        threats: [
          {
            candidateId: 'data-view:ds_register',
            threatId: 'data-view',
            abbreviation: 'DV',
            name: 'Data view',
            rationale: 'open shelf',
          },
        ],
      },
      {
        elementId: 'task_check',
        elementName: 'Check request',
        elementKind: 'UserTask',
        laneName: 'Clerk',
        acceptedCount: 2,
        threats: [
          {
            candidateId: 'data-view:task_check',
            threatId: 'data-view',
            abbreviation: 'DV',
            name: 'Data view',
            rationale: '',
          },
          {
            candidateId: 'data-corruption:task_check',
            threatId: 'data-corruption',
            abbreviation: 'DC',
            name: 'Data corruption',
            rationale: 'no four-eyes check',
          },
        ],
      },
      {
        elementId: 'ev_send',
        elementName: 'Send letter',
        elementKind: 'SendTask',
        laneName: null,
        acceptedCount: 0,
        threats: [],
      },
    ],
    legend: [
      {
        abbreviation: 'DC',
        threatId: 'data-corruption',
        name: 'Data corruption',
        description: 'Deliberately wrong data entry.',
      },
      {
        abbreviation: 'DV',
        threatId: 'data-view',
        name: 'Data view',
        description: 'Unauthorized reading.',
      },
    ],
    colorScale: [
      { label: 'none', color: '#ffffff', min: 0, max: 0 },
      { label: 'low', color: '#ffe08a', min: 1, max: 1 },
      { label: 'elevated', color: '#ffab5e', min: 2, max: 3 },
      { label: 'high', color: '#ff6b51', min: 4, max: null },
    ],
    colorAssignments: [
      { elementId: 'ds_register', count: 1, label: 'low', color: '#ffe08a' },
      { elementId: 'task_check', count: 2, label: 'elevated', color: '#ffab5e' },
      { elementId: 'ev_send', count: 0, label: 'none', color: '#ffffff' },
    ],
    modelDigest: 'model-digest',
    catalogDigest: 'cat-digest',
  };
}
