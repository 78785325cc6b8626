// Server payload shapes for the /api/v1 endpoints. The UI renders these
// as-is; no threat knowledge lives on the client.

export const PRINCIPLES = [
  'Confidentiality',
  'Integrity',
  'Availability',
  'Authenticity',
  'Accountability',
] as const;

export type Principle = (typeof PRINCIPLES)[number];

export type Verdict = 'accepted' | 'rejected' | 'pending';

export interface CandidateRow {
  candidateId: string;
  threatId: string;
  abbreviation: string;
  name: string;
  description: string;
  elementId: string;
  elementName: string;
  elementKind: string;
  laneName: string | null;
  matchedPrinciples: string[];
  verdict: Verdict;
  rationale: string;
}

export interface SessionPayload {
  sessionId: string;
  processName: string;
  catalogDigest: string;
  modelDigest: string;
  candidates: CandidateRow[];
  links?: Record<string, string>;
}

export interface SummaryTotals {
  candidates: number;
  accepted: number;
  rejected: number;
  pending: number;
}

export interface SummaryRow {
  elementId: string;
  elementName: string;
  elementKind: string;
  candidates: number;
  accepted: number;
  rejected: number;
  pending: number;
}

export interface SummaryPayload {
  sessionId: string;
  totals: SummaryTotals;
  rows: SummaryRow[];
}

export interface ReportThreat {
  candidateId: string;
  threatId: string;
  abbreviation: string;
  name: string;
  rationale: string;
}

export interface ReportAsset {
  elementId: string;
  elementName: string;
  elementKind: string;
  laneName: string | null;
  acceptedCount: number;
  threats: ReportThreat[];
}

export interface LegendEntry {
  abbreviation: string;
  threatId: string;
  name: string;
  description: string;
}

export interface ColorBucket {
  label: string;
  color: string;
  min: number;
  max: number | null;
}

export interface ColorAssignment {
  elementId: string;
  count: number;
  label: string;
  color: string;
}

export interface ReportDocument {
  formatVersion: string;
  processName: string;
  generatedAt: string;
  toolVersion: string;
  objectives: { principles: string[]; notes: string };
  summary: {
    uniqueThreatCount: number;
    assetCount: number;
    acceptedCount: number;
    unfilteredCandidateCount: number;
    caveat: string;
  };
  assets: ReportAsset[];
  legend: LegendEntry[];
  colorScale: ColorBucket[];
  colorAssignments: ColorAssignment[];
  modelDigest: string;
  catalogDigest: string;
}

export interface CatalogThreat {
  threatId: string;
  abbreviation: string;
  name: string;
  description: string;
  principles: string[];
  entryPoints: string[];
}

export interface CatalogInfo {
  name: string;
  digest: string;
  schemaVersion: string;
  threatCount: number;
  threats: CatalogThreat[];
}

export interface DecisionInput {
  candidateId: string;
  verdict: Verdict;
  rationale: string;
}
