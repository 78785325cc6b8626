import type { ColorAssignment, ReportDocument } from './types';

/** Stable ordinal per accepted threat: asset order, then threat order,
 * both fixed by the server. The same session always numbers the same way. */
export function assignOrdinals(report: ReportDocument): Map<string, number> {
  const ordinals = new Map<string, number>();
  let n = 0;
  for (const asset of report.assets) {
    for (const threat of asset.threats) {
      n += 1;
      ordinals.set(threat.candidateId, n);
    }
  }
  return ordinals;
}

export function countsByElement(report: ReportDocument): Map<string, number> {
  return new Map(report.colorAssignments.map((a) => [a.elementId, a.count]));
}

export function nonNeutralAssignments(report: ReportDocument): ColorAssignment[] {
  return report.colorAssignments.filter((a) => a.count > 0);
}
