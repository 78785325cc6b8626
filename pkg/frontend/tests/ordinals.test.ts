import { expect, test } from 'vitest';
import { assignOrdinals, countsByElement, nonNeutralAssignments } from '../src/ordinals';
import { cannedReport } from './helpers';

test('ordinals number accepted threats 1..N in server order', () => {
  const ordinals = assignOrdinals(cannedReport());
  expect([...ordinals.entries()]).toEqual([
    ['data-view:ds_register', 1],
    ['data-view:task_check', 2],
    ['data-corruption:task_check', 3],
  ]);
});

test('ordinals are stable across repeated assignment', () => {
  const report = cannedReport();
  expect([...assignOrdinals(report).entries()]).toEqual([
    ...assignOrdinals(report).entries(),
  ]);
});

test('counts-by-element mirrors the color assignments', () => {
  const counts = countsByElement(cannedReport());
  expect(counts.get('ds_register')).toBe(1);
  expect(counts.get('task_check')).toBe(2);
  expect(counts.get('ev_send')).toBe(0);
});

test('non-neutral assignments drop zero-count elements', () => {
  const hot = nonNeutralAssignments(cannedReport());
  expect(hot.map((a) => a.elementId)).toEqual(['ds_register', 'task_check']);
});
