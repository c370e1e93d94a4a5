/**
 * Turn a trained model and an evaluation split into the toolkit's files:
 * linearization records (score + input gradient per example) and per-example
 * attack vectors, index-aligned.
 */

import { fgmFromLinearization, pgdVector } from "./attacks";
import { BinaryDataset } from "./data";
import { LinearizationRecord, attacksToJsonl, datasetToJsonl } from "./jsonl";
import { ScalarModel, logitAndGradient } from "./model";

export interface Linearizations {
    records: LinearizationRecord[];
    /** |f| / ||grad|| per example: distance to the linearized boundary */
    margins: number[];
}

export function linearizeAll(sm: ScalarModel, data: BinaryDataset): Linearizations {
    const records: LinearizationRecord[] = [];
    const margins: number[] = [];
    for (let i = 0; i < data.xs.length; i++) {
        const x = data.xs[i];
        const { f, grad } = logitAndGradient(sm, x);
        // f is never exactly zero in practice; fall back to the class label
        // (legal in the format) rather than dropping the example
        const label = f !== 0 ? (f > 0 ? 1 : -1) : data.labels[i];
        records.push({ f, grad, label, x });
        const g = Math.hypot(...grad);
        margins.push(g > 0 ? Math.abs(f) / g : Number.POSITIVE_INFINITY);
    }
    return { records, margins };
}

export function exportLinearizations(
    lin: Linearizations,
    dim: number,
    epsilon: number,
): string {
    return datasetToJsonl(lin.records, dim, epsilon);
}

export function exportFgmAttacks(lin: Linearizations, dim: number, epsilon: number): string {
    const vectors = lin.records.map((r) => fgmFromLinearization(r.f, r.grad, epsilon));
    return attacksToJsonl(vectors, dim, epsilon);
}

export function exportPgdAttacks(
    sm: ScalarModel,
    data: BinaryDataset,
    epsilon: number,
    iters: number,
): string {
    const vectors = data.xs.map((x) => pgdVector(sm, x, epsilon, iters));
    return attacksToJsonl(vectors, sm.dim, epsilon);
}
