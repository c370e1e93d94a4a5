/**
 * JSONL interchange formats consumed by the eqsmooth toolkit.
 *
 * Both files start with a header line; every following line is one record.
 * JSON.stringify emits the shortest round-trip representation of every
 * number, which the toolkit requires for bit-exact reloads.
 */

export interface LinearizationRecord {
    /** classifier score f(x) */
    f: number;
    /** input gradient of f at x */
    grad: number[];
    /** sign of f (+1 / -1) */
    label: number;
    /** the input point itself (optional) */
    x?: number[];
}

export const DATASET_FORMAT = "eqsmooth-linz";
export const ATTACK_FORMAT = "eqsmooth-attack";
export const FORMAT_VERSION = 1;

export function datasetToJsonl(
    records: LinearizationRecord[],
    dim: number,
    epsilon: number,
): string {
    const header = { format: DATASET_FORMAT, version: FORMAT_VERSION, dim, epsilon };
    const lines = [JSON.stringify(header)];
    for (const r of records) {
        if (r.grad.length !== dim) {
            throw new Error(`gradient length ${r.grad.length} != dim ${dim}`);
        }
        if (r.f === 0) {
            throw new Error("record with zero score: sign undefined");
        }
        const row: Record<string, unknown> = { f: r.f, grad: r.grad, label: r.label };
        if (r.x) row.x = r.x;
        lines.push(JSON.stringify(row));
    }
    return lines.join("\n") + "\n";
}

export function attacksToJsonl(vectors: number[][], dim: number, epsilon: number): string {
    const header = { format: ATTACK_FORMAT, version: FORMAT_VERSION, dim, epsilon };
    const lines = [JSON.stringify(header)];
    for (const a of vectors) {
        if (a.length !== dim) {
            throw new Error(`attack vector length ${a.length} != dim ${dim}`);
        }
        lines.push(JSON.stringify({ a }));
    }
    return lines.join("\n") + "\n";
}

/** Parse a dataset file back (used by tests to verify round-trips). */
export function parseDatasetJsonl(text: string): {
    dim: number;
    epsilon: number;
    records: LinearizationRecord[];
} {
    const lines = text.split("\n").filter((l) => l.trim().length > 0);
    const header = JSON.parse(lines[0]);
    if (header.format !== DATASET_FORMAT || header.version !== FORMAT_VERSION) {
        throw new Error("not an eqsmooth-linz file");
    }
    const records = lines.slice(1).map((l) => JSON.parse(l) as LinearizationRecord);
    return { dim: header.dim, epsilon: header.epsilon, records };
}

export function parseAttackJsonl(text: string): { dim: number; epsilon: number; vectors: number[][] } {
    const lines = text.split("\n").filter((l) => l.trim().length > 0);
    const header = JSON.parse(lines[0]);
    if (header.format !== ATTACK_FORMAT || header.version !== FORMAT_VERSION) {
        throw new Error("not an eqsmooth-attack file");
    }
    return {
        dim: header.dim,
        epsilon: header.epsilon,
        vectors: lines.slice(1).map((l) => (JSON.parse(l) as { a: number[] }).a),
    };
}
