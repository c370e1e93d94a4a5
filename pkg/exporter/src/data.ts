/**
 * Data sources: the bundled MNIST digits (offline npm package) and a tiny
 * synthetic blob task for fast tests.
 *
 * Binary labels are +1 / -1; +1 is the second digit of the pair, matching
 * the sign of the trained scalar score.
 */

export interface BinaryDataset {
    /** flattened images, row-major */
    xs: number[][];
    /** +1 / -1 */
    labels: number[];
    /** side length for square images, or 0 for flat features */
    imageSize: number;
}

export interface SplitDataset {
    train: BinaryDataset;
    test: BinaryDataset;
}

function interleave(a: number[][], b: number[][]): { xs: number[][]; labels: number[] } {
    // Alternate the classes so fixed-order mini-batches stay balanced.
    const xs: number[][] = [];
    const labels: number[] = [];
    const longest = Math.max(a.length, b.length);
    for (let i = 0; i < longest; i++) {
        if (i < a.length) {
            xs.push(a[i]);
            labels.push(-1);
        }
        if (i < b.length) {
            xs.push(b[i]);
            labels.push(1);
        }
    }
    return { xs, labels };
}

export function loadMnistPair(
    digitA: number,
    digitB: number,
    trainPerClass: number,
): SplitDataset {
    // eslint-disable-next-line @typescript-eslint/no-var-requires
    const mnist = require("mnist");
    const a = mnist[digitA];
    const b = mnist[digitB];
    if (!a || !b) throw new Error(`digits must be 0..9, got ${digitA}, ${digitB}`);
    const takeRange = (set: { get: (i: number) => number[]; length: number }, lo: number, hi: number) => {
        const out: number[][] = [];
        for (let i = lo; i < Math.min(hi, set.length); i++) out.push(set.get(i));
        return out;
    };
    const trainRaw = interleave(
        takeRange(a, 0, trainPerClass),
        takeRange(b, 0, trainPerClass),
    );
    const testRaw = interleave(
        takeRange(a, trainPerClass, a.length),
        takeRange(b, trainPerClass, b.length),
    );
    return {
        train: { ...trainRaw, imageSize: 28 },
        test: { ...testRaw, imageSize: 28 },
    };
}

/** Deterministic xorshift generator for test data. */
export function makeRng(seed: number): () => number {
    let s = seed >>> 0 || 1;
    return () => {
        s ^= s << 13;
        s ^= s >>> 17;
        s ^= s << 5;
        s >>>= 0;
        return s / 0xffffffff;
    };
}

/**
 * Two Gaussian-ish blobs in `dim` dimensions, linearly separable with a
 * visible margin; image side sqrt(dim) so the conv path works too.
 */
export function syntheticBlobs(
    dim: number,
    perClass: number,
    seed: number,
): SplitDataset {
    const rng = makeRng(seed);
    const normal = () => {
        const u = Math.max(rng(), 1e-12);
        const v = rng();
        return Math.sqrt(-2 * Math.log(u)) * Math.cos(2 * Math.PI * v);
    };
    const direction = Array.from({ length: dim }, () => normal());
    const norm = Math.hypot(...direction);
    const unit = direction.map((d) => d / norm);
    const sample = (sign: number) =>
        unit.map((u_i) => 0.5 + sign * 0.22 * u_i + 0.06 * normal());
    const half = Math.floor(perClass / 2);
    const mk = (count: number) => {
        const neg = Array.from({ length: count }, () => sample(-1));
        const pos = Array.from({ length: count }, () => sample(1));
        return interleave(neg, pos);
    };
    const side = Math.round(Math.sqrt(dim));
    const imageSize = side * side === dim ? side : 0;
    return {
        train: { ...mk(perClass), imageSize },
        test: { ...mk(half), imageSize },
    };
}
