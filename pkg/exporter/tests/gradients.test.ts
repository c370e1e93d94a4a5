import { describe, expect, it } from "vitest";

import { buildDenseNet, logitAndGradient, logits } from "../src/model";
import { makeRng } from "../src/data";

describe("input gradients", () => {
    it("matches central finite differences on a fresh dense net", () => {
        const dim = 6;
        const sm = buildDenseNet(dim, 7);
        const rng = makeRng(123);
        const x = Array.from({ length: dim }, () => rng());
        const { f, grad } = logitAndGradient(sm, x);
        expect(logits(sm, [x])[0]).toBeCloseTo(f, 5);
        const h = 1e-3;
        for (let i = 0; i < dim; i++) {
            const plus = [...x];
            const minus = [...x];
            plus[i] += h;
            minus[i] -= h;
            const fd = (logits(sm, [plus])[0] - logits(sm, [minus])[0]) / (2 * h);
            expect(grad[i]).toBeCloseTo(fd, 3);
        }
    });

    it("is deterministic for a seeded model", () => {
        const a = buildDenseNet(4, 11);
        const b = buildDenseNet(4, 11);
        const x = [0.1, 0.2, 0.3, 0.4];
        expect(logitAndGradient(a, x)).toEqual(logitAndGradient(b, x));
    });
});

describe("training determinism", () => {
    it("two same-seed runs produce identical scores", async () => {
        const { syntheticBlobs } = await import("../src/data");
        const { trainModel } = await import("../src/model");
        const split = syntheticBlobs(9, 40, 8);
        const out: number[][] = [];
        for (const run of [0, 1]) {
            const sm = buildDenseNet(9, 13);
            await trainModel(sm, split.train, { epochs: 15, batchSize: 16 });
            out.push(logits(sm, split.test.xs));
        }
        expect(out[0]).toEqual(out[1]);
    }, 120_000);
});
