import { describe, expect, it } from "vitest";

import { fgmFromLinearization, fgmVector, pgdVector } from "../src/attacks";
import { makeRng } from "../src/data";
import { buildDenseNet, logitAndGradient } from "../src/model";

const norm = (v: number[]) => Math.hypot(...v);

describe("fgm", () => {
    it("has norm epsilon and opposes the signed gradient", () => {
        const a = fgmFromLinearization(2.0, [3, 4], 0.1);
        expect(a[0]).toBeCloseTo(-0.06, 12);
        expect(a[1]).toBeCloseTo(-0.08, 12);
        const b = fgmFromLinearization(-2.0, [3, 4], 0.1);
        expect(b[0]).toBeCloseTo(0.06, 12);
        expect(norm(a)).toBeCloseTo(0.1, 9);
    });

    it("returns zero for a vanished gradient", () => {
        expect(fgmFromLinearization(1.0, [0, 0], 0.5)).toEqual([0, 0]);
    });
});

describe("pgd", () => {
    const dim = 5;
    const sm = buildDenseNet(dim, 3);
    const rng = makeRng(99);
    const points = Array.from({ length: 8 }, () =>
        Array.from({ length: dim }, () => rng()),
    );

    it("stays within the budget", () => {
        for (const x of points) {
            const a = pgdVector(sm, x, 0.2, 10);
            expect(norm(a)).toBeLessThanOrEqual(0.2 * (1 + 1e-6));
        }
    });

    it("single iteration equals fgm", () => {
        for (const x of points) {
            const a1 = pgdVector(sm, x, 0.2, 1);
            const fgm = fgmVector(sm, x, 0.2);
            for (let i = 0; i < dim; i++) expect(a1[i]).toBeCloseTo(fgm[i], 10);
        }
    });

    it("is deterministic", () => {
        const x = points[0];
        expect(pgdVector(sm, x, 0.15, 5)).toEqual(pgdVector(sm, x, 0.15, 5));
    });

    it("lands on the epsilon sphere whenever the gradient is alive", () => {
        for (const x of points) {
            const { grad } = logitAndGradient(sm, x);
            if (norm(grad) === 0) continue;
            const a = pgdVector(sm, x, 0.2, 10);
            expect(norm(a)).toBeCloseTo(0.2, 9);
        }
    });
});
