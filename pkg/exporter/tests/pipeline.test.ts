import { execFileSync } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { beforeAll, describe, expect, it } from "vitest";

import { syntheticBlobs } from "../src/data";
import { exportFgmAttacks, exportLinearizations, linearizeAll } from "../src/export";
import { accuracy, buildDenseNet, epsilonFromMargins, trainModel } from "../src/model";

/**
 * End-to-end format compatibility: a tiny model trained on synthetic blobs,
 * exported, and consumed by the Python toolkit through its CLI only.
 */

const python = "python3";

function runToolkit(args: string[]): string {
    return execFileSync(python, ["-m", "eqsmooth.cli", ...args], {
        encoding: "utf8",
    });
}

describe("export-to-toolkit pipeline", () => {
    const dim = 16;
    let dir: string;
    let epsilon: number;
    let testRecords: ReturnType<typeof linearizeAll>;

    beforeAll(async () => {
        const split = syntheticBlobs(dim, 80, 5);
        const sm = buildDenseNet(dim, 21);
        await trainModel(sm, split.train, { epochs: 60, batchSize: 32, learningRate: 5e-3 });
        expect(accuracy(sm, split.train)).toBeGreaterThan(0.95);

        const trainLin = linearizeAll(sm, split.train);
        testRecords = linearizeAll(sm, split.test);
        epsilon = epsilonFromMargins(trainLin.margins, 0.6);
        expect(epsilon).toBeGreaterThan(0);

        dir = mkdtempSync(join(tmpdir(), "eqsmooth-export-"));
        writeFileSync(join(dir, "linz.jsonl"), exportLinearizations(testRecords, dim, epsilon));
        writeFileSync(join(dir, "attacks_fgm.jsonl"), exportFgmAttacks(testRecords, dim, epsilon));
    }, 180_000);

    it("toolkit solves the exported dataset without complaint", () => {
        runToolkit(["solve", "--data", join(dir, "linz.jsonl"), "--seed", "0",
            "--out", join(dir, "defense.json")]);
        const defense = JSON.parse(readFileSync(join(dir, "defense.json"), "utf8"));
        expect(defense.n).toBe(testRecords.records.length);
        expect(defense.phi_n).toBeGreaterThanOrEqual(0);
        expect(defense.v).toHaveLength(dim);
    }, 60_000);

    it("toolkit simulation of the exported FGM attack matches a local replay", () => {
        runToolkit(["simulate", "--data", join(dir, "linz.jsonl"),
            "--attack", "fixed", "--attack-file", join(dir, "attacks_fgm.jsonl"),
            "--defense", "none", "--out", join(dir, "fixed.csv")]);
        const csv = readFileSync(join(dir, "fixed.csv"), "utf8").trim().split("\n");
        const approx = Number(csv[1].split(",")[2]);
        // replay: undefended utility is decided by the margin |f| - eps*||g||
        let survived = 0;
        for (const r of testRecords.records) {
            const g = Math.hypot(...r.grad);
            if (Math.abs(r.f) - epsilon * g >= 0) survived++;
        }
        expect(approx).toBeCloseTo(survived / testRecords.records.length, 10);
    }, 60_000);

    it("solved defense coverage shows up as simulated accuracy under FGM", () => {
        runToolkit(["simulate", "--data", join(dir, "linz.jsonl"),
            "--attack", "fgm", "--defense", "fixed",
            "--defense-file", join(dir, "defense.json"),
            "--out", join(dir, "defended.csv")]);
        const defense = JSON.parse(readFileSync(join(dir, "defense.json"), "utf8"));
        const csv = readFileSync(join(dir, "defended.csv"), "utf8").trim().split("\n");
        expect(csv[0]).toBe("attack,defense,approx_acc,true_acc,mean_utility");
        const approx = Number(csv[1].split(",")[2]);
        expect(approx).toBe(defense.phi_n);
    }, 60_000);
});
