/**
 * train-export pipeline: train the binary classifier on a bundled MNIST
 * digit pair, choose the perturbation budget from the training margin
 * distribution, and write the linearization and attack files plus a metrics
 * summary.
 *
 * Outputs in --out-dir:
 *   linearizations.jsonl   eqsmooth-linz records for the test split
 *   attacks_fgm.jsonl      FGM vectors, index-aligned
 *   attacks_pgd.jsonl      PGD vectors against the true model
 *   metrics.json           clean accuracies, epsilon, sizes, loss history
 */

import { mkdirSync, writeFileSync } from "node:fs";
import { join } from "node:path";
import { parseArgs } from "node:util";

import { loadMnistPair } from "./data";
import {
    exportFgmAttacks,
    exportLinearizations,
    exportPgdAttacks,
    linearizeAll,
} from "./export";
import { accuracy, buildConvNet, epsilonFromMargins, trainModel } from "./model";

async function run(): Promise<number> {
    const { values } = parseArgs({
        options: {
            "digit-a": { type: "string", default: "0" },
            "digit-b": { type: "string", default: "1" },
            "train-per-class": { type: "string", default: "800" },
            epochs: { type: "string", default: "4" },
            "batch-size": { type: "string", default: "64" },
            lr: { type: "string", default: "3e-3" },
            seed: { type: "string", default: "1" },
            epsilon: { type: "string" },
            "epsilon-quantile": { type: "string", default: "0.6" },
            "pgd-iters": { type: "string", default: "10" },
            "out-dir": { type: "string" },
        },
    });
    if (!values["out-dir"]) {
        console.error("error: --out-dir is required");
        return 2;
    }
    const outDir = values["out-dir"]!;
    const seed = Number(values.seed);

    console.log(`loading digits ${values["digit-a"]} vs ${values["digit-b"]} ...`);
    const split = loadMnistPair(
        Number(values["digit-a"]),
        Number(values["digit-b"]),
        Number(values["train-per-class"]),
    );
    console.log(`train ${split.train.xs.length}, test ${split.test.xs.length}`);

    const sm = buildConvNet(split.train.imageSize, seed);
    console.log(`training for ${values.epochs} epochs ...`);
    const lossHistory = await trainModel(sm, split.train, {
        epochs: Number(values.epochs),
        batchSize: Number(values["batch-size"]),
        learningRate: Number(values.lr),
    });
    const trainAcc = accuracy(sm, split.train);
    const testAcc = accuracy(sm, split.test);
    console.log(`clean accuracy: train ${trainAcc.toFixed(4)}, test ${testAcc.toFixed(4)}`);

    console.log("linearizing the test split ...");
    const testLin = linearizeAll(sm, split.test);
    let epsilon: number;
    if (values.epsilon !== undefined) {
        epsilon = Number(values.epsilon);
    } else {
        const trainLin = linearizeAll(sm, split.train);
        epsilon = epsilonFromMargins(trainLin.margins, Number(values["epsilon-quantile"]));
    }
    console.log(`epsilon = ${epsilon}`);

    mkdirSync(outDir, { recursive: true });
    writeFileSync(join(outDir, "linearizations.jsonl"), exportLinearizations(testLin, sm.dim, epsilon));
    writeFileSync(join(outDir, "attacks_fgm.jsonl"), exportFgmAttacks(testLin, sm.dim, epsilon));
    console.log("running PGD against the true model ...");
    writeFileSync(
        join(outDir, "attacks_pgd.jsonl"),
        exportPgdAttacks(sm, split.test, epsilon, Number(values["pgd-iters"])),
    );
    writeFileSync(
        join(outDir, "metrics.json"),
        JSON.stringify(
            {
                digit_a: Number(values["digit-a"]),
                digit_b: Number(values["digit-b"]),
                n_train: split.train.xs.length,
                n_test: split.test.xs.length,
                clean_train_accuracy: trainAcc,
                clean_test_accuracy: testAcc,
                epsilon,
                seed,
                loss_history: lossHistory,
            },
            null,
            2,
        ) + "\n",
    );
    console.log(`wrote ${outDir}/{linearizations,attacks_fgm,attacks_pgd}.jsonl and metrics.json`);
    return 0;
}

run()
    .then((code) => process.exit(code))
    .catch((err) => {
        console.error(`error: ${err?.message ?? err}`);
        process.exit(1);
    });
