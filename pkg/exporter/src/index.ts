export { fgmFromLinearization, fgmVector, pgdVector } from "./attacks";
export { BinaryDataset, SplitDataset, loadMnistPair, makeRng, syntheticBlobs } from "./data";
export {
    Linearizations,
    exportFgmAttacks,
    exportLinearizations,
    exportPgdAttacks,
    linearizeAll,
} from "./export";
export {
    ATTACK_FORMAT,
    DATASET_FORMAT,
    FORMAT_VERSION,
    LinearizationRecord,
    attacksToJsonl,
    datasetToJsonl,
    parseAttackJsonl,
    parseDatasetJsonl,
} from "./jsonl";
export {
    ScalarModel,
    accuracy,
    buildConvNet,
    buildDenseNet,
    epsilonFromMargins,
    logitAndGradient,
    logits,
    trainModel,
} from "./model";
