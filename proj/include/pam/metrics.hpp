#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pam/tensor_store.hpp"

namespace pam {

struct ScoredLabel {
    double score = 0.0;
    bool positive = false;
};

// A group of cells sharing one score. The metric kernels work on these so
// that the large all-zero block of an evaluation never has to be expanded.
struct ScoreGroup {
    double score = 0.0;
    std::uint64_t positives = 0;
    std::uint64_t negatives = 0;
};

// Merges equal scores and orders groups by descending score.
std::vector<ScoreGroup> group_scores(std::span<const ScoredLabel> cells);
std::vector<ScoreGroup> normalize_groups(std::vector<ScoreGroup> groups);

// Area under the precision-recall curve: sum over descending thresholds of
// (R_k - R_{k-1}) * P_k, each tie group forming one step. Throws NoPositives.
double average_precision(std::span<const ScoredLabel> cells);
double average_precision(std::span<const ScoreGroup> groups);

// Mann-Whitney estimate of ROC AUC with ties credited 1/2. Throws
// DegenerateLabels unless both classes are present.
double roc_auc(std::span<const ScoredLabel> cells);
double roc_auc(std::span<const ScoreGroup> groups);

struct F1Result {
    double f1 = 0.0;
    double threshold = 0.0;
    double precision = 0.0;
    double recall = 0.0;
};

// Maximum F1 over the PR-curve points; the lowest threshold attaining it.
// Throws NoPositives.
F1Result f1_at_best_threshold(std::span<const ScoredLabel> cells);
F1Result f1_at_best_threshold(std::span<const ScoreGroup> groups);

// F1 of the classifier `score >= threshold`.
F1Result f1_at_threshold(std::span<const ScoreGroup> groups, double threshold);

struct TemplateReport {
    std::uint64_t positives = 0;
    std::uint64_t negatives = 0;
    std::optional<double> ap;   // absent when the channel has no positives
    std::optional<double> auc;  // absent unless both classes occur
};

struct EvalReport {
    double ap = 0.0;
    double auc = 0.0;
    double f1_best = 0.0;
    double f1_threshold = 0.0;
    std::uint64_t positives = 0;
    std::uint64_t negatives = 0;
    std::size_t traces = 0;
    std::vector<TemplateReport> per_template;  // indexed by channel
};

struct EvalOptions {
    bool per_template = true;
};

// Scores the final window of every truth trace against the prediction set.
// The cell universe excludes structurally impossible positions; cells missing
// from the predictions score 0. Throws HeaderMismatch, MissingTrace or
// TargetMismatch.
EvalReport evaluate_predictions(const TensorDataset& truth, const PredictionSet& predictions,
                                const EvalOptions& options = {});

// Per-trace score groups over the final window (used by the baselines'
// per-trace checks and by evaluate_predictions).
std::vector<ScoreGroup> final_window_groups(const TensorDataset& truth, const PredictionSet& predictions,
                                            std::optional<ChannelIndex> channel = std::nullopt);

struct DatasetSplit {
    TensorDataset train;
    TensorDataset validation;
    TensorDataset test;
};

// Seeded shuffle at trace granularity: round(n * train_fraction) traces go to
// train+validation, of which round(m * validation_fraction) become
// validation. Partitions keep the original trace order. Throws TooFewTraces.
DatasetSplit split_dataset(const TensorDataset& data, double train_fraction = 0.8,
                           double validation_fraction = 0.2, std::uint64_t seed = 0);

}  // namespace pam
