#include "pam/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <unordered_map>

#include "pam/errors.hpp"

namespace pam {

namespace {

__extension__ typedef unsigned __int128 Wide;

std::uint64_t total_positives(std::span<const ScoreGroup> groups) {
    return std::accumulate(groups.begin(), groups.end(), std::uint64_t{0},
                           [](std::uint64_t acc, const ScoreGroup& g) { return acc + g.positives; });
}

std::uint64_t total_negatives(std::span<const ScoreGroup> groups) {
    return std::accumulate(groups.begin(), groups.end(), std::uint64_t{0},
                           [](std::uint64_t acc, const ScoreGroup& g) { return acc + g.negatives; });
}

bool is_descending(std::span<const ScoreGroup> groups) {
    for (std::size_t i = 1; i < groups.size(); ++i) {
        if (!(groups[i - 1].score > groups[i].score)) return false;
    }
    return true;
}

// Kernels accept groups in any order; normalize only when needed.
template <typename Fn>
auto with_normalized(std::span<const ScoreGroup> groups, Fn&& fn) {
    if (is_descending(groups)) return fn(groups);
    const auto normalized = normalize_groups({groups.begin(), groups.end()});
    return fn(std::span<const ScoreGroup>(normalized));
}

// Unbiased integer in [0, bound) from a 64-bit engine.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

TensorDataset subset(const TensorDataset& data, std::vector<std::size_t> indices) {
    std::sort(indices.begin(), indices.end());
    TensorDataset out;
    out.header = data.header;
    out.tensors.reserve(indices.size());
    for (const auto i : indices) out.tensors.push_back(data.tensors[i]);
    return out;
}

void check_headers(const DatasetHeader& truth, const DatasetHeader& preds) {
    if (!(truth.alphabet == preds.alphabet)) throw HeaderMismatch("alphabets differ");
    if (!(truth.profile == preds.profile)) throw HeaderMismatch("constraint profiles differ");
    if (truth.scheme_string() != preds.scheme_string()) {
        throw HeaderMismatch("windowing schemes differ: " + truth.scheme_string() + " vs " + preds.scheme_string());
    }
}

struct GroupAccumulator {
    std::map<double, ScoreGroup, std::greater<>> by_score;

    void add(double score, std::uint64_t pos, std::uint64_t neg) {
        if (pos == 0 && neg == 0) return;
        auto& g = by_score[score];
        g.score = score;
        g.positives += pos;
        g.negatives += neg;
    }

    std::vector<ScoreGroup> groups() const {
        std::vector<ScoreGroup> out;
        out.reserve(by_score.size());
        for (const auto& [s, g] : by_score) out.push_back(g);
        return out;
    }
};

// Walks the final window of each truth trace and feeds every cell of the
// universe into `sink(channel, score, positives, negatives)`.
template <typename Sink>
void scan_final_windows(const TensorDataset& truth, const PredictionSet& predictions, Sink&& sink) {
    check_headers(truth.header, predictions.header);
    const auto& profile = truth.header.profile;
    const std::uint64_t a = truth.header.alphabet.size();

    std::unordered_map<std::string, std::size_t> pred_index;
    for (std::size_t i = 0; i < predictions.traces.size(); ++i) pred_index.emplace(predictions.traces[i].case_id, i);

    // Records are sorted by trace; locate each trace's range.
    std::vector<std::pair<std::size_t, std::size_t>> ranges(predictions.traces.size(), {0, 0});
    for (std::size_t i = 0; i < predictions.records.size();) {
        const std::size_t t = predictions.records[i].trace;
        std::size_t j = i;
        while (j < predictions.records.size() && predictions.records[j].trace == t) ++j;
        ranges[t] = {i, j};
        i = j;
    }

    std::vector<std::uint64_t> universe(profile.size());
    for (std::size_t c = 0; c < profile.size(); ++c) universe[c] = profile[c].unary() ? a : a * (a - 1);

    std::vector<std::uint64_t> scored(profile.size());
    std::vector<std::uint64_t> truth_unscored(profile.size());
    for (const auto& tensor : truth.tensors) {
        if (tensor.slices.empty()) continue;
        const auto it = pred_index.find(tensor.case_id);
        if (it == pred_index.end()) throw MissingTrace("no predictions for trace '" + tensor.case_id + "'");
        const auto& info = predictions.traces[it->second];
        if (info.window_count() != tensor.window_count()) {
            throw TargetMismatch("trace '" + tensor.case_id + "' has " + std::to_string(tensor.window_count()) +
                                 " windows in truth but " + std::to_string(info.window_count()) +
                                 " in predictions");
        }
        const std::size_t target = tensor.window_count() - 1;
        const auto& positives = tensor.slices.back().cells;

        std::fill(scored.begin(), scored.end(), 0);
        std::fill(truth_unscored.begin(), truth_unscored.end(), 0);
        for (const auto& c : positives) ++truth_unscored[c.channel];

        const auto [lo, hi] = ranges[it->second];
        for (std::size_t r = lo; r < hi; ++r) {
            const auto& rec = predictions.records[r];
            if (rec.window != target) {
                throw TargetMismatch("prediction for trace '" + tensor.case_id + "' targets window " +
                                     std::to_string(rec.window) + ", expected " + std::to_string(target));
            }
            const bool label = std::binary_search(positives.begin(), positives.end(), rec.cell);
            if (label) --truth_unscored[rec.cell.channel];
            ++scored[rec.cell.channel];
            sink(rec.cell.channel, rec.score, label ? 1 : 0, label ? 0 : 1);
        }
        for (std::size_t c = 0; c < profile.size(); ++c) {
            const std::uint64_t zero_neg = universe[c] - scored[c] - truth_unscored[c];
            sink(static_cast<ChannelIndex>(c), 0.0, truth_unscored[c], zero_neg);
        }
    }
}

}  // namespace

std::vector<ScoreGroup> normalize_groups(std::vector<ScoreGroup> groups) {
    std::erase_if(groups, [](const ScoreGroup& g) { return g.positives == 0 && g.negatives == 0; });
    std::sort(groups.begin(), groups.end(), [](const ScoreGroup& x, const ScoreGroup& y) { return x.score > y.score; });
    std::vector<ScoreGroup> out;
    for (const auto& g : groups) {
        if (!out.empty() && out.back().score == g.score) {
            out.back().positives += g.positives;
            out.back().negatives += g.negatives;
        } else {
            out.push_back(g);
        }
    }
    return out;
}

std::vector<ScoreGroup> group_scores(std::span<const ScoredLabel> cells) {
    std::vector<ScoreGroup> groups;
    groups.reserve(cells.size());
    for (const auto& c : cells) groups.push_back({c.score, c.positive ? 1u : 0u, c.positive ? 0u : 1u});
    return normalize_groups(std::move(groups));
}

double average_precision(std::span<const ScoreGroup> groups) {
    return with_normalized(groups, [](std::span<const ScoreGroup> g) {
        const std::uint64_t p = total_positives(g);
        if (p == 0) throw NoPositives("average precision needs at least one positive");
        std::uint64_t tp = 0, fp = 0;
        double ap = 0.0;
        double prev_recall = 0.0;
        for (const auto& group : g) {
            tp += group.positives;
            fp += group.negatives;
            const double recall = static_cast<double>(tp) / static_cast<double>(p);
            const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
            ap += (recall - prev_recall) * precision;
            prev_recall = recall;
        }
        return ap;
    });
}

double average_precision(std::span<const ScoredLabel> cells) {
    const auto groups = group_scores(cells);
    return average_precision(std::span<const ScoreGroup>(groups));
}

double roc_auc(std::span<const ScoreGroup> groups) {
    return with_normalized(groups, [](std::span<const ScoreGroup> g) {
        const std::uint64_t p = total_positives(g);
        const std::uint64_t n = total_negatives(g);
        if (p == 0 || n == 0) throw DegenerateLabels("AUC needs both positive and negative cells");
        // Walk ascending so `below` counts negatives with strictly lower score.
        Wide twice_correct = 0;
        std::uint64_t below = 0;
        for (auto it = g.rbegin(); it != g.rend(); ++it) {
            twice_correct += Wide(it->positives) * below * 2 + Wide(it->positives) * it->negatives;
            below += it->negatives;
        }
        return static_cast<double>(static_cast<long double>(twice_correct) /
                                   (2.0L * static_cast<long double>(p) * static_cast<long double>(n)));
    });
}

double roc_auc(std::span<const ScoredLabel> cells) {
    const auto groups = group_scores(cells);
    return roc_auc(std::span<const ScoreGroup>(groups));
}

F1Result f1_at_best_threshold(std::span<const ScoreGroup> groups) {
    return with_normalized(groups, [](std::span<const ScoreGroup> g) {
        const std::uint64_t p = total_positives(g);
        if (p == 0) throw NoPositives("F1 needs at least one positive");
        // F1 = 2tp / (tp + fp + P); compared exactly as fractions.
        std::uint64_t tp = 0, fp = 0;
        std::uint64_t best_num = 0, best_den = 1;
        F1Result best;
        for (const auto& group : g) {
            tp += group.positives;
            fp += group.negatives;
            const std::uint64_t num = 2 * tp;
            const std::uint64_t den = tp + fp + p;
            if (Wide(num) * best_den >= Wide(best_num) * den) {
                best_num = num;
                best_den = den;
                best.f1 = static_cast<double>(num) / static_cast<double>(den);
                best.threshold = group.score;
                best.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
                best.recall = static_cast<double>(tp) / static_cast<double>(p);
            }
        }
        return best;
    });
}

F1Result f1_at_best_threshold(std::span<const ScoredLabel> cells) {
    const auto groups = group_scores(cells);
    return f1_at_best_threshold(std::span<const ScoreGroup>(groups));
}

F1Result f1_at_threshold(std::span<const ScoreGroup> groups, double threshold) {
    std::uint64_t tp = 0, fp = 0, p = 0;
    for (const auto& g : groups) {
        p += g.positives;
        if (g.score >= threshold) {
            tp += g.positives;
            fp += g.negatives;
        }
    }
    F1Result r;
    r.threshold = threshold;
    if (p == 0) throw NoPositives("F1 needs at least one positive");
    r.recall = static_cast<double>(tp) / static_cast<double>(p);
    r.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    r.f1 = static_cast<double>(2 * tp) / static_cast<double>(tp + fp + p);
    return r;
}

std::vector<ScoreGroup> final_window_groups(const TensorDataset& truth, const PredictionSet& predictions,
                                            std::optional<ChannelIndex> channel) {
    GroupAccumulator acc;
    scan_final_windows(truth, predictions, [&](ChannelIndex c, double s, std::uint64_t pos, std::uint64_t neg) {
        if (!channel || *channel == c) acc.add(s, pos, neg);
    });
    return acc.groups();
}

EvalReport evaluate_predictions(const TensorDataset& truth, const PredictionSet& predictions,
                                const EvalOptions& options) {
    const std::size_t channels = truth.header.profile.size();
    GroupAccumulator all;
    std::vector<GroupAccumulator> per(options.per_template ? channels : 0);
    scan_final_windows(truth, predictions, [&](ChannelIndex c, double s, std::uint64_t pos, std::uint64_t neg) {
        all.add(s, pos, neg);
        if (options.per_template) per[c].add(s, pos, neg);
    });

    EvalReport report;
    report.traces = truth.tensors.size();
    const auto groups = all.groups();
    report.positives = total_positives(groups);
    report.negatives = total_negatives(groups);
    report.ap = average_precision(std::span<const ScoreGroup>(groups));
    report.auc = roc_auc(std::span<const ScoreGroup>(groups));
    const auto f1 = f1_at_best_threshold(std::span<const ScoreGroup>(groups));
    report.f1_best = f1.f1;
    report.f1_threshold = f1.threshold;

    for (const auto& acc : per) {
        const auto g = acc.groups();
        TemplateReport t;
        t.positives = total_positives(g);
        t.negatives = total_negatives(g);
        if (t.positives > 0) t.ap = average_precision(std::span<const ScoreGroup>(g));
        if (t.positives > 0 && t.negatives > 0) t.auc = roc_auc(std::span<const ScoreGroup>(g));
        report.per_template.push_back(t);
    }
    return report;
}

DatasetSplit split_dataset(const TensorDataset& data, double train_fraction, double validation_fraction,
                           std::uint64_t seed) {
    const std::size_t n = data.tensors.size();
    if (n < 3) throw TooFewTraces("splitting needs at least 3 traces, got " + std::to_string(n));
    if (!(train_fraction >= 0.0 && train_fraction <= 1.0) ||
        !(validation_fraction >= 0.0 && validation_fraction <= 1.0)) {
        throw Error("split fractions must lie in [0, 1]");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[bounded(rng, i + 1)]);

    const auto train_all = static_cast<std::size_t>(std::llround(static_cast<double>(n) * train_fraction));
    const auto validation =
        static_cast<std::size_t>(std::llround(static_cast<double>(train_all) * validation_fraction));

    DatasetSplit out;
    out.validation = subset(data, {order.begin(), order.begin() + validation});
    out.train = subset(data, {order.begin() + validation, order.begin() + train_all});
    out.test = subset(data, {order.begin() + train_all, order.end()});
    return out;
}

}  // namespace pam
