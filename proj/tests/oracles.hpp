#pragma once

// Test-only reference implementations. Nothing here calls into the code
// paths it is used to check (no DFAs, no grouped metric kernels).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <span>
#include <vector>

#include "pam/declare.hpp"
#include "pam/metrics.hpp"
#include "pam/miner.hpp"

namespace pam::oracle {

// Brute-force window mining: every channel x every cell position, checked
// with the direct-semantics oracle under the mining occurrence conditions.
inline std::vector<Cell> oracle_mine_window(std::span<const ActivityIndex> window, const ConstraintProfile& profile,
                                            std::size_t alphabet_size) {
    std::vector<std::size_t> count(alphabet_size, 0);
    for (const auto e : window) ++count[e];
    std::vector<Cell> cells;
    for (ActivityIndex a = 0; a < alphabet_size; ++a) {
        for (ActivityIndex b = 0; b < alphabet_size; ++b) {
            for (ChannelIndex c = 0; c < profile.size(); ++c) {
                const auto& t = profile[c];
                if (t.unary()) {
                    if (a == b && oracle_evaluate_template(t, a, std::nullopt, window)) cells.push_back({a, b, c});
                    continue;
                }
                if (a == b || count[a] == 0 || count[b] == 0) continue;
                const bool alternate =
                    t.kind == TemplateKind::AlternateResponse || t.kind == TemplateKind::AlternatePrecedence;
                if (alternate && count[b] < 2) continue;
                if (oracle_evaluate_template(t, a, b, window)) cells.push_back({a, b, c});
            }
        }
    }
    std::sort(cells.begin(), cells.end());
    return cells;
}

struct SweepPoint {
    double threshold;
    double precision;
    double recall;
};

// PR points by recounting at every distinct score, descending.
inline std::vector<SweepPoint> threshold_sweep(std::span<const ScoredLabel> cells) {
    std::set<double, std::greater<>> thresholds;
    std::size_t positives = 0;
    for (const auto& c : cells) {
        thresholds.insert(c.score);
        positives += c.positive;
    }
    std::vector<SweepPoint> points;
    for (const double t : thresholds) {
        std::size_t tp = 0, fp = 0;
        for (const auto& c : cells) {
            if (c.score >= t) (c.positive ? tp : fp)++;
        }
        points.push_back({t, static_cast<double>(tp) / static_cast<double>(tp + fp),
                          static_cast<double>(tp) / static_cast<double>(positives)});
    }
    return points;
}

inline double oracle_average_precision(std::span<const ScoredLabel> cells) {
    double ap = 0.0, prev = 0.0;
    for (const auto& p : threshold_sweep(cells)) {
        ap += (p.recall - prev) * p.precision;
        prev = p.recall;
    }
    return ap;
}

inline double oracle_roc_auc(std::span<const ScoredLabel> cells) {
    double credit = 0.0;
    std::size_t pairs = 0;
    for (const auto& p : cells) {
        if (!p.positive) continue;
        for (const auto& n : cells) {
            if (n.positive) continue;
            ++pairs;
            credit += p.score > n.score ? 1.0 : p.score == n.score ? 0.5 : 0.0;
        }
    }
    return credit / static_cast<double>(pairs);
}

// Max F1 over the sweep; lowest threshold among ties.
inline std::pair<double, double> oracle_best_f1(std::span<const ScoredLabel> cells) {
    double best = -1.0, at = 0.0;
    for (const auto& p : threshold_sweep(cells)) {
        const double f1 = p.precision + p.recall > 0 ? 2 * p.precision * p.recall / (p.precision + p.recall) : 0.0;
        if (f1 >= best - 1e-12) {
            best = std::max(best, f1);
            at = p.threshold;
        }
    }
    return {best, at};
}

inline std::vector<ActivityIndex> random_window(std::mt19937_64& rng, std::size_t max_len, std::size_t alphabet) {
    std::uniform_int_distribution<std::size_t> len(1, max_len);
    std::uniform_int_distribution<ActivityIndex> sym(0, static_cast<ActivityIndex>(alphabet - 1));
    std::vector<ActivityIndex> w(len(rng));
    for (auto& e : w) e = sym(rng);
    return w;
}

// Every argument assignment for a template over `alphabet` activities.
template <typename Fn>
void for_each_assignment(const ConstraintTemplate& t, ActivityIndex alphabet, Fn&& fn) {
    for (ActivityIndex a = 0; a < alphabet; ++a) {
        if (t.unary()) {
            fn(a, std::optional<ActivityIndex>{});
            continue;
        }
        for (ActivityIndex b = 0; b < alphabet; ++b) {
            if (a != b) fn(a, std::optional<ActivityIndex>{b});
        }
    }
}

// All words of length 1..max_len over `alphabet` symbols.
inline std::vector<std::vector<ActivityIndex>> all_windows(std::size_t max_len, ActivityIndex alphabet) {
    std::vector<std::vector<ActivityIndex>> out;
    std::vector<std::vector<ActivityIndex>> frontier{{}};
    for (std::size_t len = 1; len <= max_len; ++len) {
        std::vector<std::vector<ActivityIndex>> next;
        for (const auto& w : frontier) {
            for (ActivityIndex s = 0; s < alphabet; ++s) {
                auto v = w;
                v.push_back(s);
                next.push_back(v);
            }
        }
        out.insert(out.end(), next.begin(), next.end());
        frontier = std::move(next);
    }
    return out;
}

// All templates, counted ones at n = 1..3.
inline std::vector<ConstraintTemplate> all_templates() {
    std::vector<ConstraintTemplate> out;
    for (const auto k : all_template_kinds()) {
        if (is_counted(k)) {
            for (int n = 1; n <= kMaxCountParameter; ++n) out.push_back(ConstraintTemplate::make(k, n));
        } else {
            out.push_back(ConstraintTemplate::make(k));
        }
    }
    return out;
}

}  // namespace pam::oracle
