#include "pam/miner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <thread>

#include "pam/errors.hpp"

namespace pam {

namespace {

bool needs_repeated_second(TemplateKind k) {
    return k == TemplateKind::AlternateResponse || k == TemplateKind::AlternatePrecedence;
}

struct ChannelPlan {
    ChannelIndex channel;
    const Dfa* dfa;
    bool repeated_second;
};

struct Plan {
    std::vector<ChannelPlan> unary;
    std::vector<ChannelPlan> binary;

    explicit Plan(const ConstraintProfile& profile) {
        for (std::size_t c = 0; c < profile.size(); ++c) {
            const auto& t = profile[c];
            ChannelPlan p{static_cast<ChannelIndex>(c), &compile_template(t), needs_repeated_second(t.kind)};
            (t.unary() ? unary : binary).push_back(p);
        }
    }
};

TensorSlice mine_window_with(std::span<const ActivityIndex> window, const Plan& plan,
                             std::size_t alphabet_size) {
    TensorSlice slice;
    if (window.empty()) return slice;

    thread_local std::vector<std::uint32_t> counts;
    thread_local std::vector<ActivityIndex> present;
    thread_local std::vector<Symbol> projected;
    counts.assign(alphabet_size, 0);
    present.clear();
    for (const ActivityIndex e : window) {
        if (e >= alphabet_size) throw ProfileMismatch("activity index outside the alphabet");
        if (counts[e]++ == 0) present.push_back(e);
    }
    std::sort(present.begin(), present.end());

    auto& cells = slice.cells;
    for (const auto& ch : plan.unary) {
        // Every absent activity projects to the same all-`o` word.
        Dfa::State s = Dfa::start();
        for (std::size_t i = 0; i < window.size(); ++i) s = ch.dfa->step(s, kSymOtherUnary);
        if (ch.dfa->accepting(s)) {
            for (ActivityIndex x = 0; x < alphabet_size; ++x) {
                if (counts[x] == 0) cells.push_back({x, x, ch.channel});
            }
        }
    }
    for (const ActivityIndex x : present) {
        project_window(window, x, std::nullopt, projected);
        for (const auto& ch : plan.unary) {
            if (ch.dfa->accepts(projected)) cells.push_back({x, x, ch.channel});
        }
    }

    if (!plan.binary.empty()) {
        for (const ActivityIndex a : present) {
            for (const ActivityIndex b : present) {
                if (a == b) continue;
                project_window(window, a, b, projected);
                for (const auto& ch : plan.binary) {
                    if (ch.repeated_second && counts[b] < 2) continue;
                    if (ch.dfa->accepts(projected)) cells.push_back({a, b, ch.channel});
                }
            }
        }
    }

    std::sort(cells.begin(), cells.end());
    return slice;
}

TraceTensor mine_with(const WindowedTrace& windowed, const Plan& plan, std::size_t alphabet_size) {
    TraceTensor out;
    out.case_id = windowed.trace->case_id;
    out.window_lengths = windowed.window_lengths();
    out.slices.reserve(windowed.window_count());
    for (std::size_t w = 0; w < windowed.window_count(); ++w) {
        auto slice = mine_window_with(windowed.window(w), plan, alphabet_size);
        slice.window_index = w;
        out.slices.push_back(std::move(slice));
    }
    return out;
}

std::size_t intersection_size(const std::vector<Cell>& a, const std::vector<Cell>& b) {
    std::size_t i = 0, j = 0, n = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j]) {
            ++i;
        } else if (b[j] < a[i]) {
            ++j;
        } else {
            ++n, ++i, ++j;
        }
    }
    return n;
}

}  // namespace

bool TensorSlice::contains(const Cell& c) const { return std::binary_search(cells.begin(), cells.end(), c); }

bool structurally_possible(const ConstraintProfile& profile, const Cell& cell) {
    if (cell.channel >= profile.size()) return false;
    return profile[cell.channel].unary() == (cell.row == cell.col);
}

TensorSlice mine_window(std::span<const ActivityIndex> window, const ConstraintProfile& profile,
                        std::size_t alphabet_size) {
    return mine_window_with(window, Plan(profile), alphabet_size);
}

TraceTensor mine_trace(const WindowedTrace& windowed, const ConstraintProfile& profile,
                       std::size_t alphabet_size) {
    return mine_with(windowed, Plan(profile), alphabet_size);
}

double overlap(const TensorSlice& a, const TensorSlice& b) {
    if (a.cells.empty() && b.cells.empty()) return 1.0;
    const std::size_t inter = intersection_size(a.cells, b.cells);
    const std::size_t uni = a.cells.size() + b.cells.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

MiningResult mine_log(const EventLog& log, const WindowingScheme& scheme, const ConstraintProfile& profile,
                      const MiningOptions& options) {
    const auto t0 = std::chrono::steady_clock::now();
    if (options.bins) {
        if (scheme.kind != WindowingScheme::Kind::FixedSize) {
            throw InvalidScheme("bins require a fixed-size scheme");
        }
        validate_bins(*options.bins);
    }

    // Eligibility is decided up front so that output order follows the log.
    std::vector<std::size_t> eligible;
    std::size_t skipped = 0;
    for (std::size_t i = 0; i < log.traces.size(); ++i) {
        const auto len = log.traces[i].size();
        bool ok = len > 0;
        if (scheme.kind == WindowingScheme::Kind::FixedCount) ok = ok && len >= scheme.parameter;
        if (ok && options.bins) {
            const auto count = window_count_for(len, scheme);
            ok = std::any_of(options.bins->begin(), options.bins->end(),
                             [&](const WindowCountRange& r) { return r.contains(count); });
        }
        if (ok) {
            eligible.push_back(i);
        } else {
            ++skipped;
        }
    }

    const Plan plan(profile);
    const std::size_t alphabet_size = log.alphabet.size();
    std::vector<TraceTensor> tensors(eligible.size());

    std::size_t threads = options.threads == 0 ? std::thread::hardware_concurrency() : options.threads;
    threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(eligible.size(), 1));

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    const auto worker = [&] {
        constexpr std::size_t kChunk = 64;
        try {
            while (!failed.load(std::memory_order_relaxed)) {
                const std::size_t begin = next.fetch_add(kChunk);
                if (begin >= eligible.size()) break;
                const std::size_t end = std::min(begin + kChunk, eligible.size());
                for (std::size_t i = begin; i < end; ++i) {
                    tensors[i] = mine_with(split(log.traces[eligible[i]], scheme), plan, alphabet_size);
                }
            }
        } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
        }
    };

    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    MiningResult result;
    result.stats = tensor_stats(tensors);
    result.stats.too_short_count = skipped;
    if (!log.traces.empty()) {
        std::size_t lo = log.traces.front().size(), hi = lo;
        for (const auto& t : log.traces) {
            lo = std::min(lo, t.size());
            hi = std::max(hi, t.size());
        }
        result.stats.min_trace_length = lo;
        result.stats.max_trace_length = hi;
        result.stats.mean_trace_length =
            static_cast<double>(log.event_count()) / static_cast<double>(log.traces.size());
    }
    result.tensors = std::move(tensors);
    result.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

MiningStats tensor_stats(std::span<const TraceTensor> tensors) {
    MiningStats stats;
    stats.trace_count = tensors.size();
    double overlap_sum = 0.0;
    for (const auto& t : tensors) {
        stats.window_count += t.slices.size();
        for (std::size_t w = 0; w < t.slices.size(); ++w) {
            stats.total_constraint_count += t.slices[w].cells.size();
            if (w > 0) {
                overlap_sum += overlap(t.slices[w - 1], t.slices[w]);
                ++stats.overlap_pairs;
            }
        }
    }
    if (stats.overlap_pairs > 0) stats.mean_overlap = overlap_sum / static_cast<double>(stats.overlap_pairs);
    return stats;
}

std::vector<std::uint64_t> final_window_channel_counts(std::span<const TraceTensor> tensors,
                                                       std::size_t channel_count) {
    std::vector<std::uint64_t> counts(channel_count, 0);
    for (const auto& t : tensors) {
        if (t.slices.empty()) continue;
        for (const auto& c : t.slices.back().cells) {
            if (c.channel < channel_count) ++counts[c.channel];
        }
    }
    return counts;
}

}  // namespace pam
