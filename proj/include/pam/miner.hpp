#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pam/declare.hpp"
#include "pam/event_log.hpp"
#include "pam/windowing.hpp"

namespace pam {

using ChannelIndex = std::uint32_t;

struct Cell {
    ActivityIndex row = 0;
    ActivityIndex col = 0;
    ChannelIndex channel = 0;

    friend auto operator<=>(const Cell&, const Cell&) = default;
};

// One window's constraint presence: a sorted, duplicate-free cell list.
struct TensorSlice {
    std::size_t window_index = 0;
    std::vector<Cell> cells;

    bool contains(const Cell& c) const;
    friend bool operator==(const TensorSlice&, const TensorSlice&) = default;
};

struct TraceTensor {
    std::string case_id;
    std::vector<std::size_t> window_lengths;
    std::vector<TensorSlice> slices;

    std::size_t window_count() const noexcept { return slices.size(); }
    friend bool operator==(const TraceTensor&, const TraceTensor&) = default;
};

struct MiningStats {
    std::size_t trace_count = 0;      // traces mined
    std::size_t too_short_count = 0;  // traces skipped: shorter than the window count, or outside every bin
    std::size_t window_count = 0;
    std::uint64_t total_constraint_count = 0;
    std::size_t overlap_pairs = 0;
    double mean_overlap = 0.0;        // 0 when there are no consecutive window pairs
    double seconds = 0.0;
    std::size_t min_trace_length = 0;
    std::size_t max_trace_length = 0;
    double mean_trace_length = 0.0;
};

// Structurally possible cell positions: unary channels on the diagonal,
// binary channels off it.
bool structurally_possible(const ConstraintProfile& profile, const Cell& cell);

// Mines one window. Unary templates are checked for every activity of the
// alphabet; binary templates only for ordered pairs of distinct activities
// that both occur in the window, and alternate_response/alternate_precedence
// additionally need the second argument to occur at least twice.
TensorSlice mine_window(std::span<const ActivityIndex> window, const ConstraintProfile& profile,
                        std::size_t alphabet_size);

TraceTensor mine_trace(const WindowedTrace& windowed, const ConstraintProfile& profile,
                       std::size_t alphabet_size);

// Jaccard similarity of the two cell sets; 1 when both are empty.
double overlap(const TensorSlice& a, const TensorSlice& b);

struct MiningOptions {
    // 0 = hardware concurrency.
    std::size_t threads = 1;
    // Fixed-size scheme only: keep traces whose window count lies in a bin.
    std::optional<std::vector<WindowCountRange>> bins;
};

struct MiningResult {
    std::vector<TraceTensor> tensors;
    MiningStats stats;
};

// Windows and mines every eligible trace in log order. Traces with fewer
// events than the fixed window count (or outside every bin) are counted in
// stats.too_short_count. Output is identical for any thread count.
MiningResult mine_log(const EventLog& log, const WindowingScheme& scheme, const ConstraintProfile& profile,
                      const MiningOptions& options = {});

// Recomputes the tensor-derived statistics (counts and overlap) of a dataset.
MiningStats tensor_stats(std::span<const TraceTensor> tensors);

// Per-channel number of cells in the final window of each trace.
std::vector<std::uint64_t> final_window_channel_counts(std::span<const TraceTensor> tensors,
                                                       std::size_t channel_count);

}  // namespace pam
