#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pam/event_log.hpp"

namespace pam {

struct WindowingScheme {
    enum class Kind { FixedCount, FixedSize };

    Kind kind = Kind::FixedCount;
    std::size_t parameter = 1;

    static WindowingScheme fixed_count(std::size_t n);
    static WindowingScheme fixed_size(std::size_t k);

    // "fixed-count:<n>" / "fixed-size:<k>". Throws InvalidScheme.
    static WindowingScheme parse(std::string_view text);
    std::string to_string() const;

    friend bool operator==(const WindowingScheme&, const WindowingScheme&) = default;
};

// Half-open [start, end) range into a trace.
struct WindowBounds {
    std::size_t start = 0;
    std::size_t end = 0;

    std::size_t size() const noexcept { return end - start; }
    friend bool operator==(const WindowBounds&, const WindowBounds&) = default;
};

struct WindowedTrace {
    const Trace* trace = nullptr;
    std::vector<WindowBounds> boundaries;

    std::size_t window_count() const noexcept { return boundaries.size(); }
    std::span<const ActivityIndex> window(std::size_t i) const {
        const auto& b = boundaries.at(i);
        return std::span<const ActivityIndex>(trace->events).subspan(b.start, b.size());
    }
    std::vector<std::size_t> window_lengths() const;
};

// ceil(|t|/n) events per window, reduced from the tail so that all n windows
// stay non-empty. Throws TraceTooShort when |t| < n.
WindowedTrace split_fixed_count(const Trace& trace, std::size_t n);

// Consecutive chunks of k events; the last chunk holds the remainder.
WindowedTrace split_fixed_size(const Trace& trace, std::size_t k);

// Dispatches on the scheme kind.
WindowedTrace split(const Trace& trace, const WindowingScheme& scheme);

// Number of windows `split` produces for a trace of the given length. For
// FixedCount this is n whenever the trace is long enough.
std::size_t window_count_for(std::size_t trace_length, const WindowingScheme& scheme);

// Inclusive range of window counts.
struct WindowCountRange {
    std::size_t lo = 0;
    std::size_t hi = 0;

    bool contains(std::size_t v) const noexcept { return lo <= v && v <= hi; }
    std::string to_string() const;

    friend auto operator<=>(const WindowCountRange&, const WindowCountRange&) = default;
};

// "6-10,11-15,2". Throws InvalidScheme on syntax errors and
// OverlappingBins when ranges intersect.
std::vector<WindowCountRange> parse_bins(std::string_view text);
void validate_bins(std::span<const WindowCountRange> bins);

struct BinnedTraces {
    // Only bins that received at least one trace are present.
    std::map<WindowCountRange, std::vector<WindowedTrace>> bins;
    std::size_t excluded = 0;
};

BinnedTraces bin_by_window_count(const EventLog& log, std::size_t k,
                                 std::span<const WindowCountRange> bins);

}  // namespace pam
