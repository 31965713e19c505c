#include "pam/windowing.hpp"

#include <algorithm>
#include <charconv>

#include "pam/errors.hpp"

namespace pam {

namespace {

std::size_t parse_positive(std::string_view text, std::string_view context) {
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || value == 0) {
        throw InvalidScheme("invalid " + std::string(context) + " '" + std::string(text) + "'");
    }
    return value;
}

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

}  // namespace

WindowingScheme WindowingScheme::fixed_count(std::size_t n) {
    if (n == 0) throw InvalidScheme("fixed-count parameter must be >= 1");
    return {Kind::FixedCount, n};
}

WindowingScheme WindowingScheme::fixed_size(std::size_t k) {
    if (k == 0) throw InvalidScheme("fixed-size parameter must be >= 1");
    return {Kind::FixedSize, k};
}

WindowingScheme WindowingScheme::parse(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw InvalidScheme("scheme must be fixed-count:<n> or fixed-size:<k>, got '" +
                            std::string(text) + "'");
    }
    const auto kind = text.substr(0, colon);
    const auto value = parse_positive(text.substr(colon + 1), "scheme parameter");
    if (kind == "fixed-count") return fixed_count(value);
    if (kind == "fixed-size") return fixed_size(value);
    throw InvalidScheme("unknown scheme kind '" + std::string(kind) + "'");
}

std::string WindowingScheme::to_string() const {
    return (kind == Kind::FixedCount ? "fixed-count:" : "fixed-size:") + std::to_string(parameter);
}

std::vector<std::size_t> WindowedTrace::window_lengths() const {
    std::vector<std::size_t> lengths;
    lengths.reserve(boundaries.size());
    for (const auto& b : boundaries) lengths.push_back(b.size());
    return lengths;
}

WindowedTrace split_fixed_count(const Trace& trace, std::size_t n) {
    if (n == 0) throw InvalidScheme("window count must be >= 1");
    const std::size_t len = trace.size();
    if (len < n) {
        throw TraceTooShort("trace '" + trace.case_id + "' has " + std::to_string(len) +
                            " events, fewer than " + std::to_string(n) + " windows");
    }
    const std::size_t nominal = ceil_div(len, n);
    WindowedTrace out{&trace, {}};
    out.boundaries.reserve(n);
    std::size_t start = 0;
    for (std::size_t w = 0; w < n; ++w) {
        const std::size_t remaining_events = len - start;
        const std::size_t remaining_windows = n - w;
        const std::size_t size = w + 1 == n
                                     ? remaining_events
                                     : std::min(nominal, remaining_events - remaining_windows + 1);
        out.boundaries.push_back({start, start + size});
        start += size;
    }
    return out;
}

WindowedTrace split_fixed_size(const Trace& trace, std::size_t k) {
    if (k == 0) throw InvalidScheme("window size must be >= 1");
    if (trace.size() == 0) throw TraceTooShort("trace '" + trace.case_id + "' is empty");
    WindowedTrace out{&trace, {}};
    out.boundaries.reserve(ceil_div(trace.size(), k));
    for (std::size_t start = 0; start < trace.size(); start += k) {
        out.boundaries.push_back({start, std::min(start + k, trace.size())});
    }
    return out;
}

WindowedTrace split(const Trace& trace, const WindowingScheme& scheme) {
    return scheme.kind == WindowingScheme::Kind::FixedCount ? split_fixed_count(trace, scheme.parameter)
                                                            : split_fixed_size(trace, scheme.parameter);
}

std::size_t window_count_for(std::size_t trace_length, const WindowingScheme& scheme) {
    if (scheme.kind == WindowingScheme::Kind::FixedCount) return scheme.parameter;
    return ceil_div(trace_length, scheme.parameter);
}

std::string WindowCountRange::to_string() const {
    return lo == hi ? std::to_string(lo) : std::to_string(lo) + "-" + std::to_string(hi);
}

void validate_bins(std::span<const WindowCountRange> bins) {
    std::vector<WindowCountRange> sorted(bins.begin(), bins.end());
    std::sort(sorted.begin(), sorted.end());
    for (const auto& b : sorted) {
        if (b.lo > b.hi) throw InvalidScheme("empty bin " + std::to_string(b.lo) + "-" + std::to_string(b.hi));
    }
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i].lo <= sorted[i - 1].hi) {
            throw OverlappingBins("bins " + sorted[i - 1].to_string() + " and " + sorted[i].to_string() +
                                  " overlap");
        }
    }
}

std::vector<WindowCountRange> parse_bins(std::string_view text) {
    std::vector<WindowCountRange> bins;
    while (!text.empty()) {
        const auto comma = text.find(',');
        const auto item = text.substr(0, comma);
        const auto dash = item.find('-');
        if (dash == std::string_view::npos) {
            const auto v = parse_positive(item, "bin");
            bins.push_back({v, v});
        } else {
            bins.push_back({parse_positive(item.substr(0, dash), "bin bound"),
                            parse_positive(item.substr(dash + 1), "bin bound")});
        }
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    if (bins.empty()) throw InvalidScheme("no bins given");
    validate_bins(bins);
    return bins;
}

BinnedTraces bin_by_window_count(const EventLog& log, std::size_t k,
                                 std::span<const WindowCountRange> bins) {
    if (k == 0) throw InvalidScheme("window size must be >= 1");
    validate_bins(bins);
    BinnedTraces out;
    for (const auto& trace : log.traces) {
        if (trace.size() == 0) {
            ++out.excluded;
            continue;
        }
        const std::size_t count = ceil_div(trace.size(), k);
        const auto bin = std::find_if(bins.begin(), bins.end(),
                                      [&](const WindowCountRange& r) { return r.contains(count); });
        if (bin == bins.end()) {
            ++out.excluded;
            continue;
        }
        out.bins[*bin].push_back(split_fixed_size(trace, k));
    }
    return out;
}

}  // namespace pam
