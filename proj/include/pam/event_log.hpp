#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pam {

using ActivityIndex = std::uint32_t;

struct Activity {
    ActivityIndex index = 0;
    std::string label;

    friend bool operator==(const Activity&, const Activity&) = default;
};

// Activity labels indexed densely by first occurrence.
class Alphabet {
public:
    Alphabet() = default;
    explicit Alphabet(std::vector<std::string> labels);

    // Returns the index of `label`, appending it when unseen.
    ActivityIndex intern(std::string_view label);
    std::optional<ActivityIndex> find(std::string_view label) const;

    std::size_t size() const noexcept { return labels_.size(); }
    bool empty() const noexcept { return labels_.empty(); }
    const std::string& label(ActivityIndex index) const { return labels_.at(index); }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    Activity activity(ActivityIndex index) const { return {index, label(index)}; }

    friend bool operator==(const Alphabet& a, const Alphabet& b) { return a.labels_ == b.labels_; }

private:
    std::vector<std::string> labels_;
    std::unordered_map<std::string, ActivityIndex> index_;
};

struct Trace {
    std::string case_id;
    std::vector<ActivityIndex> events;

    std::size_t size() const noexcept { return events.size(); }
    std::span<const ActivityIndex> view() const noexcept { return events; }

    friend bool operator==(const Trace&, const Trace&) = default;
};

struct EventLog {
    Alphabet alphabet;
    std::vector<Trace> traces;

    std::size_t event_count() const noexcept;

    friend bool operator==(const EventLog&, const EventLog&) = default;
};

enum class EventOrdering { FileOrder, Timestamp };

struct IngestOptions {
    std::string case_column = "case_id";
    std::string activity_column = "activity";
    // When set, events within a case are stably sorted by this column.
    std::optional<std::string> timestamp_column;
    char delimiter = ',';

    EventOrdering ordering() const noexcept {
        return timestamp_column ? EventOrdering::Timestamp : EventOrdering::FileOrder;
    }
};

EventLog parse_csv_log(const std::filesystem::path& path, const IngestOptions& options = {});
EventLog parse_csv_log(std::istream& in, const IngestOptions& options = {});

// Writes `case_id,activity` rows. Rows are interleaved so that re-parsing in
// file order reproduces both the trace order and the alphabet order.
void write_csv_log(std::ostream& out, const EventLog& log, const IngestOptions& options = {});
void write_csv_log(const std::filesystem::path& path, const EventLog& log,
                   const IngestOptions& options = {});

// Builds a log from in-memory (case, activity) rows in file order.
EventLog make_log(std::span<const std::pair<std::string, std::string>> rows);

// One trace per string, one character per event ("abaad"). Handy in tests
// and for the small worked examples.
EventLog make_log_from_strings(std::span<const std::string> traces);

std::string trace_to_string(const Trace& trace, const Alphabet& alphabet,
                            std::string_view separator = "");

namespace csv {

// Splits one CSV record (RFC 4180 quoting, no embedded newlines).
std::vector<std::string> split_record(std::string_view line, char delimiter = ',');
std::string quote_field(std::string_view field, char delimiter = ',');

}  // namespace csv

// Parses an ISO-8601 date-time or an integer epoch into microseconds since
// the Unix epoch. Returns nullopt when the text is neither.
std::optional<std::int64_t> parse_timestamp(std::string_view text);

}  // namespace pam
