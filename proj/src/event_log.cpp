#include "pam/event_log.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>

#include "pam/errors.hpp"

namespace pam {

namespace {

std::string_view trim(std::string_view s) {
    constexpr std::string_view ws = " \t\r\n";
    const auto first = s.find_first_not_of(ws);
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(ws);
    return s.substr(first, last - first + 1);
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw MissingColumn("column '" + name + "' not found in header");
    return static_cast<std::size_t>(it - header.begin());
}

bool parse_digits(std::string_view s, int& value) {
    if (s.empty()) return false;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    return ec == std::errc() && ptr == s.data() + s.size();
}

// Howard Hinnant's days_from_civil.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

std::optional<std::int64_t> parse_iso8601(std::string_view s) {
    int year = 0, month = 0, day = 0;
    if (s.size() < 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    if (!parse_digits(s.substr(0, 4), year) || !parse_digits(s.substr(5, 2), month) ||
        !parse_digits(s.substr(8, 2), day))
        return std::nullopt;
    if (month < 1 || month > 12 || day < 1 || day > 31) return std::nullopt;

    std::int64_t micros = days_from_civil(year, static_cast<unsigned>(month),
                                          static_cast<unsigned>(day)) *
                          86'400'000'000LL;
    s.remove_prefix(10);
    if (s.empty()) return micros;
    if (s.front() != 'T' && s.front() != ' ') return std::nullopt;
    s.remove_prefix(1);

    int hour = 0, minute = 0, second = 0;
    if (s.size() < 5 || s[2] != ':') return std::nullopt;
    if (!parse_digits(s.substr(0, 2), hour) || !parse_digits(s.substr(3, 2), minute))
        return std::nullopt;
    s.remove_prefix(5);
    if (!s.empty() && s.front() == ':') {
        if (s.size() < 3 || !parse_digits(s.substr(1, 2), second)) return std::nullopt;
        s.remove_prefix(3);
    }
    if (hour > 23 || minute > 59 || second > 60) return std::nullopt;
    micros += (hour * 3600LL + minute * 60LL + second) * 1'000'000LL;

    if (!s.empty() && (s.front() == '.' || s.front() == ',')) {
        s.remove_prefix(1);
        std::int64_t frac = 0;
        int digits = 0;
        while (!s.empty() && s.front() >= '0' && s.front() <= '9') {
            if (digits < 6) {
                frac = frac * 10 + (s.front() - '0');
                ++digits;
            }
            s.remove_prefix(1);
        }
        if (digits == 0) return std::nullopt;
        while (digits++ < 6) frac *= 10;
        micros += frac;
    }

    if (s.empty()) return micros;
    if (s == "Z") return micros;
    if (s.front() == '+' || s.front() == '-') {
        const int sign = s.front() == '+' ? 1 : -1;
        s.remove_prefix(1);
        int oh = 0, om = 0;
        if (s.size() == 5 && s[2] == ':') {
            if (!parse_digits(s.substr(0, 2), oh) || !parse_digits(s.substr(3, 2), om))
                return std::nullopt;
        } else if (s.size() == 4) {
            if (!parse_digits(s.substr(0, 2), oh) || !parse_digits(s.substr(2, 2), om))
                return std::nullopt;
        } else if (s.size() == 2) {
            if (!parse_digits(s, oh)) return std::nullopt;
        } else {
            return std::nullopt;
        }
        return micros - sign * (oh * 3600LL + om * 60LL) * 1'000'000LL;
    }
    return std::nullopt;
}

struct RawEvent {
    std::size_t trace;
    std::string activity;
    std::int64_t time;
};

}  // namespace

Alphabet::Alphabet(std::vector<std::string> labels) {
    for (auto& label : labels) {
        if (index_.contains(label)) throw Error("duplicate activity label '" + label + "'");
        index_.emplace(label, static_cast<ActivityIndex>(labels_.size()));
        labels_.push_back(std::move(label));
    }
}

ActivityIndex Alphabet::intern(std::string_view label) {
    std::string key(label);
    const auto [it, inserted] = index_.try_emplace(key, static_cast<ActivityIndex>(labels_.size()));
    if (inserted) labels_.push_back(std::move(key));
    return it->second;
}

std::optional<ActivityIndex> Alphabet::find(std::string_view label) const {
    const auto it = index_.find(std::string(label));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t EventLog::event_count() const noexcept {
    return std::accumulate(traces.begin(), traces.end(), std::size_t{0},
                           [](std::size_t acc, const Trace& t) { return acc + t.size(); });
}

namespace csv {

std::vector<std::string> split_record(std::string_view line, char delimiter) {
    std::vector<std::string> fields;
    std::string field;
    bool in_quotes = false;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"' && !quoted && trim(field).empty()) {
            field.clear();
            in_quotes = quoted = true;
        } else if (c == delimiter) {
            fields.push_back(std::move(field));
            field.clear();
            quoted = false;
        } else {
            field.push_back(c);
        }
    }
    if (in_quotes) throw Error("unterminated quoted field");
    fields.push_back(std::move(field));
    return fields;
}

std::string quote_field(std::string_view field, char delimiter) {
    const bool needs_quotes = field.find_first_of(std::string{delimiter, '"', '\n', '\r'}) !=
                                  std::string_view::npos ||
                              trim(field).size() != field.size();
    if (!needs_quotes) return std::string(field);
    std::string out = "\"";
    for (const char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace csv

std::optional<std::int64_t> parse_timestamp(std::string_view text) {
    text = trim(text);
    if (text.empty()) return std::nullopt;
    std::int64_t epoch = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), epoch);
    if (ec == std::errc() && ptr == text.data() + text.size()) {
        constexpr std::int64_t limit = std::numeric_limits<std::int64_t>::max() / 1'000'000;
        if (epoch > limit || epoch < -limit) return std::nullopt;
        return epoch * 1'000'000;
    }
    return parse_iso8601(text);
}

EventLog parse_csv_log(std::istream& in, const IngestOptions& options) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
        if (!trim(line).empty()) {
            try {
                header = csv::split_record(line, options.delimiter);
            } catch (const Error& e) {
                throw MalformedRow(e.what(), line_no);
            }
            break;
        }
    }
    for (auto& name : header) name = std::string(trim(name));
    if (header.empty()) throw EmptyLog("log has no header row");

    const std::size_t case_col = column_index(header, options.case_column);
    const std::size_t act_col = column_index(header, options.activity_column);
    std::optional<std::size_t> time_col;
    if (options.timestamp_column) time_col = column_index(header, *options.timestamp_column);

    std::vector<RawEvent> raw;
    std::vector<std::string> case_ids;
    std::unordered_map<std::string, std::size_t> case_index;

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<std::string> fields;
        try {
            fields = csv::split_record(line, options.delimiter);
        } catch (const Error& e) {
            throw MalformedRow(e.what(), line_no);
        }
        if (fields.size() != header.size()) {
            throw MalformedRow("expected " + std::to_string(header.size()) + " fields, found " +
                                   std::to_string(fields.size()),
                               line_no);
        }
        const std::string case_id(trim(fields[case_col]));
        const std::string activity(trim(fields[act_col]));
        if (case_id.empty()) throw MalformedRow("empty case id", line_no);
        if (activity.empty()) throw MalformedRow("empty activity label", line_no);

        std::int64_t time = 0;
        if (time_col) {
            const auto parsed = parse_timestamp(fields[*time_col]);
            if (!parsed) throw MalformedRow("unparseable timestamp '" + fields[*time_col] + "'", line_no);
            time = *parsed;
        }

        const auto [it, inserted] = case_index.try_emplace(case_id, case_ids.size());
        if (inserted) case_ids.push_back(case_id);
        raw.push_back({it->second, activity, time});
    }
    if (raw.empty()) throw EmptyLog("log contains no event rows");

    std::vector<std::vector<std::size_t>> members(case_ids.size());
    for (std::size_t i = 0; i < raw.size(); ++i) members[raw[i].trace].push_back(i);
    if (time_col) {
        for (auto& m : members) {
            std::stable_sort(m.begin(), m.end(), [&](std::size_t a, std::size_t b) {
                return raw[a].time < raw[b].time;
            });
        }
    }

    // Alphabet order is first occurrence in the file, independent of the
    // within-case reordering above.
    EventLog log;
    for (const auto& ev : raw) log.alphabet.intern(ev.activity);
    log.traces.reserve(case_ids.size());
    for (std::size_t c = 0; c < case_ids.size(); ++c) {
        Trace trace{case_ids[c], {}};
        trace.events.reserve(members[c].size());
        for (const std::size_t i : members[c]) trace.events.push_back(*log.alphabet.find(raw[i].activity));
        log.traces.push_back(std::move(trace));
    }
    return log;
}

EventLog parse_csv_log(const std::filesystem::path& path, const IngestOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open log file '" + path.string() + "'");
    return parse_csv_log(in, options);
}

void write_csv_log(std::ostream& out, const EventLog& log, const IngestOptions& options) {
    const char d = options.delimiter;
    out << csv::quote_field(options.case_column, d) << d
        << csv::quote_field(options.activity_column, d) << '\n';

    // Greedy interleaving: an event may be emitted once its trace has started
    // (or is the next trace to start) and its activity is either already seen
    // or the next unseen alphabet entry. Emitting any admissible event never
    // blocks a later one, so this always drains every trace.
    const std::size_t n = log.traces.size();
    std::vector<std::size_t> cursor(n, 0);
    std::vector<bool> seen(log.alphabet.size(), false);
    std::size_t next_label = 0;
    std::size_t started = 0;
    std::size_t remaining = log.event_count();
    std::size_t first_open = 0;

    const auto admissible = [&](std::size_t t) {
        const auto& tr = log.traces[t];
        if (cursor[t] >= tr.size()) return false;
        if (t > started || (t == started && cursor[t] != 0)) return false;
        const ActivityIndex a = tr.events[cursor[t]];
        return seen[a] || a == next_label;
    };

    while (remaining > 0) {
        while (first_open < n && cursor[first_open] >= log.traces[first_open].size()) ++first_open;
        std::size_t pick = n;
        for (std::size_t t = first_open; t <= std::min(started, n - 1); ++t) {
            if (admissible(t)) {
                pick = t;
                break;
            }
        }
        if (pick == n) throw Error("log alphabet is not in first-occurrence order");
        const auto& tr = log.traces[pick];
        const ActivityIndex a = tr.events[cursor[pick]];
        if (!seen[a]) {
            seen[a] = true;
            ++next_label;
        }
        if (pick == started) ++started;
        ++cursor[pick];
        --remaining;
        out << csv::quote_field(tr.case_id, d) << d << csv::quote_field(log.alphabet.label(a), d)
            << '\n';
    }
}

void write_csv_log(const std::filesystem::path& path, const EventLog& log,
                   const IngestOptions& options) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write log file '" + path.string() + "'");
    write_csv_log(out, log, options);
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

EventLog make_log(std::span<const std::pair<std::string, std::string>> rows) {
    EventLog log;
    std::unordered_map<std::string, std::size_t> case_index;
    for (const auto& [case_id, activity] : rows) {
        const auto [it, inserted] = case_index.try_emplace(case_id, log.traces.size());
        if (inserted) log.traces.push_back({case_id, {}});
        log.traces[it->second].events.push_back(log.alphabet.intern(activity));
    }
    return log;
}

EventLog make_log_from_strings(std::span<const std::string> traces) {
    std::vector<std::pair<std::string, std::string>> rows;
    for (std::size_t i = 0; i < traces.size(); ++i) {
        for (const char c : traces[i]) rows.emplace_back(std::to_string(i + 1), std::string(1, c));
    }
    return make_log(rows);
}

std::string trace_to_string(const Trace& trace, const Alphabet& alphabet, std::string_view separator) {
    std::string out;
    for (std::size_t i = 0; i < trace.events.size(); ++i) {
        if (i) out += separator;
        out += alphabet.label(trace.events[i]);
    }
    return out;
}

}  // namespace pam
