#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "pam/errors.hpp"
#include "pam/event_log.hpp"

using namespace pam;

namespace {

EventLog parse(const std::string& text, const IngestOptions& opts = {}) {
    std::istringstream in(text);
    return parse_csv_log(in, opts);
}

std::vector<std::string> trace_strings(const EventLog& log) {
    std::vector<std::string> out;
    for (const auto& t : log.traces) out.push_back(trace_to_string(t, log.alphabet));
    return out;
}

const char* kFiveCaseLog =
    "case_id,activity\n"
    "1,a\n1,b\n1,a\n1,a\n1,b\n1,c\n1,d\n1,a\n1,d\n"
    "2,a\n2,b\n2,a\n2,a\n2,d\n"
    "3,a\n3,b\n3,a\n3,a\n3,d\n3,c\n"
    "4,c\n4,d\n4,a\n4,a\n4,d\n"
    "5,d\n5,a\n5,b\n5,d\n5,d\n5,d\n";

}  // namespace

TEST(EventLog, GroupsByCase) {
    const auto log = parse("case_id,activity\nc1,a\nc1,b\nc2,a\n");
    ASSERT_EQ(log.traces.size(), 2u);
    EXPECT_EQ(log.traces[0].case_id, "c1");
    EXPECT_EQ(trace_strings(log), (std::vector<std::string>{"ab", "a"}));
    EXPECT_EQ(log.alphabet.labels(), (std::vector<std::string>{"a", "b"}));
}

TEST(EventLog, TimestampOrdering) {
    IngestOptions opts;
    opts.timestamp_column = "timestamp";
    const auto log = parse("case_id,activity,timestamp\nc1,a,2\nc1,b,1\n", opts);
    EXPECT_EQ(trace_strings(log), (std::vector<std::string>{"ba"}));
    // Alphabet stays in file order.
    EXPECT_EQ(log.alphabet.labels(), (std::vector<std::string>{"a", "b"}));
    EXPECT_EQ(opts.ordering(), EventOrdering::Timestamp);
}

TEST(EventLog, TimestampTiesKeepFileOrder) {
    IngestOptions opts;
    opts.timestamp_column = "t";
    const auto log = parse(
        "case_id,activity,t\n"
        "c,x,2021-01-01T10:00:00Z\n"
        "c,y,2021-01-01T09:00:00Z\n"
        "c,z,2021-01-01T10:00:00+00:00\n"
        "c,w,2021-01-01T11:30:00+02:00\n",
        opts);
    EXPECT_EQ(trace_strings(log), (std::vector<std::string>{"ywxz"}));
}

TEST(EventLog, FiveCaseLog) {
    const auto log = parse(kFiveCaseLog);
    EXPECT_EQ(trace_strings(log),
              (std::vector<std::string>{"abaabcdad", "abaad", "abaadc", "cdaad", "dabddd"}));
    EXPECT_EQ(log.alphabet.labels(), (std::vector<std::string>{"a", "b", "c", "d"}));
    EXPECT_EQ(log.event_count(), 31u);
}

TEST(EventLog, CustomColumnsAndTrimming) {
    IngestOptions opts;
    opts.case_column = "Case";
    opts.activity_column = "Act";
    const auto log = parse("\xEF\xBB\xBFx, Case ,Act\n1, 7 , \"W_Completeren, aanvraag\" \n2,8,A\n", opts);
    ASSERT_EQ(log.traces.size(), 2u);
    EXPECT_EQ(log.traces[0].case_id, "7");
    EXPECT_EQ(log.traces[1].case_id, "8");
    EXPECT_EQ(log.alphabet.labels(), (std::vector<std::string>{"W_Completeren, aanvraag", "A"}));
}

TEST(EventLog, CaseSensitiveLabels) {
    const auto log = parse("case_id,activity\n1,a\n1,A\n");
    EXPECT_EQ(log.alphabet.size(), 2u);
}

TEST(EventLog, MissingColumn) {
    EXPECT_THROW(parse("case,activity\n1,a\n"), MissingColumn);
    IngestOptions opts;
    opts.timestamp_column = "ts";
    EXPECT_THROW(parse("case_id,activity\n1,a\n", opts), MissingColumn);
}

TEST(EventLog, EmptyLog) {
    EXPECT_THROW(parse("case_id,activity\n"), EmptyLog);
    EXPECT_THROW(parse("case_id,activity\n\n\n"), EmptyLog);
    EXPECT_THROW(parse(""), EmptyLog);
}

TEST(EventLog, MalformedRowCarriesLineNumber) {
    try {
        parse("case_id,activity\n1,a\n1,b,extra\n");
        FAIL() << "expected MalformedRow";
    } catch (const MalformedRow& e) {
        EXPECT_EQ(e.line(), 3u);
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
    }
    IngestOptions opts;
    opts.timestamp_column = "t";
    try {
        parse("case_id,activity,t\n1,a,1\n1,b,yesterday\n", opts);
        FAIL() << "expected MalformedRow";
    } catch (const MalformedRow& e) {
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(EventLog, MissingFileIsIoError) {
    EXPECT_THROW(parse_csv_log(std::filesystem::path("/nonexistent/log.csv")), IoError);
}

TEST(EventLog, Timestamps) {
    EXPECT_EQ(parse_timestamp("0"), 0);
    EXPECT_EQ(parse_timestamp("1"), 1000000);
    EXPECT_EQ(parse_timestamp("1970-01-01"), 0);
    EXPECT_EQ(parse_timestamp("1970-01-02T00:00:01.5"), 86401500000);
    EXPECT_EQ(parse_timestamp("1970-01-01T01:00:00+01:00"), 0);
    EXPECT_EQ(parse_timestamp("2011-10-01 00:38:44.546+02:00"), parse_timestamp("2011-09-30T22:38:44.546Z"));
    EXPECT_FALSE(parse_timestamp("noon"));
    EXPECT_FALSE(parse_timestamp("2011-13-01"));
}

TEST(EventLog, CsvQuoting) {
    EXPECT_EQ(csv::split_record("a,\"b,c\",\"d\"\"e\""), (std::vector<std::string>{"a", "b,c", "d\"e"}));
    EXPECT_EQ(csv::split_record(""), (std::vector<std::string>{""}));
    for (const std::string s : {"plain", "with,comma", "q\"uote", " pad "}) {
        EXPECT_EQ(csv::split_record(csv::quote_field(s) + ",x")[0], s);
    }
}

// Round trip, event count and dense indices over random logs whose
// alphabet order differs from the order of first appearance per trace.
TEST(EventLogProperty, RoundTripCountAndDenseIndices) {
    std::mt19937_64 rng(7);
    for (int iter = 0; iter < 200; ++iter) {
        std::uniform_int_distribution<int> ncase(1, 8), len(1, 12), sym(0, 6), pick(0, 7);
        std::vector<std::pair<std::string, std::string>> rows;
        const int cases = ncase(rng);
        std::vector<int> remaining(cases);
        for (auto& r : remaining) r = len(rng);
        int total = 0;
        for (int r : remaining) total += r;
        for (int emitted = 0; emitted < total;) {
            const int c = pick(rng) % cases;
            if (remaining[c] == 0) continue;
            --remaining[c];
            ++emitted;
            rows.emplace_back("case " + std::to_string(c), "act," + std::to_string(sym(rng)));
        }
        const auto log = make_log(rows);

        std::ostringstream text;
        text << "case_id,activity\n";
        for (const auto& [c, a] : rows) text << csv::quote_field(c) << ',' << csv::quote_field(a) << '\n';
        EXPECT_EQ(parse(text.str()), log);
        EXPECT_EQ(log.event_count(), rows.size());

        std::vector<bool> seen(log.alphabet.size(), false);
        for (const auto& t : log.traces) {
            for (const auto e : t.events) {
                ASSERT_LT(e, log.alphabet.size());
                seen[e] = true;
            }
        }
        for (std::size_t i = 0; i < seen.size(); ++i) {
            EXPECT_TRUE(seen[i]);
            EXPECT_EQ(log.alphabet.find(log.alphabet.label(static_cast<ActivityIndex>(i))), i);
        }

        std::ostringstream out;
        write_csv_log(out, log);
        EXPECT_EQ(parse(out.str()), log);
    }
}

TEST(EventLog, FileRoundTrip) {
    const auto path = std::filesystem::temp_directory_path() / "pam_event_log_roundtrip.csv";
    const auto log = parse(kFiveCaseLog);
    write_csv_log(path, log);
    EXPECT_EQ(parse_csv_log(path), log);
    std::filesystem::remove(path);
}

TEST(EventLog, AlphabetRejectsDuplicates) {
    EXPECT_THROW(Alphabet({"a", "a"}), Error);
}
