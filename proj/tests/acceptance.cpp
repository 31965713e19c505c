// Acceptance run: one PASS/FAIL/SKIP line per criterion. Exit status is
// non-zero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "pam/baselines.hpp"
#include "pam/metrics.hpp"
#include "pam/miner.hpp"
#include "pam/tensor_store.hpp"
#include "oracles.hpp"

using namespace pam;
namespace fs = std::filesystem;

namespace {

enum class Outcome { Pass, Fail, Skip };

struct Verdict {
    Outcome outcome;
    std::string detail;
};

Verdict pass_if(bool ok, std::string detail) { return {ok ? Outcome::Pass : Outcome::Fail, std::move(detail)}; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const ConstraintProfile& P() { return ConstraintProfile::default14(); }

ChannelIndex ch(std::string_view id) {
    return static_cast<ChannelIndex>(*P().channel_of(ConstraintTemplate::parse(id)));
}

Verdict oracle_equivalence() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto windows = oracle::all_windows(6, 3);
    std::size_t checks = 0, mismatches = 0;
    for (const auto& t : oracle::all_templates()) {
        oracle::for_each_assignment(t, 3, [&](ActivityIndex a, std::optional<ActivityIndex> b) {
            for (const auto& w : windows) {
                ++checks;
                mismatches += evaluate_template(t, a, b, w) != oracle_evaluate_template(t, a, b, w);
            }
        });
    }
    const double secs = seconds_since(t0);
    std::ostringstream d;
    d << windows.size() << " windows, " << checks << " checks, " << mismatches << " mismatches, " << secs << " s";
    return pass_if(windows.size() == 1092 && mismatches == 0 && secs < 10.0, d.str());
}

Verdict count_partition() {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<std::size_t> alpha(1, 10);
    const ChannelIndex counted[] = {ch("absence:1"), ch("exactly:1"), ch("exactly:2"), ch("existence:3")};
    std::size_t violations = 0, activities = 0;
    for (int i = 0; i < 10000; ++i) {
        const std::size_t A = alpha(rng);
        const auto w = oracle::random_window(rng, 20, A);
        const auto slice = mine_window(w, P(), A);
        for (ActivityIndex a = 0; a < A; ++a) {
            int holding = 0;
            for (const auto c : counted) holding += slice.contains({a, a, c});
            violations += holding != 1;
            ++activities;
        }
    }
    return pass_if(violations == 0,
                   "10000 windows, " + std::to_string(activities) + " activities, " + std::to_string(violations) +
                       " violations");
}

Verdict windowing_examples() {
    const std::vector<std::string> src{"abcde"};
    const auto log = make_log_from_strings(src);
    const auto w = split_fixed_count(log.traces[0], 3);
    std::vector<std::string> got;
    for (std::size_t i = 0; i < w.window_count(); ++i) {
        std::string s;
        for (const auto e : w.window(i)) s += log.alphabet.label(e);
        got.push_back(s);
    }
    const Trace eleven{"t", std::vector<ActivityIndex>(11, 0)};
    const auto sizes = split_fixed_size(eleven, 10).window_lengths();
    const bool ok = got == std::vector<std::string>{"ab", "cd", "e"} && sizes == std::vector<std::size_t>{10, 1};
    std::string detail = "<a,b,c,d,e>/3 ->";
    for (const auto& s : got) detail += " " + s;
    detail += "; |t|=11, k=10 ->";
    for (const auto n : sizes) detail += " " + std::to_string(n);
    return pass_if(ok, detail);
}

Verdict dwww_window() {
    constexpr ActivityIndex D = 0, W = 1, Z = 2;
    const std::vector<ActivityIndex> window{D, W, W, W};
    const auto slice = mine_window(window, P(), 3);
    const std::set<Cell> expected{
        {D, D, ch("exactly:1")},          {D, D, ch("init")},           {W, W, ch("existence:3")},
        {W, W, ch("last")},               {Z, Z, ch("absence:1")},      {D, W, ch("response")},
        {D, W, ch("alternate_response")}, {D, W, ch("chain_response")}, {D, W, ch("precedence")},
        {D, W, ch("co_existence")},       {W, D, ch("co_existence")},   {W, D, ch("not_succession")},
    };
    const std::set<Cell> got(slice.cells.begin(), slice.cells.end());
    const auto brute = oracle::oracle_mine_window(window, P(), 3);
    const bool stated = slice.contains({D, D, ch("init")}) && slice.contains({D, D, ch("exactly:1")}) &&
                        slice.contains({W, W, ch("existence:3")}) && slice.contains({W, W, ch("last")}) &&
                        slice.contains({D, W, ch("chain_response")});
    return pass_if(got == expected && slice.cells == brute && stated,
                   std::to_string(slice.cells.size()) + " cells mined, " + std::to_string(brute.size()) +
                       " from oracle, listed set " + (got == expected ? "matches" : "differs"));
}

Verdict self_satisfaction() {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<std::size_t> len(1, 40);
    std::uniform_int_distribution<int> sym(0, 7);
    std::vector<std::string> src;
    for (int i = 0; i < 1000; ++i) {
        std::string s(len(rng), 'a');
        for (auto& c : s) c = static_cast<char>('a' + sym(rng));
        src.push_back(s);
    }
    // CSV -> log -> tensors -> file -> tensors.
    std::stringstream csv;
    write_csv_log(csv, make_log_from_strings(src));
    const auto log = parse_csv_log(csv);
    const auto scheme = WindowingScheme::fixed_count(3);
    MiningOptions opts;
    opts.threads = 0;
    const auto mined = mine_log(log, scheme, P(), opts);
    std::stringstream file;
    write_tensors(file, {{log.alphabet, P(), scheme, std::nullopt}, mined.tensors});
    const auto data = read_tensors(file);

    std::size_t cells = 0, violations = 0, k = 0;
    for (const auto& trace : log.traces) {
        if (trace.size() < 3) continue;
        const auto windowed = split(trace, scheme);
        const auto& tensor = data.tensors.at(k++);
        for (std::size_t j = 0; j < tensor.window_count(); ++j) {
            for (const auto& c : tensor.slices[j].cells) {
                const auto& t = P()[c.channel];
                const auto second = t.unary() ? std::nullopt : std::optional<ActivityIndex>(c.col);
                violations += !oracle_evaluate_template(t, c.row, second, windowed.window(j));
                ++cells;
            }
        }
    }
    return pass_if(violations == 0 && k == data.tensors.size(),
                   std::to_string(log.traces.size()) + " traces, " + std::to_string(cells) + " cells, " +
                       std::to_string(violations) + " violations");
}

Verdict metrics_correctness() {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<std::size_t> size(2, 50);
    std::uniform_int_distribution<int> level(0, 5);
    std::bernoulli_distribution pos(0.4), coarse(0.5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    std::size_t threshold_mismatches = 0;
    for (int i = 0; i < 1000; ++i) {
        std::vector<ScoredLabel> cells(size(rng));
        for (auto& c : cells) c = {coarse(rng) ? level(rng) / 5.0 : u(rng), pos(rng)};
        cells[0].positive = true;
        cells[1].positive = false;
        const auto [f1, thr] = oracle::oracle_best_f1(cells);
        const auto got = f1_at_best_threshold(cells);
        worst = std::max({worst, std::abs(average_precision(cells) - oracle::oracle_average_precision(cells)),
                          std::abs(roc_auc(cells) - oracle::oracle_roc_auc(cells)), std::abs(got.f1 - f1)});
        threshold_mismatches += got.threshold != thr;
    }

    const std::vector<std::string> src{"abaabcdad", "abaad", "abaadc", "cdaad", "dabddd", "abcdabcd", "dcba"};
    const auto log = make_log_from_strings(src);
    const auto scheme = WindowingScheme::fixed_count(3);
    const TensorDataset truth{{log.alphabet, P(), scheme, std::nullopt}, mine_log(log, scheme, P()).tensors};
    const auto report = evaluate_predictions(truth, as_predictions(truth));
    const bool perfect = report.ap == 1.0 && report.auc == 1.0 && report.f1_best == 1.0;

    std::ostringstream d;
    d << "1000 sets, max |diff| " << worst << ", " << threshold_mismatches << " threshold mismatches; truth-as-pred ap "
      << report.ap << " auc " << report.auc << " f1 " << report.f1_best;
    return pass_if(worst <= 1e-9 && threshold_mismatches == 0 && perfect, d.str());
}

// Mines `src` and returns the persistence F1 at threshold 1.0 when every
// consecutive window pair has Jaccard overlap `j`.
std::optional<double> persistence_f1(const std::vector<std::string>& src, const ConstraintProfile& profile,
                                     std::size_t windows, double j, std::string& note) {
    const auto log = make_log_from_strings(src);
    const auto scheme = WindowingScheme::fixed_count(windows);
    const TensorDataset data{{log.alphabet, profile, scheme, std::nullopt}, mine_log(log, scheme, profile).tensors};
    for (const auto& t : data.tensors) {
        for (std::size_t i = 1; i < t.window_count(); ++i) {
            const double o = overlap(t.slices[i - 1], t.slices[i]);
            if (std::abs(o - j) > 1e-12) {
                note = "log " + t.case_id + " has a pair with overlap " + std::to_string(o);
                return std::nullopt;
            }
        }
    }
    std::stringstream io;
    write_predictions(io, persistence_predict(data));
    const auto preds = read_predictions(io);
    return f1_at_threshold(final_window_groups(data, preds), 1.0).f1;
}

Verdict persistence_identity() {
    const ConstraintProfile exactly_init({ConstraintTemplate::parse("exactly:1"), ConstraintTemplate::parse("init")});
    struct Case {
        double j;
        std::vector<std::string> traces;
        const ConstraintProfile* profile;
        std::size_t windows;
    };
    const std::vector<Case> cases{
        {0.0, {"ab", "ba"}, &P(), 2},
        {0.0, {"aba", "bab"}, &P(), 3},
        {0.5, {"abba", "baab"}, &exactly_init, 2},
        {0.5, {"abbaab", "baabba"}, &exactly_init, 3},
        {1.0, {"abab", "cc", "cabcab"}, &P(), 2},
        {1.0, {"abcabcabc", "ddd"}, &P(), 3},
    };
    double worst = 0.0;
    std::string detail;
    for (const auto& c : cases) {
        std::string note;
        const auto f1 = persistence_f1(c.traces, *c.profile, c.windows, c.j, note);
        if (!f1) return {Outcome::Fail, "J=" + std::to_string(c.j) + ": " + note};
        const double expected = 2 * c.j / (1 + c.j);
        worst = std::max(worst, std::abs(*f1 - expected));
        std::ostringstream d;
        d << " J=" << c.j << "/w=" << c.windows << " F1=" << *f1;
        detail += d.str();
    }
    std::ostringstream d;
    d << "max |F1 - 2J/(1+J)| " << worst << ";" << detail;
    return pass_if(worst <= 1e-9, d.str());
}

Verdict bpi2012_reproduction() {
    const char* path = std::getenv("PAM_BPI2012_CSV");
    if (!path || !*path) return {Outcome::Skip, "set PAM_BPI2012_CSV to the BPI Challenge 2012 log as CSV"};
    if (!fs::exists(path)) return {Outcome::Fail, std::string("file not found: ") + path};
    IngestOptions ingest;
    if (const char* c = std::getenv("PAM_BPI2012_CASE_COL")) ingest.case_column = c;
    if (const char* c = std::getenv("PAM_BPI2012_ACTIVITY_COL")) ingest.activity_column = c;
    if (const char* c = std::getenv("PAM_BPI2012_TIME_COL")) ingest.timestamp_column = c;
    const auto log = parse_csv_log(fs::path(path), ingest);
    MiningOptions opts;
    opts.threads = 0;
    const auto result = mine_log(log, WindowingScheme::fixed_count(2), P(), opts);
    const auto& s = result.stats;
    const double rel = std::abs(static_cast<double>(s.total_constraint_count) - 2701992.0) / 2701992.0;
    const bool ok = rel <= 0.02 && std::abs(s.mean_overlap - 0.447) <= 0.02 && s.seconds <= 10.0;
    std::ostringstream d;
    d << log.traces.size() << " traces, |A|=" << log.alphabet.size() << ", constraints " << s.total_constraint_count
      << " (" << rel * 100 << "% off), overlap " << s.mean_overlap << ", too short " << s.too_short_count << ", "
      << s.seconds << " s";
    return pass_if(ok, d.str());
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"oracle-equivalence", oracle_equivalence},
        {"unary-count-partition", count_partition},
        {"windowing-examples", windowing_examples},
        {"dwww-window", dwww_window},
        {"self-satisfaction", self_satisfaction},
        {"metrics-correctness", metrics_correctness},
        {"persistence-identity", persistence_identity},
        {"bpi2012-reproduction", bpi2012_reproduction},
    };
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        Verdict v;
        try {
            v = check();
        } catch (const std::exception& e) {
            v = {Outcome::Fail, std::string("exception: ") + e.what()};
        }
        const char* tag = v.outcome == Outcome::Pass ? "PASS" : v.outcome == Outcome::Fail ? "FAIL" : "SKIP";
        failures += v.outcome == Outcome::Fail;
        std::printf("%s %-24s %s\n", tag, name.c_str(), v.detail.c_str());
    }
    std::fflush(stdout);
    return failures == 0 ? 0 : 1;
}
