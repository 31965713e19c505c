#include "pam/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <thread>

#include "pam/baselines.hpp"
#include "pam/errors.hpp"
#include "pam/event_log.hpp"
#include "pam/metrics.hpp"
#include "pam/miner.hpp"
#include "pam/tensor_store.hpp"
#include "pam/windowing.hpp"

namespace pam::cli {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// Raised for flag values that parse but make no sense; mapped to exit 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LogFlags {
    std::string log;
    std::string case_col = "case_id";
    std::string activity_col = "activity";
    std::string time_col;
    std::string scheme;
    std::string bins;
    std::string profile = "default14";
    std::size_t threads = 0;
};

void add_log_flags(CLI::App& cmd, LogFlags& f, bool require_log) {
    auto* log = cmd.add_option("--log", f.log, "event log CSV");
    if (require_log) log->required();
    cmd.add_option("--case-col", f.case_col, "case id column")->capture_default_str();
    cmd.add_option("--activity-col", f.activity_col, "activity column")->capture_default_str();
    cmd.add_option("--time-col", f.time_col, "timestamp column; orders events within a case");
    cmd.add_option("--scheme", f.scheme, "fixed-count:<n> | fixed-size:<k>");
    cmd.add_option("--bins", f.bins, "window-count bins for fixed-size, e.g. 6-10,11-15");
    cmd.add_option("--profile", f.profile, "built-in profile name or profile file")->capture_default_str();
    cmd.add_option("--threads", f.threads, "miner threads (default: PAM_THREADS or all cores)");
}

std::size_t resolve_threads(std::size_t flag) {
    if (flag > 0) return flag;
    if (const char* env = std::getenv("PAM_THREADS")) {
        try {
            const auto v = std::stoul(env);
            if (v > 0) return v;
        } catch (const std::exception&) {
            throw UsageError(std::string("PAM_THREADS must be a positive integer, got '") + env + "'");
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

WindowingScheme parse_scheme_flag(const std::string& text) {
    if (text.empty()) throw UsageError("--scheme is required");
    try {
        return WindowingScheme::parse(text);
    } catch (const InvalidScheme& e) {
        throw UsageError(std::string("--scheme: ") + e.what());
    }
}

std::optional<std::vector<WindowCountRange>> parse_bins_flag(const std::string& text, const WindowingScheme& scheme) {
    if (text.empty()) return std::nullopt;
    if (scheme.kind != WindowingScheme::Kind::FixedSize) throw UsageError("--bins requires a fixed-size scheme");
    try {
        return parse_bins(text);
    } catch (const InvalidScheme& e) {
        throw UsageError(std::string("--bins: ") + e.what());
    } catch (const OverlappingBins& e) {
        throw UsageError(std::string("--bins: ") + e.what());
    }
}

IngestOptions ingest_options(const LogFlags& f) {
    IngestOptions o;
    o.case_column = f.case_col;
    o.activity_column = f.activity_col;
    if (!f.time_col.empty()) o.timestamp_column = f.time_col;
    return o;
}

json metadata(const std::string& command, const std::vector<std::string>& args) {
    json m;
    m["tool"] = "pam";
    m["format_version"] = kFormatVersion;
    m["command"] = command;
    m["argv"] = args;
    return m;
}

json stats_json(const MiningStats& s) {
    json j;
    j["traces"] = s.trace_count;
    j["traces_too_short"] = s.too_short_count;
    j["windows"] = s.window_count;
    j["constraints"] = s.total_constraint_count;
    j["overlap"] = s.mean_overlap;
    j["overlap_pairs"] = s.overlap_pairs;
    j["time_s"] = s.seconds;
    return j;
}

void write_json(const json& j, const std::string& path, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << j.dump(2) << '\n';
        return;
    }
    std::ofstream f(path);
    if (!f) throw IoError("cannot write '" + path + "'");
    f << j.dump(2) << '\n';
    if (!f) throw IoError("write failed for '" + path + "'");
}

void write_sidecar(const fs::path& artifact, const json& meta) {
    std::ofstream f(artifact.string() + ".meta.json");
    if (!f) throw IoError("cannot write metadata for '" + artifact.string() + "'");
    f << meta.dump(2) << '\n';
}

fs::path bin_path(const fs::path& out, const WindowCountRange& bin) {
    fs::path p = out;
    p.replace_filename(out.stem().string() + ".bin" + bin.to_string() + out.extension().string());
    return p;
}

struct MineRun {
    std::optional<WindowCountRange> bin;
    MiningResult result;
};

// Shared by `mine` and `stats`.
struct MineJob {
    EventLog log;
    WindowingScheme scheme;
    ConstraintProfile profile;
    std::vector<MineRun> runs;
    json meta;
};

MineJob run_mining(const LogFlags& f, const std::string& command, const std::vector<std::string>& args) {
    const WindowingScheme scheme = parse_scheme_flag(f.scheme);
    const auto bins = parse_bins_flag(f.bins, scheme);
    const std::size_t threads = resolve_threads(f.threads);
    const IngestOptions ingest = ingest_options(f);

    const auto t0 = std::chrono::steady_clock::now();
    MineJob job{parse_csv_log(fs::path(f.log), ingest), scheme, ConstraintProfile::resolve(f.profile), {}, {}};
    const double ingest_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (bins) {
        for (const auto& bin : *bins) {
            MiningOptions opts{threads, std::vector<WindowCountRange>{bin}};
            job.runs.push_back({bin, mine_log(job.log, scheme, job.profile, opts)});
        }
    } else {
        job.runs.push_back({std::nullopt, mine_log(job.log, scheme, job.profile, {threads, std::nullopt})});
    }

    json& m = job.meta = metadata(command, args);
    m["inputs"] = {{"log", f.log}, {"case_col", f.case_col}, {"activity_col", f.activity_col}};
    m["event_ordering"] = ingest.ordering() == EventOrdering::Timestamp ? "timestamp" : "file";
    if (ingest.timestamp_column) m["inputs"]["time_col"] = *ingest.timestamp_column;
    m["scheme"] = scheme.to_string();
    if (bins) {
        json b = json::array();
        for (const auto& r : *bins) b.push_back(r.to_string());
        m["bins"] = b;
    }
    m["profile"] = f.profile;
    json channels = json::array();
    for (const auto& t : job.profile.channels()) channels.push_back(t.to_string());
    m["channels"] = channels;
    m["threads"] = threads;
    double mine_s = 0.0;
    for (const auto& r : job.runs) mine_s += r.result.stats.seconds;
    m["timings"] = {{"ingest_s", ingest_s}, {"mine_s", mine_s}};
    return job;
}

json job_report(const MineJob& job) {
    json report;
    report["metadata"] = job.meta;
    const auto& first = job.runs.front().result.stats;
    report["log"] = {{"traces", job.log.traces.size()},
                     {"events", job.log.event_count()},
                     {"activities", job.log.alphabet.size()},
                     {"trace_length", {{"min", first.min_trace_length},
                                       {"max", first.max_trace_length},
                                       {"mean", first.mean_trace_length}}}};
    json runs = json::array();
    for (const auto& r : job.runs) {
        json row;
        row["bin"] = r.bin ? json(r.bin->to_string()) : json(nullptr);
        row.update(stats_json(r.result.stats));
        runs.push_back(row);
    }
    report["runs"] = runs;
    return report;
}

TensorDataset dataset_of(const MineJob& job, const MineRun& run) {
    return {{job.log.alphabet, job.profile, job.scheme, run.bin}, run.result.tensors};
}

int cmd_mine(const LogFlags& f, const std::string& out_path, const std::string& stats_path,
             const std::vector<std::string>& args, std::ostream& out) {
    if (out_path.empty()) throw UsageError("--out is required");
    MineJob job = run_mining(f, "mine", args);
    json outputs = json::array();
    for (const auto& run : job.runs) {
        const fs::path path = run.bin ? bin_path(out_path, *run.bin) : fs::path(out_path);
        write_tensors(path, dataset_of(job, run));
        json meta = job.meta;
        meta["output"] = path.string();
        meta["stats"] = stats_json(run.result.stats);
        write_sidecar(path, meta);
        outputs.push_back(path.string());
    }
    json report = job_report(job);
    report["metadata"]["outputs"] = outputs;
    if (!stats_path.empty()) write_json(report, stats_path, out);
    return kExitOk;
}

int cmd_stats(const LogFlags& f, const std::string& tensors_path, const std::string& stats_path,
              const std::vector<std::string>& args, std::ostream& out) {
    if (!tensors_path.empty()) {
        const auto data = read_tensors(fs::path(tensors_path));
        json report;
        report["metadata"] = metadata("stats", args);
        report["metadata"]["inputs"] = {{"tensors", tensors_path}};
        report["metadata"]["scheme"] = data.header.scheme_string();
        json j = stats_json(tensor_stats(data.tensors));
        j.erase("traces_too_short");
        j.erase("time_s");
        report["runs"] = json::array({j});
        write_json(report, stats_path, out);
        return kExitOk;
    }
    if (f.log.empty()) throw UsageError("stats needs --log or --tensors");
    write_json(job_report(run_mining(f, "stats", args)), stats_path, out);
    return kExitOk;
}

void write_split_part(const fs::path& path, const TensorDataset& data, json meta, const std::string& part) {
    write_tensors(path, data);
    meta["part"] = part;
    meta["output"] = path.string();
    meta["traces"] = data.tensors.size();
    write_sidecar(path, meta);
}

int cmd_split(const std::string& in, std::uint64_t seed, const std::string& prefix, double train_fraction,
              double val_fraction, const std::vector<std::string>& args) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto data = read_tensors(fs::path(in));
    const auto split = split_dataset(data, train_fraction, val_fraction, seed);
    json meta = metadata("split", args);
    meta["inputs"] = {{"tensors", in}};
    meta["scheme"] = data.header.scheme_string();
    meta["seed"] = seed;
    meta["train_fraction"] = train_fraction;
    meta["validation_fraction"] = val_fraction;
    meta["sizes"] = {{"train", split.train.tensors.size()},
                     {"validation", split.validation.tensors.size()},
                     {"test", split.test.tensors.size()}};
    meta["timings"] = {{"seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}};
    write_split_part(prefix + ".train.pam", split.train, meta, "train");
    write_split_part(prefix + ".val.pam", split.validation, meta, "validation");
    write_split_part(prefix + ".test.pam", split.test, meta, "test");
    return kExitOk;
}

int cmd_baseline(const std::string& kind, const std::string& in, const std::string& train, const std::string& out_path,
                 const std::vector<std::string>& args) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto data = read_tensors(fs::path(in));
    PredictionSet preds;
    if (kind == "persistence") {
        preds = persistence_predict(data);
    } else {
        if (train.empty()) throw UsageError("--kind marginal requires --train");
        preds = marginal_frequency_predict(read_tensors(fs::path(train)), data);
    }
    write_predictions(fs::path(out_path), std::move(preds));
    json meta = metadata("baseline", args);
    meta["kind"] = kind;
    meta["inputs"] = {{"tensors", in}};
    if (!train.empty()) meta["inputs"]["train"] = train;
    meta["scheme"] = data.header.scheme_string();
    meta["output"] = out_path;
    meta["timings"] = {{"seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}};
    write_sidecar(out_path, meta);
    return kExitOk;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

int cmd_eval(const std::string& truth_path, const std::string& pred_path, bool per_template,
             const std::string& report_path, const std::vector<std::string>& args, std::ostream& out) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto truth = read_tensors(fs::path(truth_path));
    const auto preds = read_predictions(fs::path(pred_path));
    const auto report = evaluate_predictions(truth, preds, {per_template});

    json j;
    j["metadata"] = metadata("eval", args);
    j["metadata"]["inputs"] = {{"truth", truth_path}, {"pred", pred_path}};
    j["metadata"]["scheme"] = truth.header.scheme_string();
    j["metadata"]["target"] = "final window";
    j["traces"] = report.traces;
    j["positives"] = report.positives;
    j["negatives"] = report.negatives;
    j["ap"] = report.ap;
    j["auc"] = report.auc;
    j["f1"] = report.f1_best;
    j["f1_threshold"] = report.f1_threshold;
    if (per_template) {
        json per = json::array();
        for (std::size_t c = 0; c < report.per_template.size(); ++c) {
            const auto& t = report.per_template[c];
            per.push_back({{"channel", c},
                           {"template", truth.header.profile[c].to_string()},
                           {"positives", t.positives},
                           {"negatives", t.negatives},
                           {"ap", optional_json(t.ap)},
                           {"auc", optional_json(t.auc)}});
        }
        j["per_template"] = per;
    }
    j["metadata"]["timings"] = {
        {"seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}};
    write_json(j, report_path, out);
    return kExitOk;
}

int cmd_profile_list(std::ostream& out) {
    out << "built-in profiles:\n  default14\n";
    const auto& p = ConstraintProfile::default14();
    for (std::size_t c = 0; c < p.size(); ++c) out << "    " << c << '\t' << p[c].to_string() << '\n';
    out << "templates (arity):\n";
    for (const auto k : all_template_kinds()) {
        out << "  " << template_id(k) << (is_counted(k) ? ":<n>" : "") << " (" << arity(k) << ")\n";
    }
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Windowed Declare constraint tensors for predictive process monitoring", "pam"};
    app.require_subcommand(1);

    LogFlags mine_flags;
    std::string mine_out, mine_stats;
    auto* mine = app.add_subcommand("mine", "mine constraint tensors from an event log");
    add_log_flags(*mine, mine_flags, true);
    mine->add_option("--out", mine_out, "tensor file (per-bin files get a .bin<lo>-<hi> suffix)");
    mine->add_option("--stats", mine_stats, "write corpus statistics JSON here");

    LogFlags stats_flags;
    std::string stats_tensors, stats_out;
    auto* stats = app.add_subcommand("stats", "corpus statistics for a log or a tensor file");
    add_log_flags(*stats, stats_flags, false);
    stats->add_option("--tensors", stats_tensors, "compute statistics from an existing tensor file");
    stats->add_option("--stats,--out", stats_out, "JSON output path (default: stdout)");

    std::string split_in, split_prefix;
    std::uint64_t split_seed = 0;
    double train_fraction = 0.8, val_fraction = 0.2;
    auto* split = app.add_subcommand("split", "train/validation/test split at trace level");
    split->add_option("--in", split_in, "tensor file")->required();
    split->add_option("--seed", split_seed, "shuffle seed")->capture_default_str();
    split->add_option("--out-prefix", split_prefix, "writes <p>.train.pam, <p>.val.pam, <p>.test.pam")->required();
    split->add_option("--train-fraction", train_fraction)->capture_default_str()->check(CLI::Range(0.0, 1.0));
    split->add_option("--val-fraction", val_fraction, "fraction of the training part used for validation")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));

    std::string baseline_kind, baseline_in, baseline_train, baseline_out;
    auto* baseline = app.add_subcommand("baseline", "reference predictions without training");
    baseline->add_option("--kind", baseline_kind)->required()->check(CLI::IsMember({"persistence", "marginal"}));
    baseline->add_option("--in", baseline_in, "tensor file whose final windows are predicted")->required();
    baseline->add_option("--train", baseline_train, "training tensor file (marginal)");
    baseline->add_option("--out", baseline_out, "prediction file")->required();

    std::string eval_truth, eval_pred, eval_report;
    bool eval_per_template = false;
    auto* eval = app.add_subcommand("eval", "score predictions against ground-truth tensors");
    eval->add_option("--truth", eval_truth, "tensor file")->required();
    eval->add_option("--pred", eval_pred, "prediction file")->required();
    eval->add_flag("--per-template", eval_per_template, "include per-channel counts and AP");
    eval->add_option("--report", eval_report, "JSON output path (default: stdout)");

    auto* profile = app.add_subcommand("profile", "constraint profiles");
    profile->require_subcommand(1);
    auto* profile_list = profile->add_subcommand("list", "list built-in profiles and template ids");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (mine->parsed()) return cmd_mine(mine_flags, mine_out, mine_stats, args, out);
        if (stats->parsed()) return cmd_stats(stats_flags, stats_tensors, stats_out, args, out);
        if (split->parsed()) return cmd_split(split_in, split_seed, split_prefix, train_fraction, val_fraction, args);
        if (baseline->parsed()) return cmd_baseline(baseline_kind, baseline_in, baseline_train, baseline_out, args);
        if (eval->parsed()) return cmd_eval(eval_truth, eval_pred, eval_per_template, eval_report, args, out);
        if (profile_list->parsed()) return cmd_profile_list(out);
    } catch (const UsageError& e) {
        err << "pam: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    } catch (const Error& e) {
        err << "pam: error: " << e.what() << '\n';
        return kExitDomainError;
    } catch (const std::exception& e) {
        err << "pam: error: " << e.what() << '\n';
        return kExitDomainError;
    }
    err << app.help();
    return kExitUsage;
}

}  // namespace pam::cli
