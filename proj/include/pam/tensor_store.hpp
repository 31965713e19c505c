#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pam/declare.hpp"
#include "pam/event_log.hpp"
#include "pam/miner.hpp"
#include "pam/windowing.hpp"

// Tab-separated text format shared by tensor and prediction files.
//
//   #!version        1
//   #!alphabet_size  <A>
//   #!activity       <idx>  <label>          (A lines, idx 0..A-1)
//   #!profile_size   <C>
//   #!channel        <idx>  <template>[:<n>] (C lines, idx 0..C-1)
//   #!scheme         fixed-count:<n> | fixed-size:<k>[;bin=<lo>-<hi>]
//   #!trace_count    <T>
//   #!trace          <ordinal>  <case_id>  <window lengths, comma separated>
//   <ordinal> <case_id> <window> <row> <col> <channel> [<score>]
//
// Body records are sorted by (ordinal, window, row, col, channel) without
// duplicates. Labels and case ids escape `\`, tab, CR and LF as \\ \t \r \n.
namespace pam {

inline constexpr int kFormatVersion = 1;
inline constexpr double kScoreFloor = 1e-6;

struct DatasetHeader {
    Alphabet alphabet;
    ConstraintProfile profile;
    WindowingScheme scheme;
    std::optional<WindowCountRange> bin;

    std::string scheme_string() const;
    friend bool operator==(const DatasetHeader&, const DatasetHeader&) = default;
};

struct TensorDataset {
    DatasetHeader header;
    std::vector<TraceTensor> tensors;

    friend bool operator==(const TensorDataset&, const TensorDataset&) = default;
};

struct TraceInfo {
    std::string case_id;
    std::vector<std::size_t> window_lengths;

    std::size_t window_count() const noexcept { return window_lengths.size(); }
    friend bool operator==(const TraceInfo&, const TraceInfo&) = default;
};

struct ScoredCell {
    std::size_t trace = 0;  // ordinal into PredictionSet::traces
    std::size_t window = 0;
    Cell cell;
    double score = 0.0;

    friend bool operator==(const ScoredCell&, const ScoredCell&) = default;
};

struct PredictionSet {
    DatasetHeader header;
    std::vector<TraceInfo> traces;
    // Sorted like body records; cells absent here score 0.
    std::vector<ScoredCell> records;

    friend bool operator==(const PredictionSet&, const PredictionSet&) = default;
};

std::vector<TraceInfo> trace_infos(const std::vector<TraceTensor>& tensors);

void write_tensors(std::ostream& out, const TensorDataset& data);
void write_tensors(const std::filesystem::path& path, const TensorDataset& data);
TensorDataset read_tensors(std::istream& in);
TensorDataset read_tensors(const std::filesystem::path& path);

// Sorts records, drops those below kScoreFloor, and formats scores with
// nine decimals.
void write_predictions(std::ostream& out, PredictionSet predictions);
void write_predictions(const std::filesystem::path& path, PredictionSet predictions);
PredictionSet read_predictions(std::istream& in);
PredictionSet read_predictions(const std::filesystem::path& path);

// Scores every cell of `data` at 1.0 (ground truth as a prediction set).
PredictionSet as_predictions(const TensorDataset& data);

std::string format_score(double score);

}  // namespace pam
