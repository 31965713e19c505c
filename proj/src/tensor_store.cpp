#include "pam/tensor_store.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>
#include <tuple>

#include "pam/errors.hpp"

namespace pam {

namespace {

std::string escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (const char c : s) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '\t': out += "\\t"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string unescape(std::string_view s, std::size_t line) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '\\') {
            out.push_back(s[i]);
            continue;
        }
        if (++i == s.size()) throw FormatError("dangling escape", line);
        switch (s[i]) {
            case '\\': out.push_back('\\'); break;
            case 't': out.push_back('\t'); break;
            case 'n': out.push_back('\n'); break;
            case 'r': out.push_back('\r'); break;
            default: throw FormatError(std::string("unknown escape \\") + s[i], line);
        }
    }
    return out;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto tab = line.find('\t', start);
        fields.push_back(line.substr(start, tab - start));
        if (tab == std::string_view::npos) break;
        start = tab + 1;
    }
    return fields;
}

std::size_t parse_index(std::string_view s, std::size_t line, std::string_view what) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        throw FormatError("invalid " + std::string(what) + " '" + std::string(s) + "'", line);
    }
    return v;
}

std::string join_lengths(const std::vector<std::size_t>& lengths) {
    std::string out;
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        if (i) out.push_back(',');
        out += std::to_string(lengths[i]);
    }
    return out;
}

std::vector<std::size_t> parse_lengths(std::string_view s, std::size_t line) {
    std::vector<std::size_t> out;
    if (s.empty()) throw FormatError("trace has no windows", line);
    std::size_t start = 0;
    while (true) {
        const auto comma = s.find(',', start);
        const auto v = parse_index(s.substr(start, comma - start), line, "window length");
        if (v == 0) throw FormatError("window length must be positive", line);
        out.push_back(v);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

void write_header(std::ostream& out, const DatasetHeader& h, const std::vector<TraceInfo>& traces) {
    out << "#!version\t" << kFormatVersion << '\n';
    out << "#!alphabet_size\t" << h.alphabet.size() << '\n';
    for (std::size_t i = 0; i < h.alphabet.size(); ++i) {
        out << "#!activity\t" << i << '\t' << escape(h.alphabet.label(static_cast<ActivityIndex>(i))) << '\n';
    }
    out << "#!profile_size\t" << h.profile.size() << '\n';
    for (std::size_t i = 0; i < h.profile.size(); ++i) {
        out << "#!channel\t" << i << '\t' << h.profile[i].to_string() << '\n';
    }
    out << "#!scheme\t" << h.scheme_string() << '\n';
    out << "#!trace_count\t" << traces.size() << '\n';
    for (std::size_t i = 0; i < traces.size(); ++i) {
        if (traces[i].window_lengths.empty()) throw Error("trace '" + traces[i].case_id + "' has no windows");
        out << "#!trace\t" << i << '\t' << escape(traces[i].case_id) << '\t'
            << join_lengths(traces[i].window_lengths) << '\n';
    }
}

struct ParsedHeader {
    DatasetHeader header;
    std::vector<TraceInfo> traces;
};

// Reads the `#!` block; `line_no` is left at the last header line and
// `pending` holds the first body line, if any.
ParsedHeader read_header(std::istream& in, std::size_t& line_no, std::optional<std::string>& pending) {
    ParsedHeader out;
    std::optional<std::size_t> version, alphabet_size, profile_size, trace_count;
    std::vector<std::string> labels;
    std::vector<ConstraintTemplate> channels;
    std::optional<std::string> scheme;

    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.starts_with("#!")) {
            pending = std::move(line);
            break;
        }
        const auto fields = split_tabs(std::string_view(line).substr(2));
        const auto key = fields[0];
        const auto expect = [&](std::size_t n) {
            if (fields.size() != n) {
                throw FormatError("header '" + std::string(key) + "' expects " + std::to_string(n - 1) +
                                      " value(s)",
                                  line_no);
            }
        };
        if (!version && key != "version") throw FormatError("first header line must be 'version'", line_no);

        if (key == "version") {
            expect(2);
            if (version) throw FormatError("duplicate version", line_no);
            version = parse_index(fields[1], line_no, "version");
            if (*version != static_cast<std::size_t>(kFormatVersion)) {
                throw FormatError("unsupported format version " + std::string(fields[1]), line_no);
            }
        } else if (key == "alphabet_size") {
            expect(2);
            alphabet_size = parse_index(fields[1], line_no, "alphabet_size");
        } else if (key == "activity") {
            expect(3);
            const auto idx = parse_index(fields[1], line_no, "activity index");
            if (idx != labels.size()) throw FormatError("activity index out of sequence", line_no);
            labels.push_back(unescape(fields[2], line_no));
        } else if (key == "profile_size") {
            expect(2);
            profile_size = parse_index(fields[1], line_no, "profile_size");
        } else if (key == "channel") {
            expect(3);
            const auto idx = parse_index(fields[1], line_no, "channel index");
            if (idx != channels.size()) throw FormatError("channel index out of sequence", line_no);
            try {
                channels.push_back(ConstraintTemplate::parse(fields[2]));
            } catch (const Error& e) {
                throw FormatError(e.what(), line_no);
            }
        } else if (key == "scheme") {
            expect(2);
            scheme = std::string(fields[1]);
            try {
                std::string_view s = fields[1];
                const auto semi = s.find(';');
                out.header.scheme = WindowingScheme::parse(s.substr(0, semi));
                if (semi != std::string_view::npos) {
                    const auto extra = s.substr(semi + 1);
                    if (!extra.starts_with("bin=")) throw InvalidScheme("unknown scheme option");
                    const auto bins = parse_bins(extra.substr(4));
                    if (bins.size() != 1) throw InvalidScheme("exactly one bin expected");
                    out.header.bin = bins.front();
                }
            } catch (const Error& e) {
                throw FormatError(e.what(), line_no);
            }
        } else if (key == "trace_count") {
            expect(2);
            trace_count = parse_index(fields[1], line_no, "trace_count");
        } else if (key == "trace") {
            expect(4);
            const auto idx = parse_index(fields[1], line_no, "trace ordinal");
            if (idx != out.traces.size()) throw FormatError("trace ordinal out of sequence", line_no);
            out.traces.push_back({unescape(fields[2], line_no), parse_lengths(fields[3], line_no)});
        } else {
            throw FormatError("unknown header key '" + std::string(key) + "'", line_no);
        }
    }

    const std::size_t at = line_no;
    if (!version) throw FormatError("missing header", at);
    if (!alphabet_size || *alphabet_size != labels.size()) {
        throw FormatError("alphabet_size does not match activity lines", at);
    }
    if (!profile_size || *profile_size != channels.size()) {
        throw FormatError("profile_size does not match channel lines", at);
    }
    if (!scheme) throw FormatError("missing scheme", at);
    if (!trace_count || *trace_count != out.traces.size()) {
        throw FormatError("trace_count does not match trace lines", at);
    }
    try {
        out.header.alphabet = Alphabet(std::move(labels));
        out.header.profile = ConstraintProfile(std::move(channels));
    } catch (const Error& e) {
        throw FormatError(e.what(), at);
    }
    return out;
}

struct BodyRecord {
    std::size_t trace;
    std::size_t window;
    Cell cell;
    std::optional<double> score;
};

class BodyReader {
public:
    BodyReader(const ParsedHeader& h, bool with_score) : h_(h), with_score_(with_score) {}

    BodyRecord parse(std::string_view line, std::size_t line_no) {
        const auto f = split_tabs(line);
        const std::size_t expected = with_score_ ? 7 : 6;
        if (f.size() != expected) {
            throw FormatError("expected " + std::to_string(expected) + " fields, found " +
                                  std::to_string(f.size()),
                              line_no);
        }
        BodyRecord r;
        r.trace = parse_index(f[0], line_no, "trace ordinal");
        if (r.trace >= h_.traces.size()) throw FormatError("trace ordinal out of range", line_no);
        if (unescape(f[1], line_no) != h_.traces[r.trace].case_id) {
            throw FormatError("case id does not match trace ordinal", line_no);
        }
        r.window = parse_index(f[2], line_no, "window index");
        if (r.window >= h_.traces[r.trace].window_count()) throw FormatError("window index out of range", line_no);
        const auto row = parse_index(f[3], line_no, "row");
        const auto col = parse_index(f[4], line_no, "col");
        const auto ch = parse_index(f[5], line_no, "channel");
        const auto a = h_.header.alphabet.size();
        if (row >= a || col >= a) throw FormatError("activity index out of range", line_no);
        if (ch >= h_.header.profile.size()) throw FormatError("channel index out of range", line_no);
        r.cell = {static_cast<ActivityIndex>(row), static_cast<ActivityIndex>(col), static_cast<ChannelIndex>(ch)};
        if (!structurally_possible(h_.header.profile, r.cell)) {
            throw FormatError("cell position impossible for channel " + h_.header.profile[ch].to_string(), line_no);
        }
        if (with_score_) {
            const auto s = f[6];
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
                throw FormatError("invalid score '" + std::string(s) + "'", line_no);
            }
            if (v < 0.0 || v > 1.0) throw FormatError("score " + std::string(s) + " outside [0, 1]", line_no);
            r.score = v;
        }
        const auto key = std::tie(r.trace, r.window, r.cell);
        if (last_ && !(*last_ < std::make_tuple(r.trace, r.window, r.cell))) {
            throw FormatError(*last_ == std::make_tuple(r.trace, r.window, r.cell) ? "duplicate record"
                                                                                    : "record out of order",
                              line_no);
        }
        last_ = key;
        return r;
    }

private:
    const ParsedHeader& h_;
    bool with_score_;
    std::optional<std::tuple<std::size_t, std::size_t, Cell>> last_;
};

template <typename Fn>
void for_each_body_line(std::istream& in, std::size_t& line_no, std::optional<std::string>& pending, Fn&& fn) {
    std::string line;
    bool have = false;
    if (pending) {
        line = std::move(*pending);
        have = true;
    }
    while (have || std::getline(in, line)) {
        if (!have) ++line_no;
        have = false;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.starts_with("#!")) throw FormatError("header line after body", line_no);
        fn(std::string_view(line), line_no);
    }
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace

std::string DatasetHeader::scheme_string() const {
    std::string s = scheme.to_string();
    if (bin) s += ";bin=" + bin->to_string();
    return s;
}

std::vector<TraceInfo> trace_infos(const std::vector<TraceTensor>& tensors) {
    std::vector<TraceInfo> out;
    out.reserve(tensors.size());
    for (const auto& t : tensors) out.push_back({t.case_id, t.window_lengths});
    return out;
}

std::string format_score(double score) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9f", score);
    return buf;
}

void write_tensors(std::ostream& out, const TensorDataset& data) {
    for (const auto& t : data.tensors) {
        if (t.slices.size() != t.window_lengths.size()) {
            throw Error("trace '" + t.case_id + "' slice count differs from its window count");
        }
    }
    write_header(out, data.header, trace_infos(data.tensors));
    for (std::size_t i = 0; i < data.tensors.size(); ++i) {
        const auto& t = data.tensors[i];
        const std::string id = escape(t.case_id);
        for (std::size_t w = 0; w < t.slices.size(); ++w) {
            if (t.slices[w].window_index != w) throw Error("slice window index out of sequence");
            for (const auto& c : t.slices[w].cells) {
                out << i << '\t' << id << '\t' << w << '\t' << c.row << '\t' << c.col << '\t' << c.channel << '\n';
            }
        }
    }
}

void write_tensors(const std::filesystem::path& path, const TensorDataset& data) {
    auto out = open_out(path);
    write_tensors(out, data);
    finish(out, path);
}

TensorDataset read_tensors(std::istream& in) {
    std::size_t line_no = 0;
    std::optional<std::string> pending;
    ParsedHeader h = read_header(in, line_no, pending);

    TensorDataset data;
    data.tensors.reserve(h.traces.size());
    for (const auto& t : h.traces) {
        TraceTensor tensor{t.case_id, t.window_lengths, {}};
        tensor.slices.resize(t.window_count());
        for (std::size_t w = 0; w < t.window_count(); ++w) tensor.slices[w].window_index = w;
        data.tensors.push_back(std::move(tensor));
    }

    BodyReader reader(h, false);
    for_each_body_line(in, line_no, pending, [&](std::string_view line, std::size_t n) {
        const auto r = reader.parse(line, n);
        data.tensors[r.trace].slices[r.window].cells.push_back(r.cell);
    });
    data.header = std::move(h.header);
    return data;
}

TensorDataset read_tensors(const std::filesystem::path& path) {
    auto in = open_in(path);
    return read_tensors(in);
}

void write_predictions(std::ostream& out, PredictionSet predictions) {
    auto& recs = predictions.records;
    for (const auto& r : recs) {
        if (!std::isfinite(r.score) || r.score < 0.0 || r.score > 1.0) {
            throw Error("prediction score " + std::to_string(r.score) + " outside [0, 1]");
        }
        if (r.trace >= predictions.traces.size() || r.window >= predictions.traces[r.trace].window_count()) {
            throw Error("prediction record references an unknown trace or window");
        }
        if (!structurally_possible(predictions.header.profile, r.cell)) {
            throw Error("prediction record at a structurally impossible cell");
        }
    }
    std::erase_if(recs, [](const ScoredCell& r) { return r.score < kScoreFloor; });
    std::sort(recs.begin(), recs.end(), [](const ScoredCell& a, const ScoredCell& b) {
        return std::tie(a.trace, a.window, a.cell) < std::tie(b.trace, b.window, b.cell);
    });
    for (std::size_t i = 1; i < recs.size(); ++i) {
        if (std::tie(recs[i - 1].trace, recs[i - 1].window, recs[i - 1].cell) ==
            std::tie(recs[i].trace, recs[i].window, recs[i].cell)) {
            throw Error("duplicate prediction record");
        }
    }

    write_header(out, predictions.header, predictions.traces);
    for (const auto& r : recs) {
        out << r.trace << '\t' << escape(predictions.traces[r.trace].case_id) << '\t' << r.window << '\t'
            << r.cell.row << '\t' << r.cell.col << '\t' << r.cell.channel << '\t' << format_score(r.score) << '\n';
    }
}

void write_predictions(const std::filesystem::path& path, PredictionSet predictions) {
    auto out = open_out(path);
    write_predictions(out, std::move(predictions));
    finish(out, path);
}

PredictionSet read_predictions(std::istream& in) {
    std::size_t line_no = 0;
    std::optional<std::string> pending;
    ParsedHeader h = read_header(in, line_no, pending);

    PredictionSet preds;
    BodyReader reader(h, true);
    for_each_body_line(in, line_no, pending, [&](std::string_view line, std::size_t n) {
        const auto r = reader.parse(line, n);
        preds.records.push_back({r.trace, r.window, r.cell, *r.score});
    });
    preds.header = std::move(h.header);
    preds.traces = std::move(h.traces);
    return preds;
}

PredictionSet read_predictions(const std::filesystem::path& path) {
    auto in = open_in(path);
    return read_predictions(in);
}

PredictionSet as_predictions(const TensorDataset& data) {
    PredictionSet preds;
    preds.header = data.header;
    preds.traces = trace_infos(data.tensors);
    for (std::size_t i = 0; i < data.tensors.size(); ++i) {
        const auto& t = data.tensors[i];
        if (t.slices.empty()) continue;
        const std::size_t last = t.slices.size() - 1;
        for (const auto& c : t.slices[last].cells) preds.records.push_back({i, last, c, 1.0});
    }
    return preds;
}

}  // namespace pam
