#include "pam/declare.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include "pam/errors.hpp"

namespace pam {

namespace {

struct KindInfo {
    TemplateKind kind;
    std::string_view id;
    // Counted templates carry a `%` placeholder for the repetition bound.
    std::string_view regex;
};

// Regexes over {a, b, o}; `a` is the first argument and `b` the second.
// exclusive_choice uses "exactly one of a, b occurs" in place of the
// commonly published (malformed) pattern.
constexpr std::array<KindInfo, kTemplateKindCount> kKinds{{
    {TemplateKind::Existence, "existence", ".*(a.*){%}"},
    {TemplateKind::Absence, "absence", "[^a]*(a?[^a]*){%}"},
    {TemplateKind::Exactly, "exactly", "[^a]*(a[^a]*){%}"},
    {TemplateKind::Init, "init", "(a.*)?"},
    {TemplateKind::Last, "last", ".*a"},
    {TemplateKind::RespondedExistence, "responded_existence", "[^a]*((a.*b.*)|(b.*a.*))?"},
    {TemplateKind::CoExistence, "co_existence", "[^ab]*((a.*b.*)|(b.*a.*))?"},
    {TemplateKind::Response, "response", "[^a]*(a.*b)*[^a]*"},
    {TemplateKind::Precedence, "precedence", "[^b]*(a.*b)*[^b]*"},
    {TemplateKind::Succession, "succession", "[^ab]*(a.*b)*[^ab]*"},
    {TemplateKind::AlternateResponse, "alternate_response", "[^a]*(a[^a]*b[^a]*)*"},
    {TemplateKind::AlternatePrecedence, "alternate_precedence", "[^b]*(a[^b]*b[^b]*)*"},
    {TemplateKind::AlternateSuccession, "alternate_succession", "[^ab]*(a[^ab]*b[^ab]*)*"},
    {TemplateKind::ChainResponse, "chain_response", "[^a]*(ab[^a]*)*"},
    {TemplateKind::ChainPrecedence, "chain_precedence", "[^b]*(ab[^b]*)*"},
    {TemplateKind::ChainSuccession, "chain_succession", "[^ab]*(ab[^ab]*)*"},
    {TemplateKind::NotCoExistence, "not_co_existence", "[^ab]*((a[^b]*)|(b[^a]*))?"},
    {TemplateKind::NotSuccession, "not_succession", "[^a]*(a[^b]*)*"},
    {TemplateKind::NotChainSuccession, "not_chain_succession", "[^a]*(a+[^ab][^a]*)*a*"},
    {TemplateKind::Choice, "choice", ".*[ab].*"},
    {TemplateKind::ExclusiveChoice, "exclusive_choice", "([^b]*a[^b]*)|([^a]*b[^a]*)"},
}};

static_assert([] {
    for (std::size_t i = 0; i < kKinds.size(); ++i) {
        if (static_cast<std::size_t>(kKinds[i].kind) != i) return false;
    }
    return true;
}());

const KindInfo& info(TemplateKind k) { return kKinds[static_cast<std::size_t>(k)]; }

// absence(n) allows at most n-1 occurrences.
int repetition_bound(const ConstraintTemplate& t) {
    return t.kind == TemplateKind::Absence ? t.n - 1 : t.n;
}

struct CompiledTemplate {
    std::string regex;
    Dfa dfa;
};

class TemplateRegistry {
public:
    TemplateRegistry() {
        for (const auto& k : kKinds) {
            if (is_counted(k.kind)) {
                for (int n = 1; n <= kMaxCountParameter; ++n) add(ConstraintTemplate{k.kind, n});
            } else {
                add(ConstraintTemplate{k.kind, 0});
            }
        }
    }

    const CompiledTemplate& get(const ConstraintTemplate& t) const {
        const auto it = compiled_.find(t);
        if (it == compiled_.end()) {
            throw UnsupportedParameter("template " + t.to_string() + " is not supported");
        }
        return it->second;
    }

private:
    void add(const ConstraintTemplate& t) {
        std::string regex(info(t.kind).regex);
        if (const auto pos = regex.find('%'); pos != std::string::npos) {
            regex.replace(pos, 1, std::to_string(repetition_bound(t)));
        }
        Dfa dfa = compile_regex(regex, projected_alphabet(t));
        compiled_.emplace(t, CompiledTemplate{std::move(regex), std::move(dfa)});
    }

    std::map<ConstraintTemplate, CompiledTemplate> compiled_;
};

const TemplateRegistry& registry() {
    static const TemplateRegistry instance;
    return instance;
}

void check_arity(const ConstraintTemplate& t, ActivityIndex first, std::optional<ActivityIndex> second) {
    if (t.unary() && second) {
        throw ArityMismatch("unary template " + t.to_string() + " given two arguments");
    }
    if (!t.unary()) {
        if (!second) throw ArityMismatch("binary template " + t.to_string() + " given one argument");
        if (*second == first) {
            throw ArityMismatch("binary template " + t.to_string() + " needs distinct arguments");
        }
    }
}

}  // namespace

const std::array<TemplateKind, kTemplateKindCount>& all_template_kinds() {
    static const auto kinds = [] {
        std::array<TemplateKind, kTemplateKindCount> out{};
        for (std::size_t i = 0; i < kKinds.size(); ++i) out[i] = kKinds[i].kind;
        return out;
    }();
    return kinds;
}

std::string_view template_id(TemplateKind k) { return info(k).id; }

std::optional<TemplateKind> template_kind_from_id(std::string_view id) {
    for (const auto& k : kKinds) {
        if (k.id == id) return k.kind;
    }
    return std::nullopt;
}

ConstraintTemplate ConstraintTemplate::make(TemplateKind kind, int n) {
    if (is_counted(kind)) {
        if (n < 1 || n > kMaxCountParameter) {
            throw UnsupportedParameter(std::string(template_id(kind)) + " requires n in [1, " +
                                       std::to_string(kMaxCountParameter) + "], got " +
                                       std::to_string(n));
        }
    } else if (n != 0) {
        throw UnsupportedParameter(std::string(template_id(kind)) + " takes no count parameter");
    }
    return {kind, n};
}

ConstraintTemplate ConstraintTemplate::parse(std::string_view text) {
    const auto colon = text.find(':');
    const auto id = text.substr(0, colon);
    const auto kind = template_kind_from_id(id);
    if (!kind) throw UnknownTemplate("unknown template '" + std::string(id) + "'");
    int n = 0;
    if (colon != std::string_view::npos) {
        const auto num = text.substr(colon + 1);
        const auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), n);
        if (num.empty() || ec != std::errc() || ptr != num.data() + num.size()) {
            throw UnsupportedParameter("invalid count parameter in '" + std::string(text) + "'");
        }
    } else if (is_counted(*kind)) {
        throw UnsupportedParameter(std::string(id) + " requires a count parameter, e.g. " +
                                   std::string(id) + ":1");
    }
    return make(*kind, n);
}

std::string ConstraintTemplate::to_string() const {
    std::string s(template_id(kind));
    if (is_counted(kind)) s += ":" + std::to_string(n);
    return s;
}

ConstraintProfile::ConstraintProfile(std::vector<ConstraintTemplate> channels)
    : channels_(std::move(channels)) {
    for (std::size_t i = 0; i < channels_.size(); ++i) {
        const auto& t = channels_[i];
        ConstraintTemplate::make(t.kind, t.n);
        for (std::size_t j = 0; j < i; ++j) {
            if (channels_[j] == t) throw Error("template " + t.to_string() + " listed twice in profile");
        }
    }
}

const ConstraintProfile& ConstraintProfile::default14() {
    using K = TemplateKind;
    static const ConstraintProfile profile({
        {K::Absence, 1},
        {K::Exactly, 1},
        {K::Exactly, 2},
        {K::Existence, 3},
        {K::Init, 0},
        {K::Last, 0},
        {K::Precedence, 0},
        {K::AlternatePrecedence, 0},
        {K::ChainPrecedence, 0},
        {K::Response, 0},
        {K::AlternateResponse, 0},
        {K::ChainResponse, 0},
        {K::NotSuccession, 0},
        {K::CoExistence, 0},
    });
    return profile;
}

ConstraintProfile ConstraintProfile::resolve(std::string_view name_or_path) {
    if (name_or_path == "default14") return default14();
    return read(std::filesystem::path(name_or_path));
}

ConstraintProfile ConstraintProfile::read(std::istream& in) {
    std::vector<ConstraintTemplate> channels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) throw FormatError("expected '<channel>\\t<template>'", line_no);
        std::size_t index = 0;
        const auto [ptr, ec] = std::from_chars(line.data(), line.data() + tab, index);
        if (ec != std::errc() || ptr != line.data() + tab) throw FormatError("bad channel index", line_no);
        if (index != channels.size()) {
            throw FormatError("channel index " + std::to_string(index) + " out of sequence (expected " +
                                  std::to_string(channels.size()) + ")",
                              line_no);
        }
        try {
            channels.push_back(ConstraintTemplate::parse(std::string_view(line).substr(tab + 1)));
        } catch (const Error& e) {
            throw FormatError(e.what(), line_no);
        }
    }
    if (channels.empty()) throw FormatError("profile lists no templates", line_no);
    return ConstraintProfile(std::move(channels));
}

ConstraintProfile ConstraintProfile::read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open profile '" + path.string() + "' (and it is not a built-in name)");
    return read(in);
}

void ConstraintProfile::write(std::ostream& out) const {
    for (std::size_t i = 0; i < channels_.size(); ++i) out << i << '\t' << channels_[i].to_string() << '\n';
}

std::optional<std::size_t> ConstraintProfile::channel_of(const ConstraintTemplate& t) const {
    for (std::size_t i = 0; i < channels_.size(); ++i) {
        if (channels_[i] == t) return i;
    }
    return std::nullopt;
}

std::string_view template_regex(const ConstraintTemplate& t) { return registry().get(t).regex; }

std::string_view projected_alphabet(const ConstraintTemplate& t) { return t.unary() ? "ao" : "abo"; }

const Dfa& compile_template(const ConstraintTemplate& t) { return registry().get(t).dfa; }

void project_window(std::span<const ActivityIndex> window, ActivityIndex first,
                    std::optional<ActivityIndex> second, std::vector<Symbol>& out) {
    out.resize(window.size());
    if (second) {
        for (std::size_t i = 0; i < window.size(); ++i) {
            out[i] = window[i] == first ? kSymA : window[i] == *second ? kSymB : kSymOtherBinary;
        }
    } else {
        for (std::size_t i = 0; i < window.size(); ++i) out[i] = window[i] == first ? kSymA : kSymOtherUnary;
    }
}

bool evaluate_template(const ConstraintTemplate& t, ActivityIndex first, std::optional<ActivityIndex> second,
                       std::span<const ActivityIndex> window) {
    check_arity(t, first, second);
    const Dfa& dfa = compile_template(t);
    thread_local std::vector<Symbol> projected;
    project_window(window, first, second, projected);
    return dfa.accepts(projected);
}

bool oracle_evaluate_template(const ConstraintTemplate& t, ActivityIndex first,
                              std::optional<ActivityIndex> second, std::span<const ActivityIndex> w) {
    check_arity(t, first, second);
    const ActivityIndex a = first;
    const ActivityIndex b = second.value_or(first);
    const std::size_t n = w.size();

    std::size_t count_a = 0, count_b = 0;
    for (const auto e : w) {
        count_a += e == a;
        count_b += e == b;
    }
    const bool has_a = count_a > 0, has_b = count_b > 0;

    // Box(A -> Diamond B)
    const auto response = [&] {
        for (std::size_t i = 0; i < n; ++i) {
            if (w[i] != a) continue;
            bool found = false;
            for (std::size_t j = i + 1; j < n && !found; ++j) found = w[j] == b;
            if (!found) return false;
        }
        return true;
    };
    // (!B U A) || Box(!B)
    const auto precedence = [&] {
        for (std::size_t i = 0; i < n; ++i) {
            if (w[i] == a) return true;
            if (w[i] == b) return false;
        }
        return true;
    };
    // Box(A -> X(!A U B))
    const auto alternate_response = [&] {
        for (std::size_t i = 0; i < n; ++i) {
            if (w[i] != a) continue;
            std::size_t j = i + 1;
            while (j < n && w[j] != a && w[j] != b) ++j;
            if (j == n || w[j] != b) return false;
        }
        return true;
    };
    // Every B has an A since the previous B (or since the start).
    const auto alternate_precedence = [&] {
        bool armed = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (w[i] == a) armed = true;
            if (w[i] == b) {
                if (!armed) return false;
                armed = false;
            }
        }
        return true;
    };
    // Box(A -> X B)
    const auto chain_response = [&] {
        for (std::size_t i = 0; i < n; ++i) {
            if (w[i] == a && (i + 1 == n || w[i + 1] != b)) return false;
        }
        return true;
    };
    // Every B is immediately preceded by A.
    const auto chain_precedence = [&] {
        for (std::size_t i = 0; i < n; ++i) {
            if (w[i] == b && (i == 0 || w[i - 1] != a)) return false;
        }
        return true;
    };
    // Box(A -> !Diamond B)
    const auto not_succession = [&] {
        bool seen_a = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (w[i] == b && seen_a) return false;
            if (w[i] == a) seen_a = true;
        }
        return true;
    };
    const auto not_chain_succession = [&] {
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (w[i] == a && w[i + 1] == b) return false;
        }
        return true;
    };

    switch (t.kind) {
        case TemplateKind::Existence: return count_a >= static_cast<std::size_t>(t.n);
        case TemplateKind::Absence: return count_a < static_cast<std::size_t>(t.n);
        case TemplateKind::Exactly: return count_a == static_cast<std::size_t>(t.n);
        // The empty window is outside the mined domain; the vacuous reading
        // matches the automaton.
        case TemplateKind::Init: return n == 0 || w.front() == a;
        case TemplateKind::Last: return n > 0 && w.back() == a;
        case TemplateKind::RespondedExistence: return !has_a || has_b;
        case TemplateKind::CoExistence: return has_a == has_b;
        case TemplateKind::Response: return response();
        case TemplateKind::Precedence: return precedence();
        case TemplateKind::Succession: return response() && precedence();
        case TemplateKind::AlternateResponse: return alternate_response();
        case TemplateKind::AlternatePrecedence: return alternate_precedence();
        case TemplateKind::AlternateSuccession: return alternate_response() && alternate_precedence();
        case TemplateKind::ChainResponse: return chain_response();
        case TemplateKind::ChainPrecedence: return chain_precedence();
        case TemplateKind::ChainSuccession: return chain_response() && chain_precedence();
        case TemplateKind::NotCoExistence: return !(has_a && has_b);
        case TemplateKind::NotSuccession: return not_succession();
        case TemplateKind::NotChainSuccession: return not_chain_succession();
        case TemplateKind::Choice: return has_a || has_b;
        case TemplateKind::ExclusiveChoice: return has_a != has_b;
    }
    return false;
}

}  // namespace pam
