#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pam/automaton.hpp"
#include "pam/event_log.hpp"

namespace pam {

enum class TemplateKind {
    Existence,
    Absence,
    Exactly,
    Init,
    Last,
    RespondedExistence,
    CoExistence,
    Response,
    Precedence,
    Succession,
    AlternateResponse,
    AlternatePrecedence,
    AlternateSuccession,
    ChainResponse,
    ChainPrecedence,
    ChainSuccession,
    NotCoExistence,
    NotSuccession,
    NotChainSuccession,
    Choice,
    ExclusiveChoice,
};

inline constexpr std::size_t kTemplateKindCount = 21;
inline constexpr int kMaxCountParameter = 3;

const std::array<TemplateKind, kTemplateKindCount>& all_template_kinds();

constexpr bool is_counted(TemplateKind k) noexcept {
    return k == TemplateKind::Existence || k == TemplateKind::Absence || k == TemplateKind::Exactly;
}

constexpr bool is_unary(TemplateKind k) noexcept {
    return is_counted(k) || k == TemplateKind::Init || k == TemplateKind::Last;
}

constexpr int arity(TemplateKind k) noexcept { return is_unary(k) ? 1 : 2; }

std::string_view template_id(TemplateKind k);
std::optional<TemplateKind> template_kind_from_id(std::string_view id);

struct ConstraintTemplate {
    TemplateKind kind = TemplateKind::Init;
    // Occurrence bound for existence/absence/exactly, 0 otherwise.
    int n = 0;

    // Throws UnsupportedParameter.
    static ConstraintTemplate make(TemplateKind kind, int n = 0);
    // "response", "absence:1". Throws UnknownTemplate / UnsupportedParameter.
    static ConstraintTemplate parse(std::string_view text);

    bool unary() const noexcept { return is_unary(kind); }
    int arity() const noexcept { return pam::arity(kind); }
    std::string to_string() const;

    friend auto operator<=>(const ConstraintTemplate&, const ConstraintTemplate&) = default;
};

// Ordered template list; the position of each entry is its channel index.
class ConstraintProfile {
public:
    ConstraintProfile() = default;
    explicit ConstraintProfile(std::vector<ConstraintTemplate> channels);

    static const ConstraintProfile& default14();

    // Built-in name ("default14") or a profile file path.
    static ConstraintProfile resolve(std::string_view name_or_path);
    // Lines "<channel_index>\t<template_id>[:<n>]"; indices must be 0..C-1 in order.
    static ConstraintProfile read(std::istream& in);
    static ConstraintProfile read(const std::filesystem::path& path);
    void write(std::ostream& out) const;

    std::size_t size() const noexcept { return channels_.size(); }
    const ConstraintTemplate& operator[](std::size_t channel) const { return channels_[channel]; }
    const std::vector<ConstraintTemplate>& channels() const noexcept { return channels_; }
    std::optional<std::size_t> channel_of(const ConstraintTemplate& t) const;

    friend bool operator==(const ConstraintProfile&, const ConstraintProfile&) = default;

private:
    std::vector<ConstraintTemplate> channels_;
};

// Regular expression for a template over the projected alphabet: `a` is the
// first argument, `b` the second, `o` any other activity.
std::string_view template_regex(const ConstraintTemplate& t);
std::string_view projected_alphabet(const ConstraintTemplate& t);

// Compiled automaton for the template. All supported (template, n) pairs are
// compiled once on first use; the returned reference stays valid for the
// lifetime of the program.
const Dfa& compile_template(const ConstraintTemplate& t);

inline constexpr Symbol kSymA = 0;
inline constexpr Symbol kSymB = 1;
// `o` is symbol 1 in the unary alphabet and 2 in the binary one.
inline constexpr Symbol kSymOtherUnary = 1;
inline constexpr Symbol kSymOtherBinary = 2;

// Projects a window onto the template alphabet.
void project_window(std::span<const ActivityIndex> window, ActivityIndex first,
                    std::optional<ActivityIndex> second, std::vector<Symbol>& out);

// DFA evaluation. Binary templates require `second` with second != first;
// unary ones require no `second`. Throws ArityMismatch.
bool evaluate_template(const ConstraintTemplate& t, ActivityIndex first,
                       std::optional<ActivityIndex> second, std::span<const ActivityIndex> window);

// Direct finite-trace LTL semantics by scanning and counting; shares no code
// with the automaton path. Same preconditions as evaluate_template.
bool oracle_evaluate_template(const ConstraintTemplate& t, ActivityIndex first,
                              std::optional<ActivityIndex> second,
                              std::span<const ActivityIndex> window);

}  // namespace pam
