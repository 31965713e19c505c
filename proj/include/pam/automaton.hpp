#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pam {

using Symbol = std::uint8_t;

// Complete, minimal DFA over a small alphabet of at most 8 symbols. State 0
// is the start state; states are numbered in breadth-first order, so two
// automata for the same language compare equal.
class Dfa {
public:
    using State = std::uint32_t;

    Dfa(std::size_t alphabet_size, std::vector<State> transitions, std::vector<bool> accepting);

    std::size_t alphabet_size() const noexcept { return alphabet_size_; }
    std::size_t state_count() const noexcept { return accepting_.size(); }
    static constexpr State start() noexcept { return 0; }

    State step(State s, Symbol a) const noexcept { return transitions_[s * alphabet_size_ + a]; }
    bool accepting(State s) const noexcept { return accepting_[s]; }

    bool accepts(std::span<const Symbol> word) const noexcept {
        State s = start();
        for (const Symbol a : word) s = step(s, a);
        return accepting_[s];
    }

    // Language equivalence via product search.
    bool equivalent(const Dfa& other) const;

    friend bool operator==(const Dfa&, const Dfa&) = default;

private:
    std::size_t alphabet_size_;
    std::vector<State> transitions_;
    std::vector<bool> accepting_;
};

// Compiles a regular expression over the characters of `alphabet` into a
// minimal DFA using full-match semantics.
//
// Supported syntax: literals (characters of `alphabet`), `.`, classes `[ab]`
// and negated classes `[^ab]` (complemented within `alphabet`), grouping,
// `|`, and the postfix operators `*`, `+`, `?`, `{n}`, `{n,m}`. Throws
// std::invalid_argument on malformed patterns.
Dfa compile_regex(std::string_view pattern, std::string_view alphabet);

}  // namespace pam
