#include <gtest/gtest.h>

#include <regex>
#include <string>
#include <vector>

#include "pam/automaton.hpp"
#include "pam/declare.hpp"
#include "oracles.hpp"

using namespace pam;

namespace {

std::vector<std::string> all_strings(std::string_view alphabet, std::size_t max_len) {
    std::vector<std::string> out{""};
    std::vector<std::string> frontier{""};
    for (std::size_t len = 1; len <= max_len; ++len) {
        std::vector<std::string> next;
        for (const auto& s : frontier) {
            for (const char c : alphabet) next.push_back(s + c);
        }
        out.insert(out.end(), next.begin(), next.end());
        frontier = std::move(next);
    }
    return out;
}

bool dfa_accepts(const Dfa& dfa, std::string_view alphabet, const std::string& s) {
    std::vector<Symbol> word;
    for (const char c : s) word.push_back(static_cast<Symbol>(alphabet.find(c)));
    return dfa.accepts(word);
}

// The compiled automaton agrees with std::regex full matching on every
// string up to max_len.
void expect_matches_std_regex(std::string_view pattern, std::string_view alphabet, std::size_t max_len) {
    const Dfa dfa = compile_regex(pattern, alphabet);
    const std::regex re{std::string(pattern)};
    for (const auto& s : all_strings(alphabet, max_len)) {
        ASSERT_EQ(dfa_accepts(dfa, alphabet, s), std::regex_match(s, re)) << pattern << " on '" << s << "'";
    }
}

}  // namespace

TEST(Automaton, AgreesWithStdRegex) {
    for (const auto* p : {"a", "ab", "a|b", "a*", "(ab)*", "a+b?", "[^a]*", "[ab]o", ".*a.*", "(a|bo)+o{2}",
                          "a{0}", "a{2,3}", "(a?o){1,2}b", "[^ab]*((a[^b]*)|(b[^a]*))?", "o*(a.*b)*o*"}) {
        expect_matches_std_regex(p, "abo", 6);
    }
}

TEST(Automaton, TemplateDfasAgreeWithStdRegex) {
    for (const auto& t : oracle::all_templates()) {
        const auto alphabet = projected_alphabet(t);
        const std::regex re(std::string(template_regex(t)));
        const Dfa& dfa = compile_template(t);
        EXPECT_EQ(dfa.alphabet_size(), alphabet.size());
        for (const auto& s : all_strings(alphabet, 7)) {
            ASSERT_EQ(dfa_accepts(dfa, alphabet, s), std::regex_match(s, re)) << t.to_string() << " on '" << s << "'";
        }
    }
}

TEST(Automaton, ChainSuccessionExamples) {
    const Dfa& d = compile_template(ConstraintTemplate::make(TemplateKind::ChainSuccession));
    for (const auto* s : {"o", "ab", "abab"}) EXPECT_TRUE(dfa_accepts(d, "abo", s)) << s;
    for (const auto* s : {"a", "ba"}) EXPECT_FALSE(dfa_accepts(d, "abo", s)) << s;
}

TEST(Automaton, CountedExamples) {
    const Dfa& e1 = compile_template(ConstraintTemplate::make(TemplateKind::Existence, 1));
    EXPECT_FALSE(dfa_accepts(e1, "ao", "oo"));
    for (const auto& s : all_strings("ao", 6)) EXPECT_EQ(dfa_accepts(e1, "ao", s), s.find('a') != std::string::npos);

    const Dfa& x2 = compile_template(ConstraintTemplate::make(TemplateKind::Exactly, 2));
    EXPECT_TRUE(dfa_accepts(x2, "ao", "oaoa"));
    EXPECT_FALSE(dfa_accepts(x2, "ao", "aaa"));
}

TEST(Automaton, MinimalAndCanonical) {
    EXPECT_EQ(compile_regex("(a|b)*", "ab"), compile_regex("(a*b*)*", "ab"));
    EXPECT_EQ(compile_regex(".*", "abo").state_count(), 1u);
    // Complete automaton: rejecting sink plus one accepting state.
    EXPECT_EQ(compile_regex("a", "ab").state_count(), 3u);
    EXPECT_TRUE(compile_regex("a+", "ab").equivalent(compile_regex("aa*", "ab")));
    EXPECT_FALSE(compile_regex("a+", "ab").equivalent(compile_regex("a*", "ab")));
}

TEST(Automaton, MalformedPatterns) {
    for (const auto* p : {"(a", "a)", "[ab", "*a", "a{2", "a{3,1}", "c", "a{x}"}) {
        EXPECT_THROW(compile_regex(p, "ab"), std::invalid_argument) << p;
    }
    EXPECT_THROW(compile_regex("a", "abcdefghi"), std::invalid_argument);
}
