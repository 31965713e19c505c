#include "pam/automaton.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <queue>
#include <stdexcept>
#include <utility>

namespace pam {

namespace {

using Mask = std::uint8_t;

struct Node {
    enum class Kind { Empty, Symbols, Concat, Alt, Repeat };
    Kind kind = Kind::Empty;
    Mask symbols = 0;
    std::vector<std::unique_ptr<Node>> children;
    // Repeat bounds; max < 0 means unbounded.
    int min = 0;
    int max = 0;
};

using NodePtr = std::unique_ptr<Node>;

class Parser {
public:
    Parser(std::string_view pattern, std::string_view alphabet)
        : pattern_(pattern), alphabet_(alphabet) {
        if (alphabet.empty() || alphabet.size() > 8) {
            throw std::invalid_argument("regex alphabet must have 1..8 symbols");
        }
    }

    NodePtr parse() {
        auto node = alternation();
        if (pos_ != pattern_.size()) fail("unexpected character");
        return node;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw std::invalid_argument(what + " at offset " + std::to_string(pos_) + " in '" +
                                    std::string(pattern_) + "'");
    }

    bool at_end() const { return pos_ >= pattern_.size(); }
    char peek() const { return pattern_[pos_]; }

    Mask symbol_mask(char c) const {
        const auto i = alphabet_.find(c);
        if (i == std::string_view::npos) fail(std::string("symbol '") + c + "' not in alphabet");
        return static_cast<Mask>(1u << i);
    }

    Mask full_mask() const { return static_cast<Mask>((1u << alphabet_.size()) - 1); }

    NodePtr alternation() {
        auto first = concatenation();
        if (at_end() || peek() != '|') return first;
        auto alt = std::make_unique<Node>();
        alt->kind = Node::Kind::Alt;
        alt->children.push_back(std::move(first));
        while (!at_end() && peek() == '|') {
            ++pos_;
            alt->children.push_back(concatenation());
        }
        return alt;
    }

    NodePtr concatenation() {
        auto cat = std::make_unique<Node>();
        cat->kind = Node::Kind::Concat;
        while (!at_end() && peek() != '|' && peek() != ')') cat->children.push_back(repetition());
        if (cat->children.empty()) {
            cat->kind = Node::Kind::Empty;
        } else if (cat->children.size() == 1) {
            return std::move(cat->children.front());
        }
        return cat;
    }

    int number() {
        int value = 0;
        const std::size_t begin = pos_;
        while (!at_end() && peek() >= '0' && peek() <= '9') value = value * 10 + (pattern_[pos_++] - '0');
        if (pos_ == begin) fail("expected number");
        return value;
    }

    NodePtr repetition() {
        auto node = atom();
        while (!at_end()) {
            int lo = 0, hi = 0;
            const char c = peek();
            if (c == '*') {
                lo = 0, hi = -1;
                ++pos_;
            } else if (c == '+') {
                lo = 1, hi = -1;
                ++pos_;
            } else if (c == '?') {
                lo = 0, hi = 1;
                ++pos_;
            } else if (c == '{') {
                ++pos_;
                lo = hi = number();
                if (!at_end() && peek() == ',') {
                    ++pos_;
                    hi = (!at_end() && peek() == '}') ? -1 : number();
                }
                if (at_end() || peek() != '}') fail("expected '}'");
                ++pos_;
                if (hi >= 0 && hi < lo) fail("bad repetition bounds");
            } else {
                break;
            }
            auto rep = std::make_unique<Node>();
            rep->kind = Node::Kind::Repeat;
            rep->min = lo;
            rep->max = hi;
            rep->children.push_back(std::move(node));
            node = std::move(rep);
        }
        return node;
    }

    NodePtr atom() {
        if (at_end()) fail("unexpected end of pattern");
        const char c = pattern_[pos_++];
        auto node = std::make_unique<Node>();
        switch (c) {
            case '(': {
                node = alternation();
                if (at_end() || peek() != ')') fail("expected ')'");
                ++pos_;
                return node;
            }
            case '.':
                node->kind = Node::Kind::Symbols;
                node->symbols = full_mask();
                return node;
            case '[': {
                bool negated = false;
                if (!at_end() && peek() == '^') {
                    negated = true;
                    ++pos_;
                }
                Mask m = 0;
                while (!at_end() && peek() != ']') m |= symbol_mask(pattern_[pos_++]);
                if (at_end()) fail("expected ']'");
                ++pos_;
                node->kind = Node::Kind::Symbols;
                node->symbols = negated ? static_cast<Mask>(full_mask() & ~m) : m;
                return node;
            }
            case ')':
            case '*':
            case '+':
            case '?':
            case '{':
            case '|':
                --pos_;
                fail("unexpected operator");
            default:
                node->kind = Node::Kind::Symbols;
                node->symbols = symbol_mask(c);
                return node;
        }
    }

    std::string_view pattern_;
    std::string_view alphabet_;
    std::size_t pos_ = 0;
};

// Thompson construction. Each state has epsilon edges and at most one
// symbol-set edge.
struct Nfa {
    struct State {
        std::vector<int> eps;
        Mask on = 0;
        int next = -1;
    };
    std::vector<State> states;

    int add() {
        states.emplace_back();
        return static_cast<int>(states.size()) - 1;
    }

    std::pair<int, int> build(const Node& node) {
        switch (node.kind) {
            case Node::Kind::Empty: {
                const int s = add();
                return {s, s};
            }
            case Node::Kind::Symbols: {
                const int s = add(), t = add();
                states[s].on = node.symbols;
                states[s].next = t;
                return {s, t};
            }
            case Node::Kind::Concat: {
                auto [s, t] = build(*node.children.front());
                for (std::size_t i = 1; i < node.children.size(); ++i) {
                    auto [s2, t2] = build(*node.children[i]);
                    states[t].eps.push_back(s2);
                    t = t2;
                }
                return {s, t};
            }
            case Node::Kind::Alt: {
                const int s = add(), t = add();
                for (const auto& child : node.children) {
                    auto [cs, ct] = build(*child);
                    states[s].eps.push_back(cs);
                    states[ct].eps.push_back(t);
                }
                return {s, t};
            }
            case Node::Kind::Repeat: {
                const Node& body = *node.children.front();
                const int s = add();
                int t = s;
                for (int i = 0; i < node.min; ++i) {
                    auto [bs, bt] = build(body);
                    states[t].eps.push_back(bs);
                    t = bt;
                }
                if (node.max < 0) {
                    auto [bs, bt] = build(body);
                    const int loop = add();
                    states[t].eps.push_back(loop);
                    states[loop].eps.push_back(bs);
                    states[bt].eps.push_back(loop);
                    t = loop;
                } else {
                    const int end = add();
                    for (int i = node.min; i < node.max; ++i) {
                        auto [bs, bt] = build(body);
                        states[t].eps.push_back(end);
                        states[t].eps.push_back(bs);
                        t = bt;
                    }
                    states[t].eps.push_back(end);
                    t = end;
                }
                return {s, t};
            }
        }
        throw std::logic_error("unreachable");
    }

    std::vector<int> closure(std::vector<int> set) const {
        std::vector<bool> in(states.size(), false);
        for (const int s : set) in[s] = true;
        for (std::size_t i = 0; i < set.size(); ++i) {
            for (const int e : states[set[i]].eps) {
                if (!in[e]) {
                    in[e] = true;
                    set.push_back(e);
                }
            }
        }
        std::sort(set.begin(), set.end());
        return set;
    }
};

Dfa minimize(std::size_t k, const std::vector<Dfa::State>& delta, const std::vector<bool>& accepting) {
    const std::size_t n = accepting.size();

    // Moore refinement.
    std::vector<std::uint32_t> cls(n);
    for (std::size_t s = 0; s < n; ++s) cls[s] = accepting[s] ? 1 : 0;
    std::size_t class_count = 0;
    while (true) {
        std::map<std::vector<std::uint32_t>, std::uint32_t> signature;
        std::vector<std::uint32_t> next(n);
        for (std::size_t s = 0; s < n; ++s) {
            std::vector<std::uint32_t> sig{cls[s]};
            for (std::size_t a = 0; a < k; ++a) sig.push_back(cls[delta[s * k + a]]);
            next[s] = signature.try_emplace(std::move(sig), static_cast<std::uint32_t>(signature.size()))
                          .first->second;
        }
        const bool stable = signature.size() == class_count;
        class_count = signature.size();
        cls = std::move(next);
        if (stable) break;
    }

    // Renumber classes breadth-first from the start state.
    std::vector<std::int64_t> order(class_count, -1);
    std::vector<std::size_t> representative;
    std::queue<std::size_t> todo;
    order[cls[0]] = 0;
    representative.push_back(0);
    todo.push(0);
    while (!todo.empty()) {
        const std::size_t s = todo.front();
        todo.pop();
        for (std::size_t a = 0; a < k; ++a) {
            const auto t = delta[s * k + a];
            if (order[cls[t]] < 0) {
                order[cls[t]] = static_cast<std::int64_t>(representative.size());
                representative.push_back(t);
                todo.push(t);
            }
        }
    }

    const std::size_t m = representative.size();
    std::vector<Dfa::State> trans(m * k);
    std::vector<bool> acc(m);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t s = representative[i];
        acc[i] = accepting[s];
        for (std::size_t a = 0; a < k; ++a) {
            trans[i * k + a] = static_cast<Dfa::State>(order[cls[delta[s * k + a]]]);
        }
    }
    return Dfa(k, std::move(trans), std::move(acc));
}

}  // namespace

Dfa::Dfa(std::size_t alphabet_size, std::vector<State> transitions, std::vector<bool> accepting)
    : alphabet_size_(alphabet_size), transitions_(std::move(transitions)), accepting_(std::move(accepting)) {
    if (transitions_.size() != accepting_.size() * alphabet_size_) {
        throw std::invalid_argument("transition table size mismatch");
    }
    for (const State t : transitions_) {
        if (t >= accepting_.size()) throw std::invalid_argument("transition target out of range");
    }
}

bool Dfa::equivalent(const Dfa& other) const {
    if (alphabet_size_ != other.alphabet_size_) return false;
    std::vector<bool> visited(state_count() * other.state_count(), false);
    std::queue<std::pair<State, State>> todo;
    todo.emplace(0, 0);
    visited[0] = true;
    while (!todo.empty()) {
        const auto [p, q] = todo.front();
        todo.pop();
        if (accepting(p) != other.accepting(q)) return false;
        for (std::size_t a = 0; a < alphabet_size_; ++a) {
            const State p2 = step(p, static_cast<Symbol>(a));
            const State q2 = other.step(q, static_cast<Symbol>(a));
            const std::size_t key = p2 * other.state_count() + q2;
            if (!visited[key]) {
                visited[key] = true;
                todo.emplace(p2, q2);
            }
        }
    }
    return true;
}

Dfa compile_regex(std::string_view pattern, std::string_view alphabet) {
    const NodePtr ast = Parser(pattern, alphabet).parse();
    Nfa nfa;
    const auto [start, accept] = nfa.build(*ast);
    const std::size_t k = alphabet.size();

    // Subset construction; the empty set becomes the dead state.
    std::map<std::vector<int>, Dfa::State> ids;
    std::vector<std::vector<int>> sets;
    std::vector<Dfa::State> delta;
    std::vector<bool> accepting;

    const auto intern = [&](std::vector<int> set) {
        const auto [it, inserted] = ids.try_emplace(set, static_cast<Dfa::State>(sets.size()));
        if (inserted) {
            accepting.push_back(std::binary_search(set.begin(), set.end(), accept));
            sets.push_back(std::move(set));
        }
        return it->second;
    };

    intern(nfa.closure({start}));
    for (std::size_t i = 0; i < sets.size(); ++i) {
        for (std::size_t a = 0; a < k; ++a) {
            std::vector<int> moved;
            for (const int s : sets[i]) {
                const auto& st = nfa.states[s];
                if (st.next >= 0 && (st.on >> a & 1u)) moved.push_back(st.next);
            }
            const Dfa::State target = intern(nfa.closure(std::move(moved)));
            delta.push_back(target);
        }
    }
    return minimize(k, delta, accepting);
}

}  // namespace pam
