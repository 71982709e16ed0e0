#pragma once

#include <banlab/configuration.hpp>
#include <banlab/error.hpp>

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace banlab {

/// Immutable Boolean expression tree over automaton states x0, x1, ...
///
/// Nodes are shared, so copies are cheap and safe to hand across threads.
class Expr {
public:
    enum class Kind { constant, variable, negation, conjunction, disjunction };

    Expr() : Expr(constant(false)) {}

    static Expr constant(bool value) { return Expr(std::make_shared<const Node>(Node{Kind::constant, value, 0, {}})); }
    static Expr variable(std::size_t index) {
        if (index >= max_network_size) {
            throw PreconditionError("variable index " + std::to_string(index) + " is out of range");
        }
        return Expr(std::make_shared<const Node>(Node{Kind::variable, false, index, {}}));
    }
    static Expr negation(Expr child) {
        return Expr(std::make_shared<const Node>(Node{Kind::negation, false, 0, {std::move(child)}}));
    }
    static Expr conjunction(std::vector<Expr> children) { return nary(Kind::conjunction, std::move(children)); }
    static Expr disjunction(std::vector<Expr> children) { return nary(Kind::disjunction, std::move(children)); }

    Kind kind() const { return node_->kind; }
    bool value() const { return node_->value; }
    std::size_t index() const { return node_->index; }
    const std::vector<Expr>& children() const { return node_->children; }

    /// One plus the largest variable index mentioned; 0 for variable-free expressions.
    std::size_t arity() const {
        switch (kind()) {
            case Kind::constant:
                return 0;
            case Kind::variable:
                return index() + 1;
            default: {
                std::size_t a = 0;
                for (const Expr& c : children()) {
                    a = std::max(a, c.arity());
                }
                return a;
            }
        }
    }

    bool evaluate(Bits x) const {
        switch (kind()) {
            case Kind::constant:
                return value();
            case Kind::variable:
                return ((x >> index()) & 1U) != 0;
            case Kind::negation:
                return !children().front().evaluate(x);
            case Kind::conjunction:
                for (const Expr& c : children()) {
                    if (!c.evaluate(x)) {
                        return false;
                    }
                }
                return true;
            case Kind::disjunction:
                for (const Expr& c : children()) {
                    if (c.evaluate(x)) {
                        return true;
                    }
                }
                return false;
        }
        return false;
    }

    /// Canonical text in the input grammar, with the minimum of parentheses.
    std::string to_string() const {
        switch (kind()) {
            case Kind::constant:
                return value() ? "1" : "0";
            case Kind::variable:
                return "x" + std::to_string(index());
            case Kind::negation: {
                const Expr& c = children().front();
                if (c.kind() == Kind::conjunction || c.kind() == Kind::disjunction) {
                    return "!(" + c.to_string() + ")";
                }
                return "!" + c.to_string();
            }
            case Kind::conjunction:
            case Kind::disjunction: {
                const bool is_and = kind() == Kind::conjunction;
                std::string out;
                for (std::size_t k = 0; k < children().size(); ++k) {
                    if (k != 0) {
                        out += is_and ? " & " : " | ";
                    }
                    const Expr& c = children()[k];
                    if (is_and && c.kind() == Kind::disjunction) {
                        out += "(" + c.to_string() + ")";
                    } else {
                        out += c.to_string();
                    }
                }
                return out;
            }
        }
        return {};
    }

private:
    struct Node {
        Kind kind;
        bool value;
        std::size_t index;
        std::vector<Expr> children;
    };

    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

    static Expr nary(Kind kind, std::vector<Expr> children) {
        if (children.empty()) {
            return constant(kind == Kind::conjunction);
        }
        if (children.size() == 1) {
            return std::move(children.front());
        }
        return Expr(std::make_shared<const Node>(Node{kind, false, 0, std::move(children)}));
    }

    std::shared_ptr<const Node> node_;
};

inline bool evaluate(const Expr& e, const Configuration& x) {
    return e.evaluate(x.bits());
}

namespace detail {

// expr   := term ('|' term)*
// term   := factor ('&' factor)*
// factor := '!' factor | '(' expr ')' | '0' | '1' | 'x' digits
class ExprParser {
public:
    ExprParser(std::string_view text, std::size_t n) : text_(text), n_(n) {}

    Expr parse() {
        Expr e = parse_or();
        skip_space();
        if (pos_ != text_.size()) {
            fail(std::string("unexpected '") + text_[pos_] + "'");
        }
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, 0, pos_); }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])) != 0) {
            ++pos_;
        }
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Expr parse_or() {
        std::vector<Expr> terms{parse_and()};
        while (accept('|')) {
            terms.push_back(parse_and());
        }
        return Expr::disjunction(std::move(terms));
    }

    Expr parse_and() {
        std::vector<Expr> factors{parse_factor()};
        while (accept('&')) {
            factors.push_back(parse_factor());
        }
        return Expr::conjunction(std::move(factors));
    }

    Expr parse_factor() {
        skip_space();
        if (pos_ >= text_.size()) {
            fail("unexpected end of expression");
        }
        const char c = text_[pos_];
        if (c == '!') {
            ++pos_;
            return Expr::negation(parse_factor());
        }
        if (c == '(') {
            ++pos_;
            Expr inner = parse_or();
            if (!accept(')')) {
                fail("expected ')'");
            }
            return inner;
        }
        if (c == '0' || c == '1') {
            ++pos_;
            return Expr::constant(c == '1');
        }
        if (c == 'x') {
            const std::size_t start = pos_;
            ++pos_;
            std::size_t digits_begin = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])) != 0) {
                ++pos_;
            }
            if (pos_ == digits_begin) {
                pos_ = start;
                fail("expected digits after 'x'");
            }
            const std::string_view digits = text_.substr(digits_begin, pos_ - digits_begin);
            if (digits.size() > 4) {
                pos_ = start;
                fail("variable index out of range");
            }
            const std::size_t index = std::stoul(std::string(digits));
            if (index >= n_) {
                pos_ = start;
                fail("variable index " + std::to_string(index) + " out of range for network size " +
                     std::to_string(n_));
            }
            return Expr::variable(index);
        }
        fail(std::string("unexpected '") + c + "'");
    }

    std::string_view text_;
    std::size_t n_;
    std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses the grammar `0 1 x<digits> ! & | ( )`. Precedence is ! > & > |.
inline Expr parse_expression(std::string_view text, std::size_t n) {
    return detail::ExprParser(text, n).parse();
}

/// Truth table of e over {0,1}^n, indexed by integer rendering.
inline std::vector<std::uint8_t> truth_table(const Expr& e, std::size_t n, const Limits& limits = {}) {
    require_exhaustive(n, limits.exhaustive_cap, "truth_table");
    std::vector<std::uint8_t> table(std::size_t{1} << n);
    for (Bits x = 0; x < table.size(); ++x) {
        table[x] = e.evaluate(x) ? 1 : 0;
    }
    return table;
}

/// Semantic dependency of e on x_j: returns a witness x (with x_j = 0) such
/// that e(x) != e(flip(x, {j})), or nothing when e ignores x_j.
inline std::optional<Configuration> depends_on(const Expr& e, std::size_t j, std::size_t n,
                                               const Limits& limits = {}) {
    if (j >= n) {
        throw PreconditionError("depends_on: automaton " + std::to_string(j) + " out of range");
    }
    require_exhaustive(n, limits.exhaustive_cap, "depends_on");
    const Bits bit = Bits{1} << j;
    const Bits count = Bits{1} << n;
    for (Bits x = 0; x < count; ++x) {
        if ((x & bit) != 0) {
            continue;
        }
        if (e.evaluate(x) != e.evaluate(x | bit)) {
            return Configuration(n, x);
        }
    }
    return std::nullopt;
}

namespace detail {

struct Implicant {
    Bits value;  // literal polarities on the cared positions
    Bits care;   // positions that appear as literals

    friend bool operator<(const Implicant& a, const Implicant& b) {
        return std::pair(a.care, a.value) < std::pair(b.care, b.value);
    }
    bool covers(Bits x) const { return (x & care) == value; }
};

inline std::vector<Implicant> prime_implicants(const std::vector<Bits>& minterms, std::size_t n) {
    std::set<Implicant> current;
    for (Bits m : minterms) {
        current.insert({m, low_mask(n)});
    }
    std::vector<Implicant> primes;
    while (!current.empty()) {
        std::set<Implicant> next;
        std::set<Implicant> merged;
        // Group by care mask; two implicants merge when they differ in one cared bit.
        std::map<Bits, std::vector<Implicant>> by_care;
        for (const Implicant& imp : current) {
            by_care[imp.care].push_back(imp);
        }
        for (auto& [care, group] : by_care) {
            std::set<Bits> values;
            for (const Implicant& imp : group) {
                values.insert(imp.value);
            }
            for (const Implicant& imp : group) {
                for (Bits m = care; m != 0; m &= m - 1) {
                    const Bits bit = m & (~m + 1);
                    if ((imp.value & bit) != 0) {
                        continue;
                    }
                    if (values.count(imp.value | bit) != 0) {
                        next.insert({imp.value, care & ~bit});
                        merged.insert(imp);
                        merged.insert({imp.value | bit, care});
                    }
                }
            }
        }
        for (const Implicant& imp : current) {
            if (merged.count(imp) == 0) {
                primes.push_back(imp);
            }
        }
        current = std::move(next);
    }
    return primes;
}

inline Expr implicant_expr(const Implicant& imp) {
    std::vector<Expr> literals;
    for (Bits m = imp.care; m != 0; m &= m - 1) {
        const auto i = static_cast<std::size_t>(std::countr_zero(m));
        Expr v = Expr::variable(i);
        literals.push_back(((imp.value >> i) & 1U) != 0 ? v : Expr::negation(v));
    }
    return Expr::conjunction(std::move(literals));
}

}  // namespace detail

/// Builds a sum-of-products expression with exactly the given truth table.
/// Prime implicants are computed exactly; the cover takes essential primes
/// first, then greedily, so the result is small but not always minimum.
inline Expr expression_from_table(const std::vector<std::uint8_t>& table, std::size_t n) {
    if (table.size() != (std::size_t{1} << n)) {
        throw PreconditionError("truth table size does not match network size");
    }
    std::vector<Bits> minterms;
    for (Bits x = 0; x < table.size(); ++x) {
        if (table[x] != 0) {
            minterms.push_back(x);
        }
    }
    if (minterms.empty()) {
        return Expr::constant(false);
    }
    if (minterms.size() == table.size()) {
        return Expr::constant(true);
    }
    std::vector<detail::Implicant> primes = detail::prime_implicants(minterms, n);

    std::set<Bits> uncovered(minterms.begin(), minterms.end());
    std::vector<detail::Implicant> chosen;
    auto take = [&](const detail::Implicant& imp) {
        chosen.push_back(imp);
        for (auto it = uncovered.begin(); it != uncovered.end();) {
            it = imp.covers(*it) ? uncovered.erase(it) : std::next(it);
        }
    };
    for (Bits m : minterms) {
        if (uncovered.count(m) == 0) {
            continue;
        }
        const detail::Implicant* only = nullptr;
        std::size_t hits = 0;
        for (const auto& p : primes) {
            if (p.covers(m)) {
                only = &p;
                ++hits;
            }
        }
        if (hits == 1) {
            take(*only);
        }
    }
    while (!uncovered.empty()) {
        const detail::Implicant* best = nullptr;
        std::size_t best_hits = 0;
        for (const auto& p : primes) {
            std::size_t hits = 0;
            for (Bits m : uncovered) {
                hits += p.covers(m) ? 1 : 0;
            }
            if (hits > best_hits || (hits == best_hits && hits > 0 && std::popcount(p.care) < std::popcount(best->care))) {
                best = &p;
                best_hits = hits;
            }
        }
        take(*best);
    }

    // Fewer literals first, then by lowest variable, positive before negated.
    std::sort(chosen.begin(), chosen.end(), [](const detail::Implicant& a, const detail::Implicant& b) {
        const int la = std::popcount(a.care);
        const int lb = std::popcount(b.care);
        if (la != lb) {
            return la < lb;
        }
        for (Bits m = a.care | b.care; m != 0; m &= m - 1) {
            const Bits bit = m & (~m + 1);
            const bool in_a = (a.care & bit) != 0;
            const bool in_b = (b.care & bit) != 0;
            if (in_a != in_b) {
                return in_a;
            }
            const bool pos_a = (a.value & bit) != 0;
            const bool pos_b = (b.value & bit) != 0;
            if (pos_a != pos_b) {
                return pos_a;
            }
        }
        return false;
    });
    std::vector<Expr> terms;
    for (const auto& imp : chosen) {
        terms.push_back(detail::implicant_expr(imp));
    }
    return Expr::disjunction(std::move(terms));
}

}  // namespace banlab
