#pragma once

#include <banlab/configuration.hpp>
#include <banlab/error.hpp>
#include <banlab/expr.hpp>

#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace banlab {

/// A Boolean automata network: one local transition function per automaton.
class Network {
public:
    Network() = default;
    explicit Network(std::vector<Expr> functions) : functions_(std::move(functions)) {
        if (functions_.size() > max_network_size) {
            throw CapacityError("networks are limited to " + std::to_string(max_network_size) + " automata");
        }
        for (std::size_t i = 0; i < functions_.size(); ++i) {
            if (functions_[i].arity() > functions_.size()) {
                throw PreconditionError("f" + std::to_string(i) + " mentions a variable outside the network");
            }
        }
    }

    /// Parses one expression per automaton.
    static Network parse(const std::vector<std::string>& texts) {
        std::vector<Expr> fs;
        fs.reserve(texts.size());
        for (const std::string& t : texts) {
            fs.push_back(parse_expression(t, texts.size()));
        }
        return Network(std::move(fs));
    }

    /// f_i(x) = x_i for every i.
    static Network identity(std::size_t n) {
        std::vector<Expr> fs;
        for (std::size_t i = 0; i < n; ++i) {
            fs.push_back(Expr::variable(i));
        }
        return Network(std::move(fs));
    }

    /// Network whose truth tables are `images[x]` = (f_0(x), ..., f_{n-1}(x)).
    static Network from_images(const std::vector<Bits>& images, std::size_t n) {
        if (images.size() != (std::size_t{1} << n)) {
            throw PreconditionError("image table size does not match network size");
        }
        std::vector<Expr> fs;
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<std::uint8_t> table(images.size());
            for (std::size_t x = 0; x < images.size(); ++x) {
                table[x] = static_cast<std::uint8_t>((images[x] >> i) & 1U);
            }
            fs.push_back(expression_from_table(table, n));
        }
        return Network(std::move(fs));
    }

    std::size_t size() const { return functions_.size(); }
    const std::vector<Expr>& functions() const { return functions_; }
    const Expr& function(std::size_t i) const { return functions_.at(i); }

    /// (f_0(x), ..., f_{n-1}(x)) packed like a configuration, i.e. F_V(x).
    Bits image(Bits x) const {
        Bits out = 0;
        for (std::size_t i = 0; i < functions_.size(); ++i) {
            if (functions_[i].evaluate(x)) {
                out |= Bits{1} << i;
            }
        }
        return out;
    }

    /// image() for every configuration, indexed by integer rendering.
    std::vector<Bits> tabulate(const Limits& limits = {}) const {
        require_exhaustive(size(), limits.exhaustive_cap, "tabulate");
        std::vector<Bits> images(std::size_t{1} << size());
        for (Bits x = 0; x < images.size(); ++x) {
            images[x] = image(x);
        }
        return images;
    }

private:
    std::vector<Expr> functions_;
};

namespace detail {

inline void check_config(const Network& net, const Configuration& x) {
    if (x.size() != net.size()) {
        throw PreconditionError("configuration " + x.text() + " has size " + std::to_string(x.size()) +
                                ", network has size " + std::to_string(net.size()));
    }
}

inline void check_set(const Network& net, AutomatonSet w) {
    if (w.bound() > net.size()) {
        throw PreconditionError("automaton set " + w.to_string() + " is out of range for network size " +
                                std::to_string(net.size()));
    }
}

}  // namespace detail

/// U(x): automata whose update would change their state.
inline AutomatonSet unstable_set(const Network& net, const Configuration& x) {
    detail::check_config(net, x);
    return AutomatonSet(net.image(x.bits()) ^ x.bits());
}

/// F_W(x): simultaneous update of the automata in W.
inline Configuration update(const Network& net, const Configuration& x, AutomatonSet w) {
    detail::check_config(net, x);
    detail::check_set(net, w);
    const Bits changed = (net.image(x.bits()) ^ x.bits()) & w.mask();
    return Configuration(x.size(), x.bits() ^ changed);
}

/// Same as update() but from a precomputed image F_V(x).
inline constexpr Bits apply_update(Bits x, Bits image, Bits w) {
    return x ^ ((x ^ image) & w);
}

/// True iff some single update step takes x to y, i.e. D(x, y) is a subset of U(x).
inline bool is_elementary_transition(const Network& net, const Configuration& x, const Configuration& y) {
    detail::check_config(net, x);
    detail::check_config(net, y);
    return differing(x, y).subset_of(unstable_set(net, x));
}

enum class TransitionClass { null, effective, partial };

inline const char* to_string(TransitionClass c) {
    switch (c) {
        case TransitionClass::null:
            return "null";
        case TransitionClass::effective:
            return "effective";
        case TransitionClass::partial:
            return "partial";
    }
    return "?";
}

/// null when W misses U(x) (including W empty), effective when W lies in U(x).
inline TransitionClass classify_transition(const Network& net, const Configuration& x, AutomatonSet w) {
    detail::check_set(net, w);
    const AutomatonSet u = unstable_set(net, x);
    if ((w & u).empty()) {
        return TransitionClass::null;
    }
    if (w.subset_of(u)) {
        return TransitionClass::effective;
    }
    return TransitionClass::partial;
}

/// Arc (j, i): automaton j influences automaton i.
using InteractionArc = std::pair<std::size_t, std::size_t>;

struct InteractionGraph {
    std::size_t n = 0;
    std::set<InteractionArc> arcs;

    bool has_arc(std::size_t from, std::size_t to) const { return arcs.count({from, to}) != 0; }
    std::vector<std::size_t> targets_of(std::size_t from) const {
        std::vector<std::size_t> out;
        for (const auto& [j, i] : arcs) {
            if (j == from) {
                out.push_back(i);
            }
        }
        return out;
    }
};

/// A(x) = {(j, i) | f_i(x) != f_i(flip(x, {j}))}.
inline std::set<InteractionArc> local_interaction_graph(const Network& net, const Configuration& x) {
    detail::check_config(net, x);
    std::set<InteractionArc> arcs;
    const Bits fx = net.image(x.bits());
    for (std::size_t j = 0; j < net.size(); ++j) {
        const Bits diff = fx ^ net.image(x.bits() ^ (Bits{1} << j));
        for (Bits m = diff; m != 0; m &= m - 1) {
            arcs.insert({j, static_cast<std::size_t>(std::countr_zero(m))});
        }
    }
    return arcs;
}

/// Global interaction graph, decided semantically by exhaustion.
inline InteractionGraph interaction_graph(const Network& net, const Limits& limits = {}) {
    require_exhaustive(net.size(), limits.exhaustive_cap, "interaction_graph");
    const std::vector<Bits> images = net.tabulate(limits);
    const std::size_t n = net.size();
    // dep[j] collects the automata i whose f_i reacts to x_j somewhere.
    std::vector<Bits> dep(n, 0);
    const Bits all = low_mask(n);
    for (std::size_t j = 0; j < n; ++j) {
        const Bits bit = Bits{1} << j;
        for (Bits x = 0; x < images.size() && dep[j] != all; ++x) {
            if ((x & bit) == 0) {
                dep[j] |= images[x] ^ images[x | bit];
            }
        }
    }
    InteractionGraph g{n, {}};
    for (std::size_t j = 0; j < n; ++j) {
        for (Bits m = dep[j]; m != 0; m &= m - 1) {
            g.arcs.insert({j, static_cast<std::size_t>(std::countr_zero(m))});
        }
    }
    return g;
}

}  // namespace banlab
