#pragma once

#include <banlab/configuration.hpp>
#include <banlab/error.hpp>
#include <banlab/network.hpp>
#include <banlab/schedule.hpp>

#include <algorithm>
#include <compare>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace banlab {

enum class GraphKind { gtg, atg, eff_gtg, eff_atg, t_delta, t_delta_elem, observed, custom };

inline const char* to_string(GraphKind k) {
    switch (k) {
        case GraphKind::gtg:
            return "gtg";
        case GraphKind::atg:
            return "atg";
        case GraphKind::eff_gtg:
            return "eff-gtg";
        case GraphKind::eff_atg:
            return "eff-atg";
        case GraphKind::t_delta:
            return "tdelta";
        case GraphKind::t_delta_elem:
            return "tdelta-elem";
        case GraphKind::observed:
            return "observed";
        case GraphKind::custom:
            return "custom";
    }
    return "?";
}

/// A configuration, tagged with a schedule phase in phase-indexed graphs.
struct Node {
    std::size_t phase = 0;
    Configuration configuration;

    std::string text() const {
        return phase == 0 ? configuration.text() : std::to_string(phase) + ":" + configuration.text();
    }

    friend bool operator==(const Node&, const Node&) = default;
    friend auto operator<=>(const Node&, const Node&) = default;
};

struct Arc {
    std::size_t source;
    std::size_t target;
    std::optional<AutomatonSet> label;  // nothing for unlabelled arcs
};

class TransitionGraph {
public:
    TransitionGraph(GraphKind kind, std::size_t n, bool multigraph = false)
        : kind_(kind), n_(n), multigraph_(multigraph) {}

    GraphKind kind() const { return kind_; }
    std::size_t size() const { return n_; }
    bool multigraph() const { return multigraph_; }
    bool phased() const { return phased_; }

    std::size_t add_node(const Node& node) {
        if (node.configuration.size() != n_) {
            throw PreconditionError("node " + node.text() + " does not have size " + std::to_string(n_));
        }
        auto [it, inserted] = index_.emplace(key(node), nodes_.size());
        if (inserted) {
            nodes_.push_back(node);
            out_.emplace_back();
            phased_ = phased_ || node.phase != 0;
        }
        return it->second;
    }
    std::size_t add_node(const Configuration& x) { return add_node(Node{0, x}); }

    void reserve(std::size_t nodes, std::size_t arcs) {
        nodes_.reserve(nodes);
        out_.reserve(nodes);
        index_.reserve(nodes);
        arcs_.reserve(arcs);
    }

    std::size_t add_arc(std::size_t source, std::size_t target, std::optional<AutomatonSet> label = std::nullopt) {
        if (source >= nodes_.size() || target >= nodes_.size()) {
            throw PreconditionError("arc endpoint is not a node of the graph");
        }
        arcs_.push_back({source, target, label});
        out_[source].push_back(arcs_.size() - 1);
        return arcs_.size() - 1;
    }

    std::optional<std::size_t> find(const Node& node) const {
        auto it = index_.find(key(node));
        if (it == index_.end()) {
            return std::nullopt;
        }
        return it->second;
    }
    std::optional<std::size_t> find(const Configuration& x) const { return find(Node{0, x}); }

    const std::vector<Node>& nodes() const { return nodes_; }
    const Node& node(std::size_t i) const { return nodes_.at(i); }
    const std::vector<Arc>& arcs() const { return arcs_; }
    const Arc& arc(std::size_t a) const { return arcs_.at(a); }
    const std::vector<std::size_t>& out_arcs(std::size_t i) const { return out_.at(i); }

    /// Distinct successor nodes, ascending by node index.
    std::vector<std::size_t> successors(std::size_t i) const {
        std::vector<std::size_t> out;
        for (std::size_t a : out_.at(i)) {
            out.push_back(arcs_[a].target);
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    /// True if some arc x -> y carries `label` (any label when nothing is given).
    bool has_arc(const Node& x, const Node& y, std::optional<AutomatonSet> label = std::nullopt) const {
        auto s = find(x);
        auto t = find(y);
        if (!s || !t) {
            return false;
        }
        for (std::size_t a : out_[*s]) {
            if (arcs_[a].target == *t && (!label || arcs_[a].label == label)) {
                return true;
            }
        }
        return false;
    }
    bool has_arc(const Configuration& x, const Configuration& y,
                 std::optional<AutomatonSet> label = std::nullopt) const {
        return has_arc(Node{0, x}, Node{0, y}, label);
    }

    /// Arcs in a canonical order: by source node, then target node, then label.
    std::vector<Arc> sorted_arcs() const {
        std::vector<Arc> out = arcs_;
        std::sort(out.begin(), out.end(), [this](const Arc& a, const Arc& b) {
            if (a.source != b.source) {
                return nodes_[a.source] < nodes_[b.source];
            }
            if (a.target != b.target) {
                return nodes_[a.target] < nodes_[b.target];
            }
            const Bits la = a.label ? a.label->mask() : 0;
            const Bits lb = b.label ? b.label->mask() : 0;
            if (a.label.has_value() != b.label.has_value()) {
                return !a.label.has_value();
            }
            return la < lb;
        });
        return out;
    }

    /// Node indices in canonical order (phase, then integer rendering).
    std::vector<std::size_t> sorted_nodes() const {
        std::vector<std::size_t> order(nodes_.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            order[i] = i;
        }
        std::sort(order.begin(), order.end(), [this](std::size_t a, std::size_t b) { return nodes_[a] < nodes_[b]; });
        return order;
    }

private:
    struct Key {
        std::size_t phase;
        Bits bits;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const { return std::hash<Bits>{}(k.bits * 0x9e3779b97f4a7c15ULL + k.phase); }
    };
    static Key key(const Node& node) { return {node.phase, node.configuration.bits()}; }

    GraphKind kind_;
    std::size_t n_;
    bool multigraph_;
    bool phased_ = false;
    std::vector<Node> nodes_;
    std::vector<Arc> arcs_;
    std::vector<std::vector<std::size_t>> out_;
    std::unordered_map<Key, std::size_t, KeyHash> index_;
};

namespace detail {

inline TransitionGraph plain_graph(GraphKind kind, std::size_t n, bool multigraph = false,
                                   std::size_t arcs_per_node = 0) {
    TransitionGraph g(kind, n, multigraph);
    const Bits count = Bits{1} << n;
    g.reserve(count, count * arcs_per_node);
    for (Bits x = 0; x < count; ++x) {
        g.add_node(Configuration(n, x));
    }
    return g;
}

}  // namespace detail

/// All elementary transitions: one arc per non-empty W, so 2^n - 1 arcs leave every node.
inline TransitionGraph build_gtg(const Network& net, const Limits& limits = {}) {
    const std::size_t n = net.size();
    require_exhaustive(n, limits.multigraph_cap, "build_gtg");
    TransitionGraph g = detail::plain_graph(GraphKind::gtg, n, true, (Bits{1} << n) - 1);
    const Bits count = Bits{1} << n;
    for (Bits x = 0; x < count; ++x) {
        const Bits fx = net.image(x);
        for (Bits w = 1; w < count; ++w) {
            g.add_arc(x, apply_update(x, fx, w), AutomatonSet(w));
        }
    }
    return g;
}

/// Asynchronous transitions: one arc per automaton.
inline TransitionGraph build_atg(const Network& net, const Limits& limits = {}) {
    const std::size_t n = net.size();
    require_exhaustive(n, limits.exhaustive_cap, "build_atg");
    TransitionGraph g = detail::plain_graph(GraphKind::atg, n, true, n);
    const Bits count = Bits{1} << n;
    for (Bits x = 0; x < count; ++x) {
        const Bits fx = net.image(x);
        for (std::size_t i = 0; i < n; ++i) {
            const Bits w = Bits{1} << i;
            g.add_arc(x, apply_update(x, fx, w), AutomatonSet(w));
        }
    }
    return g;
}

/// Effective version of any elementary graph of `net`: parallel arcs merged,
/// non-loop arcs labelled by D(x, y), one loop per node labelled by the union
/// of its null updates.
inline TransitionGraph effective_version(const TransitionGraph& tg, const Network& net) {
    if (tg.size() != net.size()) {
        throw PreconditionError("graph and network sizes differ");
    }
    if (tg.phased()) {
        throw PreconditionError("effective_version needs a graph over plain configurations");
    }
    GraphKind kind = GraphKind::custom;
    if (tg.kind() == GraphKind::gtg || tg.kind() == GraphKind::eff_gtg) {
        kind = GraphKind::eff_gtg;
    } else if (tg.kind() == GraphKind::atg || tg.kind() == GraphKind::eff_atg) {
        kind = GraphKind::eff_atg;
    }
    TransitionGraph out(kind, tg.size());
    for (std::size_t i : tg.sorted_nodes()) {
        out.add_node(tg.node(i));
    }
    for (std::size_t i : tg.sorted_nodes()) {
        const Configuration& x = tg.node(i).configuration;
        const AutomatonSet u = unstable_set(net, x);
        std::optional<AutomatonSet> loop;
        bool loop_seen = false;
        std::set<Bits> targets;
        for (std::size_t a : tg.out_arcs(i)) {
            const Arc& arc = tg.arc(a);
            const Configuration& y = tg.node(arc.target).configuration;
            if (y == x) {
                if (arc.label && !(*arc.label & u).empty()) {
                    continue;  // not a null update
                }
                if (arc.label) {
                    loop = loop ? (*loop | *arc.label) : *arc.label;
                }
                loop_seen = true;
            } else if (differing(x, y).subset_of(u)) {
                targets.insert(y.bits());
            }
        }
        const std::size_t src = *out.find(x);
        for (Bits y : targets) {
            if (loop_seen && x.bits() < y) {
                out.add_arc(src, src, loop);
                loop_seen = false;
            }
            const Configuration cy(x.size(), y);
            out.add_arc(src, *out.find(cy), differing(x, cy));
        }
        if (loop_seen) {
            out.add_arc(src, src, loop);
        }
    }
    return out;
}

/// Effective GTG built directly: arcs to flip(x, D) for every non-empty D in
/// U(x), plus a loop labelled by the stable automata when there are any.
inline TransitionGraph build_eff_gtg(const Network& net, const Limits& limits = {}) {
    const std::size_t n = net.size();
    require_exhaustive(n, limits.exhaustive_cap, "build_eff_gtg");
    TransitionGraph g = detail::plain_graph(GraphKind::eff_gtg, n);
    const Bits count = Bits{1} << n;
    const Bits all = low_mask(n);
    std::vector<Bits> targets;
    for (Bits x = 0; x < count; ++x) {
        const Bits u = net.image(x) ^ x;
        const Bits stable = all & ~u;
        targets.clear();
        // enumerate the non-empty subsets of u
        for (Bits d = u; d != 0; d = (d - 1) & u) {
            targets.push_back(x ^ d);
        }
        if (stable != 0) {
            targets.push_back(x);
        }
        std::sort(targets.begin(), targets.end());
        for (Bits y : targets) {
            g.add_arc(x, y, AutomatonSet(y == x ? stable : (x ^ y)));
        }
    }
    return g;
}

inline TransitionGraph build_eff_atg(const Network& net, const Limits& limits = {}) {
    const std::size_t n = net.size();
    require_exhaustive(n, limits.exhaustive_cap, "build_eff_atg");
    TransitionGraph g = detail::plain_graph(GraphKind::eff_atg, n);
    const Bits count = Bits{1} << n;
    const Bits all = low_mask(n);
    std::vector<Bits> targets;
    for (Bits x = 0; x < count; ++x) {
        const Bits u = net.image(x) ^ x;
        const Bits stable = all & ~u;
        targets.clear();
        for (Bits m = u; m != 0; m &= m - 1) {
            targets.push_back(x ^ (m & (~m + 1)));
        }
        if (stable != 0) {
            targets.push_back(x);
        }
        std::sort(targets.begin(), targets.end());
        for (Bits y : targets) {
            g.add_arc(x, y, AutomatonSet(y == x ? stable : (x ^ y)));
        }
    }
    return g;
}

/// Graph of F[delta]: exactly one unlabelled arc leaves every configuration.
inline TransitionGraph build_t_delta(const Network& net, const UpdateSchedule& s, const Limits& limits = {}) {
    const std::vector<Bits> f = global_function(net, s, limits);
    TransitionGraph g = detail::plain_graph(GraphKind::t_delta, net.size(), false, 1);
    for (Bits x = 0; x < f.size(); ++x) {
        g.add_arc(x, f[x]);
    }
    return g;
}

/// Phase-indexed elementary decomposition of T_delta: nodes (d, x) with x in
/// X_d, arcs (d, x) -W_d-> (d+1 mod p, F_{W_d}(x)). Copies at different
/// phases are never merged.
inline TransitionGraph build_t_delta_elem(const Network& net, const UpdateSchedule& s, const Limits& limits = {}) {
    if (!s.periodic()) {
        throw PreconditionError("T_delta^elem needs a periodic schedule");
    }
    const std::size_t n = net.size();
    const std::size_t p = s.period();
    const ReachableSets reach = reachable_sets(net, s, p - 1, limits);
    TransitionGraph g(GraphKind::t_delta_elem, n);
    for (std::size_t d = 0; d < p; ++d) {
        for (Bits x : reach.sets[d]) {
            g.add_node(Node{d, Configuration(n, x)});
        }
    }
    for (std::size_t d = 0; d < p; ++d) {
        const AutomatonSet w = s.block(d);
        for (Bits x : reach.sets[d]) {
            const Bits y = apply_update(x, net.image(x), w.mask());
            const auto src = g.find(Node{d, Configuration(n, x)});
            const auto dst = g.find(Node{(d + 1) % p, Configuration(n, y)});
            g.add_arc(*src, *dst, w);
        }
    }
    return g;
}

struct SccDecomposition {
    std::vector<std::size_t> component;  // node -> component id
    std::size_t count = 0;
    std::vector<bool> terminal;  // component id -> no arc leaves it
};

/// Tarjan's algorithm, iterative so that deep graphs do not exhaust the stack.
inline SccDecomposition strongly_connected_components(const TransitionGraph& g) {
    constexpr std::size_t unvisited = SIZE_MAX;
    const std::size_t count = g.nodes().size();
    std::vector<std::size_t> index(count, unvisited);
    std::vector<std::size_t> low(count, 0);
    std::vector<bool> on_stack(count, false);
    std::vector<std::size_t> stack;
    std::vector<std::pair<std::size_t, std::size_t>> calls;  // (node, next out-arc position)
    SccDecomposition out;
    out.component.assign(count, 0);
    std::size_t counter = 0;

    for (std::size_t root = 0; root < count; ++root) {
        if (index[root] != unvisited) {
            continue;
        }
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        calls.emplace_back(root, 0);
        while (!calls.empty()) {
            auto& [v, pos] = calls.back();
            const auto& arcs = g.out_arcs(v);
            if (pos < arcs.size()) {
                const std::size_t w = g.arc(arcs[pos++]).target;
                if (index[w] == unvisited) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    calls.emplace_back(w, 0);
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            const std::size_t done = v;
            calls.pop_back();
            if (low[done] == index[done]) {
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    out.component[w] = out.count;
                } while (w != done);
                ++out.count;
            }
            if (!calls.empty()) {
                const std::size_t parent = calls.back().first;
                low[parent] = std::min(low[parent], low[done]);
            }
        }
    }
    out.terminal.assign(out.count, true);
    for (const Arc& a : g.arcs()) {
        if (out.component[a.source] != out.component[a.target]) {
            out.terminal[out.component[a.source]] = false;
        }
    }
    return out;
}

struct Oscillation {
    std::vector<Configuration> configurations;  // ascending
    std::size_t period = 0;
    bool nondeterministic = false;
};

/// Limit-behaviour taxonomy. For phase-indexed graphs every list refers to
/// the phase-0 slice.
struct AttractorReport {
    std::vector<Configuration> stable;
    std::vector<Oscillation> oscillations;
    std::vector<Configuration> transient;
    std::vector<Configuration> recurrent;

    /// Per node of the analysed graph: 0 transient, 1 stable, 2 oscillating.
    std::vector<std::uint8_t> node_status;
};

inline AttractorReport attractors(const TransitionGraph& g) {
    const SccDecomposition scc = strongly_connected_components(g);
    const std::size_t count = g.nodes().size();
    std::vector<std::vector<std::size_t>> members(scc.count);
    for (std::size_t v : g.sorted_nodes()) {
        members[scc.component[v]].push_back(v);
    }
    AttractorReport report;
    report.node_status.assign(count, 0);
    for (std::size_t c = 0; c < scc.count; ++c) {
        if (!scc.terminal[c]) {
            continue;
        }
        Oscillation osc;
        for (std::size_t v : members[c]) {
            if (g.node(v).phase == 0) {
                osc.configurations.push_back(g.node(v).configuration);
            }
            osc.nondeterministic = osc.nondeterministic || g.successors(v).size() > 1;
        }
        const bool stable = osc.configurations.size() == 1;
        for (std::size_t v : members[c]) {
            report.node_status[v] = stable ? 1 : 2;
        }
        if (stable) {
            report.stable.push_back(osc.configurations.front());
        } else if (!osc.configurations.empty()) {
            osc.period = osc.configurations.size();
            report.oscillations.push_back(std::move(osc));
        }
    }
    for (std::size_t v : g.sorted_nodes()) {
        if (g.node(v).phase != 0) {
            continue;
        }
        (report.node_status[v] == 0 ? report.transient : report.recurrent).push_back(g.node(v).configuration);
    }
    std::sort(report.stable.begin(), report.stable.end());
    std::sort(report.oscillations.begin(), report.oscillations.end(),
              [](const Oscillation& a, const Oscillation& b) { return a.configurations < b.configurations; });
    return report;
}

/// GraphViz rendering: nodes by phase then integer rendering, stable nodes
/// double-circled, transient nodes dashed, arcs labelled with their W.
inline std::string to_dot(const TransitionGraph& g) {
    const AttractorReport report = attractors(g);
    std::string out = "digraph \"" + std::string(to_string(g.kind())) + "\" {\n  node [shape=circle];\n";
    for (std::size_t v : g.sorted_nodes()) {
        out += "  \"" + g.node(v).text() + "\"";
        switch (report.node_status[v]) {
            case 0:
                out += " [style=dashed]";
                break;
            case 1:
                out += " [shape=doublecircle]";
                break;
            default:
                break;
        }
        out += ";\n";
    }
    for (const Arc& a : g.sorted_arcs()) {
        out += "  \"" + g.node(a.source).text() + "\" -> \"" + g.node(a.target).text() + "\"";
        if (a.label) {
            out += " [label=\"" + a.label->to_string() + "\"]";
        }
        out += ";\n";
    }
    out += "}\n";
    return out;
}

}  // namespace banlab
