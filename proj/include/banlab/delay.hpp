#pragma once

#include <banlab/configuration.hpp>
#include <banlab/error.hpp>
#include <banlab/network.hpp>
#include <banlab/tgraph.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

namespace banlab {

/// Relative tolerance under which two times count as simultaneous.
inline constexpr double simultaneity_tolerance = 1e-12;

inline bool same_time(double a, double b) {
    return std::abs(a - b) <= simultaneity_tolerance * std::max({1.0, std::abs(a), std::abs(b)});
}

/// A network whose automata take d_up[i] to switch on and d_down[i] to switch
/// off, with optional propagation delays on interaction arcs.
class DelayedNetwork {
public:
    DelayedNetwork(Network net, std::vector<double> up, std::vector<double> down,
                   std::map<std::pair<std::size_t, std::size_t>, double> signal = {})
        : net_(std::move(net)), up_(std::move(up)), down_(std::move(down)), signal_(std::move(signal)) {
        const std::size_t n = net_.size();
        if (up_.size() != n || down_.size() != n) {
            throw PreconditionError("every automaton needs an activation and a deactivation delay");
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (!(up_[i] > 0.0) || !(down_[i] > 0.0)) {
                throw PreconditionError("delays of automaton " + std::to_string(i) + " must be positive");
            }
        }
        for (const auto& [arc, d] : signal_) {
            if (arc.first >= n || arc.second >= n) {
                throw PreconditionError("signal delay on an arc outside the network");
            }
            if (!(d > 0.0)) {
                throw PreconditionError("signal delay " + std::to_string(arc.first) + "->" +
                                        std::to_string(arc.second) + " must be positive");
            }
        }
    }

    /// Same delay on every interaction arc.
    DelayedNetwork with_uniform_signals(double d, const Limits& limits = {}) const {
        std::map<std::pair<std::size_t, std::size_t>, double> signal;
        for (const auto& arc : interaction_graph(net_, limits).arcs) {
            signal[arc] = d;
        }
        return DelayedNetwork(net_, up_, down_, std::move(signal));
    }

    const Network& network() const { return net_; }
    std::size_t size() const { return net_.size(); }
    double up(std::size_t i) const { return up_.at(i); }
    double down(std::size_t i) const { return down_.at(i); }
    const std::map<std::pair<std::size_t, std::size_t>, double>& signals() const { return signal_; }
    bool has_signals() const { return !signal_.empty(); }

    /// Time automaton i needs to leave state `from`.
    double switching_delay(std::size_t i, bool from) const { return from ? down_.at(i) : up_.at(i); }

private:
    Network net_;
    std::vector<double> up_;
    std::vector<double> down_;
    std::map<std::pair<std::size_t, std::size_t>, double> signal_;
};

struct DelayLabel {
    std::size_t automaton;
    bool rising;
    double value;

    std::string to_string() const { return std::string(rising ? "up" : "down") + std::to_string(automaton); }
};

struct DelayGraph {
    TransitionGraph graph;
    std::vector<std::optional<DelayLabel>> delays;  // per arc of `graph`; nothing on loops
};

/// Effective ATG with every non-loop arc tagged by the delay of its flip.
inline DelayGraph delay_annotated_atg(const DelayedNetwork& dnet, const Limits& limits = {}) {
    DelayGraph out{build_eff_atg(dnet.network(), limits), {}};
    for (const Arc& a : out.graph.arcs()) {
        const Configuration& x = out.graph.node(a.source).configuration;
        const Configuration& y = out.graph.node(a.target).configuration;
        if (x == y) {
            out.delays.emplace_back();
            continue;
        }
        const auto i = static_cast<std::size_t>(std::countr_zero(x.bits() ^ y.bits()));
        out.delays.push_back(DelayLabel{i, !x[i], dnet.switching_delay(i, x[i])});
    }
    return out;
}

struct RunStep {
    Configuration from;
    Configuration to;
    DelayLabel delay;
};

struct DelayRun {
    Configuration start;
    std::vector<RunStep> steps;
    bool stable = false;  // stopped at a stable configuration

    const Configuration& final_configuration() const { return steps.empty() ? start : steps.back().to; }
};

/// Repeatedly fires the fastest unstable automaton. Two unstable automata
/// with equal delays make the run undefined and raise HypothesisViolation.
inline DelayRun deterministic_run(const DelayedNetwork& dnet, const Configuration& x0, std::size_t max_steps) {
    const Network& net = dnet.network();
    detail::check_config(net, x0);
    DelayRun run{x0, {}, false};
    Configuration x = x0;
    for (std::size_t step = 0;; ++step) {
        const AutomatonSet u = unstable_set(net, x);
        if (u.empty()) {
            run.stable = true;
            break;
        }
        if (step >= max_steps) {
            break;
        }
        std::vector<std::size_t> best;
        double fastest = 0.0;
        for (std::size_t i : u.ids()) {
            const double d = dnet.switching_delay(i, x[i]);
            if (best.empty() || (d < fastest && !same_time(d, fastest))) {
                best = {i};
                fastest = d;
            } else if (same_time(d, fastest)) {
                best.push_back(i);
                fastest = std::min(fastest, d);
            }
        }
        if (best.size() > 1) {
            std::string names;
            for (std::size_t i : best) {
                names += (names.empty() ? "" : ", ") + std::to_string(i);
            }
            throw HypothesisViolation("simultaneous transitions at " + x.text() + ": automata " + names +
                                          " have equal delays",
                                      best);
        }
        const std::size_t i = best.front();
        const Configuration y = flip(x, AutomatonSet::singleton(i));
        run.steps.push_back({x, y, DelayLabel{i, !x[i], fastest}});
        x = y;
    }
    return run;
}

/// Protein states x paired with gene states g.
struct ExtendedConfiguration {
    Configuration x;
    Configuration g;

    std::string text() const { return "[" + x.text() + ";" + g.text() + "]"; }
    friend bool operator==(const ExtendedConfiguration&, const ExtendedConfiguration&) = default;
    friend auto operator<=>(const ExtendedConfiguration&, const ExtendedConfiguration&) = default;
};

/// g = f(x), the only extended configurations the gene model can produce.
inline bool is_realisable(const Network& net, const ExtendedConfiguration& e) {
    detail::check_config(net, e.x);
    detail::check_config(net, e.g);
    return net.image(e.x.bits()) == e.g.bits();
}

struct ExtendedGraph {
    std::vector<ExtendedConfiguration> nodes;  // nodes[x] = [x; f(x)]
    std::vector<Arc> arcs;
    std::vector<std::optional<DelayLabel>> delays;
};

/// The delay-annotated asynchronous graph lifted to [x; f(x)] nodes.
inline ExtendedGraph extended_graph(const DelayedNetwork& dnet, const Limits& limits = {}) {
    const Network& net = dnet.network();
    const DelayGraph base = delay_annotated_atg(dnet, limits);
    ExtendedGraph out;
    for (const Node& node : base.graph.nodes()) {
        const Configuration& x = node.configuration;
        out.nodes.push_back({x, Configuration(x.size(), net.image(x.bits()))});
    }
    out.arcs = base.graph.arcs();
    out.delays = base.delays;
    return out;
}

enum class EventKind {
    protein_change,
    command_delivery,
    gene_change,
    transition_start,
    transition_cancel,
    transition_restart,
};

inline const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::protein_change:
            return "protein_change";
        case EventKind::command_delivery:
            return "command_delivery";
        case EventKind::gene_change:
            return "gene_change";
        case EventKind::transition_start:
            return "transition_start";
        case EventKind::transition_cancel:
            return "transition_cancel";
        case EventKind::transition_restart:
            return "transition_restart";
    }
    return "?";
}

struct Event {
    double time;
    EventKind kind;
    std::size_t automaton;  // protein or gene concerned; the sender for deliveries
    std::size_t receiver;   // deliveries only
    bool value;
};

struct SimulationResult {
    std::vector<Event> trace;
    ExtendedConfiguration final_state;
    double end_time = 0.0;
    bool truncated = false;  // stopped at the horizon with events pending
};

namespace detail {

class EventSimulator {
public:
    EventSimulator(const DelayedNetwork& dnet, const ExtendedConfiguration& start)
        : dnet_(dnet), n_(dnet.size()), x_(start.x.bits()), g_(start.g.bits()),
          perceived_(n_, start.x.bits()), pending_(n_), cancelled_(n_, false) {
        const auto arcs = interaction_graph(dnet.network()).arcs;
        targets_.resize(n_);
        for (const auto& [i, j] : arcs) {
            auto it = dnet.signals().find({i, j});
            if (it == dnet.signals().end()) {
                throw PreconditionError("no signal delay on interaction arc " + std::to_string(i) + "->" +
                                        std::to_string(j));
            }
            targets_[i].emplace_back(j, it->second);
        }
    }

    SimulationResult run(double horizon) {
        for (std::size_t i = 0; i < n_; ++i) {
            settle(i, 0.0);
        }
        SimulationResult result;
        while (!queue_.empty()) {
            const Scheduled next = queue_.top();
            if (next.time > horizon) {
                result.truncated = true;
                break;
            }
            queue_.pop();
            if (next.delivery) {
                deliver(next);
            } else if (pending_[next.automaton] && pending_[next.automaton]->id == next.id) {
                complete(next);
            }
            result.end_time = next.time;
        }
        result.trace = std::move(trace_);
        result.final_state = {Configuration(n_, x_), Configuration(n_, g_)};
        return result;
    }

private:
    struct Scheduled {
        double time;
        std::size_t id;
        bool delivery;
        std::size_t automaton;
        std::size_t receiver;
        bool value;
        bool operator>(const Scheduled& o) const { return time != o.time ? time > o.time : id > o.id; }
    };
    struct Pending {
        std::size_t id;
        double time;
        bool target;
    };

    bool bit(Bits v, std::size_t i) const { return ((v >> i) & 1U) != 0; }

    void schedule(Scheduled s) {
        s.id = next_id_++;
        // Every pending scheduled time must differ from every other one.
        auto it = times_.lower_bound(s.time - 1.0);
        for (; it != times_.end() && it->first <= s.time + 1.0; ++it) {
            if (same_time(it->first, s.time)) {
                std::vector<std::size_t> who{it->second, s.automaton};
                throw HypothesisViolation("events of automata " + std::to_string(who[0]) + " and " +
                                              std::to_string(who[1]) + " coincide at t = " + std::to_string(s.time),
                                          who);
            }
        }
        times_.emplace(s.time, s.automaton);
        queue_.push(s);
        if (!s.delivery) {
            pending_[s.automaton] = Pending{s.id, s.time, s.value};
        }
    }

    void forget(double time) {
        auto range = times_.equal_range(time);
        if (range.first != range.second) {
            times_.erase(range.first);
        }
    }

    /// Starts, keeps or cancels protein i's transition so that it heads to g_i.
    void settle(std::size_t i, double t) {
        const bool want = bit(g_, i);
        if (pending_[i] && pending_[i]->target != want) {
            trace_.push_back({t, EventKind::transition_cancel, i, i, pending_[i]->target});
            forget(pending_[i]->time);
            pending_[i].reset();
            cancelled_[i] = true;
        }
        if (!pending_[i] && bit(x_, i) != want) {
            const double done = t + dnet_.switching_delay(i, bit(x_, i));
            trace_.push_back({t, cancelled_[i] ? EventKind::transition_restart : EventKind::transition_start, i, i,
                              want});
            schedule({done, 0, false, i, i, want});
        }
    }

    void complete(const Scheduled& s) {
        const std::size_t i = s.automaton;
        forget(s.time);
        pending_[i].reset();
        cancelled_[i] = false;
        x_ = s.value ? (x_ | (Bits{1} << i)) : (x_ & ~(Bits{1} << i));
        trace_.push_back({s.time, EventKind::protein_change, i, i, s.value});
        for (const auto& [j, d] : targets_[i]) {
            schedule({s.time + d, 0, true, i, j, s.value});
        }
    }

    void deliver(const Scheduled& s) {
        forget(s.time);
        const std::size_t i = s.automaton;
        const std::size_t j = s.receiver;
        Bits& view = perceived_[j];
        view = s.value ? (view | (Bits{1} << i)) : (view & ~(Bits{1} << i));
        trace_.push_back({s.time, EventKind::command_delivery, i, j, s.value});
        const bool g = dnet_.network().function(j).evaluate(view);
        if (g != bit(g_, j)) {
            g_ ^= Bits{1} << j;
            trace_.push_back({s.time, EventKind::gene_change, j, j, g});
        }
        settle(j, s.time);
    }

    const DelayedNetwork& dnet_;
    std::size_t n_;
    Bits x_;
    Bits g_;
    std::vector<Bits> perceived_;
    std::vector<std::optional<Pending>> pending_;
    std::vector<bool> cancelled_;
    std::vector<std::vector<std::pair<std::size_t, double>>> targets_;
    std::priority_queue<Scheduled, std::vector<Scheduled>, std::greater<>> queue_;
    std::multimap<double, std::size_t> times_;
    std::vector<Event> trace_;
    std::size_t next_id_ = 0;
};

}  // namespace detail

/// Discrete-event run of the gene/protein model with signal propagation
/// delays. Each gene sees its regulators through a private perceived vector
/// updated on signal delivery; a protein whose command reverses mid-change
/// stops and, if needed later, starts over with the full delay.
inline SimulationResult event_simulation(const DelayedNetwork& dnet, const ExtendedConfiguration& start,
                                         double horizon) {
    detail::check_config(dnet.network(), start.x);
    detail::check_config(dnet.network(), start.g);
    return detail::EventSimulator(dnet, start).run(horizon);
}

}  // namespace banlab
