#pragma once

#include <banlab/configuration.hpp>
#include <banlab/error.hpp>
#include <banlab/network.hpp>
#include <banlab/schedule.hpp>
#include <banlab/tgraph.hpp>

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace banlab {

struct ObservedTransition {
    Configuration source;
    Configuration target;
    std::optional<AutomatonSet> label;
    std::string note;

    std::string to_string() const {
        std::string out = source.text() + " -> " + target.text();
        if (label) {
            out += " W=" + label->to_string();
        }
        return out;
    }
};

/// Recorded x -> y pairs. Identical (source, target, label) triples are
/// collapsed; transitions are kept sorted by source, target, label.
class ObservedTransitionGraph {
public:
    explicit ObservedTransitionGraph(std::size_t n = 0) : n_(n) {
        if (n > max_network_size) {
            throw CapacityError("observed graphs are limited to " + std::to_string(max_network_size) + " automata");
        }
    }

    std::size_t size() const { return n_; }

    void add(const Configuration& x, const Configuration& y, std::optional<AutomatonSet> label = std::nullopt,
             std::string note = {}) {
        if (x.size() != n_ || y.size() != n_) {
            throw PreconditionError("transition " + x.text() + " -> " + y.text() + " does not have size " +
                                    std::to_string(n_));
        }
        if (label && label->bound() > n_) {
            throw PreconditionError("update set " + label->to_string() + " is out of range");
        }
        ObservedTransition t{x, y, label, std::move(note)};
        auto pos = std::lower_bound(transitions_.begin(), transitions_.end(), t, less);
        if (pos != transitions_.end() && !less(t, *pos)) {
            if (pos->note.empty()) {
                pos->note = t.note;
            }
            return;
        }
        transitions_.insert(pos, std::move(t));
    }

    const std::vector<ObservedTransition>& transitions() const { return transitions_; }
    bool empty() const { return transitions_.empty(); }

    /// Distinct targets of x.
    std::vector<Configuration> successors(const Configuration& x) const {
        std::vector<Configuration> out;
        for (const auto& t : transitions_) {
            if (t.source == x && (out.empty() || out.back() != t.target)) {
                out.push_back(t.target);
            }
        }
        return out;
    }

    bool contains(const Configuration& x, const Configuration& y) const {
        for (const auto& t : transitions_) {
            if (t.source == x && t.target == y) {
                return true;
            }
        }
        return false;
    }

    /// Observations taken from a graph over plain configurations; arc labels are kept.
    static ObservedTransitionGraph from_graph(const TransitionGraph& g, bool keep_labels = true) {
        if (g.phased()) {
            throw PreconditionError("observed graphs hold plain configurations only");
        }
        ObservedTransitionGraph out(g.size());
        for (const Arc& a : g.arcs()) {
            out.add(g.node(a.source).configuration, g.node(a.target).configuration,
                    keep_labels ? a.label : std::nullopt);
        }
        return out;
    }

private:
    static bool less(const ObservedTransition& a, const ObservedTransition& b) {
        auto key = [](const ObservedTransition& t) {
            return std::tuple(t.source.bits(), t.target.bits(), t.label.has_value(), t.label ? t.label->mask() : 0);
        };
        return key(a) < key(b);
    }

    std::size_t n_;
    std::vector<ObservedTransition> transitions_;
};

/// Modelling assumptions declared by the user before inferring or validating.
struct HypothesisMode {
    bool assume_elementary = false;
    bool assume_asynchronous = false;
    bool assume_deterministic = false;
    bool assume_complete = false;
    bool fixity = false;
    std::optional<UpdateSchedule> schedule;

    static HypothesisMode elementary() {
        HypothesisMode m;
        m.assume_elementary = true;
        return m;
    }
    static HypothesisMode asynchronous() {
        HypothesisMode m;
        m.assume_elementary = true;
        m.assume_asynchronous = true;
        return m;
    }
    static HypothesisMode deterministic() {
        HypothesisMode m;
        m.assume_deterministic = true;
        m.fixity = true;
        return m;
    }
    static HypothesisMode scheduled(UpdateSchedule s) {
        HypothesisMode m = deterministic();
        m.schedule = std::move(s);
        return m;
    }

    void check() const {
        if (schedule && !assume_deterministic) {
            throw PreconditionError("a schedule mode needs the deterministic assumption");
        }
        if (assume_asynchronous && !assume_elementary) {
            throw PreconditionError("the asynchronous assumption implies the elementary one");
        }
    }

    std::string name() const {
        if (schedule) {
            return "schedule";
        }
        if (assume_deterministic) {
            return "deterministic";
        }
        if (assume_asynchronous) {
            return "asynchronous";
        }
        if (assume_elementary) {
            return "elementary";
        }
        return "none";
    }
};

struct Conflict {
    Configuration configuration;
    std::size_t automaton;
    bool kept;      // value in the inferred network (first assignment)
    bool demanded;  // contradicting demand
    std::vector<ObservedTransition> transitions;
    std::string reason;

    std::string to_string() const {
        std::string out = "conflict at " + configuration.text() + " on automaton " + std::to_string(automaton) +
                          ": f" + std::to_string(automaton) + " = " + (kept ? "1" : "0") + " and " +
                          (demanded ? "1" : "0") + " both required";
        if (!reason.empty()) {
            out += " (" + reason + ")";
        }
        if (!transitions.empty()) {
            out += " by";
            for (const auto& t : transitions) {
                out += " [" + t.to_string() + "]";
            }
        }
        return out;
    }
};

struct InferenceReport {
    Network network;
    std::vector<Bits> images;           // F(x) by integer rendering
    std::vector<Bits> constrained;      // bit i set when f_i(x) came from an observation
    std::vector<Conflict> conflicts;
    std::optional<bool> regenerates;    // schedule mode: inferred T_delta equals the input

    bool consistent() const { return conflicts.empty() && regenerates.value_or(true); }

    /// "observed" or "defaulted" for slot (i, x).
    std::string provenance(std::size_t i, Bits x) const {
        return ((constrained.at(x) >> i) & 1U) != 0 ? "observed" : "defaulted";
    }
};

namespace detail {

/// Accumulates per-slot demands f_i(x) = v; the first demand wins, later
/// contradictions become conflicts. Unconstrained slots keep x_i.
class TableBuilder {
public:
    TableBuilder(std::size_t n, const Limits& limits) : n_(n) {
        require_exhaustive(n, limits.exhaustive_cap, "inference");
        const std::size_t count = std::size_t{1} << n;
        images_.resize(count);
        for (std::size_t x = 0; x < count; ++x) {
            images_[x] = x;
        }
        constrained_.assign(count, 0);
    }

    void demand(Bits x, std::size_t i, bool value, const ObservedTransition& why, const std::string& reason = {}) {
        const Bits bit = Bits{1} << i;
        if ((constrained_[x] & bit) == 0) {
            constrained_[x] |= bit;
            images_[x] = value ? (images_[x] | bit) : (images_[x] & ~bit);
            first_.emplace(std::pair(x, i), why);
            return;
        }
        const bool kept = (images_[x] & bit) != 0;
        if (kept != value) {
            record(x, i, kept, value, why, reason);
        }
    }

    bool is_constrained(Bits x, std::size_t i) const { return ((constrained_[x] >> i) & 1U) != 0; }
    bool value(Bits x, std::size_t i) const { return ((images_[x] >> i) & 1U) != 0; }

    void record(Bits x, std::size_t i, bool kept, bool demanded, const ObservedTransition& why,
                const std::string& reason) {
        for (Conflict& c : conflicts_) {
            if (c.configuration.bits() == x && c.automaton == i && c.demanded == demanded) {
                c.transitions.push_back(why);
                return;
            }
        }
        Conflict c{Configuration(n_, x), i, kept, demanded, {}, reason};
        if (auto it = first_.find(std::pair(x, i)); it != first_.end()) {
            c.transitions.push_back(it->second);
        }
        c.transitions.push_back(why);
        conflicts_.push_back(std::move(c));
    }

    InferenceReport finish() {
        InferenceReport r{Network::from_images(images_, n_), images_, constrained_, std::move(conflicts_), {}};
        return r;
    }

private:
    std::size_t n_;
    std::vector<Bits> images_;
    std::vector<Bits> constrained_;
    std::map<std::pair<Bits, std::size_t>, ObservedTransition> first_;
    std::vector<Conflict> conflicts_;
};

/// Shared by the elementary and asynchronous rules.
inline InferenceReport infer_from_updates(const ObservedTransitionGraph& t, const Limits& limits) {
    const std::size_t n = t.size();
    TableBuilder table(n, limits);
    std::vector<const ObservedTransition*> loops;
    for (const auto& tr : t.transitions()) {
        const Bits x = tr.source.bits();
        const Bits y = tr.target.bits();
        const Bits d = x ^ y;
        if (tr.label) {
            const Bits w = tr.label->mask();
            for (Bits m = d & ~w; m != 0; m &= m - 1) {
                const auto i = static_cast<std::size_t>(std::countr_zero(m));
                table.record(x, i, ((x >> i) & 1U) != 0, ((y >> i) & 1U) != 0, tr,
                             "automaton changed outside its update set");
            }
            for (Bits m = w; m != 0; m &= m - 1) {
                const auto i = static_cast<std::size_t>(std::countr_zero(m));
                table.demand(x, i, ((y >> i) & 1U) != 0, tr);
            }
        } else {
            for (Bits m = d; m != 0; m &= m - 1) {
                const auto i = static_cast<std::size_t>(std::countr_zero(m));
                table.demand(x, i, ((y >> i) & 1U) != 0, tr);
            }
            if (d == 0) {
                loops.push_back(&tr);
            }
        }
    }
    // An unlabelled loop is a null update, so some automaton must be stable at x.
    for (const ObservedTransition* tr : loops) {
        const Bits x = tr->source.bits();
        bool some_stable = false;
        for (std::size_t i = 0; i < n && !some_stable; ++i) {
            some_stable = table.value(x, i) == (((x >> i) & 1U) != 0);
        }
        if (!some_stable && n > 0) {
            table.record(x, 0, !(x & 1U), (x & 1U) != 0, *tr, "a loop needs a stable automaton");
        }
    }
    return table.finish();
}

}  // namespace detail

/// Every node has at most one successor y, read as F(x) = y; nodes without
/// successors are taken as fixed points.
inline InferenceReport infer_deterministic(const ObservedTransitionGraph& t, const Limits& limits = {}) {
    const std::size_t n = t.size();
    detail::TableBuilder table(n, limits);
    const auto& ts = t.transitions();
    for (std::size_t k = 0; k < ts.size(); ++k) {
        if (k > 0 && ts[k - 1].source == ts[k].source && ts[k - 1].target != ts[k].target) {
            throw PreconditionError("configuration " + ts[k].source.text() +
                                    " has more than one successor; deterministic inference needs out-degree at most 1");
        }
        const Bits x = ts[k].source.bits();
        const Bits y = ts[k].target.bits();
        for (std::size_t i = 0; i < n; ++i) {
            table.demand(x, i, ((y >> i) & 1U) != 0, ts[k]);
        }
    }
    return table.finish();
}

/// Every arc flips at most one automaton: f_i(x) = !x_i exactly when x -> flip(x, {i}) is observed.
inline InferenceReport infer_asynchronous(const ObservedTransitionGraph& t, const Limits& limits = {}) {
    for (const auto& tr : t.transitions()) {
        if (differing(tr.source, tr.target).size() > 1) {
            throw PreconditionError("transition " + tr.to_string() + " changes more than one automaton");
        }
    }
    return detail::infer_from_updates(t, limits);
}

/// f_i(x) = !x_i when some observed successor of x differs from x at i.
/// Contradictory demands are reported as conflicts.
inline InferenceReport infer_elementary(const ObservedTransitionGraph& t, const Limits& limits = {}) {
    return detail::infer_from_updates(t, limits);
}

/// Strict schedule inference: each automaton is updated at most once per
/// period, so its value in the successor is the value its function took on
/// the intermediate configuration where it was updated.
inline InferenceReport infer_with_schedule(const ObservedTransitionGraph& t, const UpdateSchedule& s,
                                           const Limits& limits = {}) {
    if (!is_strict(s)) {
        throw PreconditionError("schedule " + s.to_string() + " is not strict");
    }
    const std::size_t n = t.size();
    if (s.bound() > n) {
        throw PreconditionError("schedule mentions automata outside a network of size " + std::to_string(n));
    }
    require_exhaustive(n, limits.exhaustive_cap, "infer_with_schedule");
    const std::size_t count = std::size_t{1} << n;
    std::vector<std::optional<std::size_t>> successor(count);
    const auto& ts = t.transitions();
    for (std::size_t k = 0; k < ts.size(); ++k) {
        auto& slot = successor[ts[k].source.bits()];
        if (slot && ts[*slot].target != ts[k].target) {
            throw PreconditionError("configuration " + ts[k].source.text() + " has more than one successor");
        }
        slot = k;
    }
    for (std::size_t x = 0; x < count; ++x) {
        if (!successor[x]) {
            throw PreconditionError("configuration " + Configuration(n, x).text() +
                                    " has no successor; schedule inference needs out-degree exactly 1");
        }
    }

    detail::TableBuilder table(n, limits);
    AutomatonSet updated;
    for (AutomatonSet w : s.blocks()) {
        updated = updated | w;
    }
    for (std::size_t x = 0; x < count; ++x) {
        const ObservedTransition& tr = ts[*successor[x]];
        const Bits y = tr.target.bits();
        for (Bits m = (x ^ y) & ~updated.mask(); m != 0; m &= m - 1) {
            const auto i = static_cast<std::size_t>(std::countr_zero(m));
            table.record(x, i, ((x >> i) & 1U) != 0, ((y >> i) & 1U) != 0, tr, "automaton is never updated");
        }
        Bits z = x;
        for (AutomatonSet w : s.blocks()) {
            for (std::size_t i : w.ids()) {
                table.demand(z, i, ((y >> i) & 1U) != 0, tr);
            }
            z = (z & ~w.mask()) | (y & w.mask());
        }
    }
    InferenceReport report = table.finish();
    const std::vector<Bits> f = global_function(report.network, s, limits);
    bool same = true;
    for (std::size_t x = 0; x < count && same; ++x) {
        same = f[x] == ts[*successor[x]].target.bits();
    }
    report.regenerates = same;
    return report;
}

/// Runs the inference rule selected by `mode`.
inline InferenceReport infer(const ObservedTransitionGraph& t, const HypothesisMode& mode, const Limits& limits = {}) {
    mode.check();
    if (mode.schedule) {
        return infer_with_schedule(t, *mode.schedule, limits);
    }
    if (mode.assume_deterministic) {
        return infer_deterministic(t, limits);
    }
    if (mode.assume_asynchronous) {
        return infer_asynchronous(t, limits);
    }
    return infer_elementary(t, limits);
}

enum class FindingKind {
    unrealizable_transition,
    not_elementary,
    not_asynchronous,
    not_deterministic,
    missing_transition,
    unstable_sink,
    schedule_mismatch,
    inference_conflict,
};

inline const char* to_string(FindingKind k) {
    switch (k) {
        case FindingKind::unrealizable_transition:
            return "unrealizable-transition";
        case FindingKind::not_elementary:
            return "not-elementary";
        case FindingKind::not_asynchronous:
            return "not-asynchronous";
        case FindingKind::not_deterministic:
            return "not-deterministic";
        case FindingKind::missing_transition:
            return "missing-transition";
        case FindingKind::unstable_sink:
            return "unstable-sink";
        case FindingKind::schedule_mismatch:
            return "schedule-mismatch";
        case FindingKind::inference_conflict:
            return "inference-conflict";
    }
    return "?";
}

struct Finding {
    FindingKind kind;
    std::string message;
};

struct TransitionDiagnostic {
    ObservedTransition transition;
    bool elementary = false;  // D(x, y) lies in U(x)
    bool realizable = false;  // under the declared mode
    /// Realizing update sets are exactly core | S for S a subset of `free`
    /// (non-empty overall). Meaningful only when `elementary`.
    AutomatonSet core;
    AutomatonSet free;
};

struct ValidationReport {
    std::vector<TransitionDiagnostic> transitions;
    std::vector<Finding> findings;

    bool consistent() const { return findings.empty(); }
};

/// Checks observations against a candidate network under the declared mode.
inline ValidationReport validate_observed(const ObservedTransitionGraph& t, const Network& candidate,
                                          const HypothesisMode& mode, const Limits& limits = {}) {
    mode.check();
    if (t.size() != candidate.size()) {
        throw PreconditionError("observed graph and candidate network sizes differ");
    }
    const std::size_t n = t.size();
    ValidationReport report;
    auto find = [&](FindingKind k, std::string message) { report.findings.push_back({k, std::move(message)}); };

    std::optional<std::vector<Bits>> global;
    if (mode.schedule) {
        global = global_function(candidate, *mode.schedule, limits);
    } else if (mode.assume_deterministic) {
        global = global_function(candidate, UpdateSchedule::parallel(std::max<std::size_t>(n, 1)), limits);
    }

    for (const auto& tr : t.transitions()) {
        TransitionDiagnostic diag{tr, false, false, {}, {}};
        const AutomatonSet u = unstable_set(candidate, tr.source);
        const AutomatonSet d = differing(tr.source, tr.target);
        diag.elementary = d.subset_of(u);
        diag.core = d;
        diag.free = AutomatonSet::all(n) - u;
        if (tr.label) {
            diag.realizable = update(candidate, tr.source, *tr.label) == tr.target;
        } else if (global) {
            diag.realizable = (*global)[tr.source.bits()] == tr.target.bits();
        } else if (mode.assume_asynchronous) {
            diag.realizable = diag.elementary && (d.size() == 1 || (d.empty() && !diag.free.empty()));
        } else {
            diag.realizable = diag.elementary && !(d.empty() && diag.free.empty());
        }

        if (!diag.elementary && !global) {
            find(FindingKind::not_elementary, tr.to_string() + ": D(x,y) = " + d.to_string() +
                                                  " is not contained in U(x) = " + u.to_string());
        }
        if (mode.assume_asynchronous && d.size() > 1) {
            find(FindingKind::not_asynchronous, tr.to_string() + " changes " + std::to_string(d.size()) + " automata");
        }
        if (global && !tr.label && !diag.realizable) {
            find(mode.schedule ? FindingKind::schedule_mismatch : FindingKind::not_deterministic,
                 tr.to_string() + ": the candidate maps " + tr.source.text() + " to " +
                     Configuration(n, (*global)[tr.source.bits()]).text());
        } else if (!diag.realizable) {
            find(FindingKind::unrealizable_transition, tr.to_string() + " cannot be produced by the candidate");
        }
        report.transitions.push_back(std::move(diag));
    }

    if (mode.assume_deterministic) {
        const auto& ts = t.transitions();
        for (std::size_t k = 1; k < ts.size(); ++k) {
            if (ts[k - 1].source == ts[k].source && ts[k - 1].target != ts[k].target) {
                find(FindingKind::not_deterministic, ts[k].source.text() + " has more than one observed successor");
            }
        }
    }

    if (mode.assume_complete || mode.fixity) {
        require_exhaustive(n, limits.exhaustive_cap, "validate_observed");
        const Bits count = Bits{1} << n;
        std::vector<bool> has_out(count, false);
        for (const auto& tr : t.transitions()) {
            has_out[tr.source.bits()] = true;
        }
        if (mode.assume_complete) {
            TransitionGraph expected = global ? detail::plain_graph(GraphKind::custom, n)
                                              : (mode.assume_asynchronous ? build_eff_atg(candidate, limits)
                                                                          : build_eff_gtg(candidate, limits));
            if (global) {
                for (Bits x = 0; x < count; ++x) {
                    expected.add_arc(x, (*global)[x]);
                }
            }
            for (const Arc& a : expected.sorted_arcs()) {
                const Configuration& x = expected.node(a.source).configuration;
                const Configuration& y = expected.node(a.target).configuration;
                if (!t.contains(x, y)) {
                    find(FindingKind::missing_transition,
                         "the candidate allows " + x.text() + " -> " + y.text() + " but it was not observed");
                }
            }
        }
        if (mode.fixity) {
            for (Bits x = 0; x < count; ++x) {
                const Configuration cx(n, x);
                if (!has_out[x] && !unstable_set(candidate, cx).empty()) {
                    find(FindingKind::unstable_sink, cx.text() + " has no observed successor but U(x) = " +
                                                         unstable_set(candidate, cx).to_string());
                }
            }
        }
    }

    if (mode.assume_elementary || mode.assume_deterministic) {
        try {
            for (const Conflict& c : infer(t, mode, limits).conflicts) {
                find(FindingKind::inference_conflict, c.to_string());
            }
        } catch (const PreconditionError& e) {
            find(FindingKind::inference_conflict, e.what());
        }
    }
    return report;
}

}  // namespace banlab
