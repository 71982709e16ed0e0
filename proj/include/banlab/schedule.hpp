#pragma once

#include <banlab/configuration.hpp>
#include <banlab/error.hpp>
#include <banlab/network.hpp>

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace banlab {

/// Ordered list of non-empty update blocks W_0, ..., W_{p-1}. A periodic
/// schedule repeats the list forever; a finite one is consumed once.
class UpdateSchedule {
public:
    UpdateSchedule() = default;
    UpdateSchedule(std::vector<AutomatonSet> blocks, bool periodic = true)
        : blocks_(std::move(blocks)), periodic_(periodic) {
        if (blocks_.empty()) {
            throw PreconditionError("an update schedule needs at least one block");
        }
        for (std::size_t t = 0; t < blocks_.size(); ++t) {
            if (blocks_[t].empty()) {
                throw PreconditionError("update block W_" + std::to_string(t) + " is empty");
            }
        }
    }

    static UpdateSchedule parallel(std::size_t n) { return UpdateSchedule({AutomatonSet::all(n)}); }

    static UpdateSchedule sequential(const std::vector<std::size_t>& order) {
        std::vector<AutomatonSet> blocks;
        for (std::size_t i : order) {
            blocks.push_back(AutomatonSet::singleton(i));
        }
        return UpdateSchedule(std::move(blocks));
    }

    /// Builds the list view from the function view i -> delta(i).
    static UpdateSchedule from_function(const std::vector<std::vector<std::size_t>>& times, std::size_t period) {
        std::vector<AutomatonSet> blocks(period);
        for (std::size_t i = 0; i < times.size(); ++i) {
            for (std::size_t t : times[i]) {
                if (t >= period) {
                    throw PreconditionError("update time " + std::to_string(t) + " outside period " +
                                            std::to_string(period));
                }
                blocks[t].insert(i);
            }
        }
        return UpdateSchedule(std::move(blocks));
    }

    std::size_t period() const { return blocks_.size(); }
    bool periodic() const { return periodic_; }
    const std::vector<AutomatonSet>& blocks() const { return blocks_; }
    const AutomatonSet& block(std::size_t t) const { return blocks_.at(t); }

    /// Block applied at step t; for periodic schedules t wraps around.
    AutomatonSet block_at(std::size_t t) const { return blocks_[periodic_ ? t % blocks_.size() : t]; }

    /// One plus the largest automaton id used.
    std::size_t bound() const {
        std::size_t b = 0;
        for (AutomatonSet w : blocks_) {
            b = std::max(b, w.bound());
        }
        return b;
    }

    /// Function view: delta(i) = {t | i in W_t} for i < n.
    std::vector<std::vector<std::size_t>> as_function(std::size_t n) const {
        std::vector<std::vector<std::size_t>> times(n);
        for (std::size_t t = 0; t < blocks_.size(); ++t) {
            for (std::size_t i : blocks_[t].ids()) {
                if (i < n) {
                    times[i].push_back(t);
                }
            }
        }
        return times;
    }

    /// "{1} {0,2}", prefixed with "finite: " for non-periodic schedules.
    std::string to_string() const {
        std::string out = periodic_ ? "" : "finite: ";
        for (std::size_t t = 0; t < blocks_.size(); ++t) {
            if (t != 0) {
                out += ' ';
            }
            out += blocks_[t].to_string();
        }
        return out;
    }

    friend bool operator==(const UpdateSchedule&, const UpdateSchedule&) = default;

private:
    std::vector<AutomatonSet> blocks_;
    bool periodic_ = true;
};

/// Parses `{1} {0,2}` with an optional `periodic:` or `finite:` prefix.
/// Without a prefix the schedule is periodic.
inline UpdateSchedule parse_schedule(std::string_view text) {
    std::size_t pos = 0;
    auto skip = [&] {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])) != 0) {
            ++pos;
        }
    };
    bool periodic = true;
    skip();
    for (std::string_view prefix : {std::string_view("periodic:"), std::string_view("finite:")}) {
        if (text.substr(pos, prefix.size()) == prefix) {
            periodic = prefix == "periodic:";
            pos += prefix.size();
            break;
        }
    }
    std::vector<AutomatonSet> blocks;
    skip();
    while (pos < text.size()) {
        if (text[pos] != '{') {
            throw ParseError("expected '{'", 0, pos);
        }
        ++pos;
        AutomatonSet block;
        skip();
        if (pos < text.size() && text[pos] == '}') {
            throw ParseError("update blocks must be non-empty", 0, pos);
        }
        while (true) {
            skip();
            const std::size_t start = pos;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])) != 0) {
                ++pos;
            }
            if (pos == start) {
                throw ParseError("expected an automaton index", 0, pos);
            }
            const std::string digits(text.substr(start, pos - start));
            if (digits.size() > 2 || std::stoul(digits) >= max_network_size) {
                throw ParseError("automaton index out of range", 0, start);
            }
            block.insert(std::stoul(digits));
            skip();
            if (pos < text.size() && text[pos] == ',') {
                ++pos;
                continue;
            }
            if (pos < text.size() && text[pos] == '}') {
                ++pos;
                break;
            }
            throw ParseError("expected ',' or '}'", 0, pos);
        }
        blocks.push_back(block);
        skip();
    }
    if (blocks.empty()) {
        throw ParseError("schedule has no blocks", 0, pos);
    }
    return UpdateSchedule(std::move(blocks), periodic);
}

struct ScheduleClass {
    enum class Kind { parallel, sequential, block_sequential, strict, k_fair, general_periodic, finite };
    Kind kind;
    std::size_t k = 0;  // only for k_fair

    friend bool operator==(const ScheduleClass&, const ScheduleClass&) = default;
    friend auto operator<=>(const ScheduleClass&, const ScheduleClass&) = default;

    std::string to_string() const {
        switch (kind) {
            case Kind::parallel:
                return "parallel";
            case Kind::sequential:
                return "sequential";
            case Kind::block_sequential:
                return "block-sequential";
            case Kind::strict:
                return "strict";
            case Kind::k_fair:
                return std::to_string(k) + "-fair";
            case Kind::general_periodic:
                return "general-periodic";
            case Kind::finite:
                return "finite";
        }
        return "?";
    }
};

/// Smallest k with |delta(i)| <= k |delta(j)| for all i, j; nothing when some
/// automaton is never updated. Fairness is only defined for periodic schedules.
inline std::optional<std::size_t> minimal_fairness(const UpdateSchedule& s, std::size_t n) {
    if (!s.periodic()) {
        throw PreconditionError("fairness is only defined for periodic schedules");
    }
    const auto times = s.as_function(n);
    std::size_t lo = SIZE_MAX;
    std::size_t hi = 0;
    for (const auto& ts : times) {
        lo = std::min(lo, ts.size());
        hi = std::max(hi, ts.size());
    }
    if (n == 0 || lo == 0) {
        return std::nullopt;
    }
    return (hi + lo - 1) / lo;
}

/// Every class whose defining predicate holds, in the order of ScheduleClass::Kind.
inline std::vector<ScheduleClass> classify(const UpdateSchedule& s, std::size_t n) {
    using K = ScheduleClass::Kind;
    if (s.bound() > n) {
        throw PreconditionError("schedule mentions automata outside a network of size " + std::to_string(n));
    }
    if (!s.periodic()) {
        return {{K::finite}};
    }
    const auto times = s.as_function(n);
    bool strict = true;
    bool once = true;
    for (const auto& ts : times) {
        strict = strict && ts.size() <= 1;
        once = once && ts.size() == 1;
    }
    std::vector<ScheduleClass> out;
    if (once && s.period() == 1) {
        out.push_back({K::parallel});
    }
    if (once && s.period() == n) {
        out.push_back({K::sequential});
    }
    if (once) {
        out.push_back({K::block_sequential});
    }
    if (strict) {
        out.push_back({K::strict});
    }
    if (auto k = minimal_fairness(s, n)) {
        out.push_back({K::k_fair, *k});
    }
    if (!strict) {
        out.push_back({K::general_periodic});
    }
    return out;
}

inline bool is_strict(const UpdateSchedule& s) {
    if (!s.periodic()) {
        return false;
    }
    AutomatonSet seen;
    for (AutomatonSet w : s.blocks()) {
        if (!(seen & w).empty()) {
            return false;
        }
        seen = seen | w;
    }
    return true;
}

inline bool is_block_sequential(const UpdateSchedule& s, std::size_t n) {
    if (!is_strict(s)) {
        return false;
    }
    AutomatonSet seen;
    for (AutomatonSet w : s.blocks()) {
        seen = seen | w;
    }
    return seen == AutomatonSet::all(n);
}

/// Offset Delta with W'_t = W_{t+Delta mod p}, if any.
inline std::optional<std::size_t> rotation_offset(const UpdateSchedule& a, const UpdateSchedule& b) {
    if (!a.periodic() || !b.periodic()) {
        throw PreconditionError("rotation equivalence is defined on periodic schedules");
    }
    const std::size_t p = a.period();
    if (b.period() != p) {
        return std::nullopt;
    }
    for (std::size_t delta = 0; delta < p; ++delta) {
        bool match = true;
        for (std::size_t t = 0; t < p && match; ++t) {
            match = b.block(t) == a.block((t + delta) % p);
        }
        if (match) {
            return delta;
        }
    }
    return std::nullopt;
}

inline bool rotation_equivalent(const UpdateSchedule& a, const UpdateSchedule& b) {
    return rotation_offset(a, b).has_value();
}

/// Configuration sets as sorted vectors of integer renderings.
using ConfigurationSet = std::vector<Bits>;

struct ReachableSets {
    std::vector<ConfigurationSet> sets;  // X_0 .. X_horizon
    /// For periodic schedules: X_{t+period} = X_t for all t >= start.
    struct Tail {
        std::size_t start;
        std::size_t period;
    };
    std::optional<Tail> tail;
};

namespace detail {

inline void check_schedule(const Network& net, const UpdateSchedule& s) {
    if (s.bound() > net.size()) {
        throw PreconditionError("schedule " + s.to_string() + " mentions automata outside a network of size " +
                                std::to_string(net.size()));
    }
}

struct SetHash {
    std::size_t operator()(const std::pair<std::size_t, ConfigurationSet>& key) const {
        std::size_t h = key.first * 0x9e3779b97f4a7c15ULL;
        for (Bits x : key.second) {
            h ^= std::hash<Bits>{}(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return h;
    }
};

}  // namespace detail

/// X_0 = B^n, X_{t+1} = F_{W_t}(X_t). Returns X_0..X_horizon (fewer when a
/// finite schedule runs out) plus, for periodic schedules, the eventually
/// periodic tail. Horizon defaults to 2^n p.
inline ReachableSets reachable_sets(const Network& net, const UpdateSchedule& s,
                                    std::optional<std::size_t> horizon = std::nullopt, const Limits& limits = {}) {
    detail::check_schedule(net, s);
    require_exhaustive(net.size(), limits.exhaustive_cap, "reachable_sets");
    const std::vector<Bits> images = net.tabulate(limits);
    const std::size_t count = images.size();
    const std::size_t p = s.period();
    const std::size_t limit = horizon.value_or(count * p);

    ReachableSets out;
    ConfigurationSet current(count);
    for (std::size_t x = 0; x < count; ++x) {
        current[x] = x;
    }
    std::vector<ConfigurationSet> all{current};
    std::unordered_map<std::pair<std::size_t, ConfigurationSet>, std::size_t, detail::SetHash> seen;
    std::optional<std::pair<std::size_t, std::size_t>> state_cycle;  // (first t, period)
    if (s.periodic()) {
        seen.emplace(std::pair(std::size_t{0}, current), 0);
    }

    std::vector<std::uint8_t> mark(count);
    for (std::size_t t = 0;; ++t) {
        const bool done_horizon = t >= limit;
        if (done_horizon && (!s.periodic() || state_cycle)) {
            break;
        }
        if (!s.periodic() && t >= p) {
            break;
        }
        const Bits w = s.block_at(t).mask();
        std::fill(mark.begin(), mark.end(), 0);
        for (Bits x : current) {
            mark[apply_update(x, images[x], w)] = 1;
        }
        ConfigurationSet next;
        for (std::size_t x = 0; x < count; ++x) {
            if (mark[x] != 0) {
                next.push_back(x);
            }
        }
        current = std::move(next);
        all.push_back(current);
        if (s.periodic() && !state_cycle) {
            auto [it, inserted] = seen.emplace(std::pair((t + 1) % p, current), t + 1);
            if (!inserted) {
                state_cycle = std::pair(it->second, t + 1 - it->second);
            }
        }
    }

    if (state_cycle) {
        // The minimal set period divides the (phase, set) period; the
        // sequence is known far enough to check candidates.
        auto [start, cycle] = *state_cycle;
        while (all.size() < start + 2 * cycle + 1) {
            const Bits w = s.block_at(all.size() - 1).mask();
            std::fill(mark.begin(), mark.end(), 0);
            for (Bits x : all.back()) {
                mark[apply_update(x, images[x], w)] = 1;
            }
            ConfigurationSet next;
            for (std::size_t x = 0; x < count; ++x) {
                if (mark[x] != 0) {
                    next.push_back(x);
                }
            }
            all.push_back(std::move(next));
        }
        std::size_t q = cycle;
        for (std::size_t d = 1; d <= cycle; ++d) {
            if (cycle % d != 0) {
                continue;
            }
            bool ok = true;
            for (std::size_t t = start; t < start + cycle && ok; ++t) {
                ok = all[t] == all[t + d];
            }
            if (ok) {
                q = d;
                break;
            }
        }
        std::size_t t0 = start;
        while (t0 > 0 && all[t0 - 1] == all[t0 - 1 + q]) {
            --t0;
        }
        out.tail = ReachableSets::Tail{t0, q};
    }
    const std::size_t keep = std::min(all.size(), limit + 1);
    all.resize(keep);
    out.sets = std::move(all);
    return out;
}

/// F[delta] = F_{W_{p-1}} o ... o F_{W_0}, tabulated by integer rendering.
inline std::vector<Bits> global_function(const Network& net, const UpdateSchedule& s, const Limits& limits = {}) {
    if (!s.periodic()) {
        throw PreconditionError("global transition functions need a periodic schedule");
    }
    detail::check_schedule(net, s);
    require_exhaustive(net.size(), limits.exhaustive_cap, "global_function");
    const std::size_t count = std::size_t{1} << net.size();
    std::vector<Bits> out(count);
    for (Bits x0 = 0; x0 < count; ++x0) {
        Bits x = x0;
        for (AutomatonSet w : s.blocks()) {
            x = apply_update(x, net.image(x), w.mask());
        }
        out[x0] = x;
    }
    return out;
}

struct TrajectoryStep {
    AutomatonSet block;
    Configuration configuration;
};

struct Trajectory {
    Configuration start;
    std::vector<TrajectoryStep> steps;

    const Configuration& final_configuration() const { return steps.empty() ? start : steps.back().configuration; }
};

/// Elementary path x -W_0-> F_{W_0}(x) -W_1-> ... for `steps` steps (or until
/// a finite schedule runs out).
inline Trajectory trajectory(const Network& net, const UpdateSchedule& s, const Configuration& x0, std::size_t steps) {
    detail::check_schedule(net, s);
    detail::check_config(net, x0);
    Trajectory out{x0, {}};
    Configuration x = x0;
    for (std::size_t t = 0; t < steps; ++t) {
        if (!s.periodic() && t >= s.period()) {
            break;
        }
        const AutomatonSet w = s.block_at(t);
        x = update(net, x, w);
        out.steps.push_back({w, x});
    }
    return out;
}

using BigInt = boost::multiprecision::cpp_int;

/// Surjection counts S(n, k) for k = 0..n via S(m+1, k) = k (S(m, k) + S(m, k-1)).
inline std::vector<BigInt> surjection_counts(std::size_t n) {
    std::vector<BigInt> row{1};  // S(0, 0) = 1
    for (std::size_t m = 0; m < n; ++m) {
        std::vector<BigInt> next(m + 2, 0);
        for (std::size_t k = 1; k <= m + 1; ++k) {
            const BigInt& same = k < row.size() ? row[k] : next[0];
            next[k] = BigInt(k) * (same + row[k - 1]);
        }
        row = std::move(next);
    }
    return row;
}

/// bs_n: number of block-sequential schedules of n automata (ordered set
/// partitions, the Fubini numbers).
inline BigInt count_block_sequential(std::size_t n) {
    if (n == 0) {
        throw PreconditionError("count_block_sequential needs n >= 1");
    }
    const auto s = surjection_counts(n);
    BigInt total = 0;
    for (std::size_t k = 1; k <= n; ++k) {
        total += s[k];
    }
    return total;
}

/// Number of block-sequential schedules up to rotation: sum_k S(n, k) / k.
inline BigInt count_bs_classes(std::size_t n) {
    if (n == 0) {
        throw PreconditionError("count_bs_classes needs n >= 1");
    }
    const auto s = surjection_counts(n);
    BigInt total = 0;
    for (std::size_t k = 1; k <= n; ++k) {
        total += s[k] / k;
    }
    return total;
}

}  // namespace banlab
