#pragma once

#include <banlab/configuration.hpp>
#include <banlab/error.hpp>
#include <banlab/network.hpp>
#include <banlab/tgraph.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace banlab {

using Distribution = std::vector<double>;

/// Sparse row-stochastic matrix over the 2^n configurations.
struct StochasticMatrix {
    std::size_t n = 0;
    double alpha = 0.0;
    /// rows[x] holds (y, P_{x,y}) pairs with positive probability, ascending in y.
    std::vector<std::vector<std::pair<Bits, double>>> rows;

    std::size_t dimension() const { return rows.size(); }

    double at(Bits x, Bits y) const {
        const auto& row = rows.at(x);
        auto it = std::lower_bound(row.begin(), row.end(), y,
                                   [](const std::pair<Bits, double>& e, Bits v) { return e.first < v; });
        return it != row.end() && it->first == y ? it->second : 0.0;
    }

    double row_sum(Bits x) const {
        double s = 0.0;
        for (const auto& [y, p] : rows.at(x)) {
            s += p;
        }
        return s;
    }
};

/// Every automaton updates independently with probability alpha, so
/// P_{x,y} = alpha^d (1-alpha)^(|U(x)|-d) for y = flip(x, D) with D in U(x), d = |D|.
inline StochasticMatrix build_alpha_matrix(const Network& net, double alpha, const Limits& limits = {}) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw PreconditionError("alpha must lie in [0, 1]");
    }
    const std::size_t n = net.size();
    require_exhaustive(n, limits.exhaustive_cap, "build_alpha_matrix");
    StochasticMatrix m{n, alpha, {}};
    const Bits count = Bits{1} << n;
    m.rows.resize(count);
    std::vector<double> up(n + 1);
    std::vector<double> stay(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        up[k] = std::pow(alpha, static_cast<double>(k));
        stay[k] = std::pow(1.0 - alpha, static_cast<double>(k));
    }
    for (Bits x = 0; x < count; ++x) {
        const Bits u = net.image(x) ^ x;
        const std::size_t k = static_cast<std::size_t>(std::popcount(u));
        auto& row = m.rows[x];
        // subsets of u, the empty one included (x stays put)
        Bits d = u;
        while (true) {
            const std::size_t j = static_cast<std::size_t>(std::popcount(d));
            const double p = up[j] * stay[k - j];
            if (p > 0.0) {
                row.emplace_back(x ^ d, p);
            }
            if (d == 0) {
                break;
            }
            d = (d - 1) & u;
        }
        std::sort(row.begin(), row.end());
    }
    return m;
}

inline Distribution point_mass(std::size_t n, Bits x) {
    Distribution mu(std::size_t{1} << n, 0.0);
    mu.at(x) = 1.0;
    return mu;
}

inline Distribution uniform_distribution(std::size_t n) {
    const std::size_t count = std::size_t{1} << n;
    return Distribution(count, 1.0 / static_cast<double>(count));
}

/// mu P^t by repeated sparse vector-matrix products.
inline Distribution evolve(const Distribution& mu, const StochasticMatrix& p, std::size_t t) {
    if (mu.size() != p.dimension()) {
        throw PreconditionError("distribution has " + std::to_string(mu.size()) + " entries, matrix has dimension " +
                                std::to_string(p.dimension()));
    }
    Distribution current = mu;
    Distribution next(mu.size());
    for (std::size_t step = 0; step < t; ++step) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t x = 0; x < current.size(); ++x) {
            if (current[x] == 0.0) {
                continue;
            }
            for (const auto& [y, q] : p.rows[x]) {
                next[y] += current[x] * q;
            }
        }
        current.swap(next);
    }
    return current;
}

/// P(x(t+1) != x(t) | x(t) = x).
inline double change_probability(const StochasticMatrix& p, Bits x) {
    double s = 0.0;
    for (const auto& [y, q] : p.rows.at(x)) {
        if (y != x) {
            s += q;
        }
    }
    return s;
}

/// Support graph of the matrix, one unlabelled arc per positive entry.
inline TransitionGraph support_graph(const StochasticMatrix& p) {
    TransitionGraph g = detail::plain_graph(GraphKind::custom, p.n);
    for (Bits x = 0; x < p.dimension(); ++x) {
        for (const auto& [y, q] : p.rows[x]) {
            g.add_arc(x, y);
        }
    }
    return g;
}

struct AbsorptionShare {
    std::vector<Configuration> component;  // terminal SCC of the support graph
    double probability;
};

struct LongRunReport {
    std::vector<AbsorptionShare> shares;
    double transient_mass = 0.0;
    std::size_t steps = 0;
    bool converged = false;
};

/// Mass eventually captured by each terminal SCC, by iterating mu P^t until
/// the transient mass drops to `tolerance` or `max_steps` is reached.
inline LongRunReport long_run(const Distribution& mu, const StochasticMatrix& p, double tolerance = 1e-10,
                              std::size_t max_steps = 1000000) {
    const TransitionGraph g = support_graph(p);
    const SccDecomposition scc = strongly_connected_components(g);
    std::vector<bool> recurrent(p.dimension());
    for (std::size_t v = 0; v < p.dimension(); ++v) {
        recurrent[v] = scc.terminal[scc.component[v]];
    }
    auto transient_mass = [&](const Distribution& d) {
        double s = 0.0;
        for (std::size_t v = 0; v < d.size(); ++v) {
            if (!recurrent[v]) {
                s += d[v];
            }
        }
        return s;
    };

    LongRunReport report;
    Distribution current = evolve(mu, p, 0);
    while (true) {
        report.transient_mass = transient_mass(current);
        if (report.transient_mass <= tolerance) {
            report.converged = true;
            break;
        }
        if (report.steps >= max_steps) {
            break;
        }
        Distribution next = evolve(current, p, 1);
        ++report.steps;
        if (next == current) {
            report.transient_mass = transient_mass(next);
            break;  // stuck: some transient mass never leaves
        }
        current = std::move(next);
    }

    std::vector<double> mass(scc.count, 0.0);
    for (std::size_t v = 0; v < current.size(); ++v) {
        if (recurrent[v]) {
            mass[scc.component[v]] += current[v];
        }
    }
    std::vector<std::vector<Configuration>> members(scc.count);
    for (std::size_t v = 0; v < p.dimension(); ++v) {
        members[scc.component[v]].push_back(Configuration(p.n, v));
    }
    for (std::size_t c = 0; c < scc.count; ++c) {
        if (scc.terminal[c]) {
            report.shares.push_back({members[c], mass[c]});
        }
    }
    std::sort(report.shares.begin(), report.shares.end(),
              [](const AbsorptionShare& a, const AbsorptionShare& b) { return a.component < b.component; });
    return report;
}

}  // namespace banlab
