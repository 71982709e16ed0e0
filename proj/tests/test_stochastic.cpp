#include <catch_amalgamated.hpp>

#include "oracles.hpp"

#include <cmath>

using namespace banlab;
using Catch::Approx;

namespace {

// Dense matrix summing over all 2^n update sets: each automaton is picked with
// probability alpha, whatever its stability.
std::vector<std::vector<double>> dense_oracle(const Network& net, double alpha) {
    const std::size_t n = net.size();
    const Bits count = Bits{1} << n;
    std::vector<std::vector<double>> p(count, std::vector<double>(count, 0.0));
    for (Bits x = 0; x < count; ++x) {
        for (Bits w = 0; w < count; ++w) {
            const int k = std::popcount(w);
            p[x][oracle::update(net, x, w)] +=
                std::pow(alpha, k) * std::pow(1.0 - alpha, static_cast<int>(n) - k);
        }
    }
    return p;
}

}  // namespace

TEST_CASE("alpha matrices are row stochastic", "[stochastic][property]") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng() % 6;
        const Network net = oracle::random_network(n, rng);
        for (int a = 0; a <= 10; ++a) {
            const StochasticMatrix p = build_alpha_matrix(net, a / 10.0);
            for (Bits x = 0; x < p.dimension(); ++x) {
                CHECK(std::abs(p.row_sum(x) - 1.0) <= 1e-12);
            }
        }
    }
}

TEST_CASE("alpha matrices agree with a dense sum over update sets", "[stochastic][property]") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 1 + rng() % 4;
        const Network net = oracle::random_network(n, rng);
        const double alpha = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        const StochasticMatrix p = build_alpha_matrix(net, alpha);
        const auto dense = dense_oracle(net, alpha);
        for (Bits x = 0; x < p.dimension(); ++x) {
            for (Bits y = 0; y < p.dimension(); ++y) {
                CHECK(p.at(x, y) == Approx(dense[x][y]).margin(1e-12));
            }
        }
    }
}

TEST_CASE("entries for the three-automaton network", "[stochastic]") {
    const Network net = oracle::three_automata();
    for (double alpha : {0.0, 0.2, 0.5, 0.9, 1.0}) {
        const StochasticMatrix p = build_alpha_matrix(net, alpha);
        CHECK(p.at(Configuration{0, 0, 0}.bits(), Configuration{1, 0, 1}.bits()) ==
              Approx(alpha * alpha).margin(1e-15));
        CHECK(p.at(Configuration{1, 0, 1}.bits(), Configuration{1, 0, 1}.bits()) == 1.0);
        CHECK(p.at(Configuration{0, 0, 0}.bits(), Configuration{0, 0, 0}.bits()) ==
              Approx((1 - alpha) * (1 - alpha)).margin(1e-15));
        // not an elementary successor
        CHECK(p.at(Configuration{0, 0, 0}.bits(), Configuration{1, 1, 0}.bits()) == 0.0);
    }
    const StochasticMatrix half = build_alpha_matrix(net, 0.5);
    CHECK(change_probability(half, Configuration{0, 0, 0}.bits()) == Approx(0.75).margin(1e-15));
    CHECK(change_probability(half, Configuration{1, 1, 0}.bits()) == 0.0);
    CHECK(change_probability(build_alpha_matrix(net, 1.0), Configuration{1, 0, 0}.bits()) == 1.0);
    CHECK_THROWS_AS(build_alpha_matrix(net, 1.5), PreconditionError);
}

TEST_CASE("extreme rates give the identity and the parallel map", "[stochastic][property]") {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + rng() % 5;
        const Network net = oracle::random_network(n, rng);
        const auto imgs = oracle::images(net);
        const StochasticMatrix zero = build_alpha_matrix(net, 0.0);
        const StochasticMatrix one = build_alpha_matrix(net, 1.0);
        for (Bits x = 0; x < zero.dimension(); ++x) {
            CHECK(zero.at(x, x) == 1.0);
            CHECK(one.at(x, imgs[x]) == 1.0);
            CHECK(one.rows[x].size() == 1);
        }
        Distribution mu(zero.dimension());
        for (auto& v : mu) {
            v = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        }
        CHECK(evolve(mu, zero, 7) == mu);
    }
    const StochasticMatrix one = build_alpha_matrix(oracle::three_automata(), 1.0);
    CHECK(evolve(point_mass(3, 0), one, 1) == point_mass(3, Configuration{1, 0, 1}.bits()));
}

TEST_CASE("evolution is a semigroup and preserves mass", "[stochastic][property]") {
    std::mt19937_64 rng(44);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 1 + rng() % 4;
        const Network net = oracle::random_network(n, rng);
        const StochasticMatrix p = build_alpha_matrix(net, 0.3);
        const Distribution mu = uniform_distribution(n);
        const std::size_t s = rng() % 5;
        const std::size_t t = rng() % 5;
        const Distribution a = evolve(mu, p, s + t);
        const Distribution b = evolve(evolve(mu, p, s), p, t);
        double total = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i] == Approx(b[i]).margin(1e-12));
            CHECK(a[i] >= 0.0);
            total += a[i];
        }
        CHECK(total == Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("long-run absorption matches a linear solve", "[stochastic]") {
    const Network net = oracle::three_automata();
    const StochasticMatrix p = build_alpha_matrix(net, 0.5);
    const LongRunReport r = long_run(uniform_distribution(3), p);
    CHECK(r.converged);
    CHECK(r.transient_mass <= 1e-10);
    REQUIRE(r.shares.size() == 2);

    const std::vector<std::size_t> absorbing{Configuration{1, 0, 1}.bits(), Configuration{1, 1, 0}.bits()};
    std::vector<std::size_t> transient;
    for (std::size_t x = 0; x < 8; ++x) {
        if (std::find(absorbing.begin(), absorbing.end(), x) == absorbing.end()) {
            transient.push_back(x);
        }
    }
    const auto b = oracle::absorption(dense_oracle(net, 0.5), transient, absorbing);
    for (std::size_t c = 0; c < absorbing.size(); ++c) {
        double expected = 1.0 / 8.0;  // the absorbing state's own uniform mass
        for (std::size_t r2 = 0; r2 < transient.size(); ++r2) {
            expected += b[r2][c] / 8.0;
        }
        const auto it = std::find_if(r.shares.begin(), r.shares.end(), [&](const AbsorptionShare& s) {
            return s.component.size() == 1 && s.component[0].bits() == absorbing[c];
        });
        REQUIRE(it != r.shares.end());
        CHECK(it->probability == Approx(expected).margin(1e-8));
    }
}

TEST_CASE("long-run shares agree with the linear solve on random networks", "[stochastic][property]") {
    std::mt19937_64 rng(45);
    int checked = 0;
    for (int trial = 0; trial < 200 && checked < 40; ++trial) {
        const std::size_t n = 1 + rng() % 4;
        const Network net = oracle::random_network(n, rng);
        const double alpha = 0.2 + 0.6 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        const auto dense = dense_oracle(net, alpha);
        std::vector<std::set<Bits>> succ(dense.size());
        for (Bits x = 0; x < dense.size(); ++x) {
            for (Bits y = 0; y < dense.size(); ++y) {
                if (dense[x][y] > 0.0) {
                    succ[x].insert(y);
                }
            }
        }
        const auto cls = oracle::classify_by_closure(succ);
        if (!cls.oscillations.empty() || cls.stable.empty()) {
            continue;  // the oracle only handles absorbing chains
        }
        ++checked;
        const std::vector<std::size_t> absorbing(cls.stable.begin(), cls.stable.end());
        const std::vector<std::size_t> transient(cls.transient.begin(), cls.transient.end());
        const Bits start = rng() % dense.size();
        const LongRunReport r = long_run(point_mass(n, start), build_alpha_matrix(net, alpha));
        CHECK(r.converged);
        std::vector<double> expected(absorbing.size(), 0.0);
        const auto pos = std::find(transient.begin(), transient.end(), start);
        if (pos == transient.end()) {
            expected[std::find(absorbing.begin(), absorbing.end(), start) - absorbing.begin()] = 1.0;
        } else if (!transient.empty()) {
            const auto b = oracle::absorption(dense, transient, absorbing);
            expected = b[pos - transient.begin()];
        }
        REQUIRE(r.shares.size() == absorbing.size());
        for (std::size_t c = 0; c < absorbing.size(); ++c) {
            CHECK(r.shares[c].component.front().bits() == absorbing[c]);
            CHECK(r.shares[c].probability == Approx(expected[c]).margin(1e-8));
        }
    }
    CHECK(checked >= 20);
}

TEST_CASE("long run on chains made only of terminal components", "[stochastic]") {
    // with alpha = 0 every configuration is its own terminal component
    const StochasticMatrix p = build_alpha_matrix(oracle::swap_pair(), 0.0);
    const LongRunReport r = long_run(uniform_distribution(2), p);
    CHECK(r.converged);
    CHECK(r.shares.size() == 4);
    const StochasticMatrix one = build_alpha_matrix(oracle::swap_pair(), 1.0);
    const LongRunReport s = long_run(point_mass(2, Configuration{1, 0}.bits()), one, 1e-10, 50);
    CHECK(s.converged);
    REQUIRE(s.shares.size() == 3);
}
