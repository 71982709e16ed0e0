#include <catch_amalgamated.hpp>

#include "oracles.hpp"

#include <tuple>

using namespace banlab;

namespace {

using ArcKey = std::tuple<std::string, std::string, std::string>;

std::set<ArcKey> arc_keys(const TransitionGraph& g) {
    std::set<ArcKey> out;
    for (const Arc& a : g.arcs()) {
        out.emplace(g.node(a.source).text(), g.node(a.target).text(), a.label ? a.label->to_string() : "");
    }
    return out;
}

std::multiset<ArcKey> arc_multiset(const TransitionGraph& g) {
    std::multiset<ArcKey> out;
    for (const Arc& a : g.arcs()) {
        out.emplace(g.node(a.source).text(), g.node(a.target).text(), a.label ? a.label->to_string() : "");
    }
    return out;
}

std::vector<std::set<Bits>> successor_sets(const TransitionGraph& g) {
    std::vector<std::set<Bits>> succ(g.nodes().size());
    for (const Arc& a : g.arcs()) {
        succ[g.node(a.source).configuration.bits()].insert(g.node(a.target).configuration.bits());
    }
    return succ;
}

std::set<Bits> bits_of(const std::vector<Configuration>& xs) {
    std::set<Bits> out;
    for (const auto& x : xs) {
        out.insert(x.bits());
    }
    return out;
}

// Arcs read off the published effective GTG; the first nine are also in the effective ATG.
const std::vector<ArcKey> published_eff_gtg{
    {"000", "001", "{2}"},   {"000", "100", "{0}"},   {"001", "101", "{0}"},     {"100", "101", "{2}"},
    {"100", "110", "{1}"},   {"111", "110", "{2}"},   {"010", "110", "{0}"},     {"011", "111", "{0}"},
    {"011", "010", "{2}"},   {"000", "101", "{0,2}"}, {"100", "111", "{1,2}"},   {"011", "110", "{0,2}"},
    {"000", "000", "{1}"},   {"001", "001", "{1,2}"}, {"010", "010", "{1,2}"},   {"011", "011", "{1}"},
    {"100", "100", "{0}"},   {"101", "101", "{0,1,2}"}, {"110", "110", "{0,1,2}"}, {"111", "111", "{0,1}"},
};

}  // namespace

TEST_CASE("GTG and ATG out-degrees", "[tgraph]") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 1 + rng() % 4;
        const Network net = oracle::random_network(n, rng);
        const TransitionGraph gtg = build_gtg(net);
        const TransitionGraph atg = build_atg(net);
        CHECK(gtg.nodes().size() == (std::size_t{1} << n));
        for (std::size_t v = 0; v < gtg.nodes().size(); ++v) {
            CHECK(gtg.out_arcs(v).size() == (std::size_t{1} << n) - 1);
            CHECK(atg.out_arcs(v).size() == n);
        }
        // every ATG arc is a GTG arc, and both are included in their effective versions' node sets
        const auto g = arc_keys(gtg);
        for (const auto& k : arc_keys(atg)) {
            CHECK(g.count(k) == 1);
        }
        const auto eg = arc_keys(build_eff_gtg(net));
        for (const auto& k : arc_keys(build_eff_atg(net))) {
            CHECK(eg.count(k) == 1);
        }
    }
}

TEST_CASE("effective GTG of the three-automaton network matches the published figure", "[tgraph]") {
    const Network net = oracle::three_automata();
    const TransitionGraph g = build_eff_gtg(net);
    const std::set<ArcKey> expected(published_eff_gtg.begin(), published_eff_gtg.end());
    CHECK(arc_keys(g) == expected);
    CHECK(g.arcs().size() == 20);

    std::set<ArcKey> thick(published_eff_gtg.begin(), published_eff_gtg.begin() + 9);
    thick.insert(published_eff_gtg.begin() + 12, published_eff_gtg.end());
    CHECK(arc_keys(build_eff_atg(net)) == thick);
}

TEST_CASE("effective versions built two ways coincide", "[tgraph][property]") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 1 + rng() % 4;
        const Network net = oracle::random_network(n, rng);
        const TransitionGraph a = effective_version(build_gtg(net), net);
        const TransitionGraph b = build_eff_gtg(net);
        CHECK(arc_multiset(a) == arc_multiset(b));
        CHECK(a.kind() == GraphKind::eff_gtg);
        CHECK(arc_multiset(effective_version(build_atg(net), net)) == arc_multiset(build_eff_atg(net)));
        // effective arcs are exactly the pairs x -> flip(x, D) with D a non-empty part of U(x)
        for (const Arc& arc : b.arcs()) {
            const Configuration& x = b.node(arc.source).configuration;
            const Configuration& y = b.node(arc.target).configuration;
            if (x != y) {
                CHECK(differing(x, y).subset_of(unstable_set(net, x)));
            } else {
                CHECK(*arc.label == AutomatonSet::all(n) - unstable_set(net, x));
            }
        }
    }
}

TEST_CASE("T_delta is the published eight-entry map", "[tgraph]") {
    const Network net = oracle::three_automata();
    const TransitionGraph g = build_t_delta(net, parse_schedule("{1} {0,2}"));
    const std::set<ArcKey> expected{
        {"000", "101", ""}, {"001", "101", ""}, {"010", "110", ""}, {"011", "110", ""},
        {"100", "110", ""}, {"101", "101", ""}, {"110", "110", ""}, {"111", "110", ""},
    };
    CHECK(arc_keys(g) == expected);
    for (std::size_t v = 0; v < g.nodes().size(); ++v) {
        CHECK(g.out_arcs(v).size() == 1);
    }
}

TEST_CASE("T_delta^elem holds the eight published two-step rows", "[tgraph]") {
    const Network net = oracle::three_automata();
    const UpdateSchedule s = parse_schedule("{1} {0,2}");
    const TransitionGraph g = build_t_delta_elem(net, s);
    // x -{1}-> middle -{0,2}-> end
    const std::vector<std::array<Configuration, 3>> rows{
        {Configuration{0, 0, 0}, Configuration{0, 0, 0}, Configuration{1, 0, 1}},
        {Configuration{0, 0, 1}, Configuration{0, 0, 1}, Configuration{1, 0, 1}},
        {Configuration{0, 1, 0}, Configuration{0, 1, 0}, Configuration{1, 1, 0}},
        {Configuration{0, 1, 1}, Configuration{0, 1, 1}, Configuration{1, 1, 0}},
        {Configuration{1, 0, 0}, Configuration{1, 1, 0}, Configuration{1, 1, 0}},
        {Configuration{1, 0, 1}, Configuration{1, 0, 1}, Configuration{1, 0, 1}},
        {Configuration{1, 1, 0}, Configuration{1, 1, 0}, Configuration{1, 1, 0}},
        {Configuration{1, 1, 1}, Configuration{1, 1, 1}, Configuration{1, 1, 0}},
    };
    for (const auto& r : rows) {
        CHECK(g.has_arc(Node{0, r[0]}, Node{1, r[1]}, AutomatonSet{1}));
        CHECK(g.has_arc(Node{1, r[1]}, Node{0, r[2]}, AutomatonSet{0, 2}));
    }
    CHECK(g.phased());
    CHECK(g.nodes().size() == 8 + 7);
    CHECK_FALSE(g.find(Node{1, Configuration{1, 0, 0}}).has_value());
    CHECK(g.arcs().size() == 15);
}

TEST_CASE("composing T_delta^elem along a period gives T_delta", "[tgraph][property]") {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 1 + rng() % 4;
        const Network net = oracle::random_network(n, rng);
        const UpdateSchedule s = oracle::random_strict_schedule(n, 3, rng);
        const TransitionGraph elem = build_t_delta_elem(net, s);
        const auto f = global_function(net, s);
        for (Bits x = 0; x < f.size(); ++x) {
            std::size_t v = *elem.find(Node{0, Configuration(n, x)});
            for (std::size_t d = 0; d < s.period(); ++d) {
                REQUIRE(elem.out_arcs(v).size() == 1);
                v = elem.arc(elem.out_arcs(v).front()).target;
            }
            CHECK(elem.node(v) == Node{0, Configuration(n, f[x])});
        }
    }
}

TEST_CASE("attractors of the three-automaton network", "[tgraph]") {
    const AttractorReport r = attractors(build_eff_gtg(oracle::three_automata()));
    CHECK(bits_of(r.stable) == bits_of({Configuration{1, 0, 1}, Configuration{1, 1, 0}}));
    CHECK(r.oscillations.empty());
    CHECK(r.transient.size() == 6);
    CHECK(r.recurrent.size() == 2);
    const AttractorReport t = attractors(build_t_delta(oracle::three_automata(), parse_schedule("{1} {0,2}")));
    CHECK(t.stable == r.stable);
    const AttractorReport e =
        attractors(build_t_delta_elem(oracle::three_automata(), parse_schedule("{1} {0,2}")));
    CHECK(e.stable == r.stable);
    CHECK(e.transient.size() == 6);
}

TEST_CASE("the swap network oscillates under the parallel schedule", "[tgraph]") {
    const Network net = oracle::swap_pair();
    const AttractorReport r = attractors(build_t_delta(net, UpdateSchedule::parallel(2)));
    CHECK(r.stable == std::vector<Configuration>{Configuration{0, 0}, Configuration{1, 1}});
    REQUIRE(r.oscillations.size() == 1);
    CHECK(r.oscillations[0].configurations == std::vector<Configuration>{Configuration{1, 0}, Configuration{0, 1}});
    CHECK(r.oscillations[0].period == 2);
    CHECK_FALSE(r.oscillations[0].nondeterministic);
    // asynchronously the oscillation disappears
    const AttractorReport a = attractors(build_eff_atg(net));
    CHECK(a.oscillations.empty());
    CHECK(a.transient.size() == 2);
}

TEST_CASE("attractors agree with the transitive-closure classification", "[tgraph][property]") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 150; ++trial) {
        const std::size_t n = 1 + rng() % 5;
        const Network net = oracle::random_network(n, rng);
        std::vector<TransitionGraph> graphs{build_eff_gtg(net), build_eff_atg(net)};
        graphs.push_back(build_t_delta(net, oracle::random_strict_schedule(n, 3, rng)));
        for (const auto& g : graphs) {
            const AttractorReport r = attractors(g);
            const auto expected = oracle::classify_by_closure(successor_sets(g));
            CHECK(bits_of(r.stable) == expected.stable);
            CHECK(bits_of(r.transient) == expected.transient);
            std::set<std::set<Bits>> osc;
            for (const auto& o : r.oscillations) {
                osc.insert(bits_of(o.configurations));
            }
            CHECK(osc == expected.oscillations);
        }
    }
}

TEST_CASE("stable configurations of the effective graphs are the fixed points", "[tgraph][property]") {
    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 80; ++trial) {
        const std::size_t n = 1 + rng() % 4;
        const Network net = oracle::random_network(n, rng);
        const auto imgs = oracle::images(net);
        std::set<Bits> fixed;
        for (Bits x = 0; x < imgs.size(); ++x) {
            if (imgs[x] == x) {
                fixed.insert(x);
            }
        }
        CHECK(bits_of(attractors(build_eff_gtg(net)).stable) == fixed);
        CHECK(bits_of(attractors(build_eff_atg(net)).stable) == fixed);
        CHECK(bits_of(attractors(build_t_delta(net, UpdateSchedule::parallel(n))).stable) == fixed);
    }
}

TEST_CASE("outside block-sequential schedules a fixed point of T_delta can be unstable", "[tgraph]") {
    const Network net = Network::parse({"!x0"});
    const UpdateSchedule twice = parse_schedule("{0} {0}");
    CHECK_FALSE(is_block_sequential(twice, 1));
    const AttractorReport r = attractors(build_t_delta(net, twice));
    CHECK(r.stable.size() == 2);
    CHECK_FALSE(unstable_set(net, Configuration{0}).empty());
    CHECK(attractors(build_eff_gtg(net)).stable.empty());
}

TEST_CASE("DOT output is ordered and marks stable and transient nodes", "[tgraph]") {
    const Network net = oracle::two_automata();
    const std::string dot = to_dot(build_eff_atg(net));
    CHECK(dot ==
          "digraph \"eff-atg\" {\n"
          "  node [shape=circle];\n"
          "  \"00\" [style=dashed];\n"
          "  \"10\" [shape=doublecircle];\n"
          "  \"01\" [style=dashed];\n"
          "  \"11\" [shape=doublecircle];\n"
          "  \"00\" -> \"10\" [label=\"{0}\"];\n"
          "  \"00\" -> \"01\" [label=\"{1}\"];\n"
          "  \"10\" -> \"10\" [label=\"{0,1}\"];\n"
          "  \"01\" -> \"01\" [label=\"{1}\"];\n"
          "  \"01\" -> \"11\" [label=\"{0}\"];\n"
          "  \"11\" -> \"11\" [label=\"{0,1}\"];\n"
          "}\n");
    CHECK(to_dot(build_eff_gtg(oracle::three_automata())) == to_dot(build_eff_gtg(oracle::three_automata())));
}

TEST_CASE("graph builders respect the caps", "[tgraph]") {
    Limits limits;
    limits.multigraph_cap = 2;
    CHECK_THROWS_AS(build_gtg(oracle::three_automata(), limits), CapacityError);
    limits.exhaustive_cap = 2;
    CHECK_THROWS_AS(build_eff_atg(oracle::three_automata(), limits), CapacityError);
    CHECK_THROWS_AS(build_t_delta_elem(oracle::three_automata(), parse_schedule("finite: {0}")),
                    PreconditionError);
}
