#include <catch_amalgamated.hpp>

#include "oracles.hpp"

#include <banlab/io.hpp>

using namespace banlab;

namespace {

std::string data(const std::string& name) { return std::string(BANLAB_DATA_DIR) + "/" + name; }

ParseError parse_failure(std::string_view text) {
    try {
        parse_network_file(text);
    } catch (const ParseError& e) {
        return e;
    }
    FAIL("expected a parse error for: " << text);
    throw;
}

ParseError observed_failure(std::string_view text) {
    try {
        parse_observed(text);
    } catch (const ParseError& e) {
        return e;
    }
    FAIL("expected a parse error for: " << text);
    throw;
}

}  // namespace

TEST_CASE("network files load with the intended functions", "[io]") {
    const NetworkFile e1 = load_network_file(data("e1.ban"));
    CHECK(oracle::images(e1.network) == oracle::images(oracle::three_automata()));
    CHECK_FALSE(e1.has_delays());
    CHECK_THROWS_AS(e1.delayed(), PreconditionError);

    const NetworkFile swap = load_network_file(data("swap.ban"));
    CHECK(oracle::images(swap.network) == oracle::images(oracle::swap_pair()));
}

TEST_CASE("delay annotations are read", "[io]") {
    const NetworkFile f = load_network_file(data("ex9.ban"));
    CHECK(oracle::images(f.network) == oracle::images(oracle::two_automata()));
    REQUIRE(f.has_delays());
    CHECK(*f.up[0] == 1.0);
    CHECK(*f.down[0] == 1.5);
    CHECK(*f.up[1] == 2.0);
    CHECK(*f.down[1] == 2.5);
    CHECK(f.signal.size() == 2);
    CHECK(f.signal.at({0, 1}) == 0.1);
    CHECK(f.signal.at({1, 1}) == 0.1);
    const DelayedNetwork d = f.delayed();
    CHECK(d.up(1) == 2.0);
}

TEST_CASE("formatted networks parse back to the same functions", "[io][property]") {
    std::mt19937_64 rng(71);
    for (int trial = 0; trial < 100; ++trial) {
        const Network net = oracle::random_network(1 + rng() % 5, rng);
        const NetworkFile back = parse_network_file(format_network(net));
        CHECK(oracle::images(back.network) == oracle::images(net));
        CHECK(format_network(back.network) == format_network(net));
    }
}

TEST_CASE("comments, blank lines and carriage returns are tolerated", "[io]") {
    const NetworkFile f = parse_network_file("# header\r\n\r\nn = 2  # size\r\nf1 = x0\r\nf0 = !x1\r\n");
    CHECK(f.network.size() == 2);
    CHECK(oracle::images(f.network)[0] == 0b01);
}

TEST_CASE("network file errors carry line and column", "[io]") {
    {
        const ParseError e = parse_failure("n = 2\nf0 = x0 & \nf1 = 1\n");
        CHECK(e.line() == 2);
        CHECK(e.column() == 10);
    }
    {
        const ParseError e = parse_failure("n = 2\nf0 = x0 & x7\nf1 = 1\n");
        CHECK(e.line() == 2);
        CHECK(e.column() == 10);
        CHECK_THAT(e.detail(), Catch::Matchers::ContainsSubstring("out of range"));
    }
    {
        const ParseError e = parse_failure("n = 2\nf0 = 1\n");
        CHECK(e.line() == 1);
        CHECK_THAT(e.detail(), Catch::Matchers::ContainsSubstring("f1 is never defined"));
    }
    {
        const ParseError e = parse_failure("n = 2\nf0 = 1\nf1 = 1\nfoo = 3\n");
        CHECK(e.line() == 4);
        CHECK_THAT(e.detail(), Catch::Matchers::ContainsSubstring("unknown key 'foo'"));
    }
    CHECK_THAT(parse_failure("n = 2\nn = 2\n").detail(), Catch::Matchers::ContainsSubstring("given twice"));
    CHECK_THAT(parse_failure("n = 1\nf0 = 1\nf0 = 0\n").detail(), Catch::Matchers::ContainsSubstring("defined twice"));
    CHECK_THAT(parse_failure("n = 1\nf3 = 1\n").detail(), Catch::Matchers::ContainsSubstring("outside"));
    CHECK_THAT(parse_failure("f0 = 1\n").detail(), Catch::Matchers::ContainsSubstring("missing 'n"));
    CHECK_THAT(parse_failure("n = 1\nf0 1\n").detail(), Catch::Matchers::ContainsSubstring("expected '<key> = <value>'"));
    CHECK(parse_failure("n = 1\nf0 = 1\ndelay_up 0 = -1\n").line() == 3);
    CHECK(parse_failure("n = 1\nf0 = 1\ndelay_signal 0 4 = 1\n").line() == 3);
    CHECK(parse_failure("n = 0\n").line() == 1);
    CHECK_THROWS_WITH(load_network_file(data("no-such-file.ban")), Catch::Matchers::ContainsSubstring("cannot open"));
}

TEST_CASE("observed graphs parse with labels and notes", "[io]") {
    const ObservedTransitionGraph g = parse_observed("# header\n10 -> 11 W={1} # seen twice\n\n00 -> 01\n");
    CHECK(g.size() == 2);
    REQUIRE(g.transitions().size() == 2);
    const ObservedTransition& a = g.transitions()[0];
    const ObservedTransition& b = g.transitions()[1];
    CHECK(a.source.text() == "00");
    CHECK_FALSE(a.label.has_value());
    CHECK(b.source.text() == "10");
    CHECK(b.target.text() == "11");
    REQUIRE(b.label.has_value());
    CHECK(*b.label == AutomatonSet{1});
    CHECK(b.note == "seen twice");

    const ObservedTransitionGraph ex13 = load_observed(data("ex13.obs"));
    CHECK(ex13.size() == 3);
    CHECK(ex13.transitions().size() == 4);
}

TEST_CASE("observed graph errors", "[io]") {
    CHECK(observed_failure("00 -> 01\n00 => 01\n").line() == 2);
    {
        const ParseError e = observed_failure("00 -> 011\n");
        CHECK(e.column() == 6);
        CHECK_THAT(e.detail(), Catch::Matchers::ContainsSubstring("same non-zero length"));
    }
    CHECK_THAT(observed_failure("00 -> 01\n000 -> 001\n").detail(),
               Catch::Matchers::ContainsSubstring("differs from earlier lines"));
    {
        const ParseError e = observed_failure("00 -> 01 W={5}\n");
        CHECK(e.column() == 9);
        CHECK_THAT(e.detail(), Catch::Matchers::ContainsSubstring("outside the network"));
    }
    CHECK_THAT(observed_failure("00 -> 01 X={0}\n").detail(), Catch::Matchers::ContainsSubstring("W={...}"));
    CHECK_THAT(observed_failure("00 -> 01 W={0} {1}\n").detail(), Catch::Matchers::ContainsSubstring("bad update set"));
    CHECK_THAT(observed_failure("0a -> 01\n").what(), Catch::Matchers::ContainsSubstring("line 1"));
    CHECK_THAT(observed_failure("# only a comment\n").detail(), Catch::Matchers::ContainsSubstring("no transitions"));
}

TEST_CASE("schedules round trip through JSON", "[io][property]") {
    std::mt19937_64 rng(72);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng() % 6;
        const UpdateSchedule s = oracle::random_strict_schedule(n, 4, rng);
        const json j = schedule_to_json(s);
        CHECK(schedule_from_json(j) == s);
        CHECK(schedule_from_json(json::parse(j.dump())) == s);
        CHECK(schedule_from_json(j.at("blocks")) == s);
    }
    const UpdateSchedule fin = parse_schedule("finite: {0} {1,2}");
    CHECK(schedule_from_json(schedule_to_json(fin)) == fin);
    CHECK_FALSE(schedule_to_json(fin).at("periodic").get<bool>());
    CHECK_THROWS_AS(schedule_from_json(json::parse(R"([[0], 1])")), ParseError);
    CHECK_THROWS_AS(schedule_from_json(json::parse(R"([[-1]])")), ParseError);
    CHECK_THROWS_AS(schedule_from_json(json::parse(R"({"periodic": true})")), ParseError);
}

TEST_CASE("observed graphs round trip through JSON", "[io]") {
    for (const char* name : {"ex10.obs", "ex11.obs", "ex12.obs", "ex13.obs", "ex14.obs", "impossible.obs"}) {
        const ObservedTransitionGraph g = load_observed(data(name));
        const json j = observed_to_json(g);
        CHECK(j.at("schema") == json_schema_version);
        const ObservedTransitionGraph back = observed_from_json(json::parse(j.dump()));
        CHECK(observed_to_json(back) == j);
    }
    const ObservedTransitionGraph labelled = parse_observed("01 -> 11 W={0,1} # note\n");
    const json j = observed_to_json(labelled);
    CHECK(j.dump() ==
          R"({"schema":1,"n":2,"transitions":[{"source":"01","target":"11","W":[0,1],"note":"note"}]})");
    CHECK(observed_to_json(observed_from_json(j)) == j);
    CHECK_THROWS_AS(observed_from_json(json::parse("[]")), ParseError);
}

TEST_CASE("JSON documents carry the schema version", "[io]") {
    const Network net = oracle::three_automata();
    CHECK(graph_to_json(build_eff_gtg(net)).at("schema") == 1);
    CHECK(matrix_to_json(build_alpha_matrix(net, 0.5)).at("schema") == 1);
    const json g = graph_to_json(build_eff_atg(net));
    CHECK(g.at("n") == 3);
    CHECK(g.at("nodes").size() == 8);
}
