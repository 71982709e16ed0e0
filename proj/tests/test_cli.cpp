#include <catch_amalgamated.hpp>

#include "banlab_cli.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

std::string data(const std::string& name) { return std::string(BANLAB_DATA_DIR) + "/" + name; }

Outcome invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "banlab");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    const int code = banlab::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("count-bs prints the count and rotation classes", "[cli]") {
    const Outcome r = invoke({"count-bs", "4"});
    CHECK(r.code == 0);
    CHECK(r.out == "bs_4 = 75, classes = 2*bs_3 = 26\n");
    CHECK(invoke({"count-bs", "1"}).out == "bs_1 = 1, classes = 1\n");
}

TEST_CASE("infer recovers the local functions", "[cli]") {
    const Outcome r = invoke({"infer", "--obs", data("ex10.obs"), "--mode", "elementary"});
    CHECK(r.code == 0);
    CHECK(r.out == "mode: elementary\nf_0' = x0\nf_1' = 1\n");
}

TEST_CASE("attractors of the three-automaton network", "[cli]") {
    const Outcome r = invoke({"attractors", "--net", data("e1.ban"), "--graph", "eff-gtg"});
    CHECK(r.code == 0);
    CHECK(r.out ==
          "graph: eff-gtg\n"
          "stable: {(1,1,0),(1,0,1)}\n"
          "oscillations: none\n"
          "transient: {(0,0,0),(1,0,0),(0,1,0),(0,0,1),(0,1,1),(1,1,1)}\n");
}

TEST_CASE("the swap network oscillates under the parallel schedule", "[cli]") {
    const Outcome r = invoke({"attractors", "--net", data("swap.ban"), "--graph", "tdelta", "--schedule", "{0,1}"});
    CHECK(r.code == 0);
    CHECK_THAT(r.out, Catch::Matchers::ContainsSubstring("(1,0)"));
    CHECK_THAT(r.out, Catch::Matchers::ContainsSubstring("(0,1)"));
    CHECK_THAT(r.out, Catch::Matchers::ContainsSubstring("stable: {(0,0),(1,1)}"));
}

TEST_CASE("exit codes", "[cli]") {
    CHECK(invoke({"validate", "--net", data("e1.ban")}).code == 0);
    const Outcome findings = invoke({"validate", "--net", data("e1.ban"), "--obs", data("impossible.obs")});
    CHECK(findings.code == 1);
    CHECK_THAT(findings.out, Catch::Matchers::ContainsSubstring("not-elementary"));
    CHECK_THAT(findings.out, Catch::Matchers::ContainsSubstring("inconsistent"));

    CHECK(invoke({}).code == 2);
    CHECK(invoke({"bogus"}).code == 2);
    CHECK(invoke({"count-bs", "4", "--unknown"}).code == 2);
    CHECK(invoke({"markov", "--net", data("e1.ban"), "--alpha", "1.5"}).code == 2);
    const Outcome missing = invoke({"infer", "--obs", data("no-such.obs")});
    CHECK(missing.code == 2);
    CHECK_THAT(missing.err, Catch::Matchers::ContainsSubstring("cannot open"));
    CHECK(invoke({"tdelta", "--net", data("e1.ban"), "--schedule", "{0} {"}).code == 2);
    CHECK(invoke({"delays", "--net", data("e1.ban")}).code != 0);
    CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("repeat runs are byte identical", "[cli]") {
    const std::vector<std::vector<std::string>> commands{
        {"igraph", "--net", data("e1.ban")},
        {"gtg", "--net", data("e1.ban"), "--format", "dot"},
        {"atg", "--net", data("e1.ban"), "--effective", "--format", "json"},
        {"tdelta", "--net", data("e1.ban"), "--schedule", "{1} {0,2}", "--elementary"},
        {"attractors", "--net", data("e1.ban"), "--graph", "gtg"},
        {"markov", "--net", data("e1.ban"), "--alpha", "0.5", "--long-run"},
        {"infer", "--obs", data("ex13.obs"), "--mode", "asynchronous"},
        {"schedule", "--schedule", "{2,5} {0,1,4} {1,2,3} {0,1,4,5}", "--n", "6"},
        {"delays", "--net", data("ex9.ban"), "--from", "00", "--simulate"},
    };
    for (const auto& c : commands) {
        const Outcome a = invoke(c);
        const Outcome b = invoke(c);
        CHECK(a.code == 0);
        CHECK(a.out == b.out);
        CHECK_FALSE(a.out.empty());
    }
}

TEST_CASE("every subcommand emits versioned JSON", "[cli]") {
    const std::vector<std::vector<std::string>> commands{
        {"validate", "--net", data("e1.ban"), "--obs", data("ex13.obs"), "--mode", "asynchronous"},
        {"igraph", "--net", data("e1.ban")},
        {"gtg", "--net", data("swap.ban")},
        {"atg", "--net", data("swap.ban")},
        {"tdelta", "--net", data("e1.ban"), "--schedule", "{1} {0,2}"},
        {"attractors", "--net", data("e1.ban")},
        {"markov", "--net", data("e1.ban"), "--alpha", "0.3", "--steps", "2"},
        {"infer", "--obs", data("ex12.obs"), "--mode", "deterministic"},
        {"schedule", "--schedule", "{1} {0,2}", "--net", data("e1.ban"), "--steps", "3"},
        {"delays", "--net", data("ex9.ban")},
        {"count-bs", "5"},
    };
    for (auto c : commands) {
        c.push_back("--format");
        c.push_back("json");
        const Outcome r = invoke(c);
        INFO(c[0] << ": " << r.err);
        CHECK(r.code <= 1);
        const auto j = nlohmann::json::parse(r.out);
        CHECK(j.at("schema") == 1);
    }
}

TEST_CASE("output can be written to a file", "[cli]") {
    const std::string path = "banlab_cli_test_output.txt";
    const Outcome r = invoke({"count-bs", "3", "--out", path});
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream in(path);
    std::stringstream text;
    text << in.rdbuf();
    CHECK(text.str() == "bs_3 = 13, classes = 2*bs_2 = 6\n");
    std::remove(path.c_str());
}
