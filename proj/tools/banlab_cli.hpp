#pragma once

#include <banlab/banlab.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace banlab::cli {

/// Exit statuses.
inline constexpr int ok = 0;
inline constexpr int findings = 1;
inline constexpr int usage = 2;

namespace detail {

inline std::string number(double v) {
    std::ostringstream s;
    s << std::setprecision(12) << v;
    return s.str();
}

inline std::string tuple_set(const std::vector<Configuration>& xs) {
    std::string out = "{";
    for (std::size_t k = 0; k < xs.size(); ++k) {
        out += (k == 0 ? "" : ",") + xs[k].tuple();
    }
    return out + "}";
}

inline std::string config_set(const std::vector<Bits>& xs, std::size_t n) {
    std::string out = "{";
    for (std::size_t k = 0; k < xs.size(); ++k) {
        out += (k == 0 ? "" : ",") + Configuration(n, xs[k]).tuple();
    }
    return out + "}";
}

inline std::string graph_text(const TransitionGraph& g) {
    std::string out;
    for (const Arc& a : g.sorted_arcs()) {
        out += g.node(a.source).text() + " -> " + g.node(a.target).text();
        if (a.label) {
            out += " " + a.label->to_string();
        }
        out += "\n";
    }
    return out;
}

inline std::string report_text(const AttractorReport& r) {
    std::string out = "stable: " + tuple_set(r.stable) + "\n";
    if (r.oscillations.empty()) {
        out += "oscillations: none\n";
    }
    for (const Oscillation& o : r.oscillations) {
        out += "oscillation: " + tuple_set(o.configurations) + " period " + std::to_string(o.period);
        out += o.nondeterministic ? " (nondeterministic)\n" : "\n";
    }
    out += "transient: " + tuple_set(r.transient) + "\n";
    return out;
}

struct Context {
    std::string format = "text";
    std::string out_path;
    std::string net_path;
    std::string obs_path;
    std::string schedule_text;
    std::string mode = "elementary";
    std::string graph = "eff-gtg";
    std::string from;
    std::string genes;
    std::optional<double> alpha;
    std::optional<std::size_t> steps;
    std::optional<std::size_t> n;
    double horizon = 1000.0;
    bool effective = false;
    bool elementary = false;
    bool long_run = false;
    bool simulate = false;
    bool complete = false;
    bool fixity = false;
    std::size_t count_n = 0;
    Limits limits;
};

inline NetworkFile need_net(const Context& c) {
    if (c.net_path.empty()) {
        throw CLI::RequiredError("--net");
    }
    return load_network_file(c.net_path);
}

inline UpdateSchedule need_schedule(const Context& c) {
    if (c.schedule_text.empty()) {
        throw CLI::RequiredError("--schedule");
    }
    const std::string text = c.schedule_text;
    if (!text.empty() && (text.front() == '[' || text.front() == '{') && text.find('[') != std::string::npos) {
        return schedule_from_json(json::parse(text));
    }
    return parse_schedule(text);
}

inline HypothesisMode mode_of(const Context& c) {
    HypothesisMode m;
    if (c.mode == "elementary") {
        m = HypothesisMode::elementary();
    } else if (c.mode == "asynchronous") {
        m = HypothesisMode::asynchronous();
    } else if (c.mode == "deterministic") {
        m = HypothesisMode::deterministic();
    } else if (c.mode == "schedule") {
        m = HypothesisMode::scheduled(need_schedule(c));
    } else {
        throw CLI::ValidationError("--mode", "unknown mode '" + c.mode + "'");
    }
    m.assume_complete = m.assume_complete || c.complete;
    m.fixity = m.fixity || c.fixity;
    return m;
}

inline ObservedTransitionGraph need_obs(const Context& c) {
    if (c.obs_path.empty()) {
        throw CLI::RequiredError("--obs");
    }
    if (c.obs_path.size() > 5 && c.obs_path.substr(c.obs_path.size() - 5) == ".json") {
        return observed_from_json(json::parse(read_text_file(c.obs_path)));
    }
    return load_observed(c.obs_path);
}

inline std::string functions_text(const Network& net) {
    std::string out;
    for (std::size_t i = 0; i < net.size(); ++i) {
        out += "f_" + std::to_string(i) + "' = " + net.function(i).to_string() + "\n";
    }
    return out;
}

inline TransitionGraph graph_named(const std::string& name, const Network& net, const Context& c) {
    if (name == "gtg") {
        return build_gtg(net, c.limits);
    }
    if (name == "atg") {
        return build_atg(net, c.limits);
    }
    if (name == "eff-gtg") {
        return build_eff_gtg(net, c.limits);
    }
    if (name == "eff-atg") {
        return build_eff_atg(net, c.limits);
    }
    if (name == "tdelta") {
        return build_t_delta(net, need_schedule(c), c.limits);
    }
    if (name == "tdelta-elem") {
        return build_t_delta_elem(net, need_schedule(c), c.limits);
    }
    throw CLI::ValidationError("--graph", "unknown graph '" + name + "'");
}

inline std::string emit_graph(const TransitionGraph& g, const Context& c) {
    if (c.format == "dot") {
        return to_dot(g);
    }
    if (c.format == "json") {
        return graph_to_json(g).dump(2) + "\n";
    }
    return detail::graph_text(g);
}

inline int cmd_validate(const Context& c, std::string& out) {
    const NetworkFile file = need_net(c);
    const Network& net = file.network;
    if (c.obs_path.empty()) {
        if (c.format == "json") {
            json fs = json::array();
            for (const Expr& e : net.functions()) {
                fs.push_back(e.to_string());
            }
            out = json{{"schema", json_schema_version}, {"n", net.size()}, {"functions", fs},
                       {"delays", file.has_delays()}}
                      .dump(2) +
                  "\n";
        } else {
            out = "network ok: n = " + std::to_string(net.size()) + (file.has_delays() ? ", with delays\n" : "\n");
            out += format_network(net);
        }
        return ok;
    }
    const ObservedTransitionGraph obs = need_obs(c);
    const ValidationReport report = validate_observed(obs, net, mode_of(c), c.limits);
    if (c.format == "json") {
        out = validation_to_json(report).dump(2) + "\n";
    } else {
        for (const auto& d : report.transitions) {
            out += d.transition.to_string() + (d.realizable ? ": realizable" : ": not realizable");
            if (d.elementary) {
                out += ", W = " + d.core.to_string() + " plus any subset of " + d.free.to_string();
            }
            out += "\n";
        }
        for (const auto& f : report.findings) {
            out += std::string(to_string(f.kind)) + ": " + f.message + "\n";
        }
        out += report.consistent() ? "consistent\n" : "inconsistent\n";
    }
    return report.consistent() ? ok : findings;
}

inline int cmd_igraph(const Context& c, std::string& out) {
    const Network net = need_net(c).network;
    const InteractionGraph g = interaction_graph(net, c.limits);
    if (c.format == "json") {
        json arcs = json::array();
        for (const auto& [j, i] : g.arcs) {
            arcs.push_back(json::array({j, i}));
        }
        out = json{{"schema", json_schema_version}, {"n", g.n}, {"arcs", arcs}}.dump(2) + "\n";
    } else if (c.format == "dot") {
        out = "digraph \"interaction\" {\n";
        for (std::size_t i = 0; i < g.n; ++i) {
            out += "  \"" + std::to_string(i) + "\";\n";
        }
        for (const auto& [j, i] : g.arcs) {
            out += "  \"" + std::to_string(j) + "\" -> \"" + std::to_string(i) + "\";\n";
        }
        out += "}\n";
    } else {
        for (const auto& [j, i] : g.arcs) {
            out += "(" + std::to_string(j) + "," + std::to_string(i) + ")\n";
        }
    }
    return ok;
}

inline int cmd_graph(const std::string& which, const Context& c, std::string& out) {
    const Network net = need_net(c).network;
    TransitionGraph g = which == "gtg" ? build_gtg(net, c.limits) : build_atg(net, c.limits);
    if (c.effective) {
        g = which == "gtg" ? build_eff_gtg(net, c.limits) : build_eff_atg(net, c.limits);
    }
    out = emit_graph(g, c);
    return ok;
}

inline int cmd_tdelta(const Context& c, std::string& out) {
    const Network net = need_net(c).network;
    const UpdateSchedule s = need_schedule(c);
    out = emit_graph(c.elementary ? build_t_delta_elem(net, s, c.limits) : build_t_delta(net, s, c.limits), c);
    return ok;
}

inline int cmd_attractors(const Context& c, std::string& out) {
    const Network net = need_net(c).network;
    const TransitionGraph g = graph_named(c.graph, net, c);
    const AttractorReport r = attractors(g);
    if (c.format == "json") {
        json j = report_to_json(r);
        j["schema"] = json_schema_version;
        j["graph"] = c.graph;
        out = j.dump(2) + "\n";
    } else if (c.format == "dot") {
        out = to_dot(g);
    } else {
        out = "graph: " + c.graph + "\n" + report_text(r);
    }
    return ok;
}

inline int cmd_markov(const Context& c, std::string& out) {
    const Network net = need_net(c).network;
    if (!c.alpha) {
        throw CLI::RequiredError("--alpha");
    }
    const StochasticMatrix p = build_alpha_matrix(net, *c.alpha, c.limits);
    const std::size_t n = net.size();
    Distribution mu = c.from.empty() ? uniform_distribution(n) : point_mass(n, Configuration::from_text(c.from).bits());
    if (!c.from.empty() && c.from.size() != n) {
        throw PreconditionError("--from must have " + std::to_string(n) + " bits");
    }
    if (c.long_run) {
        const LongRunReport r = long_run(mu, p);
        if (c.format == "json") {
            json shares = json::array();
            for (const auto& s : r.shares) {
                json members = json::array();
                for (const auto& x : s.component) {
                    members.push_back(x.text());
                }
                shares.push_back({{"component", members}, {"probability", s.probability}});
            }
            out = json{{"schema", json_schema_version}, {"alpha", *c.alpha}, {"shares", shares},
                       {"transient_mass", r.transient_mass}, {"steps", r.steps}, {"converged", r.converged}}
                      .dump(2) +
                  "\n";
        } else {
            for (const auto& s : r.shares) {
                out += tuple_set(s.component) + " " + number(s.probability) + "\n";
            }
            out += "transient mass " + number(r.transient_mass) + " after " + std::to_string(r.steps) + " steps" +
                   (r.converged ? "\n" : " (not converged)\n");
        }
        return ok;
    }
    if (c.steps) {
        const Distribution d = evolve(mu, p, *c.steps);
        if (c.format == "json") {
            json entries = json::array();
            for (Bits x = 0; x < d.size(); ++x) {
                entries.push_back({{"configuration", Configuration(n, x).text()}, {"probability", d[x]}});
            }
            out = json{{"schema", json_schema_version}, {"alpha", *c.alpha}, {"steps", *c.steps},
                       {"distribution", entries}}
                      .dump(2) +
                  "\n";
        } else {
            for (Bits x = 0; x < d.size(); ++x) {
                if (d[x] != 0.0) {
                    out += Configuration(n, x).text() + " " + number(d[x]) + "\n";
                }
            }
        }
        return ok;
    }
    if (c.format == "json") {
        out = matrix_to_json(p).dump(2) + "\n";
    } else {
        for (Bits x = 0; x < p.dimension(); ++x) {
            for (const auto& [y, q] : p.rows[x]) {
                out += Configuration(n, x).text() + " -> " + Configuration(n, y).text() + " " + number(q) + "\n";
            }
        }
    }
    return ok;
}

inline int cmd_infer(const Context& c, std::string& out) {
    const ObservedTransitionGraph obs = need_obs(c);
    const HypothesisMode mode = mode_of(c);
    const InferenceReport r = infer(obs, mode, c.limits);
    if (c.format == "json") {
        json j = inference_to_json(r);
        j["mode"] = mode.name();
        out = j.dump(2) + "\n";
    } else {
        out = "mode: " + mode.name() + "\n" + functions_text(r.network);
        for (const Conflict& k : r.conflicts) {
            out += k.to_string() + "\n";
        }
        if (r.regenerates) {
            out += std::string("regenerated graph ") + (*r.regenerates ? "matches" : "differs") + "\n";
        }
    }
    return r.consistent() ? ok : findings;
}

inline int cmd_schedule(const Context& c, std::string& out) {
    const UpdateSchedule s = need_schedule(c);
    std::optional<NetworkFile> file;
    if (!c.net_path.empty()) {
        file = need_net(c);
    }
    const std::size_t n = file ? file->network.size() : c.n.value_or(s.bound());
    json j{{"schema", json_schema_version}, {"schedule", schedule_to_json(s)}, {"n", n}};
    std::string text = "schedule: " + s.to_string() + "\n";
    std::vector<ScheduleClass> classes = classify(s, n);
    json cls = json::array();
    text += "classes:";
    for (const auto& k : classes) {
        cls.push_back(k.to_string());
        text += " " + k.to_string();
    }
    text += "\n";
    j["classes"] = cls;
    if (file) {
        const Network& net = file->network;
        if (!c.from.empty()) {
            const Trajectory tr = trajectory(net, s, Configuration::from_text(c.from), c.steps.value_or(s.period()));
            text += "trajectory: " + tr.start.tuple();
            json steps = json::array();
            for (const auto& st : tr.steps) {
                text += " -" + st.block.to_string() + "-> " + st.configuration.tuple();
                steps.push_back({{"W", set_to_json(st.block)}, {"configuration", st.configuration.text()}});
            }
            text += "\n";
            j["trajectory"] = {{"start", tr.start.text()}, {"steps", steps}};
        } else {
            const ReachableSets r = reachable_sets(net, s, c.steps, c.limits);
            json sets = json::array();
            for (std::size_t t = 0; t < r.sets.size(); ++t) {
                text += "X_" + std::to_string(t) + " = " + config_set(r.sets[t], n) + "\n";
                json xs = json::array();
                for (Bits x : r.sets[t]) {
                    xs.push_back(Configuration(n, x).text());
                }
                sets.push_back(xs);
            }
            j["sets"] = sets;
            if (r.tail) {
                text += "periodic from t = " + std::to_string(r.tail->start) + " with period " +
                        std::to_string(r.tail->period) + "\n";
                j["tail"] = {{"start", r.tail->start}, {"period", r.tail->period}};
            }
        }
    }
    out = c.format == "json" ? j.dump(2) + "\n" : text;
    return ok;
}

inline int cmd_delays(const Context& c, std::string& out) {
    const NetworkFile file = need_net(c);
    const DelayedNetwork dnet = file.delayed();
    const std::size_t n = dnet.size();
    if (c.simulate) {
        if (c.from.empty()) {
            throw CLI::RequiredError("--from");
        }
        const Configuration x = Configuration::from_text(c.from);
        const Configuration g =
            c.genes.empty() ? Configuration(n, dnet.network().image(x.bits())) : Configuration::from_text(c.genes);
        const SimulationResult r = event_simulation(dnet, {x, g}, c.horizon);
        if (c.format == "json") {
            out = trace_to_json(r).dump(2) + "\n";
        } else {
            for (const Event& e : r.trace) {
                out += number(e.time) + " " + to_string(e.kind) + " " + std::to_string(e.automaton);
                if (e.kind == EventKind::command_delivery) {
                    out += "->" + std::to_string(e.receiver);
                }
                out += " " + std::string(e.value ? "1" : "0") + "\n";
            }
            out += "final " + r.final_state.text() + (r.truncated ? " (truncated)\n" : "\n");
        }
        return ok;
    }
    if (!c.from.empty()) {
        const DelayRun r = deterministic_run(dnet, Configuration::from_text(c.from), c.steps.value_or(1000));
        if (c.format == "json") {
            json steps = json::array();
            for (const auto& s : r.steps) {
                steps.push_back({{"from", s.from.text()}, {"to", s.to.text()}, {"delay", s.delay.to_string()},
                                 {"value", s.delay.value}});
            }
            out = json{{"schema", json_schema_version}, {"steps", steps},
                       {"final", r.final_configuration().text()}, {"stable", r.stable}}
                      .dump(2) +
                  "\n";
        } else {
            out = r.start.tuple();
            for (const auto& s : r.steps) {
                out += " -" + s.delay.to_string() + "-> " + s.to.tuple();
            }
            out += r.stable ? " (stable)\n" : " (stopped)\n";
        }
        return ok;
    }
    const DelayGraph dg = delay_annotated_atg(dnet, c.limits);
    if (c.format == "json") {
        json arcs = json::array();
        for (std::size_t a = 0; a < dg.graph.arcs().size(); ++a) {
            const Arc& arc = dg.graph.arc(a);
            json j{{"source", dg.graph.node(arc.source).text()}, {"target", dg.graph.node(arc.target).text()}};
            j["delay"] = dg.delays[a] ? json(dg.delays[a]->to_string()) : json(nullptr);
            arcs.push_back(j);
        }
        out = json{{"schema", json_schema_version}, {"arcs", arcs}}.dump(2) + "\n";
    } else if (c.format == "dot") {
        out = "digraph \"delays\" {\n";
        for (std::size_t a = 0; a < dg.graph.arcs().size(); ++a) {
            const Arc& arc = dg.graph.arc(a);
            out += "  \"" + dg.graph.node(arc.source).text() + "\" -> \"" + dg.graph.node(arc.target).text() + "\"";
            if (dg.delays[a]) {
                out += " [label=\"" + dg.delays[a]->to_string() + "\"]";
            }
            out += ";\n";
        }
        out += "}\n";
    } else {
        for (std::size_t a = 0; a < dg.graph.arcs().size(); ++a) {
            const Arc& arc = dg.graph.arc(a);
            out += dg.graph.node(arc.source).text() + " -> " + dg.graph.node(arc.target).text();
            out += dg.delays[a] ? " " + dg.delays[a]->to_string() + " = " + number(dg.delays[a]->value) : " null";
            out += "\n";
        }
    }
    return ok;
}

inline int cmd_count(const Context& c, std::string& out) {
    const std::size_t n = c.count_n;
    if (n == 0) {
        throw CLI::ValidationError("n", "must be at least 1");
    }
    const BigInt bs = count_block_sequential(n);
    const BigInt classes = count_bs_classes(n);
    if (c.format == "json") {
        out = json{{"schema", json_schema_version}, {"n", n}, {"bs", bs.str()}, {"classes", classes.str()}}.dump(2) +
              "\n";
    } else {
        out = "bs_" + std::to_string(n) + " = " + bs.str() + ", classes = ";
        if (n > 1) {
            out += "2*bs_" + std::to_string(n - 1) + " = ";
        }
        out += classes.str() + "\n";
    }
    return ok;
}

}  // namespace detail

/// Runs one invocation; output goes to `out` (or the --out file), messages to `err`.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    detail::Context c;
    CLI::App app{"Boolean automata network toolkit", "banlab"};
    app.require_subcommand(1);

    auto add_format = [&](CLI::App* sub, std::vector<std::string> formats) {
        sub->add_option("--format", c.format, "output format")->check(CLI::IsMember(formats));
        sub->add_option("--out", c.out_path, "write output to this file");
    };
    const std::vector<std::string> all_formats{"text", "dot", "json"};
    const std::vector<std::string> no_dot{"text", "json"};

    auto* validate = app.add_subcommand("validate", "check a network file, or observations against it");
    validate->add_option("--net", c.net_path, "network file")->required();
    validate->add_option("--obs", c.obs_path, "observed transitions");
    validate->add_option("--mode", c.mode, "elementary|asynchronous|deterministic|schedule");
    validate->add_option("--schedule", c.schedule_text, "update schedule for schedule mode");
    validate->add_flag("--complete", c.complete, "observations contain every transition");
    validate->add_flag("--fixity", c.fixity, "configurations without successors are stable");
    add_format(validate, no_dot);

    auto* igraph = app.add_subcommand("igraph", "interaction graph");
    igraph->add_option("--net", c.net_path, "network file")->required();
    add_format(igraph, all_formats);

    auto* gtg = app.add_subcommand("gtg", "general transition graph");
    gtg->add_option("--net", c.net_path, "network file")->required();
    gtg->add_flag("--effective", c.effective, "effective version");
    add_format(gtg, all_formats);

    auto* atg = app.add_subcommand("atg", "asynchronous transition graph");
    atg->add_option("--net", c.net_path, "network file")->required();
    atg->add_flag("--effective", c.effective, "effective version");
    add_format(atg, all_formats);

    auto* tdelta = app.add_subcommand("tdelta", "transition graph of a periodic schedule");
    tdelta->add_option("--net", c.net_path, "network file")->required();
    tdelta->add_option("--schedule", c.schedule_text, "update schedule")->required();
    tdelta->add_flag("--elementary", c.elementary, "phase-indexed elementary decomposition");
    add_format(tdelta, all_formats);

    auto* attr = app.add_subcommand("attractors", "limit behaviours");
    attr->add_option("--net", c.net_path, "network file")->required();
    attr->add_option("--graph", c.graph, "gtg|atg|eff-gtg|eff-atg|tdelta|tdelta-elem")
        ->check(CLI::IsMember({"gtg", "atg", "eff-gtg", "eff-atg", "tdelta", "tdelta-elem"}));
    attr->add_option("--schedule", c.schedule_text, "update schedule for tdelta graphs");
    add_format(attr, all_formats);

    auto* markov = app.add_subcommand("markov", "stochastic update with rate alpha");
    markov->add_option("--net", c.net_path, "network file")->required();
    markov->add_option("--alpha", c.alpha, "update probability")->required()->check(CLI::Range(0.0, 1.0));
    markov->add_option("--from", c.from, "start configuration (default: uniform)");
    markov->add_option("--steps", c.steps, "evolve the distribution this many steps");
    markov->add_flag("--long-run", c.long_run, "absorption probabilities per terminal component");
    add_format(markov, no_dot);

    auto* inf = app.add_subcommand("infer", "infer local functions from observations");
    inf->add_option("--obs", c.obs_path, "observed transitions")->required();
    inf->add_option("--mode", c.mode, "elementary|asynchronous|deterministic|schedule")
        ->check(CLI::IsMember({"elementary", "asynchronous", "deterministic", "schedule"}));
    inf->add_option("--schedule", c.schedule_text, "strict schedule for schedule mode");
    add_format(inf, no_dot);

    auto* sched = app.add_subcommand("schedule", "classify a schedule, reachable sets, trajectories");
    sched->add_option("--schedule", c.schedule_text, "update schedule")->required();
    sched->add_option("--net", c.net_path, "network file");
    sched->add_option("--n", c.n, "network size when no network is given");
    sched->add_option("--from", c.from, "trajectory start");
    sched->add_option("--steps", c.steps, "horizon or trajectory length");
    add_format(sched, no_dot);

    auto* delays = app.add_subcommand("delays", "delay-annotated semantics");
    delays->add_option("--net", c.net_path, "network file with delay lines")->required();
    delays->add_option("--from", c.from, "start configuration for a run");
    delays->add_option("--genes", c.genes, "initial gene states (default f(x))");
    delays->add_option("--steps", c.steps, "maximum steps of the fastest-first run");
    delays->add_flag("--simulate", c.simulate, "event simulation with signal delays");
    delays->add_option("--horizon", c.horizon, "simulation horizon");
    add_format(delays, all_formats);

    auto* count = app.add_subcommand("count-bs", "count block-sequential schedules");
    count->add_option("n", c.count_n, "number of automata")->required();
    add_format(count, no_dot);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return ok;
        }
        err << "banlab: " << e.what() << "\n";
        return usage;
    }

    std::string text;
    int status = ok;
    try {
        c.limits = Limits::from_environment();
        if (*validate) {
            status = detail::cmd_validate(c, text);
        } else if (*igraph) {
            status = detail::cmd_igraph(c, text);
        } else if (*gtg) {
            status = detail::cmd_graph("gtg", c, text);
        } else if (*atg) {
            status = detail::cmd_graph("atg", c, text);
        } else if (*tdelta) {
            status = detail::cmd_tdelta(c, text);
        } else if (*attr) {
            status = detail::cmd_attractors(c, text);
        } else if (*markov) {
            status = detail::cmd_markov(c, text);
        } else if (*inf) {
            status = detail::cmd_infer(c, text);
        } else if (*sched) {
            status = detail::cmd_schedule(c, text);
        } else if (*delays) {
            status = detail::cmd_delays(c, text);
        } else if (*count) {
            status = detail::cmd_count(c, text);
        }
    } catch (const CLI::Error& e) {
        err << "banlab: " << e.what() << "\n";
        return usage;
    } catch (const HypothesisViolation& e) {
        err << "banlab: " << e.what() << "\n";
        return findings;
    } catch (const json::exception& e) {
        err << "banlab: malformed JSON: " << e.what() << "\n";
        return usage;
    } catch (const Error& e) {
        err << "banlab: " << e.what() << "\n";
        return usage;
    }

    if (!c.out_path.empty()) {
        std::ofstream file(c.out_path, std::ios::binary);
        if (!file) {
            err << "banlab: cannot write '" << c.out_path << "'\n";
            return usage;
        }
        file << text;
    } else {
        out << text;
    }
    return status;
}

}  // namespace banlab::cli
