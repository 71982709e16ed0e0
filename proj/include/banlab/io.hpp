#pragma once

#include <banlab/configuration.hpp>
#include <banlab/delay.hpp>
#include <banlab/error.hpp>
#include <banlab/expr.hpp>
#include <banlab/infer.hpp>
#include <banlab/network.hpp>
#include <banlab/schedule.hpp>
#include <banlab/stochastic.hpp>
#include <banlab/tgraph.hpp>

#include <nlohmann/json.hpp>

#include <cctype>
#include <charconv>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

namespace banlab {

using json = nlohmann::ordered_json;

inline constexpr int json_schema_version = 1;

/// Contents of a network file: the functions plus any delay annotations.
struct NetworkFile {
    Network network;
    std::vector<std::optional<double>> up;
    std::vector<std::optional<double>> down;
    std::map<std::pair<std::size_t, std::size_t>, double> signal;

    bool has_delays() const {
        for (std::size_t i = 0; i < network.size(); ++i) {
            if (!up[i] || !down[i]) {
                return false;
            }
        }
        return true;
    }

    DelayedNetwork delayed() const {
        std::vector<double> u;
        std::vector<double> d;
        for (std::size_t i = 0; i < network.size(); ++i) {
            if (!up[i] || !down[i]) {
                throw PreconditionError("automaton " + std::to_string(i) + " lacks a delay_up or delay_down line");
            }
            u.push_back(*up[i]);
            d.push_back(*down[i]);
        }
        return DelayedNetwork(network, u, d, signal);
    }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())) != 0) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())) != 0) {
        s.remove_suffix(1);
    }
    return s;
}

inline std::size_t parse_index(std::string_view s, std::size_t line, std::size_t column) {
    std::size_t v = 0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size() || s.empty()) {
        throw ParseError("expected a non-negative integer, got '" + std::string(s) + "'", line, column);
    }
    return v;
}

inline double parse_positive(std::string_view s, std::size_t line, std::size_t column) {
    const std::string text(s);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() || text.empty()) {
        throw ParseError("expected a number, got '" + text + "'", line, column);
    }
    if (!(v > 0.0)) {
        throw ParseError("delays must be positive", line, column);
    }
    return v;
}

/// Whitespace-separated words of `s` with their offsets.
inline std::vector<std::pair<std::string_view, std::size_t>> words(std::string_view s, std::size_t base) {
    std::vector<std::pair<std::string_view, std::size_t>> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i])) != 0) {
            ++i;
        }
        const std::size_t start = i;
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i])) == 0) {
            ++i;
        }
        if (i > start) {
            out.emplace_back(s.substr(start, i - start), base + start);
        }
    }
    return out;
}

}  // namespace detail

/// Parses
///   n = 3
///   f0 = 1
///   delay_up 0 = 1.0
///   delay_signal 0 1 = 0.1
/// with `#` comments. Errors carry 1-based line numbers.
inline NetworkFile parse_network_file(std::string_view text) {
    std::optional<std::size_t> n;
    std::size_t n_line = 0;
    std::vector<std::pair<std::size_t, std::pair<std::string, std::size_t>>> functions;  // (i, (expr, line))
    std::vector<std::size_t> function_cols;
    std::vector<std::tuple<std::string, std::vector<std::size_t>, double, std::size_t>> delays;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (detail::trim(line).empty()) {
            if (end == text.size()) {
                break;
            }
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError("expected '<key> = <value>'", line_no, 0);
        }
        const auto key = detail::words(line.substr(0, eq), 0);
        const std::string_view value = line.substr(eq + 1);
        const std::size_t value_col = eq + 1 + std::min(value.size(), value.find_first_not_of(" \t"));
        if (key.empty()) {
            throw ParseError("missing key before '='", line_no, 0);
        }
        const std::string_view head = key[0].first;
        if (head == "n" && key.size() == 1) {
            if (n) {
                throw ParseError("network size given twice", line_no, key[0].second);
            }
            n = detail::parse_index(detail::trim(value), line_no, value_col);
            n_line = line_no;
            if (*n == 0 || *n > max_network_size) {
                throw ParseError("network size must lie in [1, " + std::to_string(max_network_size) + "]", line_no,
                                 value_col);
            }
        } else if (head.size() > 1 && head[0] == 'f' && key.size() == 1 &&
                   head.find_first_not_of("0123456789", 1) == std::string_view::npos) {
            const std::size_t i = detail::parse_index(head.substr(1), line_no, key[0].second + 1);
            functions.push_back({i, {std::string(value), line_no}});
            function_cols.push_back(eq + 1);
        } else if (head == "delay_up" || head == "delay_down" || head == "delay_signal") {
            const std::size_t want = head == "delay_signal" ? 3 : 2;
            if (key.size() != want) {
                throw ParseError(std::string(head) + " takes " + std::to_string(want - 1) + " automaton index(es)",
                                 line_no, key[0].second);
            }
            std::vector<std::size_t> ids;
            for (std::size_t k = 1; k < key.size(); ++k) {
                ids.push_back(detail::parse_index(key[k].first, line_no, key[k].second));
            }
            delays.emplace_back(std::string(head), ids, detail::parse_positive(detail::trim(value), line_no, value_col),
                                line_no);
        } else {
            throw ParseError("unknown key '" + std::string(head) + "'", line_no, key[0].second);
        }
        if (end == text.size()) {
            break;
        }
    }
    if (!n) {
        throw ParseError("missing 'n = <size>' line", line_no == 0 ? 1 : line_no, 0);
    }
    std::vector<std::optional<Expr>> fs(*n);
    for (std::size_t k = 0; k < functions.size(); ++k) {
        const auto& [i, entry] = functions[k];
        const auto& [src, line] = entry;
        if (i >= *n) {
            throw ParseError("f" + std::to_string(i) + " is outside a network of size " + std::to_string(*n), line, 0);
        }
        if (fs[i]) {
            throw ParseError("f" + std::to_string(i) + " is defined twice", line, 0);
        }
        try {
            fs[i] = parse_expression(src, *n);
        } catch (const ParseError& e) {
            throw ParseError(e.detail(), line, function_cols[k] + e.column());
        }
    }
    std::vector<Expr> exprs;
    for (std::size_t i = 0; i < *n; ++i) {
        if (!fs[i]) {
            throw ParseError("f" + std::to_string(i) + " is never defined", n_line, 0);
        }
        exprs.push_back(*fs[i]);
    }
    NetworkFile file{Network(std::move(exprs)), std::vector<std::optional<double>>(*n),
                     std::vector<std::optional<double>>(*n), {}};
    for (const auto& [kind, ids, value, line] : delays) {
        for (std::size_t id : ids) {
            if (id >= *n) {
                throw ParseError("automaton " + std::to_string(id) + " is outside the network", line, 0);
            }
        }
        if (kind == "delay_up") {
            file.up[ids[0]] = value;
        } else if (kind == "delay_down") {
            file.down[ids[0]] = value;
        } else {
            file.signal[{ids[0], ids[1]}] = value;
        }
    }
    return file;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline NetworkFile load_network_file(const std::string& path) {
    try {
        return parse_network_file(read_text_file(path));
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.detail(), e.line(), e.column());
    }
}

inline std::string format_network(const Network& net) {
    std::string out = "n = " + std::to_string(net.size()) + "\n";
    for (std::size_t i = 0; i < net.size(); ++i) {
        out += "f" + std::to_string(i) + " = " + net.function(i).to_string() + "\n";
    }
    return out;
}

/// One transition per line: `10 -> 11`, optionally followed by `W={0,1}`;
/// anything after `#` is kept as the transition's note.
inline ObservedTransitionGraph parse_observed(std::string_view text) {
    std::optional<ObservedTransitionGraph> graph;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        std::string note;
        if (auto hash = line.find('#'); hash != std::string_view::npos) {
            note = std::string(detail::trim(line.substr(hash + 1)));
            line = line.substr(0, hash);
        }
        const auto w = detail::words(line, 0);
        if (w.empty()) {
            continue;
        }
        if (w.size() < 3 || w[1].first != "->") {
            throw ParseError("expected '<bits> -> <bits> [W={i,j}]'", line_no, 0);
        }
        Configuration x;
        Configuration y;
        try {
            x = Configuration::from_text(w[0].first);
            y = Configuration::from_text(w[2].first);
        } catch (const ParseError& e) {
            throw ParseError(e.detail(), line_no, e.column());
        }
        if (x.size() == 0 || x.size() != y.size()) {
            throw ParseError("source and target must have the same non-zero length", line_no, w[2].second);
        }
        if (!graph) {
            graph.emplace(x.size());
        } else if (graph->size() != x.size()) {
            throw ParseError("configuration length differs from earlier lines", line_no, w[0].second);
        }
        std::optional<AutomatonSet> label;
        if (w.size() > 3) {
            std::string rest;
            for (std::size_t k = 3; k < w.size(); ++k) {
                rest += w[k].first;
            }
            if (rest.rfind("W=", 0) != 0) {
                throw ParseError("expected 'W={...}' after the target", line_no, w[3].second);
            }
            try {
                const UpdateSchedule block = parse_schedule(rest.substr(2));
                if (block.period() != 1) {
                    throw ParseError("exactly one update set expected", 0, 0);
                }
                label = block.block(0);
            } catch (const ParseError& e) {
                throw ParseError("bad update set: " + e.detail(), line_no, w[3].second);
            } catch (const PreconditionError& e) {
                throw ParseError(std::string("bad update set: ") + e.what(), line_no, w[3].second);
            }
            if (label->bound() > x.size()) {
                throw ParseError("update set mentions automata outside the network", line_no, w[3].second);
            }
        }
        graph->add(x, y, label, note);
    }
    if (!graph) {
        throw ParseError("no transitions found", line_no == 0 ? 1 : line_no, 0);
    }
    return *graph;
}

inline ObservedTransitionGraph load_observed(const std::string& path) {
    try {
        return parse_observed(read_text_file(path));
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.detail(), e.line(), e.column());
    }
}

inline json set_to_json(AutomatonSet s) {
    json out = json::array();
    for (std::size_t i : s.ids()) {
        out.push_back(i);
    }
    return out;
}

inline json schedule_to_json(const UpdateSchedule& s) {
    json blocks = json::array();
    for (AutomatonSet w : s.blocks()) {
        blocks.push_back(set_to_json(w));
    }
    return json{{"periodic", s.periodic()}, {"blocks", blocks}};
}

/// Accepts an array of arrays (periodic) or {"periodic": bool, "blocks": [...]}.
inline UpdateSchedule schedule_from_json(const json& j) {
    const json* blocks = &j;
    bool periodic = true;
    if (j.is_object()) {
        periodic = j.value("periodic", true);
        if (!j.contains("blocks")) {
            throw ParseError("schedule object needs a 'blocks' field", 0, 0);
        }
        blocks = &j.at("blocks");
    }
    if (!blocks->is_array()) {
        throw ParseError("schedule blocks must be an array of arrays", 0, 0);
    }
    std::vector<AutomatonSet> out;
    for (const json& b : *blocks) {
        if (!b.is_array()) {
            throw ParseError("schedule blocks must be an array of arrays", 0, 0);
        }
        AutomatonSet w;
        for (const json& i : b) {
            if (!i.is_number_unsigned()) {
                throw ParseError("automaton ids must be non-negative integers", 0, 0);
            }
            w.insert(i.get<std::size_t>());
        }
        out.push_back(w);
    }
    return UpdateSchedule(std::move(out), periodic);
}

inline json report_to_json(const AttractorReport& r) {
    auto configs = [](const std::vector<Configuration>& xs) {
        json out = json::array();
        for (const auto& x : xs) {
            out.push_back(x.text());
        }
        return out;
    };
    json osc = json::array();
    for (const auto& o : r.oscillations) {
        osc.push_back({{"configurations", configs(o.configurations)},
                       {"period", o.period},
                       {"nondeterministic", o.nondeterministic}});
    }
    return json{{"stable", configs(r.stable)},
                {"oscillations", osc},
                {"transient", configs(r.transient)},
                {"recurrent", configs(r.recurrent)}};
}

inline json graph_to_json(const TransitionGraph& g) {
    json nodes = json::array();
    for (std::size_t v : g.sorted_nodes()) {
        nodes.push_back({{"phase", g.node(v).phase}, {"configuration", g.node(v).configuration.text()}});
    }
    json arcs = json::array();
    for (const Arc& a : g.sorted_arcs()) {
        json arc{{"source", g.node(a.source).text()}, {"target", g.node(a.target).text()}};
        arc["label"] = a.label ? set_to_json(*a.label) : json(nullptr);
        arcs.push_back(arc);
    }
    return json{{"schema", json_schema_version},
                {"kind", to_string(g.kind())},
                {"n", g.size()},
                {"multigraph", g.multigraph()},
                {"nodes", nodes},
                {"arcs", arcs},
                {"report", report_to_json(attractors(g))}};
}

inline json matrix_to_json(const StochasticMatrix& p) {
    json entries = json::array();
    for (Bits x = 0; x < p.dimension(); ++x) {
        for (const auto& [y, q] : p.rows[x]) {
            entries.push_back(json::array({x, y, q}));
        }
    }
    return json{{"schema", json_schema_version}, {"n", p.n}, {"alpha", p.alpha}, {"entries", entries}};
}

inline json transition_to_json(const ObservedTransition& t) {
    json out{{"source", t.source.text()}, {"target", t.target.text()}};
    out["W"] = t.label ? set_to_json(*t.label) : json(nullptr);
    if (!t.note.empty()) {
        out["note"] = t.note;
    }
    return out;
}

inline json observed_to_json(const ObservedTransitionGraph& t) {
    json ts = json::array();
    for (const auto& tr : t.transitions()) {
        ts.push_back(transition_to_json(tr));
    }
    return json{{"schema", json_schema_version}, {"n", t.size()}, {"transitions", ts}};
}

inline ObservedTransitionGraph observed_from_json(const json& j) {
    if (!j.is_object() || !j.contains("transitions")) {
        throw ParseError("observed graph JSON needs a 'transitions' array", 0, 0);
    }
    std::optional<ObservedTransitionGraph> graph;
    if (j.contains("n")) {
        graph.emplace(j.at("n").get<std::size_t>());
    }
    for (const json& t : j.at("transitions")) {
        const auto x = Configuration::from_text(t.at("source").get<std::string>());
        const auto y = Configuration::from_text(t.at("target").get<std::string>());
        if (!graph) {
            graph.emplace(x.size());
        }
        std::optional<AutomatonSet> label;
        if (t.contains("W") && !t.at("W").is_null()) {
            AutomatonSet w;
            for (const json& i : t.at("W")) {
                w.insert(i.get<std::size_t>());
            }
            label = w;
        }
        graph->add(x, y, label, t.value("note", std::string()));
    }
    return graph ? *graph : ObservedTransitionGraph(0);
}

inline json inference_to_json(const InferenceReport& r) {
    json functions = json::array();
    for (const Expr& e : r.network.functions()) {
        functions.push_back(e.to_string());
    }
    json table = json::array();
    const std::size_t n = r.network.size();
    for (Bits x = 0; x < r.images.size(); ++x) {
        json row{{"x", Configuration(n, x).text()}, {"f", Configuration(n, r.images[x]).text()}};
        json prov = json::array();
        for (std::size_t i = 0; i < n; ++i) {
            prov.push_back(r.provenance(i, x));
        }
        row["provenance"] = prov;
        table.push_back(row);
    }
    json conflicts = json::array();
    for (const Conflict& c : r.conflicts) {
        json ts = json::array();
        for (const auto& t : c.transitions) {
            ts.push_back(transition_to_json(t));
        }
        conflicts.push_back({{"configuration", c.configuration.text()},
                             {"automaton", c.automaton},
                             {"kept", c.kept ? 1 : 0},
                             {"demanded", c.demanded ? 1 : 0},
                             {"reason", c.reason},
                             {"transitions", ts}});
    }
    json out{{"schema", json_schema_version}, {"functions", functions}, {"table", table}, {"conflicts", conflicts}};
    out["regenerates"] = r.regenerates ? json(*r.regenerates) : json(nullptr);
    return out;
}

inline json validation_to_json(const ValidationReport& r) {
    json ts = json::array();
    for (const auto& d : r.transitions) {
        json t = transition_to_json(d.transition);
        t["elementary"] = d.elementary;
        t["realizable"] = d.realizable;
        t["core"] = set_to_json(d.core);
        t["free"] = set_to_json(d.free);
        ts.push_back(t);
    }
    json findings = json::array();
    for (const auto& f : r.findings) {
        findings.push_back({{"kind", to_string(f.kind)}, {"message", f.message}});
    }
    return json{{"schema", json_schema_version}, {"consistent", r.consistent()}, {"transitions", ts},
                {"findings", findings}};
}

inline json trace_to_json(const SimulationResult& r) {
    json events = json::array();
    for (const Event& e : r.trace) {
        json ev{{"time", e.time}, {"kind", to_string(e.kind)}, {"automaton", e.automaton}};
        if (e.kind == EventKind::command_delivery) {
            ev["receiver"] = e.receiver;
        }
        ev["value"] = e.value ? 1 : 0;
        events.push_back(ev);
    }
    return json{{"schema", json_schema_version},
                {"events", events},
                {"final", {{"x", r.final_state.x.text()}, {"g", r.final_state.g.text()}}},
                {"end_time", r.end_time},
                {"truncated", r.truncated}};
}

}  // namespace banlab
