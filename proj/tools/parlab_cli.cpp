// Command-line front end: gallery games, classification, exact values,
// hard-coordinate chains, embedding-strategy simulation, uniformization.

#include <chrono>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "parlab/abelian.hpp"
#include "parlab/gallery.hpp"
#include "parlab/game.hpp"
#include "parlab/json_io.hpp"
#include "parlab/parrep.hpp"
#include "parlab/structure.hpp"
#include "parlab/uniformize.hpp"

namespace {

using namespace parlab;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitCap = 2;
constexpr int kExitInvalid = 3;

Game gallery_by_name(const std::string& name) {
    if (name == "ghz") return make_ghz();
    if (name == "anticorr") return make_anticorr();
    auto split = [](const std::string& s) {
        std::vector<std::string> parts;
        std::string cur;
        for (char c : s) {
            if (c == '-') {
                parts.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        parts.push_back(cur);
        return parts;
    };
    auto parts = split(name);
    try {
        if (parts[0] == "rect" && parts.size() == 3)
            return make_rectangle(std::stoi(parts[1]), std::stoi(parts[2]));
        if (parts[0] == "3cnf" && parts.size() == 4)
            return make_random_3cnf(std::stoi(parts[1]), std::stoi(parts[2]),
                                    std::stoull(parts[3]));
    } catch (const input_error&) {
        throw;
    } catch (const std::exception&) {
        throw input_error("malformed gallery name '" + name + "'");
    }
    throw input_error("unknown gallery entry '" + name +
                      "' (known: ghz, anticorr, rect-<k>-<s>, 3cnf-<m>-<d>-<seed>)");
}

// "gallery:<name>" or a path to a game JSON file
Game load_game(const std::string& ref) {
    if (ref.rfind("gallery:", 0) == 0) return gallery_by_name(ref.substr(8));
    return game_from_json(load_json_file(ref));
}

json report_envelope(const std::string& command, const std::string& inputs, const json& results,
                     const json& seeds, std::chrono::steady_clock::time_point started) {
    auto elapsed =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
    json rep;
    rep["version"] = "v1";
    rep["command"] = command;
    rep["inputs_digest"] = digest_hex(inputs);
    rep["seeds"] = seeds;
    rep["results"] = results;
    // the one non-reproducible field; everything else is deterministic
    rep["timing"] = {{"runtime_ms", elapsed.count()},
                     {"timestamp", std::chrono::duration_cast<std::chrono::seconds>(
                                       std::chrono::system_clock::now().time_since_epoch())
                                       .count()}};
    return rep;
}

json strategy_to_json(const Game& g, const ProductStrategy& s) {
    json tables = json::array();
    for (int j = 0; j < g.players; ++j) {
        json t = json::object();
        for (size_t q = 0; q < s.tables[j].size(); ++q)
            t[g.question_labels[j][q]] = g.answer_labels[j][s.tables[j][q]];
        tables.push_back(t);
    }
    return tables;
}

int run(int argc, char** argv) {
    CLI::App app{"laboratory for finite multiplayer games under parallel repetition"};
    app.require_subcommand(1);

    std::string game_ref, event_path, functions_path, gallery_name;
    int repeat = 1;
    int64_t strategy_cap = Caps{}.strategy_evaluations;
    bool exact = false;
    int trials = 20000, schedule = 4;
    std::string delta_str = "1/2";
    double gamma = 0.25, udelta = 0.25;
    uint64_t seed = 0;

    auto* cmd_gallery = app.add_subcommand("gallery", "emit a gallery game as JSON");
    cmd_gallery->add_option("name", gallery_name, "ghz | anticorr | rect-<k>-<s> | 3cnf-<m>-<d>-<seed>")
        ->required();

    auto* cmd_classify = app.add_subcommand("classify", "connectivity and embedding classification");
    cmd_classify->add_option("game", game_ref, "game JSON path or gallery:<name>")->required();

    auto* cmd_value = app.add_subcommand("value", "exact game value by exhaustive search");
    cmd_value->add_option("game", game_ref)->required();
    cmd_value->add_option("--repeat", repeat, "analyze the n-fold repetition");
    cmd_value->add_option("--cap", strategy_cap, "strategy evaluation cap");

    auto* cmd_chain = app.add_subcommand("chain", "greedy hard-coordinate chain of the optimal strategy");
    cmd_chain->add_option("game", game_ref)->required();
    cmd_chain->add_option("--repeat", repeat)->required();
    cmd_chain->add_option("--cap", strategy_cap);

    auto* cmd_embed = app.add_subcommand("simulate-embed", "embedding strategy for one copy");
    cmd_embed->add_option("game", game_ref)->required();
    cmd_embed->add_option("--repeat", repeat)->required();
    cmd_embed->add_option("--event", event_path, "product event JSON file")->required();
    cmd_embed->add_flag("--exact", exact, "enumerate the randomness space exactly");
    cmd_embed->add_option("--trials", trials);
    cmd_embed->add_option("--delta", delta_str, "schedule base as a rational");
    cmd_embed->add_option("--schedule", schedule, "schedule length T");
    cmd_embed->add_option("--seed", seed);

    auto* cmd_uniformize = app.add_subcommand("uniformize", "make functions product-pseudorandom");
    cmd_uniformize->add_option("functions", functions_path, "function family JSON file")->required();
    cmd_uniformize->add_option("--gamma", gamma, "correlation threshold");
    cmd_uniformize->add_option("--delta", udelta, "bad-probability target");
    cmd_uniformize->add_option("--seed", seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    auto started = std::chrono::steady_clock::now();

    if (cmd_gallery->parsed()) {
        Game g = gallery_by_name(gallery_name);
        std::cout << game_to_json(g).dump(2) << "\n";
        return kExitOk;
    }

    if (cmd_classify->parsed()) {
        Game g = load_game(game_ref);
        SupportSet s = game_support(g);
        json results;
        results["structure"] = structure_report_to_json(classify(s));
        auto witness = universal_embedding(s);
        results["embedding"] = witness_to_json(witness);
        auto zw = has_Z_embedding(s);
        results["z_embedding"] = zw ? z_witness_to_json(*zw) : json(nullptr);
        auto marginal = check_marginal_condition(s);
        results["marginal_condition"] = {{"pairwise_connected", marginal.pairwise_connected},
                                         {"holds", marginal.holds}};
        json flags = json::array();
        for (auto f : marginal.marginal_has_no_embedding) flags.push_back(static_cast<bool>(f));
        results["marginal_condition"]["marginal_has_no_embedding"] = flags;
        std::cout << report_envelope("classify", game_to_json(g).dump(), results, json::object(), started)
                         .dump(2)
                  << "\n";
        return kExitOk;
    }

    if (cmd_value->parsed()) {
        Game g = load_game(game_ref);
        Caps caps;
        caps.strategy_evaluations = strategy_cap;
        Game target = repeat > 1 ? repeat_game(g, repeat, caps) : g;
        auto [val, strategy] = value(target, caps);
        json results;
        results["value"] = rational_to_string(val);
        results["repeat"] = repeat;
        results["strategy"] = strategy_to_json(target, strategy);
        std::cout << report_envelope("value", game_to_json(g).dump() + std::to_string(repeat), results,
                                     json::object(), started)
                         .dump(2)
                  << "\n";
        return kExitOk;
    }

    if (cmd_chain->parsed()) {
        Game g = load_game(game_ref);
        Caps caps;
        caps.strategy_evaluations = strategy_cap;
        Game rep = repeat_game(g, repeat, caps);
        auto [val, strategy] = value(rep, caps);
        auto chain = greedy_hard_chain(rep, strategy);
        json results;
        results["value"] = rational_to_string(val);
        json probs = json::array();
        for (const auto& p : chain.prefix_win_probability) probs.push_back(rational_to_string(p));
        results["prefix_win_probability"] = probs;
        results["leading_coordinates"] = chain.leading_coordinates;
        json tuples = json::array();
        for (auto [q, a] : chain.leading_tuples) tuples.push_back({{"question", q}, {"answer", a}});
        results["leading_tuples"] = tuples;
        std::cout << report_envelope("chain", game_to_json(g).dump() + std::to_string(repeat), results,
                                     json::object(), started)
                         .dump(2)
                  << "\n";
        return kExitOk;
    }

    if (cmd_embed->parsed()) {
        Game g = load_game(game_ref);
        Game rep = repeat_game(g, repeat);
        auto base_opt = value(g).second;
        ProductStrategy strategy = independent_strategy(rep, base_opt);
        ProductEvent event = event_from_json(rep, load_json_file(event_path));
        EmbeddingConfig cfg;
        cfg.delta = parse_rational(delta_str);
        cfg.schedule_length = schedule;
        cfg.exact = exact;
        cfg.trials = trials;
        cfg.seed = seed;
        auto sim = simulate_embedding_strategy(rep, strategy, event, cfg);
        json results;
        results["exact"] = sim.exact;
        results["losing_estimate"] = sim.losing_estimate;
        if (sim.exact) {
            results["losing_probability"] = rational_to_string(sim.losing_probability);
            results["mean_coordinate_loss"] = rational_to_string(sim.mean_coordinate_loss);
            results["consistency_failure_rate"] = rational_to_string(sim.consistency_failure_rate);
            results["drift_term"] = rational_to_string(sim.drift_term);
            results["conditioned_loss_term"] = rational_to_string(sim.conditioned_loss_term);
            results["decomposition_identity"] = sim.decomposition_identity_ok;
        } else {
            results["losing_radius"] = sim.losing_radius;
        }
        std::cout << report_envelope("simulate-embed",
                                     game_to_json(g).dump() + std::to_string(repeat) + event_path, results,
                                     json{{"seed", seed}}, started)
                         .dump(2)
                  << "\n";
        return kExitOk;
    }

    if (cmd_uniformize->parsed()) {
        json spec = load_json_file(functions_path);
        ProbabilitySpace space;
        int dimension = 0;
        std::vector<FunctionTable> functions;
        try {
            std::vector<Rational> mass;
            for (const auto& m : spec.at("measure")) mass.push_back(parse_rational(m.get<std::string>()));
            space = ProbabilitySpace::from_rationals(std::move(mass));
            dimension = spec.at("dimension").get<int>();
            for (const auto& fn : spec.at("functions")) {
                FunctionTable t = FunctionTable::constant(space, dimension, 0.0);
                if (fn.size() != t.v.size()) throw input_error("function table has the wrong size");
                for (size_t i = 0; i < t.v.size(); ++i)
                    t.v[i] = std::complex<double>(fn[i][0].get<double>(), fn[i][1].get<double>());
                functions.push_back(std::move(t));
            }
        } catch (const json::exception& ex) {
            throw input_error(std::string("malformed function family: ") + ex.what());
        }
        if (functions.empty()) throw input_error("no functions to uniformize");
        auto out = uniformize(functions, udelta, gamma, seed);
        json results;
        results["grr"] = grr_to_json(out.grr);
        results["iterations"] = out.report.iterations;
        results["converged"] = out.report.converged;
        results["stop_reason"] = out.report.stop_reason;
        results["bad_probability"] = out.report.final_bad_probability;
        results["potential_trace"] = out.report.potential_trace;
        std::cout << report_envelope("uniformize", spec.dump(), results, json{{"seed", seed}}, started)
                         .dump(2)
                  << "\n";
        return kExitOk;
    }

    return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const parlab::cap_exceeded& e) {
        std::cerr << "cap exceeded: " << e.what() << "\n";
        return kExitCap;
    } catch (const parlab::no_certificate_error& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const parlab::input_error& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
}
