#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "parlab/abelian.hpp"
#include "parlab/game.hpp"
#include "parlab/restriction.hpp"
#include "parlab/structure.hpp"

namespace parlab {

using nlohmann::json;

// ------------------------------------------------------------ game format --
// {"players": k, "questions": [[labels]...], "answers": [[labels]...],
//  "distribution": [{"q": [labels], "p": "num/den"}...],
//  "predicate": [{"q": [...], "a": [...], "win": bool}...]}
// Omitted predicate rows lose; probabilities are rational strings.

inline json game_to_json(const Game& g) {
    json out;
    out["players"] = g.players;
    out["questions"] = g.question_labels;
    out["answers"] = g.answer_labels;
    Box qb = g.question_box(), ab = g.answer_box();
    json dist = json::array();
    std::vector<int> q(g.players), a(g.players);
    for (int64_t f = 0; f < qb.size(); ++f) {
        if (g.query[f] == 0) continue;
        qb.unflatten_into(f, q);
        json row;
        row["q"] = json::array();
        for (int j = 0; j < g.players; ++j) row["q"].push_back(g.question_labels[j][q[j]]);
        row["p"] = rational_to_string(g.query[f]);
        dist.push_back(row);
    }
    out["distribution"] = dist;
    json pred = json::array();
    for (int64_t f = 0; f < qb.size(); ++f) {
        qb.unflatten_into(f, q);
        for (int64_t af = 0; af < ab.size(); ++af) {
            if (!g.predicate[f * ab.size() + af]) continue;  // lose rows are implicit
            ab.unflatten_into(af, a);
            json row;
            row["q"] = json::array();
            row["a"] = json::array();
            for (int j = 0; j < g.players; ++j) {
                row["q"].push_back(g.question_labels[j][q[j]]);
                row["a"].push_back(g.answer_labels[j][a[j]]);
            }
            row["win"] = true;
            pred.push_back(row);
        }
    }
    out["predicate"] = pred;
    return out;
}

namespace detail {

inline int label_index(const std::vector<std::string>& labels, const std::string& label,
                       const std::string& what) {
    for (size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == label) return static_cast<int>(i);
    throw input_error("unknown " + what + " label '" + label + "'");
}

}  // namespace detail

inline Game game_from_json(const json& in) {
    Game g;
    try {
        g.players = in.at("players").get<int>();
        g.question_labels = in.at("questions").get<std::vector<std::vector<std::string>>>();
        g.answer_labels = in.at("answers").get<std::vector<std::vector<std::string>>>();
    } catch (const json::exception& ex) {
        throw input_error(std::string("malformed game: ") + ex.what());
    }
    if (g.players <= 0 || static_cast<int>(g.question_labels.size()) != g.players ||
        static_cast<int>(g.answer_labels.size()) != g.players)
        throw input_error("malformed game: alphabet count does not match player count");
    for (int j = 0; j < g.players; ++j)
        if (g.question_labels[j].empty() || g.answer_labels[j].empty())
            throw input_error("malformed game: empty alphabet");

    Box qb = g.question_box(), ab = g.answer_box();
    g.query.assign(qb.size(), Rational(0));
    if (!in.contains("distribution") || !in["distribution"].is_array())
        throw input_error("malformed game: missing distribution");
    std::vector<int> q(g.players), a(g.players);
    for (const auto& row : in["distribution"]) {
        auto labels = row.at("q").get<std::vector<std::string>>();
        if (static_cast<int>(labels.size()) != g.players)
            throw input_error("malformed game: distribution row arity");
        for (int j = 0; j < g.players; ++j)
            q[j] = detail::label_index(g.question_labels[j], labels[j], "question");
        g.query[qb.flatten(q)] += parse_rational(row.at("p").get<std::string>());
    }
    g.predicate.assign(qb.size() * ab.size(), 0);
    if (in.contains("predicate")) {
        for (const auto& row : in["predicate"]) {
            auto qlabels = row.at("q").get<std::vector<std::string>>();
            auto alabels = row.at("a").get<std::vector<std::string>>();
            if (static_cast<int>(qlabels.size()) != g.players ||
                static_cast<int>(alabels.size()) != g.players)
                throw input_error("malformed game: predicate row arity");
            for (int j = 0; j < g.players; ++j) {
                q[j] = detail::label_index(g.question_labels[j], qlabels[j], "question");
                a[j] = detail::label_index(g.answer_labels[j], alabels[j], "answer");
            }
            bool win = row.value("win", true);
            g.predicate[qb.flatten(q) * ab.size() + ab.flatten(a)] = win ? 1 : 0;
        }
    }
    auto report = validate_game(g);
    if (!report.ok()) {
        std::string msg = "invalid game:";
        for (const auto& v : report.violations) msg += " " + v + ";";
        throw input_error(msg);
    }
    return g;
}

// ------------------------------------------------------------ event format --
// {"arity": n, "players": [["x,y", ...], ...]}: per player, the list of
// question tuples (base labels joined by commas) the player's event contains.

inline json event_to_json(const Game& g_rep, const ProductEvent& e) {
    json out;
    out["arity"] = e.arity;
    json players = json::array();
    for (int j = 0; j < g_rep.players; ++j) {
        json list = json::array();
        for (size_t q = 0; q < e.member[j].size(); ++q)
            if (e.member[j][q]) list.push_back(g_rep.question_labels[j][q]);
        players.push_back(list);
    }
    out["players"] = players;
    return out;
}

inline ProductEvent event_from_json(const Game& g_rep, const json& in) {
    ProductEvent e;
    try {
        e.arity = in.at("arity").get<int>();
    } catch (const json::exception& ex) {
        throw input_error(std::string("malformed event: ") + ex.what());
    }
    if (e.arity != g_rep.copies) throw input_error("event arity does not match the game");
    auto players = in.at("players");
    if (!players.is_array() || static_cast<int>(players.size()) != g_rep.players)
        throw input_error("malformed event: needs one list per player");
    for (int j = 0; j < g_rep.players; ++j) {
        std::vector<uint8_t> member(g_rep.question_labels[j].size(), 0);
        for (const auto& label : players[j]) {
            member[detail::label_index(g_rep.question_labels[j], label.get<std::string>(), "question")] = 1;
        }
        e.member.push_back(std::move(member));
    }
    return e;
}

// ------------------------------------------------------- witnesses, reports --

inline json witness_to_json(const EmbeddingWitness& w) {
    json out;
    out["trivial"] = w.trivial;
    json torsion = json::array();
    for (const auto& d : w.group.torsion) torsion.push_back(d.get_str());
    out["group"] = {{"free_rank", w.group.free_rank}, {"torsion", torsion}};
    json sigma = json::array();
    for (const auto& per_coord : w.sigma) {
        json coord = json::array();
        for (const auto& per_label : per_coord) {
            json vec = json::array();
            for (const auto& c : per_label) vec.push_back(c.get_str());
            coord.push_back(vec);
        }
        sigma.push_back(coord);
    }
    out["sigma"] = sigma;
    return out;
}

inline json z_witness_to_json(const ZEmbeddingWitness& w) {
    json sigma = json::array();
    for (const auto& per_coord : w.sigma) {
        json coord = json::array();
        for (const auto& v : per_coord) coord.push_back(v.get_str());
        sigma.push_back(coord);
    }
    return json{{"sigma", sigma}};
}

inline json structure_report_to_json(const StructureReport& r) {
    json out;
    out["connected"] = r.connected;
    out["coordinatewise_connected"] = r.coordinatewise_connected;
    out["pairwise_connected"] = r.pairwise_connected;
    out["full_projections"] = r.full_projections;
    out["per_coordinate_connected"] = json::array();
    for (auto f : r.per_coordinate_connected) out["per_coordinate_connected"].push_back(static_cast<bool>(f));
    if (r.pairwise_witness) {
        out["pairwise_witness"] = {{"left_coordinate", r.pairwise_witness->coord_left},
                                   {"right_coordinate", r.pairwise_witness->coord_right},
                                   {"left_part", r.pairwise_witness->left_part},
                                   {"right_part", r.pairwise_witness->right_part}};
    }
    return out;
}

inline json grr_to_json(const GeneralizedRandomRestriction& grr) {
    json atoms = json::array();
    for (const auto& [rho, w] : grr.atoms) {
        atoms.push_back({{"classes", rho.classes},
                         {"fixed", rho.fixed},
                         {"values", rho.values},
                         {"weight", rational_to_string(w)}});
    }
    return json{{"n", grr.n},
                {"min_free", grr.declared_min_free},
                {"epsilon", rational_to_string(grr.declared_epsilon)},
                {"atoms", atoms}};
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& ex) {
        throw input_error("cannot parse '" + path + "': " + ex.what());
    }
    return j;
}

// FNV-1a, for the inputs digest in reports.
inline std::string digest_hex(const std::string& data) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream out;
    out << std::hex << h;
    return out.str();
}

}  // namespace parlab
