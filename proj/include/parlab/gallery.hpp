#pragma once

#include <random>
#include <string>
#include <vector>

#include "parlab/game.hpp"

namespace parlab {

namespace detail {

inline std::vector<std::string> binary_labels() { return {"0", "1"}; }

inline Game uniform_support_game(int players, std::vector<std::vector<int>> support) {
    Game g;
    g.players = players;
    for (int j = 0; j < players; ++j) {
        g.question_labels.push_back(binary_labels());
        g.answer_labels.push_back(binary_labels());
    }
    Box qb = g.question_box(), ab = g.answer_box();
    g.query.assign(qb.size(), Rational(0));
    Rational w(1, static_cast<long>(support.size()));
    for (const auto& t : support) g.query[qb.flatten(t)] = w;
    g.predicate.assign(qb.size() * ab.size(), 0);
    return g;
}

}  // namespace detail

// Three players, questions uniform on the even-parity triples, win iff the
// answer parity equals x1 | x2 | x3. The question support is forced; the
// predicate is a conventional choice (the usual GHZ-style XOR check).
inline Game make_ghz() {
    Game g = detail::uniform_support_game(3, {{0, 0, 0}, {0, 1, 1}, {1, 0, 1}, {1, 1, 0}});
    Box qb = g.question_box(), ab = g.answer_box();
    std::vector<int> q(3), a(3);
    for (int64_t f = 0; f < qb.size(); ++f) {
        qb.unflatten_into(f, q);
        for (int64_t af = 0; af < ab.size(); ++af) {
            ab.unflatten_into(af, a);
            int lhs = a[0] ^ a[1] ^ a[2];
            int rhs = q[0] | q[1] | q[2];
            g.predicate[f * ab.size() + af] = (lhs == rhs) ? 1 : 0;
        }
    }
    return g;
}

// Three players, questions uniform on {(0,0,1),(0,1,0),(1,0,0)}. Only the
// support matters for classification; the predicate is a conventional
// even-parity XOR check.
inline Game make_anticorr() {
    Game g = detail::uniform_support_game(3, {{0, 0, 1}, {0, 1, 0}, {1, 0, 0}});
    Box qb = g.question_box(), ab = g.answer_box();
    std::vector<int> a(3);
    for (int64_t f = 0; f < qb.size(); ++f) {
        for (int64_t af = 0; af < ab.size(); ++af) {
            ab.unflatten_into(af, a);
            g.predicate[f * ab.size() + af] = ((a[0] ^ a[1] ^ a[2]) == 0) ? 1 : 0;
        }
    }
    return g;
}

// k players, uniform over the full question rectangle, predicate identically
// winning. Interesting only through its support.
inline Game make_rectangle(int players, int alphabet, const Caps& caps = {}) {
    if (players < 1 || alphabet < 1) throw input_error("rectangle: need at least one player and one label");
    Game g;
    g.players = players;
    int64_t cells = 1;
    for (int j = 0; j < players; ++j) {
        std::vector<std::string> labels;
        for (int a = 0; a < alphabet; ++a) labels.push_back(std::to_string(a));
        g.question_labels.push_back(labels);
        g.answer_labels.push_back(detail::binary_labels());
        if (cells > caps.table_cells / (2 * alphabet)) throw cap_exceeded("rectangle: table exceeds cap");
        cells *= 2 * alphabet;
    }
    Box qb = g.question_box(), ab = g.answer_box();
    g.query.assign(qb.size(), Rational(1, static_cast<long>(qb.size())));
    g.predicate.assign(qb.size() * ab.size(), 1);
    return g;
}

struct Cnf3Clause {
    int var[3];
    int negated[3];
};

inline std::vector<Cnf3Clause> sample_3cnf(int clauses, int variables, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> var_of(0, variables - 1);
    std::uniform_int_distribution<int> sign_of(0, 1);
    std::vector<Cnf3Clause> out;
    out.reserve(clauses);
    for (int c = 0; c < clauses; ++c) {
        Cnf3Clause cl{};
        for (int i = 0; i < 3; ++i) {
            cl.var[i] = var_of(rng);
            cl.negated[i] = sign_of(rng);
        }
        out.push_back(cl);
    }
    return out;
}

// Random 3-CNF game: each clause drawn uniformly from the 8d^3 possibilities,
// the verifier picks a clause uniformly and sends its three variables, the
// players each assign their variable. When several clauses share a variable
// triple, winning requires satisfying all of them (the question alone cannot
// tell them apart).
inline Game make_random_3cnf(int clauses, int variables, uint64_t seed, const Caps& caps = {}) {
    if (clauses < 1 || variables < 1) throw input_error("3cnf: need at least one clause and one variable");
    if (static_cast<int64_t>(variables) * variables * variables > caps.table_cells / 8)
        throw cap_exceeded("3cnf: table exceeds cap");
    auto formula = sample_3cnf(clauses, variables, seed);
    Game g;
    g.players = 3;
    for (int j = 0; j < 3; ++j) {
        std::vector<std::string> labels;
        for (int v = 0; v < variables; ++v) labels.push_back("x" + std::to_string(v));
        g.question_labels.push_back(labels);
        g.answer_labels.push_back(detail::binary_labels());
    }
    Box qb = g.question_box(), ab = g.answer_box();
    g.query.assign(qb.size(), Rational(0));
    Rational w(1, static_cast<long>(clauses));
    for (const auto& cl : formula) g.query[qb.flatten({cl.var[0], cl.var[1], cl.var[2]})] += w;

    g.predicate.assign(qb.size() * ab.size(), 0);
    std::vector<int> q(3), a(3);
    for (int64_t f = 0; f < qb.size(); ++f) {
        qb.unflatten_into(f, q);
        for (int64_t af = 0; af < ab.size(); ++af) {
            ab.unflatten_into(af, a);
            bool win = true;
            for (const auto& cl : formula) {
                if (cl.var[0] != q[0] || cl.var[1] != q[1] || cl.var[2] != q[2]) continue;
                bool sat = false;
                for (int i = 0; i < 3 && !sat; ++i) sat = (a[i] == (cl.negated[i] ? 0 : 1));
                if (!sat) {
                    win = false;
                    break;
                }
            }
            g.predicate[f * ab.size() + af] = win ? 1 : 0;
        }
    }
    return g;
}

}  // namespace parlab
