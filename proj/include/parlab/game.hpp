#pragma once

#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "parlab/generalized_restriction.hpp"
#include "parlab/multi_index.hpp"
#include "parlab/rational.hpp"
#include "parlab/support.hpp"

namespace parlab {

// Exhaustive computations refuse to run past these limits.
struct Caps {
    int64_t strategy_evaluations = 100'000'000;
    int64_t table_cells = int64_t{1} << 26;
};

// Finite k-player game: exact-rational query distribution over the joint
// question space, total win/lose predicate. Everything is dense and indexed;
// labels are kept for I/O only.
struct Game {
    int players = 0;
    std::vector<std::vector<std::string>> question_labels;  // per player
    std::vector<std::vector<std::string>> answer_labels;    // per player
    std::vector<Rational> query;                            // dense over question_box()
    std::vector<uint8_t> predicate;                         // dense over question_box() x answer_box()

    // Set by repeat_game so per-coordinate quantities stay computable.
    std::shared_ptr<const Game> base;
    int copies = 1;

    Box question_box() const {
        std::vector<int> r;
        for (const auto& a : question_labels) r.push_back(static_cast<int>(a.size()));
        return Box(r);
    }
    Box answer_box() const {
        std::vector<int> r;
        for (const auto& a : answer_labels) r.push_back(static_cast<int>(a.size()));
        return Box(r);
    }
    bool wins(int64_t qflat, int64_t aflat) const {
        return predicate[qflat * answer_box().size() + aflat] != 0;
    }
};

// Total per-player answer tables for an n-fold repeated game (n = arity).
// tables[j][q] is player j's answer index for their full question index q.
struct ProductStrategy {
    int arity = 1;
    std::vector<std::vector<int>> tables;
};

// Explicit product event: per-player membership over the player's full
// question space, so conditional probabilities are exact counting.
struct ProductEvent {
    int arity = 1;
    std::vector<std::vector<uint8_t>> member;  // per player, dense

    static ProductEvent full(const Game& g) {
        ProductEvent e;
        e.arity = g.copies;
        for (int j = 0; j < g.players; ++j)
            e.member.emplace_back(g.question_labels[j].size(), uint8_t{1});
        return e;
    }

    bool contains(const std::vector<int>& per_player_q) const {
        for (size_t j = 0; j < member.size(); ++j)
            if (!member[j][per_player_q[j]]) return false;
        return true;
    }
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

inline ValidationReport validate_game(const Game& g) {
    ValidationReport rep;
    if (g.players <= 0) rep.violations.push_back("no players");
    if (static_cast<int>(g.question_labels.size()) != g.players ||
        static_cast<int>(g.answer_labels.size()) != g.players) {
        rep.violations.push_back("alphabet count does not match player count");
        return rep;
    }
    for (int j = 0; j < g.players; ++j) {
        if (g.question_labels[j].empty()) rep.violations.push_back("empty question alphabet, player " + std::to_string(j + 1));
        if (g.answer_labels[j].empty()) rep.violations.push_back("empty answer alphabet, player " + std::to_string(j + 1));
    }
    if (!rep.ok()) return rep;
    Box qb = g.question_box(), ab = g.answer_box();
    if (static_cast<int64_t>(g.query.size()) != qb.size())
        rep.violations.push_back("distribution not total");
    else {
        Rational mass = 0;
        for (const auto& p : g.query) {
            if (p < 0) rep.violations.push_back("negative probability");
            mass += p;
        }
        if (mass != 1) rep.violations.push_back("mass " + rational_to_string(mass) + " != 1");
    }
    if (static_cast<int64_t>(g.predicate.size()) != qb.size() * ab.size())
        rep.violations.push_back("predicate not total");
    return rep;
}

inline SupportSet game_support(const Game& g) {
    SupportSet s;
    s.alphabets = g.question_labels;
    Box qb = g.question_box();
    std::vector<int> d(g.players, 0);
    for (int64_t f = 0; f < qb.size(); ++f) {
        if (g.query[f] > 0) {
            qb.unflatten_into(f, d);
            s.tuples.push_back(d);
        }
    }
    s.check();
    return s;
}

namespace detail {

inline std::string join_labels(const std::vector<std::string>& labels, const std::vector<int>& idx) {
    std::string out;
    for (size_t i = 0; i < idx.size(); ++i) {
        if (i) out += ",";
        out += labels[idx[i]];
    }
    return out;
}

// Product alphabet labels for n copies, index order = Box over n axes.
inline std::vector<std::string> power_labels(const std::vector<std::string>& labels, int n) {
    Box b(std::vector<int>(n, static_cast<int>(labels.size())));
    std::vector<std::string> out;
    out.reserve(b.size());
    std::vector<int> d(n, 0);
    for (int64_t f = 0; f < b.size(); ++f) {
        b.unflatten_into(f, d);
        out.push_back(join_labels(labels, d));
    }
    return out;
}

}  // namespace detail

// n-fold parallel repetition: product alphabets, product query distribution,
// conjunction predicate.
inline Game repeat_game(const Game& g, int n, const Caps& caps = {}) {
    if (n < 1) throw input_error("repeat_game: n must be >= 1");
    Game r;
    r.players = g.players;
    r.base = std::make_shared<Game>(g);
    r.copies = n;
    std::vector<int64_t> qsize(g.players), asize(g.players);
    int64_t qspace = 1, aspace = 1;
    for (int j = 0; j < g.players; ++j) {
        qsize[j] = checked_ipow(static_cast<int64_t>(g.question_labels[j].size()), n, caps.table_cells);
        asize[j] = checked_ipow(static_cast<int64_t>(g.answer_labels[j].size()), n, caps.table_cells);
        if (qspace > caps.table_cells / qsize[j])
            throw cap_exceeded("repeat_game: question space of player " + std::to_string(j + 1) + " exceeds cap");
        qspace *= qsize[j];
        if (aspace > caps.table_cells / asize[j])
            throw cap_exceeded("repeat_game: answer space of player " + std::to_string(j + 1) + " exceeds cap");
        aspace *= asize[j];
        r.question_labels.push_back(detail::power_labels(g.question_labels[j], n));
        r.answer_labels.push_back(detail::power_labels(g.answer_labels[j], n));
    }
    if (qspace > caps.table_cells / aspace)
        throw cap_exceeded("repeat_game: predicate table exceeds cap");

    Box qb = r.question_box(), ab = r.answer_box();
    Box qb0 = g.question_box(), ab0 = g.answer_box();

    // per-player digit decompositions, reused below
    std::vector<Box> qpow, apow;
    for (int j = 0; j < g.players; ++j) {
        qpow.emplace_back(std::vector<int>(n, static_cast<int>(g.question_labels[j].size())));
        apow.emplace_back(std::vector<int>(n, static_cast<int>(g.answer_labels[j].size())));
    }

    r.query.assign(qb.size(), Rational(0));
    std::vector<int> per_player(g.players), digits;
    std::vector<std::vector<int>> qdigits(g.players);
    for (int64_t f = 0; f < qb.size(); ++f) {
        qb.unflatten_into(f, per_player);
        for (int j = 0; j < g.players; ++j) qpow[j].unflatten_into(per_player[j], qdigits[j]);
        Rational p = 1;
        std::vector<int> base_q(g.players);
        for (int i = 0; i < n && p != 0; ++i) {
            for (int j = 0; j < g.players; ++j) base_q[j] = qdigits[j][i];
            p *= g.query[qb0.flatten(base_q)];
        }
        r.query[f] = p;
    }

    r.predicate.assign(qb.size() * ab.size(), 0);
    std::vector<int> per_player_a(g.players);
    std::vector<std::vector<int>> adigits(g.players);
    for (int64_t f = 0; f < qb.size(); ++f) {
        qb.unflatten_into(f, per_player);
        for (int j = 0; j < g.players; ++j) qpow[j].unflatten_into(per_player[j], qdigits[j]);
        for (int64_t af = 0; af < ab.size(); ++af) {
            ab.unflatten_into(af, per_player_a);
            for (int j = 0; j < g.players; ++j) apow[j].unflatten_into(per_player_a[j], adigits[j]);
            bool win = true;
            std::vector<int> base_q(g.players), base_a(g.players);
            for (int i = 0; i < n && win; ++i) {
                for (int j = 0; j < g.players; ++j) {
                    base_q[j] = qdigits[j][i];
                    base_a[j] = adigits[j][i];
                }
                win = g.predicate[qb0.flatten(base_q) * ab0.size() + ab0.flatten(base_a)] != 0;
            }
            r.predicate[f * ab.size() + af] = win ? 1 : 0;
        }
    }
    return r;
}

inline void check_strategy(const Game& g, const ProductStrategy& s) {
    if (static_cast<int>(s.tables.size()) != g.players) throw input_error("strategy: player count mismatch");
    if (s.arity != g.copies) throw input_error("strategy: arity mismatch");
    for (int j = 0; j < g.players; ++j) {
        if (s.tables[j].size() != g.question_labels[j].size()) throw input_error("strategy: table not total");
        for (int a : s.tables[j])
            if (a < 0 || a >= static_cast<int>(g.answer_labels[j].size()))
                throw input_error("strategy: answer out of range");
    }
}

inline void check_event(const Game& g, const ProductEvent& e) {
    if (static_cast<int>(e.member.size()) != g.players) throw input_error("event: player count mismatch");
    if (e.arity != g.copies) throw input_error("event: arity mismatch");
    for (int j = 0; j < g.players; ++j)
        if (e.member[j].size() != g.question_labels[j].size()) throw input_error("event: set not total");
}

inline Rational win_probability(const Game& g, const ProductStrategy& s) {
    check_strategy(g, s);
    Box qb = g.question_box();
    int64_t aspace = g.answer_box().size();
    std::vector<int> astride(g.players, 1);
    for (int j = g.players - 2; j >= 0; --j)
        astride[j] = astride[j + 1] * static_cast<int>(g.answer_labels[j + 1].size());
    Rational total = 0;
    std::vector<int> q(g.players);
    for (int64_t f = 0; f < qb.size(); ++f) {
        if (g.query[f] == 0) continue;
        qb.unflatten_into(f, q);
        int64_t aflat = 0;
        for (int j = 0; j < g.players; ++j) aflat += int64_t{astride[j]} * s.tables[j][q[j]];
        if (g.predicate[f * aspace + aflat]) total += g.query[f];
    }
    return total;
}

inline Rational event_probability(const Game& g, const ProductEvent& e) {
    check_event(g, e);
    Box qb = g.question_box();
    Rational total = 0;
    std::vector<int> q(g.players);
    for (int64_t f = 0; f < qb.size(); ++f) {
        if (g.query[f] == 0) continue;
        qb.unflatten_into(f, q);
        if (e.contains(q)) total += g.query[f];
    }
    return total;
}

namespace detail {

// Support point with integer weight (query mass times a common denominator).
struct SupportPoint {
    int64_t predicate_row;  // qflat * aspace
    std::vector<int> q;     // per-player question indices
};

template <class Weight>
std::pair<Rational, ProductStrategy> value_search(const Game& g, const std::vector<SupportPoint>& pts,
                                                  const std::vector<Weight>& w, const Integer& denom) {
    const int k = g.players;
    std::vector<int> astride(k, 1);
    for (int j = k - 2; j >= 0; --j) astride[j] = astride[j + 1] * static_cast<int>(g.answer_labels[j + 1].size());

    // digit layout: player 0 question 0, player 0 question 1, ..., player k-1 last question
    std::vector<int> digit_player, digit_question, digit_radix;
    for (int j = 0; j < k; ++j)
        for (size_t q = 0; q < g.question_labels[j].size(); ++q) {
            digit_player.push_back(j);
            digit_question.push_back(static_cast<int>(q));
            digit_radix.push_back(static_cast<int>(g.answer_labels[j].size()));
        }
    const int nd = static_cast<int>(digit_player.size());

    // support points touched by each digit
    std::vector<std::vector<int>> touched(nd);
    for (size_t p = 0; p < pts.size(); ++p) {
        int off = 0;
        for (int j = 0; j < k; ++j) {
            touched[off + pts[p].q[j]].push_back(static_cast<int>(p));
            off += static_cast<int>(g.question_labels[j].size());
        }
    }

    std::vector<int64_t> aflat(pts.size(), 0);
    std::vector<uint8_t> winning(pts.size());
    Weight sum = 0;
    for (size_t p = 0; p < pts.size(); ++p) {
        winning[p] = g.predicate[pts[p].predicate_row];
        if (winning[p]) sum += w[p];
    }

    std::vector<int> digits(nd, 0), best_digits = digits;
    Weight best = sum;

    auto apply_change = [&](int d, int delta) {
        int64_t shift = int64_t{astride[digit_player[d]]} * delta;
        for (int p : touched[d]) {
            aflat[p] += shift;
            uint8_t win = g.predicate[pts[p].predicate_row + aflat[p]];
            if (win != winning[p]) {
                if (win)
                    sum += w[p];
                else
                    sum -= w[p];
                winning[p] = win;
            }
        }
    };

    while (true) {
        // odometer: last digit fastest => strategies visited in lexicographic order
        int d = nd - 1;
        while (d >= 0 && digits[d] + 1 == digit_radix[d]) {
            apply_change(d, -digits[d]);
            digits[d] = 0;
            --d;
        }
        if (d < 0) break;
        apply_change(d, +1);
        ++digits[d];
        if (sum > best) {
            best = sum;
            best_digits = digits;
        }
    }

    ProductStrategy s;
    s.arity = g.copies;
    int off = 0;
    for (int j = 0; j < k; ++j) {
        int nq = static_cast<int>(g.question_labels[j].size());
        s.tables.emplace_back(best_digits.begin() + off, best_digits.begin() + off + nq);
        off += nq;
    }
    Rational v(Integer(best), denom);
    v.canonicalize();
    return {v, s};
}

}  // namespace detail

// Exact value by exhaustive search over product strategies. Ties broken by
// the lexicographically least strategy table.
inline std::pair<Rational, ProductStrategy> value(const Game& g, const Caps& caps = {}) {
    Integer evals = 1;
    for (int j = 0; j < g.players; ++j) {
        Integer per;
        mpz_ui_pow_ui(per.get_mpz_t(), g.answer_labels[j].size(), g.question_labels[j].size());
        evals *= per;
        if (evals > caps.strategy_evaluations)
            throw cap_exceeded("value: strategy space exceeds cap (" + evals.get_str() + " evaluations)");
    }

    Box qb = g.question_box();
    int64_t aspace = g.answer_box().size();
    std::vector<detail::SupportPoint> pts;
    Integer denom = 1;
    std::vector<int> q(g.players);
    for (int64_t f = 0; f < qb.size(); ++f) {
        if (g.query[f] == 0) continue;
        qb.unflatten_into(f, q);
        pts.push_back({f * aspace, q});
        mpz_lcm(denom.get_mpz_t(), denom.get_mpz_t(), g.query[f].get_den_mpz_t());
    }
    if (pts.empty()) throw input_error("value: distribution has empty support");

    std::vector<Integer> wz;
    bool fits = denom.fits_slong_p();
    int64_t idx = 0;
    for (int64_t f = 0; f < qb.size() && fits; ++f) {
        if (g.query[f] == 0) continue;
        Integer weight = g.query[f].get_num() * (denom / g.query[f].get_den());
        fits = fits && weight.fits_slong_p();
        wz.push_back(weight);
        ++idx;
    }
    if (fits) {
        std::vector<int64_t> w;
        w.reserve(wz.size());
        for (const auto& z : wz) w.push_back(z.get_si());
        return detail::value_search<int64_t>(g, pts, w, denom);
    }
    // big denominators: same search with arbitrary-precision accumulators
    std::vector<Integer> w;
    for (int64_t f = 0; f < qb.size(); ++f) {
        if (g.query[f] == 0) continue;
        w.push_back(g.query[f].get_num() * (denom / g.query[f].get_den()));
    }
    return detail::value_search<Integer>(g, pts, w, denom);
}

// Value of the game with questions drawn from Q conditioned on E.
inline Rational value_conditioned(const Game& g, const ProductEvent& e, const Caps& caps = {}) {
    check_event(g, e);
    Rational mass = event_probability(g, e);
    if (mass == 0) throw input_error("value_conditioned: event has zero mass");
    Game c = g;
    Box qb = g.question_box();
    std::vector<int> q(g.players);
    for (int64_t f = 0; f < qb.size(); ++f) {
        if (c.query[f] == 0) continue;
        qb.unflatten_into(f, q);
        if (e.contains(q))
            c.query[f] /= mass;
        else
            c.query[f] = 0;
    }
    return value(c, caps).first;
}

// Pr[coordinate i of the repetition is won | E], exactly.
inline Rational coordinate_win_probability(const Game& g_rep, const ProductStrategy& s, int coord,
                                           const ProductEvent& e) {
    if (!g_rep.base) throw input_error("coordinate_win_probability: game is not a repetition");
    check_strategy(g_rep, s);
    check_event(g_rep, e);
    const Game& b = *g_rep.base;
    const int n = g_rep.copies, k = g_rep.players;
    if (coord < 0 || coord >= n) throw input_error("coordinate_win_probability: coordinate out of range");

    Box qb = g_rep.question_box();
    Box qb0 = b.question_box(), ab0 = b.answer_box();
    std::vector<Box> qpow, apow;
    for (int j = 0; j < k; ++j) {
        qpow.emplace_back(std::vector<int>(n, static_cast<int>(b.question_labels[j].size())));
        apow.emplace_back(std::vector<int>(n, static_cast<int>(b.answer_labels[j].size())));
    }
    Rational num = 0, den = 0;
    std::vector<int> q(k), qd, ad, base_q(k), base_a(k);
    for (int64_t f = 0; f < qb.size(); ++f) {
        if (g_rep.query[f] == 0) continue;
        qb.unflatten_into(f, q);
        if (!e.contains(q)) continue;
        den += g_rep.query[f];
        for (int j = 0; j < k; ++j) {
            qpow[j].unflatten_into(q[j], qd);
            base_q[j] = qd[coord];
            apow[j].unflatten_into(s.tables[j][q[j]], ad);
            base_a[j] = ad[coord];
        }
        if (b.predicate[qb0.flatten(base_q) * ab0.size() + ab0.flatten(base_a)]) num += g_rep.query[f];
    }
    if (den == 0) throw input_error("coordinate_win_probability: event has zero mass");
    Rational r = num / den;
    r.canonicalize();
    return r;
}

// Merges player pj into player pi when the support ties their questions
// together by a bijection. The merged player answers for both.
inline Game merge_players(const Game& g, int pi, int pj, const std::vector<int>& correspondence) {
    if (pi == pj || pi < 0 || pj < 0 || pi >= g.players || pj >= g.players)
        throw input_error("merge_players: bad player indices");
    if (correspondence.size() != g.question_labels[pi].size())
        throw input_error("merge_players: correspondence arity mismatch");
    std::vector<int> hit(g.question_labels[pj].size(), 0);
    for (int v : correspondence) {
        if (v < 0 || v >= static_cast<int>(g.question_labels[pj].size()) || hit[v]++)
            throw input_error("merge_players: correspondence is not a bijection");
    }
    Box qb = g.question_box();
    std::vector<int> q(g.players);
    for (int64_t f = 0; f < qb.size(); ++f) {
        if (g.query[f] == 0) continue;
        qb.unflatten_into(f, q);
        if (correspondence[q[pi]] != q[pj])
            throw input_error("merge_players: support violates the correspondence");
    }

    Game r;
    r.players = g.players - 1;
    std::vector<int> keep;  // old player index per new position
    for (int j = 0; j < g.players; ++j)
        if (j != pj) keep.push_back(j);
    for (int j : keep) {
        r.question_labels.push_back(g.question_labels[j]);
        if (j == pi) {
            std::vector<std::string> merged;
            for (const auto& a : g.answer_labels[pi])
                for (const auto& b : g.answer_labels[pj]) merged.push_back(a + "," + b);
            r.answer_labels.push_back(std::move(merged));
        } else {
            r.answer_labels.push_back(g.answer_labels[j]);
        }
    }

    Box rqb = r.question_box(), rab = r.answer_box();
    Box ab = g.answer_box();
    int nbj = static_cast<int>(g.answer_labels[pj].size());
    r.query.assign(rqb.size(), Rational(0));
    r.predicate.assign(rqb.size() * rab.size(), 0);
    std::vector<int> rq(r.players), ra(r.players), fq(g.players), fa(g.players);
    for (int64_t f = 0; f < rqb.size(); ++f) {
        rqb.unflatten_into(f, rq);
        for (int t = 0; t < r.players; ++t) fq[keep[t]] = rq[t];
        fq[pj] = correspondence[fq[pi]];
        r.query[f] = g.query[qb.flatten(fq)];
        for (int64_t af = 0; af < rab.size(); ++af) {
            rab.unflatten_into(af, ra);
            for (int t = 0; t < r.players; ++t) {
                int j = keep[t];
                if (j == pi) {
                    fa[pi] = ra[t] / nbj;
                    fa[pj] = ra[t] % nbj;
                } else {
                    fa[j] = ra[t];
                }
            }
            r.predicate[f * rab.size() + af] = g.predicate[qb.flatten(fq) * ab.size() + ab.flatten(fa)];
        }
    }
    return r;
}

namespace detail {

inline Game drop_player_with_answer(const Game& g, int pj, int fixed_q, int fixed_a) {
    Game r;
    r.players = g.players - 1;
    std::vector<int> keep;
    for (int j = 0; j < g.players; ++j)
        if (j != pj) keep.push_back(j);
    for (int j : keep) {
        r.question_labels.push_back(g.question_labels[j]);
        r.answer_labels.push_back(g.answer_labels[j]);
    }
    Box qb = g.question_box(), ab = g.answer_box();
    Box rqb = r.question_box(), rab = r.answer_box();
    r.query.assign(rqb.size(), Rational(0));
    r.predicate.assign(rqb.size() * rab.size(), 0);
    std::vector<int> rq(r.players), ra(r.players), fq(g.players), fa(g.players);
    for (int64_t f = 0; f < rqb.size(); ++f) {
        rqb.unflatten_into(f, rq);
        for (int t = 0; t < r.players; ++t) fq[keep[t]] = rq[t];
        fq[pj] = fixed_q;
        r.query[f] = g.query[qb.flatten(fq)];
        for (int64_t af = 0; af < rab.size(); ++af) {
            rab.unflatten_into(af, ra);
            for (int t = 0; t < r.players; ++t) fa[keep[t]] = ra[t];
            fa[pj] = fixed_a;
            r.predicate[f * rab.size() + af] = g.predicate[qb.flatten(fq) * ab.size() + ab.flatten(fa)];
        }
    }
    return r;
}

}  // namespace detail

// A player whose question is constant on the support contributes one fixed
// answer; folding the best such answer into the predicate preserves the value.
inline Game eliminate_deterministic_player(const Game& g, int pj, const Caps& caps = {}) {
    if (pj < 0 || pj >= g.players) throw input_error("eliminate: bad player index");
    if (g.players == 1) throw input_error("eliminate: cannot drop the last player");
    Box qb = g.question_box();
    std::vector<int> q(g.players);
    int fixed_q = -1;
    for (int64_t f = 0; f < qb.size(); ++f) {
        if (g.query[f] == 0) continue;
        qb.unflatten_into(f, q);
        if (fixed_q == -1)
            fixed_q = q[pj];
        else if (q[pj] != fixed_q)
            throw input_error("eliminate: player " + std::to_string(pj + 1) + " is not deterministic");
    }
    if (fixed_q == -1) throw input_error("eliminate: empty support");

    int best_a = 0;
    std::optional<Rational> best_v;
    for (int a = 0; a < static_cast<int>(g.answer_labels[pj].size()); ++a) {
        Game cand = detail::drop_player_with_answer(g, pj, fixed_q, a);
        Rational v = value(cand, caps).first;
        if (!best_v || v > *best_v) {
            best_v = v;
            best_a = a;
        }
    }
    return detail::drop_player_with_answer(g, pj, fixed_q, best_a);
}

struct RestrictedRepeatedGame {
    Game game;
    ProductStrategy strategy;
    ProductEvent event;
    std::vector<int> representatives;  // chosen index per merge class
};

// Applies a generalized restriction (classes/fixed over repetition
// coordinates, fixed values are joint question tuples) to a repeated game:
// the result is the m-fold repetition with the induced strategy and event.
inline RestrictedRepeatedGame restrict_repeated_game(const Game& g_rep, const ProductStrategy& s,
                                                     const ProductEvent& e, const GeneralizedRestriction& rho,
                                                     const Caps& caps = {}) {
    if (!g_rep.base) throw input_error("restrict_repeated_game: game is not a repetition");
    check_strategy(g_rep, s);
    check_event(g_rep, e);
    const Game& b = *g_rep.base;
    const int n = g_rep.copies, k = g_rep.players;
    if (rho.n != n) throw input_error("restrict_repeated_game: restriction arity mismatch");
    rho.check();
    const int m = rho.free_count();
    if (m == 0) throw input_error("restrict_repeated_game: no free coordinates");
    Box qb0 = b.question_box();
    for (int v : rho.values)
        if (v < 0 || v >= qb0.size()) throw input_error("restrict_repeated_game: fixed value out of range");

    RestrictedRepeatedGame out;
    out.game = repeat_game(b, m, caps);
    for (const auto& c : rho.classes) out.representatives.push_back(c[0]);

    // per player: map m-fold question index -> extended n-fold question index
    std::vector<Box> qpow_m, qpow_n, apow_n, apow_m;
    for (int j = 0; j < k; ++j) {
        qpow_m.emplace_back(std::vector<int>(m, static_cast<int>(b.question_labels[j].size())));
        qpow_n.emplace_back(std::vector<int>(n, static_cast<int>(b.question_labels[j].size())));
        apow_n.emplace_back(std::vector<int>(n, static_cast<int>(b.answer_labels[j].size())));
        apow_m.emplace_back(std::vector<int>(m, static_cast<int>(b.answer_labels[j].size())));
    }
    auto coord_class = rho.coordinate_to_class();
    std::vector<std::vector<int>> fixed_digits(rho.fixed.size());  // per fixed coord, per player
    for (size_t t = 0; t < rho.fixed.size(); ++t) fixed_digits[t] = qb0.unflatten(rho.values[t]);
    std::vector<int> fixed_pos(n, -1);
    for (size_t t = 0; t < rho.fixed.size(); ++t) fixed_pos[rho.fixed[t]] = static_cast<int>(t);

    out.strategy.arity = m;
    out.strategy.tables.resize(k);
    out.event.arity = m;
    out.event.member.resize(k);
    std::vector<int> ydig, xdig(n), adig, adig_m(m);
    for (int j = 0; j < k; ++j) {
        int64_t space = qpow_m[j].size();
        out.strategy.tables[j].resize(space);
        out.event.member[j].resize(space);
        for (int64_t y = 0; y < space; ++y) {
            qpow_m[j].unflatten_into(y, ydig);
            for (int i = 0; i < n; ++i)
                xdig[i] = coord_class[i] >= 0 ? ydig[coord_class[i]] : fixed_digits[fixed_pos[i]][j];
            int64_t xflat = qpow_n[j].flatten(xdig);
            out.event.member[j][y] = e.member[j][xflat];
            apow_n[j].unflatten_into(s.tables[j][xflat], adig);
            for (int t = 0; t < m; ++t) adig_m[t] = adig[out.representatives[t]];
            out.strategy.tables[j][y] = static_cast<int>(apow_m[j].flatten(adig_m));
        }
    }
    return out;
}

// Strategy that plays `base` independently in each coordinate.
inline ProductStrategy independent_strategy(const Game& g_rep, const ProductStrategy& base) {
    if (!g_rep.base) throw input_error("independent_strategy: game is not a repetition");
    const Game& b = *g_rep.base;
    const int n = g_rep.copies;
    ProductStrategy s;
    s.arity = n;
    for (int j = 0; j < g_rep.players; ++j) {
        Box qp(std::vector<int>(n, static_cast<int>(b.question_labels[j].size())));
        Box ap(std::vector<int>(n, static_cast<int>(b.answer_labels[j].size())));
        std::vector<int> table(qp.size()), qd, ad(n);
        for (int64_t f = 0; f < qp.size(); ++f) {
            qp.unflatten_into(f, qd);
            for (int i = 0; i < n; ++i) ad[i] = base.tables[j][qd[i]];
            table[f] = static_cast<int>(ap.flatten(ad));
        }
        s.tables.push_back(std::move(table));
    }
    return s;
}

}  // namespace parlab
