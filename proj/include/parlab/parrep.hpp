#pragma once

#include <functional>
#include <map>
#include <optional>
#include <random>
#include <tuple>
#include <vector>

#include "parlab/analysis.hpp"
#include "parlab/game.hpp"
#include "parlab/uniformize.hpp"

namespace parlab {

namespace detail {

// Cached index machinery for one repeated game.
struct RepeatedView {
    const Game* rep;
    const Game* base;
    int n, k;
    Box joint_base;                // base joint question box
    std::vector<int64_t> support;  // base joint flats with positive mass
    std::vector<std::vector<int>> support_digits;
    std::vector<Box> player_qpow;  // per player: n copies of the base alphabet
    std::vector<Box> player_apow;
    std::vector<ProbabilitySpace> player_marginal;  // base Q^j
    ProbabilitySpace joint_space;                   // base Q over the joint box

    explicit RepeatedView(const Game& g_rep) : rep(&g_rep) {
        if (!g_rep.base) throw input_error("expected an n-fold repetition");
        base = g_rep.base.get();
        n = g_rep.copies;
        k = g_rep.players;
        joint_base = base->question_box();
        for (int64_t f = 0; f < joint_base.size(); ++f) {
            if (base->query[f] > 0) {
                support.push_back(f);
                support_digits.push_back(joint_base.unflatten(f));
            }
        }
        for (int j = 0; j < k; ++j) {
            player_qpow.emplace_back(std::vector<int>(n, static_cast<int>(base->question_labels[j].size())));
            player_apow.emplace_back(std::vector<int>(n, static_cast<int>(base->answer_labels[j].size())));
            std::vector<Rational> marg(base->question_labels[j].size(), Rational(0));
            for (size_t t = 0; t < support.size(); ++t) marg[support_digits[t][j]] += base->query[support[t]];
            player_marginal.push_back(ProbabilitySpace::from_rationals(std::move(marg)));
        }
        joint_space.mass = base->query;
        for (const auto& m : joint_space.mass) joint_space.massd.push_back(m.get_d());
    }

    // player j's full question index for an assignment of support picks
    int64_t player_flat_from_picks(int j, const std::vector<int>& picks) const {
        int64_t f = 0;
        int sz = static_cast<int>(base->question_labels[j].size());
        for (int t = 0; t < n; ++t) f = f * sz + support_digits[picks[t]][j];
        return f;
    }

    bool picks_in_event(const ProductEvent& e, const std::vector<int>& picks) const {
        for (int j = 0; j < k; ++j)
            if (!e.member[j][player_flat_from_picks(j, picks)]) return false;
        return true;
    }
};

// Odometer over `width` slots with `choices` values each.
struct AssignmentEnum {
    int width;
    int choices;
    std::vector<int> current;
    bool first = true;

    AssignmentEnum(int width, int choices) : width(width), choices(choices), current(width, 0) {}
    bool next() {
        if (first) {
            first = false;
            return true;
        }
        for (int t = width - 1; t >= 0; --t) {
            if (++current[t] < choices) return true;
            current[t] = 0;
        }
        return false;
    }
};

}  // namespace detail

// --------------------------------------------------------- indicator family --

// For a fixed coordinate: per player and per base question, the indicator of
// the player's event slice; per answer additionally, the indicator that the
// strategy answers it there. 0/1 tables over the player's question alphabet
// in the remaining n-1 coordinates.
struct IndicatorFamily {
    int coordinate = 0;
    // big[j][x] and small[j][x][a]; x, a range over the base alphabets
    std::vector<std::vector<FunctionTable>> big;
    std::vector<std::vector<std::vector<FunctionTable>>> small;

    int member_count() const {
        int c = 0;
        for (const auto& per : big) c += static_cast<int>(per.size());
        for (const auto& per : small)
            for (const auto& inner : per) c += static_cast<int>(inner.size());
        return c;
    }
};

inline IndicatorFamily indicator_family(const Game& g_rep, const ProductStrategy& s, const ProductEvent& e,
                                        int coordinate) {
    detail::RepeatedView v(g_rep);
    check_strategy(g_rep, s);
    check_event(g_rep, e);
    if (coordinate < 0 || coordinate >= v.n) throw input_error("indicator_family: coordinate out of range");

    IndicatorFamily fam;
    fam.coordinate = coordinate;
    fam.big.resize(v.k);
    fam.small.resize(v.k);
    for (int j = 0; j < v.k; ++j) {
        int qs = static_cast<int>(v.base->question_labels[j].size());
        int as = static_cast<int>(v.base->answer_labels[j].size());
        Box rest(std::vector<int>(v.n - 1, qs));
        fam.big[j].assign(qs, FunctionTable::constant(v.player_marginal[j], v.n - 1, 0.0));
        fam.small[j].assign(
            qs, std::vector<FunctionTable>(as, FunctionTable::constant(v.player_marginal[j], v.n - 1, 0.0)));
        std::vector<int> rest_digits, full(v.n);
        for (int64_t rf = 0; rf < rest.size(); ++rf) {
            rest.unflatten_into(rf, rest_digits);
            for (int x = 0; x < qs; ++x) {
                int at = 0;
                for (int t = 0; t < v.n; ++t) full[t] = t == coordinate ? x : rest_digits[at++];
                int64_t player_full = v.player_qpow[j].flatten(full);
                bool in_event = e.member[j][player_full];
                fam.big[j][x].v[rf] = in_event ? 1.0 : 0.0;
                if (in_event) {
                    int answer = v.player_apow[j].unflatten(s.tables[j][player_full])[coordinate];
                    fam.small[j][x][answer].v[rf] = 1.0;
                }
            }
        }
    }
    return fam;
}

// ------------------------------------------------------- embedding strategy --

struct EmbeddingConfig {
    Rational delta = Rational(1, 2);  // schedule base; the grid is {1, delta, ..., delta^{T-1}}
    int schedule_length = 4;          // T
    bool exact = true;                // enumerate the full randomness space
    int trials = 20000;               // Monte-Carlo sample count when not exact
    uint64_t seed = 0;
    bool with_lambda = false;         // also measure the good-restriction event frequency

    // The asymptotic schedule delta = (log2 n)^{-1/3}, T = ceil(1/delta^2).
    // Meaningful only for large n; at desk scale it clamps to the fixed
    // defaults above and exact enumeration does the work instead.
    static EmbeddingConfig asymptotic_defaults(int copies) {
        EmbeddingConfig cfg;
        double l = std::log2(std::max(2, copies));
        double d = std::pow(l, -1.0 / 3.0);
        if (d > 0 && d < 1) {
            // nearest dyadic keeps the schedule exact-rational
            int denom_log = std::max(1, static_cast<int>(std::lround(-std::log2(d))));
            cfg.delta = Rational(1, 1L << denom_log);
            cfg.schedule_length = static_cast<int>(std::ceil(1.0 / (d * d)));
        }
        return cfg;
    }
};

struct SimulationReport {
    Rational losing_probability = 0;     // exact mode
    double losing_estimate = 0;          // either mode
    double losing_radius = 0;            // Monte-Carlo only
    Rational mean_coordinate_loss = 0;   // E_i Pr[Lose_i | E], the comparison target
    Rational consistency_failure_rate = 0;
    Rational drift_term = 0;             // E || P_{X_i | E, X_{I'} = Z} - Q ||_1
    Rational conditioned_loss_term = 0;  // same expectation with the question drawn conditionally
    bool decomposition_identity_ok = true;
    std::optional<double> lambda_frequency;  // mean over coordinates, when requested
    bool exact = true;
    uint64_t seed = 0;
};

namespace detail {

struct EmbeddingContext {
    const RepeatedView& v;
    const ProductStrategy& s;
    const ProductEvent& e;

    // Player j's conditional answer law at coordinate i, given the fixed value
    // there, the fixed off-coordinate values, and membership in E^j; nullopt
    // when the view is inconsistent with the player's event.
    std::optional<std::vector<Rational>> answer_distribution(int j, int i, int x_tilde_j,
                                                             const std::vector<int>& primed_coords,
                                                             const std::vector<int>& primed_vals_j) const {
        int qs = static_cast<int>(v.base->question_labels[j].size());
        int as = static_cast<int>(v.base->answer_labels[j].size());
        std::vector<uint8_t> primed_mask(v.n, 0);
        for (int c : primed_coords) primed_mask[c] = 1;
        std::vector<int> free_coords;
        for (int c = 0; c < v.n; ++c)
            if (c != i && !primed_mask[c]) free_coords.push_back(c);

        std::vector<Rational> dist(as, Rational(0));
        Rational total = 0;
        std::vector<int> full(v.n, -1);
        full[i] = x_tilde_j;
        for (size_t t = 0; t < primed_coords.size(); ++t) full[primed_coords[t]] = primed_vals_j[t];
        AssignmentEnum free_assign(static_cast<int>(free_coords.size()), qs);
        while (free_assign.next()) {
            Rational w = 1;
            for (size_t t = 0; t < free_coords.size(); ++t) {
                full[free_coords[t]] = free_assign.current[t];
                w *= v.player_marginal[j].mass[free_assign.current[t]];
            }
            if (w == 0) continue;
            int64_t pf = v.player_qpow[j].flatten(full);
            if (!e.member[j][pf]) continue;
            total += w;
            int answer = v.player_apow[j].unflatten(s.tables[j][pf])[i];
            dist[answer] += w;
        }
        if (total == 0) return std::nullopt;
        for (auto& d : dist) d /= total;
        return dist;
    }

    // loss probability of the product answer law at a fixed base question
    Rational loss_at(int64_t question_flat, const std::vector<std::vector<Rational>>& law) const {
        Box ab0 = v.base->answer_box();
        Rational loss = 0;
        std::vector<int> a(v.k);
        for (int64_t af = 0; af < ab0.size(); ++af) {
            if (v.base->predicate[question_flat * ab0.size() + af]) continue;
            ab0.unflatten_into(af, a);
            Rational prod = 1;
            for (int j = 0; j < v.k && prod != 0; ++j) prod *= law[j][a[j]];
            loss += prod;
        }
        return loss;
    }
};

}  // namespace detail

namespace detail {

inline SimulationReport simulate_embedding_core(const Game& g_rep, const ProductStrategy& s,
                                                const ProductEvent& e, const EmbeddingConfig& cfg) {
    detail::RepeatedView v(g_rep);
    check_strategy(g_rep, s);
    check_event(g_rep, e);
    detail::EmbeddingContext ctx{v, s, e};
    const int n = v.n, k = v.k;

    Rational pr_e = event_probability(g_rep, e);
    if (pr_e == 0) throw input_error("simulate_embedding_strategy: event has zero mass");

    SimulationReport rep;
    rep.exact = cfg.exact;
    rep.seed = cfg.seed;
    {
        Rational acc = 0;
        for (int i = 0; i < n; ++i) acc += 1 - coordinate_win_probability(g_rep, s, i, e);
        rep.mean_coordinate_loss = acc / n;
    }

    std::vector<Rational> p_values;
    {
        Rational p(1);
        for (int t = 0; t < cfg.schedule_length; ++t) {
            p_values.push_back(p);
            p *= cfg.delta;
        }
    }

    if (cfg.exact) {
        const Rational outer_weight = Rational(1, n) * Rational(1, cfg.schedule_length);
        Rational losing = 0, drift = 0, conditioned = 0, inconsistent_mass = 0;
        std::vector<Rational> loss_by_question(v.support.size(), Rational(0));

        for (int i = 0; i < n; ++i) {
            std::vector<int> others;
            for (int c = 0; c < n; ++c)
                if (c != i) others.push_back(c);
            for (const Rational& p : p_values) {
                for (int64_t subset = 0; subset < (int64_t{1} << others.size()); ++subset) {
                    Rational set_weight = 1;
                    std::vector<int> primed;  // I' = the off-coordinates that get fixed
                    for (size_t t = 0; t < others.size(); ++t) {
                        if (subset >> t & 1)
                            set_weight *= p;  // alive, element of I
                        else {
                            set_weight *= 1 - p;
                            primed.push_back(others[t]);
                        }
                    }
                    if (set_weight == 0) continue;

                    detail::AssignmentEnum z_assign(static_cast<int>(primed.size()),
                                                    static_cast<int>(v.support.size()));
                    while (z_assign.next()) {
                        // mass of the Z-slice within E; conditional law of X_i
                        Rational slice_mass = 0;
                        std::vector<Rational> xi_law(v.support.size(), Rational(0));
                        {
                            std::vector<int> picks(n, -1);
                            std::vector<int> free_coords;
                            for (size_t t = 0; t < primed.size(); ++t) picks[primed[t]] = z_assign.current[t];
                            for (int c = 0; c < n; ++c)
                                if (picks[c] < 0 && c != i) free_coords.push_back(c);
                            detail::AssignmentEnum rest(static_cast<int>(free_coords.size()) + 1,
                                                        static_cast<int>(v.support.size()));
                            while (rest.next()) {
                                picks[i] = rest.current[0];
                                for (size_t t = 0; t < free_coords.size(); ++t)
                                    picks[free_coords[t]] = rest.current[t + 1];
                                Rational w = 1;
                                for (int c = 0; c < n; ++c) w *= v.base->query[v.support[picks[c]]];
                                if (w == 0 || !v.picks_in_event(e, picks)) continue;
                                slice_mass += w;
                                xi_law[rest.current[0]] += w;
                            }
                        }
                        if (slice_mass == 0) continue;
                        Rational w_outer = outer_weight * set_weight * (slice_mass / pr_e);
                        for (auto& m : xi_law) m /= slice_mass;

                        Rational l1 = 0;
                        for (size_t t = 0; t < v.support.size(); ++t)
                            l1 += rational_abs(xi_law[t] - v.base->query[v.support[t]]);
                        drift += w_outer * l1;

                        std::vector<std::vector<int>> primed_vals(k, std::vector<int>(primed.size()));
                        for (int j = 0; j < k; ++j)
                            for (size_t t = 0; t < primed.size(); ++t)
                                primed_vals[j][t] = v.support_digits[z_assign.current[t]][j];

                        for (size_t pick = 0; pick < v.support.size(); ++pick) {
                            const auto& xt = v.support_digits[pick];
                            std::vector<std::vector<Rational>> law(k);
                            bool any_inconsistent = false;
                            for (int j = 0; j < k; ++j) {
                                auto dist = ctx.answer_distribution(j, i, xt[j], primed, primed_vals[j]);
                                if (!dist) {
                                    any_inconsistent = true;
                                    law[j].assign(v.base->answer_labels[j].size(), Rational(0));
                                    law[j][0] = 1;  // first answer in the fixed ordering
                                } else {
                                    law[j] = std::move(*dist);
                                }
                            }
                            Rational loss = ctx.loss_at(v.support[pick], law);
                            Rational q_mass = v.base->query[v.support[pick]];
                            losing += w_outer * q_mass * loss;
                            loss_by_question[pick] += w_outer * loss;
                            conditioned += w_outer * xi_law[pick] * loss;
                            if (any_inconsistent) inconsistent_mass += w_outer * q_mass;
                        }
                    }
                }
            }
        }

        rep.losing_probability = losing;
        rep.losing_estimate = losing.get_d();
        rep.consistency_failure_rate = inconsistent_mass;
        rep.drift_term = drift;
        rep.conditioned_loss_term = conditioned;
        // total probability, regrouped per question
        Rational regrouped = 0;
        for (size_t pick = 0; pick < v.support.size(); ++pick)
            regrouped += v.base->query[v.support[pick]] * loss_by_question[pick];
        rep.decomposition_identity_ok = losing == regrouped;
        return rep;
    }

    // Monte-Carlo over the same pipeline: Z is drawn by sampling a full
    // event-conditioned question vector and reading off the fixed part.
    std::mt19937_64 rng(cfg.seed);
    std::vector<std::vector<int>> event_support;
    std::vector<double> event_weights;
    {
        detail::AssignmentEnum all(n, static_cast<int>(v.support.size()));
        while (all.next()) {
            Rational w = 1;
            for (int c = 0; c < n; ++c) w *= v.base->query[v.support[all.current[c]]];
            if (w == 0 || !v.picks_in_event(e, all.current)) continue;
            event_support.push_back(all.current);
            event_weights.push_back(w.get_d());
        }
    }
    std::discrete_distribution<size_t> draw_event(event_weights.begin(), event_weights.end());
    std::vector<double> qd;
    for (size_t t = 0; t < v.support.size(); ++t) qd.push_back(v.base->query[v.support[t]].get_d());
    std::discrete_distribution<size_t> draw_question(qd.begin(), qd.end());
    std::uniform_int_distribution<int> draw_i(0, n - 1), draw_p(0, cfg.schedule_length - 1);
    std::uniform_real_distribution<double> coin(0.0, 1.0);

    int losses = 0;
    Box ab0 = v.base->answer_box();
    for (int t = 0; t < cfg.trials; ++t) {
        int i = draw_i(rng);
        double p = p_values[draw_p(rng)].get_d();
        std::vector<int> primed;
        for (int c = 0; c < n; ++c)
            if (c != i && coin(rng) >= p) primed.push_back(c);
        const auto& filler = event_support[draw_event(rng)];
        size_t xt_pick = draw_question(rng);
        const auto& xt = v.support_digits[xt_pick];

        std::vector<int> answers(k);
        for (int j = 0; j < k; ++j) {
            std::vector<int> primed_vals_j;
            for (int c : primed) primed_vals_j.push_back(v.support_digits[filler[c]][j]);
            auto dist = ctx.answer_distribution(j, i, xt[j], primed, primed_vals_j);
            if (!dist) {
                answers[j] = 0;
                continue;
            }
            double u = coin(rng), acc = 0;
            int chosen = 0;
            for (size_t a = 0; a < dist->size(); ++a) {
                acc += (*dist)[a].get_d();
                if (u <= acc) {
                    chosen = static_cast<int>(a);
                    break;
                }
            }
            answers[j] = chosen;
        }
        int64_t aflat = 0;
        for (int j = 0; j < k; ++j) aflat = aflat * ab0.radix(j) + answers[j];
        if (!v.base->predicate[v.support[xt_pick] * ab0.size() + aflat]) ++losses;
    }
    rep.losing_estimate = static_cast<double>(losses) / cfg.trials;
    rep.losing_radius = 3 * std::sqrt(rep.losing_estimate * (1 - rep.losing_estimate) / cfg.trials) +
                        1.0 / cfg.trials;
    return rep;
}

}  // namespace detail

// --------------------------------------------------- good-restriction event --

struct LambdaConfig {
    double delta = 0.5;       // stability threshold and schedule base
    int schedule_length = 4;  // T
    bool exact = true;
    int trials = 2000;
    uint64_t seed = 0;
};

struct LambdaReport {
    double frequency = 0;  // how often the good-restriction event holds
    double radius = 0;     // Monte-Carlo only
    std::map<int64_t, double> schedule_bound_per_question;  // 4k/(delta T Pr[E | X_i = x])
    bool exact = true;
};

// Frequency of the good-restriction event for plain restrictions: all family
// indicators, centered after restriction, have small noise stability.
inline LambdaReport lambda_event_probability(const Game& g_rep, const ProductStrategy& s, const ProductEvent& e,
                                             int coordinate, const LambdaConfig& cfg = {}) {
    detail::RepeatedView v(g_rep);
    IndicatorFamily fam = indicator_family(g_rep, s, e, coordinate);
    const int n = v.n, k = v.k;
    Rational pr_e = event_probability(g_rep, e);
    if (pr_e == 0) throw input_error("lambda_event_probability: event has zero mass");

    LambdaReport rep;
    rep.exact = cfg.exact;

    // reference bounds per base question value
    for (size_t t = 0; t < v.support.size(); ++t) {
        // Pr[E | X_i = x] over the joint law
        Rational joint = 0;
        detail::AssignmentEnum rest(n - 1, static_cast<int>(v.support.size()));
        while (rest.next()) {
            std::vector<int> picks(n);
            int at = 0;
            for (int c = 0; c < n; ++c) picks[c] = c == coordinate ? static_cast<int>(t) : rest.current[at++];
            Rational w = 1;
            for (int c = 0; c < n; ++c)
                if (c != coordinate) w *= v.base->query[v.support[picks[c]]];
            if (w == 0 || !v.picks_in_event(e, picks)) continue;
            joint += w;
        }
        if (joint > 0)
            rep.schedule_bound_per_question[v.support[t]] =
                4.0 * k / (cfg.delta * cfg.schedule_length * joint.get_d());
    }

    // the event Lambda(I, Z) for a concrete alive set and filling
    auto lambda_holds = [&](const std::vector<int>& alive, const std::vector<int>& primed,
                            const std::vector<int>& primed_picks) {
        // family tables live on the n-1 coordinates != coordinate; translate
        std::vector<int> family_coord(n, -1);
        int at = 0;
        for (int c = 0; c < n; ++c)
            if (c != coordinate) family_coord[c] = at++;
        Restriction rho;
        for (size_t t = 0; t < primed.size(); ++t) rho.fixed.push_back(family_coord[primed[t]]);
        (void)alive;
        for (int j = 0; j < k; ++j) {
            Restriction rho_j = rho;
            for (size_t t = 0; t < primed.size(); ++t)
                rho_j.values.push_back(v.support_digits[primed_picks[t]][j]);
            for (const auto& per_x : fam.big[j]) {
                auto g = centered(apply_restriction(per_x, rho_j));
                if (g.dim > 0 && stability(g, 1.0 - cfg.delta) >= cfg.delta) return false;
            }
            for (const auto& per_x : fam.small[j])
                for (const auto& per_a : per_x) {
                    auto g = centered(apply_restriction(per_a, rho_j));
                    if (g.dim > 0 && stability(g, 1.0 - cfg.delta) >= cfg.delta) return false;
                }
        }
        return true;
    };

    std::vector<double> p_values;
    for (int t = 0; t < cfg.schedule_length; ++t) p_values.push_back(std::pow(cfg.delta, t));

    if (cfg.exact) {
        // enumerate (p, I, Z) with Z from the event-conditioned law
        double freq = 0;
        std::vector<int> others;
        for (int c = 0; c < n; ++c)
            if (c != coordinate) others.push_back(c);
        for (double p : p_values) {
            for (int64_t subset = 0; subset < (int64_t{1} << others.size()); ++subset) {
                double set_weight = 1;
                std::vector<int> alive{coordinate}, primed;
                for (size_t t = 0; t < others.size(); ++t) {
                    if (subset >> t & 1) {
                        set_weight *= p;
                        alive.push_back(others[t]);
                    } else {
                        set_weight *= 1 - p;
                        primed.push_back(others[t]);
                    }
                }
                if (set_weight == 0) continue;
                detail::AssignmentEnum z_assign(static_cast<int>(primed.size()),
                                                static_cast<int>(v.support.size()));
                while (z_assign.next()) {
                    Rational slice = 0;
                    {
                        std::vector<int> picks(n, -1);
                        for (size_t t = 0; t < primed.size(); ++t) picks[primed[t]] = z_assign.current[t];
                        std::vector<int> free_coords;
                        for (int c = 0; c < n; ++c)
                            if (picks[c] < 0) free_coords.push_back(c);
                        detail::AssignmentEnum rest(static_cast<int>(free_coords.size()),
                                                    static_cast<int>(v.support.size()));
                        while (rest.next()) {
                            for (size_t t = 0; t < free_coords.size(); ++t)
                                picks[free_coords[t]] = rest.current[t];
                            Rational w = 1;
                            for (int c = 0; c < n; ++c) w *= v.base->query[v.support[picks[c]]];
                            if (w == 0 || !v.picks_in_event(e, picks)) continue;
                            slice += w;
                        }
                    }
                    if (slice == 0) continue;
                    double z_weight = Rational(slice / pr_e).get_d();
                    if (lambda_holds(alive, primed, z_assign.current))
                        freq += set_weight * z_weight / cfg.schedule_length;
                }
            }
        }
        rep.frequency = std::min(1.0, freq);  // float aggregation of exact weights
        return rep;
    }

    // Monte-Carlo
    std::mt19937_64 rng(cfg.seed);
    std::vector<std::vector<int>> event_support;
    std::vector<double> event_weights;
    {
        detail::AssignmentEnum all(n, static_cast<int>(v.support.size()));
        while (all.next()) {
            Rational w = 1;
            for (int c = 0; c < n; ++c) w *= v.base->query[v.support[all.current[c]]];
            if (w == 0 || !v.picks_in_event(e, all.current)) continue;
            event_support.push_back(all.current);
            event_weights.push_back(w.get_d());
        }
    }
    std::discrete_distribution<size_t> draw_event(event_weights.begin(), event_weights.end());
    std::uniform_int_distribution<int> draw_p(0, cfg.schedule_length - 1);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    int hits = 0;
    for (int t = 0; t < cfg.trials; ++t) {
        double p = p_values[draw_p(rng)];
        std::vector<int> alive{coordinate}, primed;
        for (int c = 0; c < n; ++c) {
            if (c == coordinate) continue;
            if (coin(rng) < p)
                alive.push_back(c);
            else
                primed.push_back(c);
        }
        const auto& filler = event_support[draw_event(rng)];
        std::vector<int> primed_picks;
        for (int c : primed) primed_picks.push_back(filler[c]);
        if (lambda_holds(alive, primed, primed_picks)) ++hits;
    }
    rep.frequency = static_cast<double>(hits) / cfg.trials;
    rep.radius = 3 * std::sqrt(rep.frequency * (1 - rep.frequency) / cfg.trials) + 1.0 / cfg.trials;
    return rep;
}

// The randomized single-copy strategy that embeds the real question into a
// random coordinate of the repeated game: shared randomness picks the
// coordinate, a keep-alive rate from the geometric schedule, the alive set,
// and an event-conditioned filling of the remaining coordinates; each player
// then answers from their conditional answer law (or a fixed fallback answer
// when their view is inconsistent with their event). Exact mode enumerates
// the full randomness space and reports exact rationals.
inline SimulationReport simulate_embedding_strategy(const Game& g_rep, const ProductStrategy& s,
                                                    const ProductEvent& e, const EmbeddingConfig& cfg = {}) {
    SimulationReport rep = detail::simulate_embedding_core(g_rep, s, e, cfg);
    if (cfg.with_lambda) {
        LambdaConfig lc;
        lc.delta = cfg.delta.get_d();
        lc.schedule_length = cfg.schedule_length;
        lc.exact = cfg.exact;
        lc.trials = cfg.trials;
        lc.seed = cfg.seed;
        double acc = 0;
        for (int i = 0; i < g_rep.copies; ++i) acc += lambda_event_probability(g_rep, s, e, i, lc).frequency;
        rep.lambda_frequency = acc / g_rep.copies;
    }
    return rep;
}

// GRR-based variant: uniformize the (joint-alphabet extensions of the)
// indicator family for the coordinate, then report how often all members are
// product pseudorandom under the resulting restriction distribution, both
// unconditionally and conditioned on the event.
struct LambdaGrrReport {
    double frequency_unconditional = 0;
    double frequency_conditional = 0;
    double gamma = 0;
    UniformizeReport uniformization;
};

// Lifts a per-player table on (X^j)^dim to the joint question alphabet by
// reading only player j's digit of each joint letter.
inline FunctionTable extend_to_joint(const FunctionTable& player_fn, const detail::RepeatedView& v, int player,
                                     int dim) {
    FunctionTable out = FunctionTable::constant(v.joint_space, dim, 0.0);
    int qs = static_cast<int>(v.base->question_labels[player].size());
    Box jb = v.joint_base;
    std::vector<int> letters(dim);
    for (int64_t x = 0; x < out.points(); ++x) {
        int64_t rest = x;
        for (int c = dim - 1; c >= 0; --c) {
            letters[c] = static_cast<int>(rest % jb.size());
            rest /= jb.size();
        }
        int64_t player_flat = 0;
        for (int c = 0; c < dim; ++c) player_flat = player_flat * qs + jb.unflatten(letters[c])[player];
        out.v[x] = player_fn.v[player_flat];
    }
    return out;
}

inline LambdaGrrReport lambda_event_probability_grr(const Game& g_rep, const ProductStrategy& s,
                                                    const ProductEvent& e, int coordinate, double delta,
                                                    double gamma, uint64_t seed,
                                                    const UniformizeConfig& ucfg = {}) {
    detail::RepeatedView v(g_rep);
    IndicatorFamily fam = indicator_family(g_rep, s, e, coordinate);
    const int n = v.n;

    std::vector<FunctionTable> members;
    for (int j = 0; j < v.k; ++j) {
        for (const auto& per_x : fam.big[j]) members.push_back(extend_to_joint(per_x, v, j, n - 1));
        for (const auto& per_x : fam.small[j])
            for (const auto& per_a : per_x) members.push_back(extend_to_joint(per_a, v, j, n - 1));
    }

    LambdaGrrReport rep;
    rep.gamma = gamma;
    auto uni = uniformize(members, delta, gamma, seed, ucfg);
    rep.uniformization = uni.report;

    // judge each atom: every member pseudorandom after the restriction
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<uint8_t> good(uni.grr.atoms.size(), 1);
    for (size_t t = 0; t < uni.grr.atoms.size(); ++t) {
        const auto& rho = uni.grr.atoms[t].first;
        if (rho.free_count() == 0) continue;
        for (const auto& member : members) {
            auto h = centered(apply_generalized(member, rho));
            if (find_failure_certificate(h, gamma, rng, ucfg.increment)) {
                good[t] = 0;
                break;
            }
        }
    }
    double freq = 0;
    for (size_t t = 0; t < uni.grr.atoms.size(); ++t)
        if (good[t]) freq += uni.grr.atoms[t].second.get_d();
    rep.frequency_unconditional = freq;

    // conditioned on the event: reweight by Pr[E | E_rho] over the joint law
    // of the n-1 off-coordinates, restricted to E's slice at the coordinate
    // being full (the event does not constrain the embedded coordinate here:
    // we use the event restricted to the off-coordinates per player)
    // For the conditional frequency we use the full event on all n
    // coordinates with the embedded coordinate left free in the restriction.
    {
        std::vector<Rational> cond_weights(uni.grr.atoms.size(), Rational(0));
        Rational z = 0;
        for (size_t t = 0; t < uni.grr.atoms.size(); ++t) {
            const auto& rho = uni.grr.atoms[t].first;
            // Pr[E and E_rho] over joint assignments of the n-1 coordinates
            // with the embedded coordinate integrated over Q
            Rational both = 0, rho_mass = 0;
            detail::AssignmentEnum rest(n - 1, static_cast<int>(v.support.size()));
            while (rest.next()) {
                std::vector<int> joint_letters(n - 1);
                for (int c = 0; c < n - 1; ++c) joint_letters[c] = static_cast<int>(v.support[rest.current[c]]);
                if (!rho.contains(joint_letters)) continue;
                Rational w = 1;
                for (int c = 0; c < n - 1; ++c) w *= v.base->query[joint_letters[c]];
                if (w == 0) continue;
                rho_mass += w;
                // embed coordinate: average event membership over X_i ~ Q
                Rational emb = 0;
                for (size_t x = 0; x < v.support.size(); ++x) {
                    std::vector<int> picks(n);
                    int at = 0;
                    for (int c = 0; c < n; ++c)
                        picks[c] = c == coordinate ? static_cast<int>(x) : rest.current[at++];
                    if (v.picks_in_event(e, picks)) emb += v.base->query[v.support[x]];
                }
                both += w * emb;
            }
            if (rho_mass > 0) cond_weights[t] = uni.grr.atoms[t].second * both / rho_mass;
            z += cond_weights[t];
        }
        double freq_cond = 0;
        if (z > 0)
            for (size_t t = 0; t < uni.grr.atoms.size(); ++t)
                if (good[t]) freq_cond += Rational(cond_weights[t] / z).get_d();
        rep.frequency_conditional = freq_cond;
    }
    return rep;
}

// ------------------------------------------------- information increment --

struct InfoIncrementReport {
    Rational beta = 0;       // measured drift E || P_{X_i | E, E_rho} - Q ||_1
    Rational beta_used = 0;  // clamped to [0, 1] for the bound
    Rational l2_before = 0;  // E_{rho ~ R_i} Pr[E | E_rho]^2
    Rational l2_after = 0;   // E over the coordinate-fixing refinement
    Rational bound_rhs = 0;  // alpha^2 (1 + beta^2 - 6 eps / alpha)
    Rational alpha = 0;      // Pr[E]
    Rational epsilon = 0;    // measured certificate error of R_i
    bool holds = false;
};

// Appends an independent fixing of the embedded coordinate to a restriction
// distribution that never touches it, and checks that the second moment of
// the event's conditional mass grows by the measured drift.
inline InfoIncrementReport information_increment_check(const Game& g_rep, const ProductEvent& e,
                                                       const GeneralizedRandomRestriction& grr_i,
                                                       int coordinate, int64_t cap = int64_t{1} << 24) {
    detail::RepeatedView v(g_rep);
    check_event(g_rep, e);
    const int n = v.n;
    if (grr_i.n != n) throw input_error("information increment: arity mismatch");
    for (const auto& [rho, w] : grr_i.atoms) {
        bool singleton = false;
        for (const auto& cls : rho.classes)
            if (cls.size() == 1 && cls[0] == coordinate) singleton = true;
        if (!singleton)
            throw input_error("information increment: the restriction must leave the coordinate untouched");
    }

    // joint event mask over the joint base alphabet to the n-th power
    int js = static_cast<int>(v.joint_base.size());
    int64_t total = checked_ipow(js, n, cap);
    std::vector<Rational> mu(total, Rational(0));
    std::vector<uint8_t> in_e(total, 0);
    std::vector<int> letters(n);
    for (int64_t x = 0; x < total; ++x) {
        int64_t rest = x;
        for (int c = n - 1; c >= 0; --c) {
            letters[c] = static_cast<int>(rest % js);
            rest /= js;
        }
        Rational w = 1;
        for (int c = 0; c < n; ++c) w *= v.base->query[letters[c]];
        mu[x] = w;
        if (w == 0) continue;
        bool inside = true;
        for (int j = 0; j < v.k && inside; ++j) {
            int64_t pf = 0;
            int qs = static_cast<int>(v.base->question_labels[j].size());
            for (int c = 0; c < n; ++c) pf = pf * qs + v.joint_base.unflatten(letters[c])[j];
            inside = e.member[j][pf];
        }
        in_e[x] = inside ? 1 : 0;
    }

    InfoIncrementReport rep;
    Rational pr_e = 0;
    for (int64_t x = 0; x < total; ++x)
        if (in_e[x]) pr_e += mu[x];
    rep.alpha = pr_e;
    rep.epsilon = grr_distribution_error(grr_i, v.joint_space, cap);
    if (rep.epsilon >= pr_e)
        throw input_error("information increment: certificate error must stay below the event mass");

    // conditional restriction and the drift of the coordinate's law
    Rational z = 0;
    std::vector<Rational> cond(grr_i.atoms.size(), Rational(0));
    std::vector<Rational> pr_rho_all(grr_i.atoms.size(), Rational(0));
    std::vector<std::vector<uint8_t>> masks;
    for (size_t t = 0; t < grr_i.atoms.size(); ++t) {
        auto mask = event_of(grr_i.atoms[t].first, js, cap);
        Rational pr_rho = 0, both = 0;
        for (int64_t x = 0; x < total; ++x) {
            if (!mask[x]) continue;
            pr_rho += mu[x];
            if (in_e[x]) both += mu[x];
        }
        if (pr_rho == 0) throw input_error("information increment: restriction event has zero mass");
        pr_rho_all[t] = pr_rho;
        cond[t] = grr_i.atoms[t].second * both / pr_rho;
        z += cond[t];
        masks.push_back(std::move(mask));
    }

    Rational beta = 0;
    for (size_t t = 0; t < grr_i.atoms.size(); ++t) {
        if (cond[t] == 0) continue;
        // law of X_i given E and E_rho
        std::vector<Rational> law(js, Rational(0));
        Rational slice = 0;
        for (int64_t x = 0; x < total; ++x) {
            if (!masks[t][x] || !in_e[x] || mu[x] == 0) continue;
            int64_t rest = x;
            for (int c = n - 1; c > coordinate; --c) rest /= js;
            law[rest % js] += mu[x];
            slice += mu[x];
        }
        Rational l1 = 0;
        for (int q = 0; q < js; ++q) l1 += rational_abs(law[q] / slice - v.base->query[q]);
        beta += (cond[t] / z) * l1;
    }
    rep.beta = beta;
    rep.beta_used = beta > 1 ? Rational(1) : beta;

    // second moment before and after appending the coordinate fixing
    Rational before = 0, after = 0;
    for (size_t t = 0; t < grr_i.atoms.size(); ++t) {
        Rational both = 0;  // Pr[E and E_rho]
        for (int64_t x = 0; x < total; ++x)
            if (masks[t][x] && in_e[x]) both += mu[x];
        Rational pr_cond = both / pr_rho_all[t];
        before += grr_i.atoms[t].second * pr_cond * pr_cond;

        for (size_t q = 0; q < v.support.size(); ++q) {
            int letter = static_cast<int>(v.support[q]);
            Rational qw = v.base->query[letter];
            Rational rho_and_fix = 0, e_and_both = 0;
            for (int64_t x = 0; x < total; ++x) {
                if (!masks[t][x] || mu[x] == 0) continue;
                int64_t rest = x;
                for (int c = n - 1; c > coordinate; --c) rest /= js;
                if (static_cast<int>(rest % js) != letter) continue;
                rho_and_fix += mu[x];
                if (in_e[x]) e_and_both += mu[x];
            }
            if (rho_and_fix == 0) continue;
            Rational pr2 = e_and_both / rho_and_fix;
            after += grr_i.atoms[t].second * qw * pr2 * pr2;
        }
    }
    rep.l2_before = before;
    rep.l2_after = after;
    rep.bound_rhs = pr_e * pr_e * (1 + rep.beta_used * rep.beta_used) - 6 * rep.epsilon * pr_e;
    rep.holds = after >= rep.bound_rhs;
    return rep;
}

// ------------------------------------------------------ hard coordinates --

struct HardCoordinateChain {
    std::vector<Rational> prefix_win_probability;  // Pr[W_{<=1}], ..., Pr[W_{<=n}]
    std::vector<int> leading_coordinates;          // greedy picks along the heaviest branch
    std::vector<std::pair<int64_t, int64_t>> leading_tuples;  // (question flat, answer flat)
};

namespace detail {

struct ChainState {
    std::vector<int> chosen;                          // coordinates, in order
    std::vector<std::pair<int64_t, int64_t>> values;  // realized (question, answer) flats
};

}  // namespace detail

// Greedy hard-coordinate chain: at every level, conditioned on the realized
// question/answer tuples so far, pick the fresh coordinate with the lowest
// conditional win probability (ties to the lowest index) and branch over its
// winning values. prefix_win_probability[k-1] = Pr[first k picks all won].
inline HardCoordinateChain greedy_hard_chain(const Game& g_rep, const ProductStrategy& s,
                                             int64_t cap = int64_t{1} << 24) {
    detail::RepeatedView v(g_rep);
    check_strategy(g_rep, s);
    const int n = v.n, k = v.k;
    Box ab0 = v.base->answer_box();
    checked_ipow(static_cast<int64_t>(v.support.size()), n, cap);

    // enumerate the joint space once: picks, weight, per-coordinate (q, a)
    struct Sample {
        Rational w;
        std::vector<int64_t> q, a;
    };
    std::vector<Sample> samples;
    {
        detail::AssignmentEnum all(n, static_cast<int>(v.support.size()));
        std::vector<int64_t> pf(k);
        while (all.next()) {
            Rational w = 1;
            for (int c = 0; c < n; ++c) w *= v.base->query[v.support[all.current[c]]];
            if (w == 0) continue;
            Sample smp;
            smp.w = w;
            smp.q.resize(n);
            smp.a.resize(n);
            for (int j = 0; j < k; ++j) pf[j] = v.player_flat_from_picks(j, all.current);
            std::vector<std::vector<int>> per_player_answers(k);
            for (int j = 0; j < k; ++j)
                per_player_answers[j] = v.player_apow[j].unflatten(s.tables[j][pf[j]]);
            for (int c = 0; c < n; ++c) {
                smp.q[c] = v.support[all.current[c]];
                std::vector<int> a(k);
                for (int j = 0; j < k; ++j) a[j] = per_player_answers[j][c];
                smp.a[c] = ab0.flatten(a);
            }
            samples.push_back(std::move(smp));
        }
    }
    auto wins = [&](const Sample& smp, int c) {
        return v.base->predicate[smp.q[c] * ab0.size() + smp.a[c]] != 0;
    };

    HardCoordinateChain chain;
    chain.prefix_win_probability.assign(n, Rational(0));

    // recursive branching over realized winning tuples
    struct Frame {
        std::vector<uint8_t> match;  // samples matching the prefix
        std::vector<int> used;       // chosen coordinates
        Rational mass;
        bool leading;
    };
    std::function<void(Frame&, int)> recurse = [&](Frame& fr, int depth) {
        if (depth == n) return;
        // pick the fresh coordinate with the lowest conditional win probability
        int best_c = -1;
        Rational best_p = 2;
        for (int c = 0; c < n; ++c) {
            if (std::find(fr.used.begin(), fr.used.end(), c) != fr.used.end()) continue;
            Rational win_mass = 0;
            for (size_t t = 0; t < samples.size(); ++t)
                if (fr.match[t] && wins(samples[t], c)) win_mass += samples[t].w;
            Rational p = win_mass / fr.mass;
            if (p < best_p) {
                best_p = p;
                best_c = c;
            }
        }
        if (fr.leading) {
            chain.leading_coordinates.push_back(best_c);
        }
        // branch over the realized winning (question, answer) values
        std::map<std::pair<int64_t, int64_t>, Rational> branch_mass;
        for (size_t t = 0; t < samples.size(); ++t) {
            if (!fr.match[t] || !wins(samples[t], best_c)) continue;
            branch_mass[{samples[t].q[best_c], samples[t].a[best_c]}] += samples[t].w;
        }
        std::pair<int64_t, int64_t> heaviest{-1, -1};
        Rational heaviest_mass = -1;
        for (const auto& [qa, m] : branch_mass) {
            chain.prefix_win_probability[depth] += m;
            if (m > heaviest_mass) {
                heaviest_mass = m;
                heaviest = qa;
            }
        }
        if (fr.leading && heaviest.first >= 0) chain.leading_tuples.push_back(heaviest);
        for (const auto& [qa, m] : branch_mass) {
            Frame child;
            child.match.assign(samples.size(), 0);
            for (size_t t = 0; t < samples.size(); ++t)
                child.match[t] = fr.match[t] && samples[t].q[best_c] == qa.first &&
                                 samples[t].a[best_c] == qa.second;
            child.used = fr.used;
            child.used.push_back(best_c);
            child.mass = m;
            child.leading = fr.leading && qa == heaviest;
            recurse(child, depth + 1);
        }
    };
    Frame root;
    root.match.assign(samples.size(), 1);
    root.mass = 1;
    root.leading = true;
    recurse(root, 0);
    return chain;
}

// Closed-form repetition bound from a certified hardness criterion.
inline double parrep_bound_from_criterion(double alpha, double epsilon, int64_t question_count,
                                          int64_t answer_count) {
    if (alpha <= 0 || alpha > 1 || epsilon <= 0 || epsilon > 1)
        throw input_error("parrep bound: alpha and epsilon must lie in (0, 1]");
    double exponent = std::log2(1.0 / alpha) /
                      (2.0 * std::log2(4.0 * static_cast<double>(question_count) *
                                       static_cast<double>(answer_count)));
    return std::pow(1.0 - epsilon / 2.0, exponent);
}

// ------------------------------------------------------- hypothesis scan --

struct ScanResult {
    Rational worst_win_probability = 2;  // min over events of min over coordinates
    int worst_coordinate = -1;
    size_t worst_event = 0;
    size_t events_scanned = 0;
    // certification side: every event must have some hard coordinate, so the
    // binding quantity is the max over events of the per-event min
    Rational certified_max_min = 0;
    size_t certification_witness_event = 0;
    Rational certified_epsilon() const { return 1 - certified_max_min; }
};

// Product events generated by fixing (coordinate, question, answer) tuples,
// the shape the inductive criterion conditions on.
inline std::vector<ProductEvent> tuple_event_family(const Game& g_rep, const ProductStrategy& s,
                                                    const Rational& min_mass, int max_depth,
                                                    bool winning_only = true) {
    if (min_mass > 1) throw input_error("tuple_event_family: mass threshold above 1 gives an empty family");
    detail::RepeatedView v(g_rep);
    check_strategy(g_rep, s);
    const int n = v.n, k = v.k;
    Box ab0 = v.base->answer_box();

    std::vector<ProductEvent> out;
    out.push_back(ProductEvent::full(g_rep));

    // grow fixings level by level
    struct Fixing {
        std::vector<std::tuple<int, int64_t, int64_t>> tuples;  // (coordinate, q flat, a flat)
    };
    std::vector<Fixing> frontier{{}};
    for (int depth = 1; depth <= std::min(max_depth, n); ++depth) {
        std::vector<Fixing> next;
        for (const auto& fx : frontier) {
            int start_c = fx.tuples.empty() ? 0 : std::get<0>(fx.tuples.back()) + 1;
            for (int c = start_c; c < n; ++c) {
                for (size_t t = 0; t < v.support.size(); ++t) {
                    for (int64_t af = 0; af < ab0.size(); ++af) {
                        if (winning_only && !v.base->predicate[v.support[t] * ab0.size() + af]) continue;
                        Fixing child = fx;
                        child.tuples.emplace_back(c, v.support[t], af);
                        // build the product event
                        ProductEvent ev = ProductEvent::full(g_rep);
                        for (int j = 0; j < k; ++j) {
                            for (int64_t pf = 0; pf < static_cast<int64_t>(ev.member[j].size()); ++pf) {
                                auto digits = v.player_qpow[j].unflatten(pf);
                                auto answers = v.player_apow[j].unflatten(s.tables[j][pf]);
                                for (const auto& [cc, qf, aflat] : child.tuples) {
                                    int qj = v.joint_base.unflatten(qf)[j];
                                    int aj = ab0.unflatten(aflat)[j];
                                    if (digits[cc] != qj || answers[cc] != aj) {
                                        ev.member[j][pf] = 0;
                                        break;
                                    }
                                }
                            }
                        }
                        if (event_probability(g_rep, ev) >= min_mass) {
                            out.push_back(ev);
                            next.push_back(std::move(child));
                        }
                    }
                }
            }
        }
        frontier = std::move(next);
        if (frontier.empty()) break;
    }
    return out;
}

// Worst-case coordinate win probability over a family of product events.
inline ScanResult criterion_hypothesis_scan(const Game& g_rep, const ProductStrategy& s,
                                            const Rational& min_mass, const std::vector<ProductEvent>& family) {
    if (min_mass > 1) throw input_error("criterion scan: mass threshold above 1 gives an empty family");
    detail::RepeatedView v(g_rep);
    ScanResult res;
    for (size_t idx = 0; idx < family.size(); ++idx) {
        if (event_probability(g_rep, family[idx]) < min_mass) continue;
        ++res.events_scanned;
        Rational event_min = 2;
        for (int i = 0; i < v.n; ++i) {
            Rational p = coordinate_win_probability(g_rep, s, i, family[idx]);
            event_min = std::min(event_min, p);
            if (p < res.worst_win_probability) {
                res.worst_win_probability = p;
                res.worst_coordinate = i;
                res.worst_event = idx;
            }
        }
        if (event_min > res.certified_max_min) {
            res.certified_max_min = event_min;
            res.certification_witness_event = idx;
        }
    }
    if (res.events_scanned == 0) throw input_error("criterion scan: no event meets the mass threshold");
    return res;
}

}  // namespace parlab
