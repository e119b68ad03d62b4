// Acceptance suite: every criterion below runs at its stated tolerance and
// prints one PASS/FAIL line. Keep assertions exact where the contract is
// exact; statistical checks carry their confidence slack explicitly.

#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <iostream>

#include "helpers.hpp"
#include "parlab/abelian.hpp"
#include "parlab/gallery.hpp"
#include "parlab/json_io.hpp"
#include "parlab/parrep.hpp"
#include "parlab/structure.hpp"
#include "parlab/uniformize.hpp"

using namespace parlab;

namespace {

struct CriterionTimer {
    std::string name;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    bool ok = true;

    explicit CriterionTimer(std::string n) : name(std::move(n)) {}
    void finish() {
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                                        start)
                      .count();
        std::cout << "[acceptance] " << name << ": " << (ok ? "PASS" : "FAIL") << " (" << ms << " ms)"
                  << std::endl;
    }
};

#define CRITERION_CHECK(timer, expr)   \
    do {                               \
        bool ok_ = static_cast<bool>(expr); \
        (timer).ok = (timer).ok && ok_;     \
        CHECK(expr);                   \
    } while (0)

SupportSet anticorr_support() {
    return SupportSet::from_tuples({2, 2, 2}, {{0, 0, 1}, {0, 1, 0}, {1, 0, 0}});
}

FunctionTable random_table(std::mt19937_64& g, const ProbabilitySpace& sp, int dim) {
    FunctionTable f = FunctionTable::constant(sp, dim, 0.0);
    std::uniform_real_distribution<double> mag(0.0, 1.0), ang(0.0, 2 * M_PI);
    for (auto& v : f.v) v = std::polar(mag(g), ang(g));
    return f;
}

FunctionTable full_parity(int n) {
    FunctionTable f = FunctionTable::constant(ProbabilitySpace::uniform(2), n, 0.0);
    for (int64_t x = 0; x < f.points(); ++x)
        f.v[x] = __builtin_popcountll(static_cast<unsigned long long>(x)) % 2 ? -1.0 : 1.0;
    return f;
}

ProductStrategy random_strategy(std::mt19937_64& g, const Game& game) {
    ProductStrategy s;
    s.arity = game.copies;
    for (int j = 0; j < game.players; ++j) {
        std::vector<int> t(game.question_labels[j].size());
        for (auto& a : t) a = static_cast<int>(g() % game.answer_labels[j].size());
        s.tables.push_back(t);
    }
    return s;
}

}  // namespace

TEST_CASE("criterion 01: classification of the gallery examples") {
    CriterionTimer timer("01 classification of gallery examples");

    auto ghz = game_support(make_ghz());
    auto r = classify(ghz);
    CRITERION_CHECK(timer, r.pairwise_connected);
    CRITERION_CHECK(timer, !r.connected);
    auto w = universal_embedding(ghz);
    CRITERION_CHECK(timer, !w.trivial);
    CRITERION_CHECK(timer, w.verify(ghz));
    // Z/2-compatible: a single torsion factor 2, detecting question parity
    REQUIRE(w.group.torsion.size() == 1);
    CRITERION_CHECK(timer, w.group.torsion[0] == 2);
    for (int i = 0; i < 3; ++i) CRITERION_CHECK(timer, (w.sigma[i][1][0] - w.sigma[i][0][0]) % 2 != 0);
    CRITERION_CHECK(timer, check_marginal_condition(ghz).holds);

    auto anti = anticorr_support();
    CRITERION_CHECK(timer, is_pairwise_connected(anti).first);
    auto zw = has_Z_embedding(anti);
    CRITERION_CHECK(timer, zw.has_value());
    CRITERION_CHECK(timer, zw->verify(anti));
    CRITERION_CHECK(timer, check_marginal_condition(anti).holds);

    for (int k : {2, 3})
        CRITERION_CHECK(timer, universal_embedding(game_support(make_rectangle(k, 2))).trivial);

    auto diag = SupportSet::from_tuples({2, 2}, {{0, 0}, {1, 1}});
    auto [pw, wit] = is_pairwise_connected(diag);
    CRITERION_CHECK(timer, !pw);
    REQUIRE(wit.has_value());
    auto bw = bipartition_embedding_witness(diag, wit->coord_left, wit->coord_right, *wit);
    CRITERION_CHECK(timer, bw.verify(diag));
    timer.finish();
}

TEST_CASE("criterion 02: lattice criterion vs brute-force embedding search") {
    CriterionTimer timer("02 embedding-detection oracle equivalence");

    // pinned torsion-only case: the even-parity support embeds into Z/2 but
    // not into the integers, and both searches must see exactly that
    auto ghz = game_support(make_ghz());
    CRITERION_CHECK(timer, has_nontrivial_embedding(ghz));
    CRITERION_CHECK(timer, testutil::zm_embedding_exists(ghz, 2));
    CRITERION_CHECK(timer, !testutil::z_embedding_exists_boxed(ghz, 3));

    std::mt19937_64 g = testutil::rng(20220);
    int disagreements = 0, sampled = 0;
    while (sampled < 500) {
        int k = 2 + static_cast<int>(g() % 3);
        std::vector<int> sizes;
        int total = 0;
        for (int i = 0; i < k; ++i) {
            int remaining = 8 - total - 2 * (k - i - 1);
            int sz = 2 + (remaining > 2 ? static_cast<int>(g() % (remaining - 1)) : 0);
            sizes.push_back(sz);
            total += sz;
        }
        if (total > 8) continue;
        auto s = testutil::random_support(g, sizes, 0.25 + 0.5 * (g() % 3) / 2.0);
        ++sampled;
        bool lattice = has_nontrivial_embedding(s);
        bool brute = false;
        for (int m = 2; m <= 12 && !brute; ++m) brute = testutil::zm_embedding_exists(s, m);
        if (!brute) brute = testutil::z_embedding_exists_boxed(s, 3);
        if (lattice != brute) ++disagreements;
    }
    CRITERION_CHECK(timer, disagreements == 0);
    timer.finish();
}

TEST_CASE("criterion 03: exact values and value-preserving reductions") {
    CriterionTimer timer("03 exact values, repetition bracket, reductions");

    Game ghz = make_ghz();
    auto [v1, opt1] = value(ghz);
    CRITERION_CHECK(timer, v1 == Rational(3, 4));

    Game ghz2 = repeat_game(ghz, 2);
    Rational v2 = value(ghz2).first;
    CRITERION_CHECK(timer, v2 >= v1 * v1);
    CRITERION_CHECK(timer, v2 <= v1);
    // regression pin from the exhaustive search (the bracket only forces
    // [9/16, 3/4]; the search machinery is validated against a naive
    // enumeration oracle in the unit suite)
    CRITERION_CHECK(timer, v2 == Rational(5, 8));

    // conditioning the repetition on "first question is 000" frees one copy:
    // the players win it outright and face a fresh single copy
    {
        ProductEvent first000 = ProductEvent::full(ghz2);
        Box qpow({2, 2});
        for (int j = 0; j < 3; ++j)
            for (size_t q = 0; q < first000.member[j].size(); ++q)
                first000.member[j][q] = qpow.unflatten(static_cast<int64_t>(q))[0] == 0;
        CRITERION_CHECK(timer, value_conditioned(ghz2, first000) == Rational(3, 4));
    }

    // repetition bracket for the other gallery games, caps permitting
    for (const Game& base : {make_anticorr(), make_rectangle(3, 2), make_random_3cnf(3, 2, 9)}) {
        Rational single = value(base).first;
        Rational doubled = value(repeat_game(base, 2)).first;
        CRITERION_CHECK(timer, doubled >= single * single);
        CRITERION_CHECK(timer, doubled <= single);
    }

    std::mt19937_64 g = testutil::rng(303);
    Box qb({2, 2, 2});
    for (int trial = 0; trial < 50; ++trial) {
        Game game = testutil::random_game(g, {2, 2, 2}, {2, 2, 2}, 1.0, 0.5);

        // make players 0 and 1 mergeable through a random bijection
        std::vector<int> corr = g() % 2 ? std::vector<int>{0, 1} : std::vector<int>{1, 0};
        Game mergeable = game;
        Rational moved = 0;
        std::vector<int> q(3);
        for (int64_t f = 0; f < qb.size(); ++f) {
            qb.unflatten_into(f, q);
            if (corr[q[0]] != q[1]) {
                moved += mergeable.query[f];
                mergeable.query[f] = 0;
            }
        }
        mergeable.query[qb.flatten({0, corr[0], 0})] += moved;
        Game merged = merge_players(mergeable, 0, 1, corr);
        CRITERION_CHECK(timer, value(merged).first == value(mergeable).first);

        // make player 2 deterministic
        Game det = game;
        moved = 0;
        for (int64_t f = 0; f < qb.size(); ++f) {
            qb.unflatten_into(f, q);
            if (q[2] != 0) {
                moved += det.query[f];
                det.query[f] = 0;
            }
        }
        det.query[qb.flatten({0, 0, 0})] += moved;
        Game dropped = eliminate_deterministic_player(det, 2);
        CRITERION_CHECK(timer, value(dropped).first == value(det).first);
    }
    timer.finish();
}

TEST_CASE("criterion 04: restriction-stability identity") {
    CriterionTimer timer("04 restriction-stability identity");
    std::mt19937_64 g = testutil::rng(404);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    double worst = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        int n = 2 + static_cast<int>(g() % 5);  // up to 6
        int s = 2 + static_cast<int>(g() % 2);  // up to 3
        auto sp = ProbabilitySpace::uniform(s);
        auto f = random_table(g, sp, n);
        double p = unit(g), delta = unit(g);
        auto [lhs, rhs] = restriction_stability_identity_check(f, p, delta);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    CRITERION_CHECK(timer, worst <= 1e-10);

    // exact rational equality at n <= 4, both alphabet sizes
    for (int trial = 0; trial < 12; ++trial) {
        int n = 2 + static_cast<int>(g() % 3);
        auto sp = trial % 3 == 0 ? ProbabilitySpace::uniform(3)
                  : trial % 3 == 1
                      ? ProbabilitySpace::uniform(2)
                      : ProbabilitySpace::from_rationals({Rational(1, 3), Rational(2, 3)});
        RationalTable f = RationalTable::constant(sp, n, QComplex(Rational(0)));
        std::uniform_int_distribution<long> num(-6, 6);
        for (auto& v : f.v) v = QComplex(Rational(num(g), 7), Rational(num(g), 7));
        Rational p(1 + static_cast<long>(g() % 4), 5), delta(1 + static_cast<long>(g() % 4), 5);
        auto [lhs, rhs] = restriction_stability_identity_check(f, p, delta);
        CRITERION_CHECK(timer, lhs == rhs);
    }
    timer.finish();
}

TEST_CASE("criterion 05: degree-schedule exceedance bound") {
    CriterionTimer timer("05 degree schedule bound");
    std::mt19937_64 g = testutil::rng(505);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 4 + static_cast<int>(g() % 3);
        auto f = random_table(g, ProbabilitySpace::uniform(2), n);
        double delta = 0.3 + 0.4 * (g() % 3) / 2.0;
        int T = 3 + static_cast<int>(g() % 3);
        double eta = 0.2 + 0.3 * (g() % 3) / 2.0;
        auto rep = random_restriction_degree_schedule(f, delta, T, eta, 10000, g());
        CRITERION_CHECK(timer, rep.exceedance <= rep.markov_bound + rep.radius);
    }
    timer.finish();
}

TEST_CASE("criterion 06: restriction-distribution certificates") {
    CriterionTimer timer("06 grr certificates and pairing error decay");

    // plain p-random distributions have error exactly zero
    for (int n : {3, 4, 5}) {
        auto sp = n % 2 ? ProbabilitySpace::uniform(2)
                        : ProbabilitySpace::from_rationals({Rational(1, 4), Rational(3, 4)});
        auto grr = plain_random_restriction_grr(sp, n, Rational(n, n + 2));
        CRITERION_CHECK(timer, grr_distribution_error(grr, sp) == 0);
    }

    // pairing error decays like 1/sqrt(|S|) under the fitted envelope
    auto sp = ProbabilitySpace::uniform(2);
    std::vector<int> sizes{8, 16, 32, 64};
    std::vector<PairingErrorEstimate> est;
    for (int S : sizes) est.push_back(pairing_merge_l1_estimate(sp, S, 2, 10000, 6000 + S));
    for (size_t t = 0; t + 1 < est.size(); ++t)
        CRITERION_CHECK(timer,
                        est[t + 1].estimate <= est[t].estimate + est[t].radius + est[t + 1].radius);
    double envelope_c = (est[0].estimate + est[0].radius) * std::sqrt(8.0) / 2.0;
    for (size_t t = 0; t < est.size(); ++t)
        CRITERION_CHECK(timer,
                        est[t].estimate <= envelope_c * 2.0 / std::sqrt(double(sizes[t])) + est[t].radius);
    timer.finish();
}

TEST_CASE("criterion 07: conditional restriction distributions") {
    CriterionTimer timer("07 conditional grr bounds");
    std::mt19937_64 g = testutil::rng(707);
    auto sp = ProbabilitySpace::uniform(2);
    int checked = 0;
    while (checked < 200) {
        int n = 3 + static_cast<int>(g() % 3);  // up to 5
        GeneralizedRandomRestriction grr;
        grr.n = n;
        // mixture: a plain keep-alive distribution plus a couple of merges
        Rational merge_weight(1 + static_cast<long>(g() % 2), 8);
        auto plain = plain_random_restriction_grr(sp, n, Rational(1, 2));
        for (const auto& [rho, w] : plain.atoms) grr.atoms.emplace_back(rho, w * (1 - merge_weight));
        {
            GeneralizedRestriction rho;
            rho.n = n;
            int a = static_cast<int>(g() % n), b = static_cast<int>(g() % n);
            if (a == b) b = (a + 1) % n;
            rho.classes.push_back({std::min(a, b), std::max(a, b)});
            for (int c = 0; c < n; ++c)
                if (c != a && c != b) rho.classes.push_back({c});
            std::sort(rho.classes.begin(), rho.classes.end());
            grr.atoms.emplace_back(rho, merge_weight);
        }
        grr.declared_min_free = grr.min_free();
        grr.declared_epsilon = grr_distribution_error(grr, sp);

        std::vector<uint8_t> e(int64_t{1} << n, 0);
        int count = 0;
        for (auto& b : e) count += (b = (g() % 4) < 3);
        if (!count) continue;
        if (Rational(count, static_cast<long>(e.size())) <= grr.declared_epsilon) continue;
        auto check = conditional_grr_property_check(grr, sp, e);
        CRITERION_CHECK(timer, check.per_atom_bound);
        CRITERION_CHECK(timer, check.mixture_ok);
        ++checked;
    }
    timer.finish();
}

TEST_CASE("criterion 08: increment and uniformization") {
    CriterionTimer timer("08 increment and uniformization");

    IncrementConfig fast;
    fast.delta_grid_points = 2;
    fast.candidate_sets_per_delta = 4;
    fast.ascent = {3, 40, 1e-9};

    // the parity example: restricted averages reach 1 exactly
    {
        const int n = 8;
        auto f = full_parity(n);
        IncrementConfig cfg = fast;
        cfg.live_target = n;
        auto inc = increment_grr(f, 0.5, 11, cfg);
        CRITERION_CHECK(timer, inc.report.l2_after == 1.0);
        for (const auto& [rho, w] : inc.grr.atoms) {
            auto restricted = apply_generalized(f, rho);
            bool constant = true;
            for (const auto& v : restricted.v) constant = constant && std::abs(v - restricted.v[0]) < 1e-12;
            CRITERION_CHECK(timer, constant);
        }

        UniformizeConfig ucfg;
        ucfg.increment = cfg;
        auto out = uniformize({f}, 0.1, 0.5, 5, ucfg);
        CRITERION_CHECK(timer, out.report.converged);
        CRITERION_CHECK(timer, out.report.iterations <= 2);
    }

    // 100 seeded runs: the potential is non-decreasing within the slack
    {
        std::mt19937_64 g = testutil::rng(808);
        UniformizeConfig ucfg;
        ucfg.increment = fast;
        ucfg.increment.live_target = 6;
        ucfg.max_iterations = 4;
        for (int seed = 0; seed < 100; ++seed) {
            std::vector<FunctionTable> gs;
            gs.push_back(full_parity(6));
            if (seed % 2) {
                FunctionTable dict = FunctionTable::constant(ProbabilitySpace::uniform(2), 6, 0.0);
                for (int64_t x = 0; x < dict.points(); ++x) dict.v[x] = (x >> 5) ? -1.0 : 1.0;
                gs.push_back(dict);
            }
            auto out = uniformize(gs, 0.2, 0.5, static_cast<uint64_t>(seed), ucfg);
            const double r = static_cast<double>(gs.size());
            for (size_t t = 1; t < out.report.potential_trace.size(); ++t) {
                double eps = out.report.epsilon_trace.empty()
                                 ? 0.0
                                 : out.report.epsilon_trace[std::min(t - 1, out.report.epsilon_trace.size() - 1)];
                CRITERION_CHECK(timer, out.report.potential_trace[t] >=
                                           out.report.potential_trace[t - 1] - 2 * (r - 1) * eps - 1e-9);
            }
        }
    }
    timer.finish();
}

TEST_CASE("criterion 09: information increment inequality") {
    CriterionTimer timer("09 information increment inequality");
    std::mt19937_64 g = testutil::rng(909);
    int checked = 0;
    while (checked < 200) {
        int n = 3 + static_cast<int>(g() % 2);  // 3 or 4
        Game base = testutil::random_game(g, {2, 2}, {2, 2}, 0.9, 0.5);
        Game rep = repeat_game(base, n);
        int coord = static_cast<int>(g() % n);

        ProductEvent e = ProductEvent::full(rep);
        for (int j = 0; j < 2; ++j)
            for (auto& b : e.member[j]) b = (g() % 4) < 3;

        GeneralizedRandomRestriction grr;
        grr.n = n;
        Rational merge_weight(1, 8);
        // merge the two lowest non-embedded coordinates, fix another letter-wise
        std::vector<int> others;
        for (int c = 0; c < n; ++c)
            if (c != coord) others.push_back(c);
        {
            GeneralizedRestriction rho;
            rho.n = n;
            rho.classes.push_back({coord});
            rho.classes.push_back({others[0], others[1]});
            for (size_t t = 2; t < others.size(); ++t) rho.classes.push_back({others[t]});
            std::sort(rho.classes.begin(), rho.classes.end());
            grr.atoms.emplace_back(rho, merge_weight);
        }
        for (int letter = 0; letter < 4; ++letter) {
            if (base.query[letter] == 0) continue;
            GeneralizedRestriction rho;
            rho.n = n;
            for (int c = 0; c < n; ++c)
                if (c != others[0]) rho.classes.push_back({c});
            rho.fixed = {others[0]};
            rho.values = {letter};
            grr.atoms.emplace_back(rho, (1 - merge_weight) * base.query[letter]);
        }
        grr.declared_min_free = grr.min_free();
        try {
            auto out = information_increment_check(rep, e, grr, coord);
            CRITERION_CHECK(timer, out.holds);
            ++checked;
        } catch (const input_error&) {
            // zero-mass event or epsilon >= alpha: not a valid instance
        }
    }
    timer.finish();
}

TEST_CASE("criterion 10: hard-coordinate chain and the closed-form bound") {
    CriterionTimer timer("10 hard-coordinate harness");

    Game ghz = make_ghz();
    Game rep = repeat_game(ghz, 2);
    auto [v2, witness] = value(rep);
    auto chain = greedy_hard_chain(rep, witness);
    CRITERION_CHECK(timer, chain.prefix_win_probability[1] == v2);
    CRITERION_CHECK(timer, chain.prefix_win_probability[0] >= chain.prefix_win_probability[1]);

    // closed-form bound, hand arithmetic
    CRITERION_CHECK(timer, std::abs(parrep_bound_from_criterion(1.0 / 16, 1.0, 2, 2) -
                                    std::pow(2.0, -0.5)) <= 1e-12);
    CRITERION_CHECK(timer, std::abs(parrep_bound_from_criterion(1.0, 0.7, 8, 8) - 1.0) <= 1e-12);

    // certified tuple-family hypothesis forces the decay on the chain
    Rational alpha(1, 256);
    auto family = tuple_event_family(rep, witness, alpha, 2);
    auto scan = criterion_hypothesis_scan(rep, witness, alpha, family);
    Rational eps = scan.certified_epsilon();
    CRITERION_CHECK(timer, eps >= 0);
    int64_t s = ghz.question_box().size() * ghz.answer_box().size();
    int m = static_cast<int>(std::floor(std::log2(256.0) / std::log2(4.0 * s)));
    Rational decay = 1;
    Rational factor = 1 - eps / 2;
    for (int k = 1; k <= std::min(m, rep.copies); ++k) {
        decay *= factor;
        CRITERION_CHECK(timer, chain.prefix_win_probability[k - 1] <= decay);
    }
    timer.finish();
}

TEST_CASE("criterion 11: embedding-strategy consistency") {
    CriterionTimer timer("11 embedding strategy consistency");
    Game ghz = make_ghz();
    Game rep = repeat_game(ghz, 2);
    auto [v1, opt] = value(ghz);
    ProductStrategy per_coord = independent_strategy(rep, opt);
    ProductEvent full = ProductEvent::full(rep);

    auto report = simulate_embedding_strategy(rep, per_coord, full, {});
    for (int i = 0; i < 2; ++i)
        CRITERION_CHECK(timer, 1 - report.losing_probability == coordinate_win_probability(rep, per_coord, i, full));
    CRITERION_CHECK(timer, report.decomposition_identity_ok);

    std::mt19937_64 g = testutil::rng(1111);
    for (int trial = 0; trial < 6; ++trial) {
        ProductStrategy s = random_strategy(g, rep);
        ProductEvent e = ProductEvent::full(rep);
        for (int j = 0; j < 3; ++j)
            for (auto& b : e.member[j]) b = (g() % 3) < 2;
        if (event_probability(rep, e) == 0) continue;
        auto r = simulate_embedding_strategy(rep, s, e, {});
        CRITERION_CHECK(timer, r.decomposition_identity_ok);
        CRITERION_CHECK(timer, r.losing_probability >= 0);
        CRITERION_CHECK(timer, r.losing_probability <= 1);
    }
    timer.finish();
}

TEST_CASE("criterion 12: random 3-CNF connectivity empirics") {
    CriterionTimer timer("12 random 3-CNF connectivity");
    const int d = 8;
    const int m_low = d;
    const int m_mid = 2 * d;
    const int m_high = static_cast<int>(std::ceil(4.0 * d * std::log2(double(d))));
    auto frequency = [&](int m) {
        int connected = 0;
        for (int seed = 0; seed < 200; ++seed) {
            Game g = make_random_3cnf(m, d, 12000 + seed);
            if (is_pairwise_connected(game_support(g)).first) ++connected;
        }
        return connected / 200.0;
    };
    double low = frequency(m_low), mid = frequency(m_mid), high = frequency(m_high);
    INFO("frequency at m=" << m_low << "/" << m_mid << "/" << m_high << ": " << low << " " << mid << " "
                           << high);
    // non-decreasing sweep (statistical slack) and a clear gap at the top
    CRITERION_CHECK(timer, mid >= low - 0.1);
    CRITERION_CHECK(timer, high >= mid - 0.1);
    CRITERION_CHECK(timer, high - low >= 0.5);
    timer.finish();
}
