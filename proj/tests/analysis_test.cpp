#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "parlab/analysis.hpp"

using namespace parlab;
using cplx = std::complex<double>;

namespace {

FunctionTable random_table(std::mt19937_64& g, const ProbabilitySpace& sp, int dim, bool one_bounded = true) {
    FunctionTable f = FunctionTable::constant(sp, dim, 0.0);
    std::uniform_real_distribution<double> mag(0.0, one_bounded ? 1.0 : 2.0);
    std::uniform_real_distribution<double> ang(0.0, 2 * M_PI);
    for (auto& v : f.v) v = std::polar(mag(g), ang(g));
    return f;
}

FunctionTable pm_dictator(int n) {
    // (-1)^{x_1} on uniform bits
    FunctionTable f = FunctionTable::constant(ProbabilitySpace::uniform(2), n, 0.0);
    for (int64_t x = 0; x < f.points(); ++x) f.v[x] = (x >> (n - 1) & 1) ? -1.0 : 1.0;
    return f;
}

FunctionTable pm_parity(int n, uint64_t coords_mask) {
    FunctionTable f = FunctionTable::constant(ProbabilitySpace::uniform(2), n, 0.0);
    for (int64_t x = 0; x < f.points(); ++x) {
        int bits = 0;
        for (int i = 0; i < n; ++i)
            if ((coords_mask >> i & 1) && (x >> (n - 1 - i) & 1)) ++bits;
        f.v[x] = bits % 2 ? -1.0 : 1.0;
    }
    return f;
}

}  // namespace

TEST_CASE("inner_product") {
    auto sp = ProbabilitySpace::uniform(2);
    auto one = FunctionTable::constant(sp, 3, 1.0);
    CHECK(std::abs(inner_product(one, one) - cplx(1.0)) < 1e-15);

    // orthogonal indicators on a uniform bit
    FunctionTable a = FunctionTable::constant(sp, 1, 0.0), b = a;
    a.v = {1.0, 0.0};
    b.v = {0.0, 1.0};
    CHECK(std::abs(inner_product(a, b)) < 1e-15);

    // against a direct double-loop sum
    std::mt19937_64 g = testutil::rng(2);
    auto f1 = random_table(g, sp, 2), f2 = random_table(g, sp, 2);
    cplx direct = 0;
    for (int x0 = 0; x0 < 2; ++x0)
        for (int x1 = 0; x1 < 2; ++x1) direct += 0.25 * f1.v[x0 * 2 + x1] * std::conj(f2.v[x0 * 2 + x1]);
    CHECK(std::abs(inner_product(f1, f2) - direct) < 1e-14);
}

TEST_CASE("noise_operator") {
    auto f = pm_dictator(2);
    auto same = noise_operator(f, 1.0);
    for (int64_t x = 0; x < f.points(); ++x) CHECK(std::abs(same.v[x] - f.v[x]) < 1e-15);

    auto flat = noise_operator(f, 0.0);
    cplx mean = expectation(f);
    for (int64_t x = 0; x < f.points(); ++x) CHECK(std::abs(flat.v[x] - mean) < 1e-15);

    // dictator contracts to rho * x1
    auto half = noise_operator(f, 0.4);
    for (int64_t x = 0; x < f.points(); ++x) CHECK(std::abs(half.v[x] - 0.4 * f.v[x]) < 1e-15);

    CHECK_THROWS_AS(noise_operator(f, 1.5), input_error);
}

TEST_CASE("stability") {
    auto sp = ProbabilitySpace::uniform(2);
    auto c = FunctionTable::constant(sp, 2, cplx(0.3, 0.4));
    CHECK(stability(c, 0.7) == Catch::Approx(0.25).margin(1e-14));

    std::mt19937_64 g = testutil::rng(9);
    auto f = random_table(g, sp, 3);
    CHECK(stability(f, 0.0) == Catch::Approx(std::norm(expectation(f))).margin(1e-12));

    CHECK(stability(pm_dictator(1), 0.37) == Catch::Approx(0.37).margin(1e-14));

    // monotone in rho for real-valued f, and T_rho is averaging
    FunctionTable real_f = FunctionTable::constant(sp, 3, 0.0);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    for (auto& v : real_f.v) v = val(g);
    double prev = -1;
    for (double rho : {0.0, 0.2, 0.5, 0.8, 1.0}) {
        double s = stability(real_f, rho);
        CHECK(s >= prev - 1e-12);
        prev = s;
        double norm_tf = std::sqrt(stability(noise_operator(real_f, rho), 1.0));
        CHECK(norm_tf <= std::sqrt(stability(real_f, 1.0)) + 1e-12);
    }
}

TEST_CASE("rational-mode calculus is exact") {
    auto sp = ProbabilitySpace::from_rationals({Rational(1, 3), Rational(2, 3)});
    RationalTable f = RationalTable::constant(sp, 2, QComplex(Rational(0)));
    f.v = {QComplex(Rational(1)), QComplex(Rational(0), Rational(1)), QComplex(Rational(-1, 2)),
           QComplex(Rational(1, 3), Rational(1, 7))};
    Rational rho(1, 2);
    Rational stab = stability(f, rho);
    CHECK(stab >= 0);
    auto t = noise_operator(f, rho);
    QComplex ip = inner_product(f, t);
    CHECK(ip.re == stab);
    CHECK(ip.im == 0);
}

TEST_CASE("l1 and kl distances") {
    std::vector<Rational> p{Rational(3, 4), Rational(1, 4)}, q{Rational(1, 2), Rational(1, 2)};
    CHECK(l1_distance(p, p) == 0);
    CHECK(kl_divergence(p, p) == Catch::Approx(0.0).margin(1e-15));
    CHECK(l1_distance(std::vector<Rational>{Rational(1), Rational(0)},
                      std::vector<Rational>{Rational(0), Rational(1)}) == 2);
    CHECK(kl_divergence(p, q) == Catch::Approx(0.18872187554086717).epsilon(1e-9));
    CHECK_THROWS_AS(kl_divergence(q, std::vector<Rational>{Rational(1), Rational(0)}), input_error);

    // Pinsker: D >= l1^2 / 2 on random pairs
    std::mt19937_64 g = testutil::rng(5);
    std::uniform_int_distribution<int> num(1, 20);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Rational> a(4), b(4);
        Rational sa = 0, sb = 0;
        for (int i = 0; i < 4; ++i) {
            a[i] = num(g);
            b[i] = num(g);
            sa += a[i];
            sb += b[i];
        }
        for (int i = 0; i < 4; ++i) {
            a[i] /= sa;
            b[i] /= sb;
        }
        double l1 = l1_distance(a, b).get_d();
        CHECK(kl_divergence(a, b) >= l1 * l1 / 2 - 1e-12);
    }
}

TEST_CASE("marginal_drift_bound") {
    std::vector<ProbabilitySpace> bits(4, ProbabilitySpace::uniform(2));

    auto full = marginal_drift_bound(bits, std::vector<uint8_t>(16, 1));
    CHECK(full.lhs == 0.0);
    CHECK(full.rhs == Catch::Approx(0.0).margin(1e-12));

    std::vector<uint8_t> first_zero(16, 0);
    for (int x = 0; x < 8; ++x) first_zero[x] = 1;  // x1 = 0
    auto half = marginal_drift_bound(bits, first_zero);
    CHECK(half.lhs_exact == Rational(1, 4));
    CHECK(half.rhs == Catch::Approx(std::sqrt(0.5)).epsilon(1e-12));
    CHECK(half.lhs <= half.rhs);

    // the bound holds on random events
    std::vector<ProbabilitySpace> six(6, ProbabilitySpace::uniform(2));
    std::mt19937_64 g = testutil::rng(31);
    int nontrivial = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<uint8_t> mask(64, 0);
        int count = 0;
        for (auto& m : mask) count += (m = g() % 2);
        if (!count) continue;
        auto r = marginal_drift_bound(six, mask);
        CHECK(r.lhs <= r.rhs + 1e-12);
        if (r.lhs > 0) ++nontrivial;
    }
    CHECK(nontrivial > 0);

    CHECK_THROWS_AS(marginal_drift_bound(bits, std::vector<uint8_t>(16, 0)), input_error);
}

TEST_CASE("correlation with product functions") {
    auto sp = ProbabilitySpace::uniform(2);
    std::mt19937_64 g = testutil::rng(13);

    SECTION("unit-modulus product functions correlate perfectly with themselves") {
        int n = 3;
        ProductFunction p = ProductFunction::ones(n, 2);
        std::uniform_real_distribution<double> ang(0.0, 2 * M_PI);
        for (auto& fac : p.factors)
            for (auto& z : fac) z = std::polar(1.0, ang(g));
        FunctionTable f = FunctionTable::constant(sp, n, 1.0);
        for (int64_t x = 0; x < f.points(); ++x) {
            int64_t rest = x;
            for (int i = n - 1; i >= 0; --i) {
                f.v[x] *= std::conj(p.factors[i][rest % 2]);
                rest /= 2;
            }
        }
        CHECK(std::abs(correlation_with_product(f, p)) == Catch::Approx(1.0).epsilon(1e-12));
        auto best = max_product_correlation(f, {4, 100, 1e-10}, 7);
        CHECK(best.value == Catch::Approx(1.0).epsilon(1e-9));
        CHECK(best.monotone);
    }

    SECTION("parity reaches 1") {
        auto best = max_product_correlation(pm_parity(3, 0b111), {4, 100, 1e-10}, 3);
        CHECK(best.value == Catch::Approx(1.0).epsilon(1e-9));
    }

    SECTION("ascent result dominates |E f| and matches a phase-grid oracle") {
        for (int instance = 0; instance < 2; ++instance) {
            FunctionTable f = random_table(g, sp, 2);
            auto best = max_product_correlation(f, {8, 200, 1e-9}, 100 + instance);
            CHECK(best.value >= std::abs(expectation(f)) - 1e-12);

            // exhaustive unit-phase grid, 64 points per entry
            const int G = 64;
            double grid_best = 0;
            for (int a0 = 0; a0 < G; ++a0)
                for (int a1 = 0; a1 < G; ++a1)
                    for (int b0 = 0; b0 < G; ++b0)
                        for (int b1 = 0; b1 < G; ++b1) {
                            cplx p0[2] = {std::polar(1.0, 2 * M_PI * a0 / G), std::polar(1.0, 2 * M_PI * a1 / G)};
                            cplx p1[2] = {std::polar(1.0, 2 * M_PI * b0 / G), std::polar(1.0, 2 * M_PI * b1 / G)};
                            cplx acc = 0;
                            for (int x0 = 0; x0 < 2; ++x0)
                                for (int x1 = 0; x1 < 2; ++x1)
                                    acc += 0.25 * f.v[x0 * 2 + x1] * p0[x0] * p1[x1];
                            grid_best = std::max(grid_best, std::abs(acc));
                        }
            CHECK(best.value >= grid_best - 1e-3);
        }
    }
}

TEST_CASE("product pseudorandomness estimate") {
    SECTION("full parity correlates at every delta") {
        auto f = pm_parity(6, 0b111111);
        auto rep = product_pseudorandomness_estimate(f, 2, 0.5, 60, 17, 4, {2, 40, 1e-8});
        for (const auto& pt : rep.points) CHECK(pt.estimate == 1.0);
        CHECK(rep.not_pseudorandom);
    }

    SECTION("zero function never correlates") {
        auto f = FunctionTable::constant(ProbabilitySpace::uniform(2), 5, 0.0);
        auto rep = product_pseudorandomness_estimate(f, 2, 0.25, 40, 11, 4);
        for (const auto& pt : rep.points) CHECK(pt.estimate == 0.0);
        CHECK_FALSE(rep.not_pseudorandom);
    }

    SECTION("half parity at small delta matches the surviving-coordinate count") {
        const int n = 8;
        auto f = pm_parity(n, 0b1111);  // parity of coordinates 0..3
        double delta = 0.25;
        auto rep = product_pseudorandomness_estimate(f, 2, 0.5, 400, 23, 2, {2, 40, 1e-8});
        REQUIRE(rep.points.size() == 2);
        CHECK(rep.points[0].delta == Catch::Approx(delta).epsilon(1e-12));
        // correlated iff some parity coordinate stays alive, or the whole
        // cube is fixed (the restriction is then a plain +-1 value)
        double p_all_parity_fixed = std::pow(1 - delta, 4);
        double p_everything_fixed = std::pow(1 - delta, n);
        double expect = 1 - p_all_parity_fixed + p_everything_fixed;
        CHECK(rep.points[0].estimate == Catch::Approx(expect).margin(0.08));
    }
}

TEST_CASE("k-wise correlation and independence gap") {
    // uniform even-parity triples: the product of (-1)^{x_i} is constant 1
    JointSpace mu = JointSpace::uniform_on({2, 2, 2}, {{0, 0, 0}, {0, 1, 1}, {1, 0, 1}, {1, 1, 0}});
    std::vector<FunctionTable> fs;
    for (int i = 0; i < 3; ++i) {
        FunctionTable f = FunctionTable::constant(mu.marginal(i), 1, 0.0);
        f.v = {1.0, -1.0};
        fs.push_back(f);
    }
    CHECK(std::abs(k_wise_correlation(fs, mu) - cplx(1.0)) < 1e-12);
    CHECK(independence_gap(fs, mu) == Catch::Approx(1.0).epsilon(1e-12));

    std::vector<FunctionTable> ones;
    for (int i = 0; i < 3; ++i) ones.push_back(FunctionTable::constant(mu.marginal(i), 1, 1.0));
    CHECK(std::abs(k_wise_correlation(ones, mu) - cplx(1.0)) < 1e-12);
    CHECK(independence_gap(ones, mu) < 1e-12);

    // the gap vanishes for any functions under a product measure
    std::mt19937_64 g = testutil::rng(77);
    JointSpace prod;
    prod.sizes = {2, 2};
    prod.pmf = {Rational(1, 8), Rational(3, 8), Rational(1, 8), Rational(3, 8)};
    REQUIRE(prod.is_product_measure());
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<FunctionTable> r;
        for (int i = 0; i < 2; ++i) r.push_back(random_table(g, prod.marginal(i), 2));
        CHECK(independence_gap(r, prod) < 1e-12);
    }
}
