#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "parlab/uniformize.hpp"

using namespace parlab;
using cplx = std::complex<double>;

namespace {

FunctionTable full_parity(int n) {
    FunctionTable f = FunctionTable::constant(ProbabilitySpace::uniform(2), n, 0.0);
    for (int64_t x = 0; x < f.points(); ++x)
        f.v[x] = __builtin_popcountll(static_cast<unsigned long long>(x)) % 2 ? -1.0 : 1.0;
    return f;
}

FunctionTable mod3_character(int n) {
    FunctionTable f = FunctionTable::constant(ProbabilitySpace::uniform(3), n, 0.0);
    for (int64_t x = 0; x < f.points(); ++x) {
        int64_t rest = x;
        int sum = 0;
        for (int i = 0; i < n; ++i) {
            sum += static_cast<int>(rest % 3);
            rest /= 3;
        }
        f.v[x] = std::polar(1.0, 2 * M_PI * (sum % 3) / 3.0);
    }
    return f;
}

FunctionTable dictator(int n) {
    FunctionTable f = FunctionTable::constant(ProbabilitySpace::uniform(2), n, 0.0);
    for (int64_t x = 0; x < f.points(); ++x) f.v[x] = (x >> (n - 1)) ? -1.0 : 1.0;
    return f;
}

IncrementConfig fast_cfg(int live_target) {
    IncrementConfig cfg;
    cfg.delta_grid_points = 2;
    cfg.candidate_sets_per_delta = 4;
    cfg.ascent = {3, 40, 1e-9};
    cfg.live_target = live_target;
    return cfg;
}

}  // namespace

TEST_CASE("increment on the full parity character") {
    const int n = 8;
    auto g = full_parity(n);
    auto inc = increment_grr(g, 0.5, 11, fast_cfg(n));  // live target n pins I empty
    inc.grr.check();

    CHECK(inc.report.l2_before == 0.0);
    CHECK(inc.report.l2_after == 1.0);  // every restricted function is a constant
    for (const auto& [rho, w] : inc.grr.atoms) {
        auto restricted = apply_generalized(g, rho);
        for (const auto& v : restricted.v) CHECK(std::abs(v - restricted.v[0]) < 1e-12);
        // merge classes have even size: parity cancels pairwise
        for (const auto& cls : rho.classes) CHECK(cls.size() % 2 == 0);
    }
    // declared certificate matches remeasurement
    CHECK(inc.grr.declared_epsilon == grr_distribution_error(inc.grr, g.space));
    CHECK(inc.grr.declared_min_free == inc.grr.min_free());
}

TEST_CASE("increment rejects constants") {
    auto c = FunctionTable::constant(ProbabilitySpace::uniform(2), 5, cplx(0.4, 0.2));
    CHECK_THROWS_AS(increment_grr(c, 0.3, 1, fast_cfg(5)), no_certificate_error);
}

TEST_CASE("increment on a mod-3 character") {
    const int n = 6;
    auto g = mod3_character(n);
    IncrementConfig cfg = fast_cfg(n);
    cfg.group_size = 3;       // the phase structure cancels in multiples of 3
    cfg.multiplier_cap = 3;
    auto inc = increment_grr(g, 0.5, 7, cfg);
    inc.grr.check();
    CHECK(inc.report.l2_after > inc.report.l2_before);
    CHECK(inc.report.l2_after > 0.5);
    for (int k : inc.report.multipliers) CHECK(k == 3);
}

TEST_CASE("uniformize stops immediately on constants") {
    std::vector<FunctionTable> gs{FunctionTable::constant(ProbabilitySpace::uniform(2), 5, cplx(0.9, 0.0)),
                                  FunctionTable::constant(ProbabilitySpace::uniform(2), 5, cplx(0.0, 0.3))};
    UniformizeConfig cfg;
    cfg.increment = fast_cfg(5);
    auto out = uniformize(gs, 0.1, 0.4, 3, cfg);
    CHECK(out.report.converged);
    CHECK(out.report.iterations == 0);
    REQUIRE(out.grr.atoms.size() == 1);
    CHECK(out.grr.atoms[0].first.free_count() == 5);
}

TEST_CASE("uniformize flattens a single parity within two increments") {
    const int n = 8;
    std::vector<FunctionTable> gs{full_parity(n)};
    UniformizeConfig cfg;
    cfg.increment = fast_cfg(n);
    auto out = uniformize(gs, 0.1, 0.5, 5, cfg);
    CHECK(out.report.converged);
    CHECK(out.report.iterations <= 2);
    CHECK(out.report.final_bad_probability <= 0.1);
    // potential climbed to 1
    CHECK(out.report.potential_trace.back() == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("uniformize flattens a mod-3 character") {
    const int n = 6;
    std::vector<FunctionTable> gs{mod3_character(n)};
    UniformizeConfig cfg;
    cfg.increment = fast_cfg(n);
    cfg.increment.group_size = 3;
    cfg.increment.multiplier_cap = 3;
    auto out = uniformize(gs, 0.1, 0.5, 13, cfg);
    CHECK(out.report.converged);
    CHECK(out.report.iterations <= 2);
    CHECK(out.report.potential_trace.back() > 0.9);
}

TEST_CASE("uniformize with a parity and a dictator") {
    const int n = 8;
    std::vector<FunctionTable> gs{full_parity(n), dictator(n)};
    UniformizeConfig cfg;
    cfg.increment = fast_cfg(n);
    auto out = uniformize(gs, 0.2, 0.5, 9, cfg);
    // the potential never decreases beyond the 2(r-1) epsilon slack per step
    const double r = static_cast<double>(gs.size());
    for (size_t t = 1; t < out.report.potential_trace.size(); ++t) {
        double slack = 2 * (r - 1) * (t - 1 < out.report.epsilon_trace.size()
                                          ? out.report.epsilon_trace[t - 1]
                                          : out.report.epsilon_trace.back());
        CHECK(out.report.potential_trace[t] >= out.report.potential_trace[t - 1] - slack - 1e-9);
    }
    // the potential stays below the number of functions
    for (double p : out.report.potential_trace) CHECK(p <= r + 1e-9);
}
