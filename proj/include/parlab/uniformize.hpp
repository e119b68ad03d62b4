#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>

#include "parlab/restriction.hpp"

namespace parlab {

// The asymptotic parameter formulas degenerate at desk scale, so every
// exponent is overridable; defaults follow the construction's shape.
struct IncrementConfig {
    int delta_grid_points = 8;
    int candidate_sets_per_delta = 8;
    AscentConfig ascent{4, 60, 1e-9};
    std::optional<int> live_target;     // n', default ceil(sqrt(n))
    std::optional<int> group_count;     // r, default ceil(m^{1/(16 s^2)})
    std::optional<int> group_size;      // default ceil(sqrt(m)/2)
    std::optional<int> multiplier_cap;  // default max(2, floor(m^{1/(4s)}))
    int64_t support_cap = 50000;
    int64_t table_cap = int64_t{1} << 22;
    int64_t z_enumeration_cap = int64_t{1} << 14;  // skip candidate sets past this
};

struct NotPseudorandomCertificate {
    double delta = 0;             // the keep-alive rate that certified failure
    std::vector<int> fixed_set;   // I
    Rational good_mass = 0;       // Pr_z[max correlation >= gamma]
    // per fixed value z (flat over Sigma^I): the correlating product, when good
    std::vector<std::optional<ProductFunction>> witnesses;
};

namespace detail {

inline double torus_inf_norm(const std::vector<double>& v) {
    double worst = 0;
    for (double x : v) {
        double frac = x - std::floor(x);
        worst = std::max(worst, std::min(frac, 1.0 - frac));
    }
    return worst;
}

inline int64_t binomial(int n, int k) {
    int64_t r = 1;
    for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return r;
}

}  // namespace detail

// Searches the estimator's geometric delta grid for a fixed set I of size at
// most (1 - delta0/2) n whose good-value mass reaches gamma/2; the good set
// and its correlating products are computed exactly over all of Sigma^I.
inline std::optional<NotPseudorandomCertificate> find_failure_certificate(const FunctionTable& centered_f,
                                                                          double gamma, std::mt19937_64& rng,
                                                                          const IncrementConfig& cfg) {
    const int n = centered_f.dim;
    if (n == 0) return std::nullopt;
    const int live_target = cfg.live_target.value_or(static_cast<int>(std::ceil(std::sqrt(double(n)))));
    const double delta0 = static_cast<double>(live_target) / n;
    auto grid = detail::geometric_grid(delta0, 1.0, cfg.delta_grid_points);
    // any certified rate works; prefer those keeping more coordinates alive,
    // where the merge construction has room
    std::reverse(grid.begin(), grid.end());
    const int max_fixed = static_cast<int>(std::floor((1.0 - delta0 / 2) * n));

    for (double delta : grid) {
        for (int trial = 0; trial < cfg.candidate_sets_per_delta; ++trial) {
            Restriction probe = sample_keep_alive_restriction(n, delta, centered_f.space, rng);
            if (static_cast<int>(probe.fixed.size()) > max_fixed) continue;
            double zspace = std::pow(double(centered_f.alphabet()), double(probe.fixed.size()));
            if (zspace > static_cast<double>(cfg.z_enumeration_cap)) continue;
            NotPseudorandomCertificate cert;
            cert.delta = delta;
            cert.fixed_set = probe.fixed;
            int64_t zcount = checked_ipow(centered_f.alphabet(), static_cast<int>(probe.fixed.size()),
                                          cfg.table_cap);
            cert.witnesses.assign(zcount, std::nullopt);
            Rational good = 0;
            std::vector<int> z(probe.fixed.size());
            for (int64_t zf = 0; zf < zcount; ++zf) {
                int64_t rest = zf;
                for (size_t i = probe.fixed.size(); i-- > 0;) {
                    z[i] = static_cast<int>(rest % centered_f.alphabet());
                    rest /= centered_f.alphabet();
                }
                Rational wz(1);
                for (int v : z) wz *= centered_f.space.mass[v];
                if (wz == 0) continue;
                FunctionTable g = apply_restriction(centered_f, Restriction{probe.fixed, z});
                if (g.dim == 0) {
                    if (std::abs(g.v[0]) >= gamma) {
                        cert.witnesses[zf] = ProductFunction::ones(0, centered_f.alphabet());
                        good += wz;
                    }
                    continue;
                }
                auto ascent = max_product_correlation(g, cfg.ascent, rng());
                if (ascent.value >= gamma) {
                    cert.witnesses[zf] = ascent.argmax;
                    good += wz;
                }
            }
            cert.good_mass = good;
            if (good.get_d() >= gamma / 2) return cert;
        }
    }
    return std::nullopt;
}

struct IncrementReport {
    double delta_certified = 0;
    std::vector<int> fixed_set;
    double good_mass = 0;
    int groups_used = 0;
    int group_size = 0;
    std::vector<int> multipliers;
    int degenerate_good_branches = 0;  // good z where no group could be formed
    double l2_before = 0, l2_after = 0;
    Rational measured_epsilon = 0;
    int min_free = 0;
};

struct IncrementResult {
    GeneralizedRandomRestriction grr;
    IncrementReport report;
};

// One energy-increment step: detect a pseudorandomness failure of
// g - E[g], then build the explicit restriction distribution that merges
// phase-aligned coordinates (multiplied until the phases cancel) and fixes
// the rest, so the restricted averages grow in square mean.
inline IncrementResult increment_grr(const FunctionTable& g, double gamma, uint64_t seed,
                                     const IncrementConfig& cfg = {}) {
    const int n = g.dim, s = g.alphabet();
    if (s < 2) throw input_error("increment: alphabet must have at least two letters");
    std::mt19937_64 rng(seed);
    FunctionTable f = centered(g);
    auto cert = find_failure_certificate(f, gamma, rng, cfg);
    if (!cert)
        throw no_certificate_error(
            "increment: no failure certificate found; the function appears product-pseudorandom at the "
            "tested parameters");

    IncrementResult out;
    out.report.delta_certified = cert->delta;
    out.report.fixed_set = cert->fixed_set;
    out.report.good_mass = cert->good_mass.get_d();
    out.grr.n = n;

    std::vector<int> live;
    {
        std::vector<uint8_t> fixed_mask(n, 0);
        for (int i : cert->fixed_set) fixed_mask[i] = 1;
        for (int i = 0; i < n; ++i)
            if (!fixed_mask[i]) live.push_back(i);
    }
    const int m = static_cast<int>(live.size());
    // a group must at least hold a cancelling pair; the asymptotic formula
    // dips below that at desk scale
    const int group_size = cfg.group_size.value_or(
        std::min(m, std::max(2, static_cast<int>(std::ceil(std::sqrt(double(m)) / 2)))));
    const int r_target = cfg.group_count.value_or(
        static_cast<int>(std::ceil(std::pow(double(m), 1.0 / (16.0 * s * s)))));
    const int k_cap = cfg.multiplier_cap.value_or(
        std::max(2, static_cast<int>(std::floor(std::pow(double(m), 1.0 / (4.0 * s))))));
    const double cell_width = std::pow(double(m), -1.0 / (2.0 * s));
    out.report.group_size = group_size;

    const int64_t zcount = checked_ipow(s, static_cast<int>(cert->fixed_set.size()), cfg.table_cap);
    std::vector<int> z(cert->fixed_set.size());
    for (int64_t zf = 0; zf < zcount; ++zf) {
        int64_t rest = zf;
        for (size_t i = cert->fixed_set.size(); i-- > 0;) {
            z[i] = static_cast<int>(rest % s);
            rest /= s;
        }
        Rational wz(1);
        for (int v : z) wz *= g.space.mass[v];
        if (wz == 0) continue;

        if (!cert->witnesses[zf]) {
            Restriction plain{cert->fixed_set, z};
            out.grr.atoms.emplace_back(GeneralizedRestriction::from_plain(plain, n), wz);
            continue;
        }

        // phases of the correlating product on the live coordinates, in the
        // gauge where the first letter has phase zero (a constant rotation
        // per factor never changes the correlation, and the canonical gauge
        // makes equal phase structure land in equal grid cells)
        const ProductFunction& p = *cert->witnesses[zf];
        std::vector<std::vector<double>> phase(m, std::vector<double>(s, 0.0));
        for (int t = 0; t < m; ++t) {
            double base = std::arg(p.factors[t][0]) / (2 * M_PI);
            for (int a = 0; a < s; ++a) {
                double ang = std::arg(p.factors[t][a]) / (2 * M_PI) - base;
                phase[t][a] = ang - std::floor(ang);
            }
        }

        // pigeonhole the phase vectors into grid cells, then chop cells into
        // disjoint groups
        std::map<std::vector<int>, std::vector<int>> cells;
        for (int t = 0; t < m; ++t) {
            std::vector<int> key(s);
            for (int a = 0; a < s; ++a) key[a] = static_cast<int>(std::floor(phase[t][a] / cell_width));
            cells[key].push_back(t);
        }
        std::vector<std::vector<int>> groups;
        for (const auto& [key, members] : cells) {
            for (size_t start = 0; start + group_size <= members.size() && static_cast<int>(groups.size()) < r_target;
                 start += group_size)
                groups.emplace_back(members.begin() + start, members.begin() + start + group_size);
            if (static_cast<int>(groups.size()) >= r_target) break;
        }
        if (groups.empty()) {
            ++out.report.degenerate_good_branches;
            Restriction plain{cert->fixed_set, z};
            out.grr.atoms.emplace_back(GeneralizedRestriction::from_plain(plain, n), wz);
            continue;
        }
        out.report.groups_used = std::max(out.report.groups_used, static_cast<int>(groups.size()));

        // multiplier per group: make the summed phases of the merged class
        // as close to zero as possible
        std::vector<int> multipliers;
        for (const auto& grp : groups) {
            const auto& v = phase[grp[0]];
            int best_k = 1;
            double best_norm = 2;
            int cap = std::min<int>(k_cap, static_cast<int>(grp.size()));
            for (int k = 1; k <= cap; ++k) {
                std::vector<double> kv(s);
                for (int a = 0; a < s; ++a) kv[a] = k * v[a];
                double norm = detail::torus_inf_norm(kv);
                if (norm < best_norm - 1e-12) {
                    best_norm = norm;
                    best_k = k;
                }
            }
            multipliers.push_back(best_k);
        }
        if (out.report.multipliers.empty()) out.report.multipliers = multipliers;

        // enumerate the uniform choices of T_i inside S_i and the uniform
        // fill of the leftover live coordinates
        Rational combo_weight(1);
        std::vector<std::vector<std::vector<int>>> subset_choices(groups.size());
        for (size_t gi = 0; gi < groups.size(); ++gi) {
            const auto& grp = groups[gi];
            int k = multipliers[gi];
            std::vector<int> pick(k);
            std::vector<std::vector<int>>& all = subset_choices[gi];
            std::function<void(int, int)> rec = [&](int start, int depth) {
                if (depth == k) {
                    std::vector<int> subset;
                    for (int t = 0; t < k; ++t) subset.push_back(grp[pick[t]]);
                    all.push_back(subset);
                    return;
                }
                for (int c = start; c <= static_cast<int>(grp.size()) - (k - depth); ++c) {
                    pick[depth] = c;
                    rec(c + 1, depth + 1);
                }
            };
            rec(0, 0);
            combo_weight /= static_cast<long>(all.size());
        }

        std::vector<int> combo_index(groups.size(), 0);
        while (true) {
            std::vector<uint8_t> in_merge(n, 0);
            std::vector<std::vector<int>> classes;
            for (size_t gi = 0; gi < groups.size(); ++gi) {
                std::vector<int> cls;
                for (int t : subset_choices[gi][combo_index[gi]]) {
                    cls.push_back(live[t]);
                    in_merge[live[t]] = 1;
                }
                std::sort(cls.begin(), cls.end());
                classes.push_back(cls);
            }
            std::vector<int> leftover;
            for (int t = 0; t < m; ++t)
                if (!in_merge[live[t]]) leftover.push_back(live[t]);

            int64_t fills = checked_ipow(s, static_cast<int>(leftover.size()), cfg.table_cap);
            std::vector<int> u(leftover.size());
            for (int64_t uf = 0; uf < fills; ++uf) {
                int64_t urest = uf;
                for (size_t i = leftover.size(); i-- > 0;) {
                    u[i] = static_cast<int>(urest % s);
                    urest /= s;
                }
                Rational wu(1);
                for (int v : u) wu *= g.space.mass[v];
                if (wu == 0) continue;

                GeneralizedRestriction rho;
                rho.n = n;
                rho.classes = classes;
                std::vector<std::pair<int, int>> fixed_pairs;
                for (size_t i = 0; i < cert->fixed_set.size(); ++i)
                    fixed_pairs.emplace_back(cert->fixed_set[i], z[i]);
                for (size_t i = 0; i < leftover.size(); ++i) fixed_pairs.emplace_back(leftover[i], u[i]);
                std::sort(fixed_pairs.begin(), fixed_pairs.end());
                for (auto& [c, v] : fixed_pairs) {
                    rho.fixed.push_back(c);
                    rho.values.push_back(v);
                }
                out.grr.atoms.emplace_back(std::move(rho), wz * combo_weight * wu);
                if (static_cast<int64_t>(out.grr.atoms.size()) > cfg.support_cap)
                    throw cap_exceeded("increment: restriction support exceeds cap");
            }

            size_t gi = groups.size();
            while (gi-- > 0) {
                if (++combo_index[gi] < static_cast<int>(subset_choices[gi].size())) break;
                combo_index[gi] = 0;
                if (gi == 0) goto combos_done;
            }
        }
    combos_done:;
    }

    out.grr.declared_min_free = out.grr.min_free();
    out.grr.declared_epsilon = grr_distribution_error(out.grr, g.space, cfg.table_cap);
    out.report.measured_epsilon = out.grr.declared_epsilon;
    out.report.min_free = out.grr.declared_min_free;
    out.report.l2_before = std::norm(expectation(g));
    double after = 0;
    for (const auto& [rho, w] : out.grr.atoms)
        after += w.get_d() * std::norm(expectation(apply_generalized(g, rho)));
    out.report.l2_after = after;
    return out;
}

// --------------------------------------------------------- uniformization --

struct UniformizeConfig {
    IncrementConfig increment;
    int max_iterations = 16;  // hard cap on top of the formula cap
    double potential_stall = 1e-12;
};

struct UniformizeReport {
    int iterations = 0;
    bool converged = false;
    std::string stop_reason;
    std::vector<double> potential_trace;        // index 0 = before any step
    std::vector<double> bad_probability_trace;  // measured before each step
    std::vector<double> epsilon_trace;          // measured after each step
    int formula_cap = 0;
    double final_bad_probability = 0;
};

struct UniformizeResult {
    GeneralizedRandomRestriction grr;
    UniformizeReport report;
};

namespace detail {

inline double grr_potential(const std::vector<FunctionTable>& gs, const GeneralizedRandomRestriction& grr) {
    double acc = 0;
    for (const auto& g : gs)
        for (const auto& [rho, w] : grr.atoms) acc += w.get_d() * std::norm(expectation(apply_generalized(g, rho)));
    return acc;
}

}  // namespace detail

// Iterates the increment step until, with probability 1 - delta over the
// restriction, every centered restricted function is (sqrt(m), gamma)-
// product pseudorandom as judged by the certificate search. The potential
// sum_i E |E[(g_i)_rho]|^2 is bounded by r, so the loop must terminate; the
// cap is reported when reached, never silently.
inline UniformizeResult uniformize(const std::vector<FunctionTable>& gs, double delta, double gamma,
                                   uint64_t seed, const UniformizeConfig& cfg = {}) {
    if (gs.empty()) throw input_error("uniformize: no functions");
    const int n = gs[0].dim;
    for (const auto& g : gs)
        if (g.dim != n || g.alphabet() != gs[0].alphabet()) throw input_error("uniformize: mismatched tables");

    UniformizeResult out;
    out.grr = GeneralizedRandomRestriction::identity(n);
    const int r = static_cast<int>(gs.size());
    out.report.formula_cap = static_cast<int>(std::ceil(50.0 * r / (delta * gamma * gamma * gamma)));
    const int cap = std::min(out.report.formula_cap, cfg.max_iterations);

    std::mt19937_64 rng(seed);
    out.report.potential_trace.push_back(detail::grr_potential(gs, out.grr));

    for (int iter = 0;; ++iter) {
        // measure badness of every atom; a bad atom yields its increment
        std::vector<std::optional<IncrementResult>> pending(out.grr.atoms.size());
        Rational bad_mass = 0;
        for (size_t t = 0; t < out.grr.atoms.size(); ++t) {
            const auto& [rho, w] = out.grr.atoms[t];
            if (rho.free_count() == 0) continue;
            for (int i = 0; i < r; ++i) {
                FunctionTable restricted = apply_generalized(gs[i], rho);
                try {
                    pending[t] = increment_grr(restricted, gamma, rng(), cfg.increment);
                    bad_mass += w;
                    break;
                } catch (const no_certificate_error&) {
                    // pseudorandom for this function; try the next one
                }
            }
        }
        out.report.bad_probability_trace.push_back(bad_mass.get_d());
        out.report.final_bad_probability = bad_mass.get_d();

        if (bad_mass.get_d() <= delta) {
            out.report.converged = true;
            out.report.stop_reason = "bad probability within target";
            break;
        }
        if (iter >= cap) {
            out.report.stop_reason = "iteration cap reached";
            break;
        }

        GeneralizedRandomRestriction next;
        next.n = n;
        for (size_t t = 0; t < out.grr.atoms.size(); ++t) {
            const auto& [rho, w] = out.grr.atoms[t];
            if (!pending[t]) {
                next.atoms.emplace_back(rho, w);
                continue;
            }
            for (const auto& [rho2, w2] : pending[t]->grr.atoms)
                next.atoms.emplace_back(compose(rho2, rho), w * w2);
        }
        if (static_cast<int64_t>(next.atoms.size()) > cfg.increment.support_cap)
            throw cap_exceeded("uniformize: restriction support exceeds cap");
        next.declared_min_free = next.min_free();
        next.declared_epsilon = grr_distribution_error(next, gs[0].space, cfg.increment.table_cap);
        out.grr = std::move(next);
        ++out.report.iterations;
        out.report.epsilon_trace.push_back(out.grr.declared_epsilon.get_d());

        double pot = detail::grr_potential(gs, out.grr);
        double prev = out.report.potential_trace.back();
        out.report.potential_trace.push_back(pot);
        if (pot - prev < cfg.potential_stall) {
            out.report.stop_reason = "potential stalled";
            break;
        }
    }
    return out;
}

}  // namespace parlab
