#pragma once

#include <random>
#include <vector>

#include "parlab/analysis.hpp"
#include "parlab/generalized_restriction.hpp"
#include "parlab/table_ops.hpp"

namespace parlab {

inline Restriction sample_p_random_restriction(const ProbabilitySpace& sp, int n, double keep_probability,
                                               uint64_t seed) {
    if (keep_probability < 0 || keep_probability > 1)
        throw input_error("p-random restriction: p outside [0,1]");
    std::mt19937_64 rng(seed);
    return sample_keep_alive_restriction(n, keep_probability, sp, rng);
}

// Finitely supported distribution over generalized restrictions with its
// certificate: every atom keeps at least `declared_min_free` coordinates and
// the conditioned mixture is within `declared_epsilon` of mu^n in l1.
struct GeneralizedRandomRestriction {
    int n = 0;
    std::vector<std::pair<GeneralizedRestriction, Rational>> atoms;
    int declared_min_free = 0;
    Rational declared_epsilon = 0;

    static GeneralizedRandomRestriction identity(int n) {
        GeneralizedRandomRestriction r;
        r.n = n;
        r.atoms.emplace_back(GeneralizedRestriction::identity(n), Rational(1));
        r.declared_min_free = n;
        r.declared_epsilon = 0;
        return r;
    }

    int min_free() const {
        int m = n;
        for (const auto& [rho, w] : atoms) m = std::min(m, rho.free_count());
        return m;
    }

    Rational total_weight() const {
        Rational t = 0;
        for (const auto& [rho, w] : atoms) t += w;
        return t;
    }

    void check() const {
        if (atoms.empty()) throw input_error("grr: no atoms");
        for (const auto& [rho, w] : atoms) {
            if (rho.n != n) throw input_error("grr: atom arity mismatch");
            rho.check();
            if (w <= 0) throw input_error("grr: nonpositive weight");
        }
        if (total_weight() != 1) throw input_error("grr: weights do not sum to 1");
    }
};

// Exact l1 distance between E_rho[mu^n | E_rho] and mu^n. Zero-mass
// conditioning events are construction errors.
inline Rational grr_distribution_error(const GeneralizedRandomRestriction& grr, const ProbabilitySpace& sp,
                                       int64_t cap = int64_t{1} << 24) {
    auto mu = product_measure(sp, grr.n, cap);
    std::vector<Rational> mix(mu.size(), Rational(0));
    for (const auto& [rho, w] : grr.atoms) {
        auto mask = event_of(rho, sp.size(), cap);
        Rational pr = 0;
        for (size_t x = 0; x < mu.size(); ++x)
            if (mask[x]) pr += mu[x];
        if (pr == 0) throw input_error("grr: restriction event has zero mass");
        Rational scale = w / pr;
        for (size_t x = 0; x < mu.size(); ++x)
            if (mask[x]) mix[x] += scale * mu[x];
    }
    return l1_distance(mix, mu);
}

// The distribution of plain p-random restrictions as an explicit GRR; its
// measured error is exactly zero.
inline GeneralizedRandomRestriction plain_random_restriction_grr(const ProbabilitySpace& sp, int n,
                                                                 const Rational& keep_probability,
                                                                 int64_t cap = int64_t{1} << 22) {
    if (keep_probability < 0 || keep_probability > 1)
        throw input_error("p-random restriction: p outside [0,1]");
    GeneralizedRandomRestriction out;
    out.n = n;
    int s = sp.size();
    for (int64_t subset = 0; subset < (int64_t{1} << n); ++subset) {
        std::vector<int> fixed;
        for (int i = 0; i < n; ++i)
            if (subset >> i & 1) fixed.push_back(i);
        Rational set_weight = rational_pow(1 - keep_probability, fixed.size()) *
                              rational_pow(keep_probability, n - fixed.size());
        if (set_weight == 0) continue;
        int64_t zcount = checked_ipow(s, static_cast<int>(fixed.size()), cap);
        std::vector<int> z(fixed.size(), 0);
        for (int64_t zf = 0; zf < zcount; ++zf) {
            int64_t rest = zf;
            for (size_t i = fixed.size(); i-- > 0;) {
                z[i] = static_cast<int>(rest % s);
                rest /= s;
            }
            Rational w = set_weight;
            for (int v : z) w *= sp.mass[v];
            if (w == 0) continue;
            Restriction r{fixed, z};
            out.atoms.emplace_back(GeneralizedRestriction::from_plain(r, n), w);
        }
        if (out.atoms.size() > static_cast<size_t>(cap)) throw cap_exceeded("plain grr: support too large");
    }
    out.declared_min_free = out.min_free();
    out.declared_epsilon = 0;
    return out;
}

// ------------------------- noise stability under random restrictions ------

template <class R>
struct RestrictionStabilityIdentity {
    R lhs;  // E over (I, z) of Stab_{1-delta} of the centered restriction
    R rhs;  // Stab_{1 - p*delta}[f] - Stab_{1-p}[f]
};

// Exact expectation over all restriction sets and values.
template <class S>
RestrictionStabilityIdentity<typename scalar_traits<S>::real> restriction_stability_identity_check(
    const BasicTable<S>& f, const typename scalar_traits<S>::real& p,
    const typename scalar_traits<S>::real& delta) {
    using T = scalar_traits<S>;
    using R = typename scalar_traits<S>::real;
    const int n = f.dim, s = f.alphabet();
    if (n > 20) throw cap_exceeded("stability identity: dimension too large for exact expectation");
    R lhs{};
    for (int64_t subset = 0; subset < (int64_t{1} << n); ++subset) {
        std::vector<int> fixed;
        for (int i = 0; i < n; ++i)
            if (subset >> i & 1) fixed.push_back(i);
        R set_weight(1);
        for (int i = 0; i < n; ++i) set_weight = set_weight * ((subset >> i & 1) ? (R(1) - p) : p);
        int64_t zcount = 1;
        for (size_t i = 0; i < fixed.size(); ++i) zcount *= s;
        std::vector<int> z(fixed.size(), 0);
        for (int64_t zf = 0; zf < zcount; ++zf) {
            int64_t rest = zf;
            for (size_t i = fixed.size(); i-- > 0;) {
                z[i] = static_cast<int>(rest % s);
                rest /= s;
            }
            R w = set_weight;
            for (int v : z) w = w * T::weight(f.space, v);
            if (w == R{}) continue;
            auto g = centered(apply_restriction(f, Restriction{fixed, z}));
            lhs = lhs + w * stability(g, R(1) - delta);
        }
    }
    R rhs = stability(f, R(1) - p * delta) - stability(f, R(1) - p);
    return {lhs, rhs};
}

// -------------------------------- degree schedule via random restrictions --

struct ScheduleReport {
    double exceedance = 0;  // empirical Pr[Stab >= eta Var[f]]
    double radius = 0;
    double markov_bound = 0;  // 1 / (eta T)
    double variance = 0;
    int trials = 0;
    uint64_t seed = 0;
};

// Samples p uniformly from {1, delta, ..., delta^{T-1}} and measures how
// often the centered restriction keeps noticeable stability.
inline ScheduleReport random_restriction_degree_schedule(const FunctionTable& f, double delta, int T,
                                                         double eta, int trials, uint64_t seed) {
    if (delta <= 0 || delta >= 1 || T < 1) throw input_error("degree schedule: bad parameters");
    ScheduleReport rep;
    rep.markov_bound = 1.0 / (eta * T);
    rep.variance = variance(f);
    rep.trials = trials;
    rep.seed = seed;
    if (rep.variance == 0) return rep;  // the event never fires for constants
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> level(0, T - 1);
    int hits = 0;
    for (int t = 0; t < trials; ++t) {
        double p = std::pow(delta, level(rng));
        Restriction rho = sample_keep_alive_restriction(f.dim, p, f.space, rng);
        auto g = centered(apply_restriction(f, rho));
        if (stability(g, 1.0 - delta) >= eta * rep.variance) ++hits;
    }
    rep.exceedance = static_cast<double>(hits) / trials;
    rep.radius = 3.0 * std::sqrt(rep.exceedance * (1 - rep.exceedance) / trials) + 1.0 / trials;
    return rep;
}

// --------------------------------------------- conditional restrictions --

struct ConditionalGRR {
    GeneralizedRandomRestriction reweighted;
    Rational event_mass;       // Pr[E]
    Rational epsilon;          // measured epsilon of the base GRR
    Rational normalization;    // E_rho Pr[E | E_rho]
};

// Bayes reweighting of a GRR by an event; defined when Pr[E] > epsilon.
inline ConditionalGRR conditional_grr(const GeneralizedRandomRestriction& grr, const ProbabilitySpace& sp,
                                      const std::vector<uint8_t>& event_mask, int64_t cap = int64_t{1} << 24) {
    auto mu = product_measure(sp, grr.n, cap);
    if (mu.size() != event_mask.size()) throw input_error("conditional grr: event mask size mismatch");
    Rational pr_e = 0;
    for (size_t x = 0; x < mu.size(); ++x)
        if (event_mask[x]) pr_e += mu[x];
    Rational eps = grr_distribution_error(grr, sp, cap);
    if (pr_e <= eps) throw input_error("conditional grr: Pr[E] must exceed the certificate error");

    ConditionalGRR out;
    out.event_mass = pr_e;
    out.epsilon = eps;
    out.reweighted.n = grr.n;
    Rational z = 0;
    std::vector<Rational> cond_weights;
    for (const auto& [rho, w] : grr.atoms) {
        auto mask = event_of(rho, sp.size(), cap);
        Rational pr_rho = 0, pr_both = 0;
        for (size_t x = 0; x < mu.size(); ++x) {
            if (!mask[x]) continue;
            pr_rho += mu[x];
            if (event_mask[x]) pr_both += mu[x];
        }
        if (pr_rho == 0) throw input_error("conditional grr: restriction event has zero mass");
        Rational cw = w * pr_both / pr_rho;  // Pr[E | E_rho] * R[rho]
        cond_weights.push_back(cw);
        z += cw;
    }
    out.normalization = z;
    if (z == 0) throw input_error("conditional grr: conditioning annihilates the distribution");
    for (size_t t = 0; t < grr.atoms.size(); ++t) {
        if (cond_weights[t] == 0) continue;
        out.reweighted.atoms.emplace_back(grr.atoms[t].first, cond_weights[t] / z);
    }
    out.reweighted.declared_min_free = out.reweighted.min_free();
    out.reweighted.declared_epsilon = eps;
    return out;
}

struct ConditionalGRRCheck {
    bool per_atom_bound = true;   // |R|E[rho] - Pr[E|E_rho]R[rho]/Pr[E]| <= R|E[rho] eps/Pr[E]
    Rational mixture_l1 = 0;      // || E_{rho ~ R|E}[mu^n | E_rho, E] - mu^n|E ||_1
    Rational mixture_bound = 0;   // 2 eps / Pr[E]
    bool mixture_ok = true;
};

inline ConditionalGRRCheck conditional_grr_property_check(const GeneralizedRandomRestriction& grr,
                                                          const ProbabilitySpace& sp,
                                                          const std::vector<uint8_t>& event_mask,
                                                          int64_t cap = int64_t{1} << 24) {
    auto cond = conditional_grr(grr, sp, event_mask, cap);
    auto mu = product_measure(sp, grr.n, cap);
    const Rational& pr_e = cond.event_mass;
    const Rational& eps = cond.epsilon;

    ConditionalGRRCheck out;
    // per-atom comparison against the idealized normalizer Pr[E]
    size_t ct = 0;
    for (const auto& [rho, w] : grr.atoms) {
        auto mask = event_of(rho, sp.size(), cap);
        Rational pr_rho = 0, pr_both = 0;
        for (size_t x = 0; x < mu.size(); ++x) {
            if (!mask[x]) continue;
            pr_rho += mu[x];
            if (event_mask[x]) pr_both += mu[x];
        }
        Rational cond_weight = 0;
        if (pr_both > 0) {
            cond_weight = grr.atoms[ct].second * pr_both / pr_rho / cond.normalization;
        }
        Rational ideal = w * (pr_both / pr_rho) / pr_e;
        if (rational_abs(cond_weight - ideal) > cond_weight * eps / pr_e) out.per_atom_bound = false;
        ++ct;
    }

    // mixture of mu^n | E_rho, E against mu^n | E
    std::vector<Rational> mix(mu.size(), Rational(0)), target(mu.size(), Rational(0));
    for (size_t x = 0; x < mu.size(); ++x)
        if (event_mask[x]) target[x] = mu[x] / pr_e;
    for (const auto& [rho, w] : cond.reweighted.atoms) {
        auto mask = event_of(rho, sp.size(), cap);
        Rational pr_both = 0;
        for (size_t x = 0; x < mu.size(); ++x)
            if (mask[x] && event_mask[x]) pr_both += mu[x];
        Rational scale = w / pr_both;
        for (size_t x = 0; x < mu.size(); ++x)
            if (mask[x] && event_mask[x]) mix[x] += scale * mu[x];
    }
    out.mixture_l1 = l1_distance(mix, target);
    out.mixture_bound = 2 * eps / pr_e;
    out.mixture_ok = out.mixture_l1 <= out.mixture_bound;
    return out;
}

// --------------------------- pairing distributions at unrestricted sizes --

struct PairingErrorEstimate {
    double estimate = 0;  // Monte-Carlo estimate of the l1 error
    double radius = 0;
    int set_size = 0, merge_size = 0;
};

// l1 error of the "merge a random k-subset of S" distribution against mu^n,
// estimated as E_{x ~ mu}|Pr_T[x constant on T] / m_k - 1| with the inner
// probability computed exactly per sample. Works far beyond table sizes.
inline PairingErrorEstimate pairing_merge_l1_estimate(const ProbabilitySpace& sp, int set_size, int merge_size,
                                                      int samples, uint64_t seed) {
    if (merge_size < 1 || merge_size > set_size) throw input_error("pairing estimate: bad sizes");
    PairingErrorEstimate out;
    out.set_size = set_size;
    out.merge_size = merge_size;
    double mk = 0;
    for (int a = 0; a < sp.size(); ++a) mk += std::pow(sp.massd[a], merge_size);

    auto log_choose = [](int n, int k) {
        return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
    };
    std::mt19937_64 rng(seed);
    std::discrete_distribution<int> letter(sp.massd.begin(), sp.massd.end());
    double acc = 0, acc2 = 0;
    std::vector<int> counts(sp.size());
    for (int t = 0; t < samples; ++t) {
        std::fill(counts.begin(), counts.end(), 0);
        for (int i = 0; i < set_size; ++i) ++counts[letter(rng)];
        double pr_const = 0;  // Pr_T[ x constant on T ]
        for (int a = 0; a < sp.size(); ++a) {
            if (counts[a] < merge_size) continue;
            pr_const += std::exp(log_choose(counts[a], merge_size) - log_choose(set_size, merge_size));
        }
        double val = std::abs(pr_const / mk - 1.0);
        acc += val;
        acc2 += val * val;
    }
    out.estimate = acc / samples;
    double var = std::max(0.0, acc2 / samples - out.estimate * out.estimate);
    out.radius = 3.0 * std::sqrt(var / samples);
    return out;
}

}  // namespace parlab
