#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "parlab/prob_space.hpp"
#include "parlab/table_ops.hpp"

namespace parlab {

// ---------------------------------------------------------------- basics --

template <class S>
typename scalar_traits<S>::real point_weight(const BasicTable<S>& f, int64_t flat) {
    using T = scalar_traits<S>;
    typename T::real w(1);
    int s = f.alphabet();
    for (int i = 0; i < f.dim; ++i) {
        w = w * T::weight(f.space, static_cast<int>(flat % s));
        flat /= s;
    }
    return w;
}

template <class S>
S expectation(const BasicTable<S>& f) {
    using T = scalar_traits<S>;
    S acc{};
    for (int64_t x = 0; x < f.points(); ++x) acc += T::scale(point_weight(f, x), f.v[x]);
    return acc;
}

template <class S>
S inner_product(const BasicTable<S>& f, const BasicTable<S>& g) {
    using T = scalar_traits<S>;
    if (f.dim != g.dim || f.alphabet() != g.alphabet())
        throw input_error("inner_product: mismatched tables");
    S acc{};
    for (int64_t x = 0; x < f.points(); ++x) acc += T::scale(point_weight(f, x), f.v[x] * T::conj(g.v[x]));
    return acc;
}

// (T_rho f)(y) = rho f(y) + (1-rho) E[f], independently per coordinate.
template <class S>
BasicTable<S> noise_operator(const BasicTable<S>& f, const typename scalar_traits<S>::real& rho) {
    using T = scalar_traits<S>;
    using R = typename scalar_traits<S>::real;
    if (rho < 0 || rho > 1) throw input_error("noise_operator: rho outside [0,1]");
    const R keep = rho, blend = R(1) - rho;
    BasicTable<S> out = f;
    int s = f.alphabet();
    int64_t stride = 1;
    for (int axis = f.dim - 1; axis >= 0; --axis) {
        int64_t block = stride * s;
        for (int64_t base = 0; base < out.points(); base += block) {
            for (int64_t off = 0; off < stride; ++off) {
                S mean{};
                for (int a = 0; a < s; ++a)
                    mean += T::scale(T::weight(f.space, a), out.v[base + a * stride + off]);
                for (int a = 0; a < s; ++a) {
                    S& cell = out.v[base + a * stride + off];
                    cell = T::scale(keep, cell) + T::scale(blend, mean);
                }
            }
        }
        stride = block;
    }
    return out;
}

// Stab_rho[f] = <f, T_rho f>; always a nonnegative real.
template <class S>
typename scalar_traits<S>::real stability(const BasicTable<S>& f, const typename scalar_traits<S>::real& rho) {
    return scalar_traits<S>::real_part(inner_product(f, noise_operator(f, rho)));
}

template <class S>
typename scalar_traits<S>::real variance(const BasicTable<S>& f) {
    using T = scalar_traits<S>;
    typename T::real e2{};
    for (int64_t x = 0; x < f.points(); ++x) e2 = e2 + point_weight(f, x) * T::abs2(f.v[x]);
    return e2 - T::abs2(expectation(f));
}

template <class S>
BasicTable<S> centered(const BasicTable<S>& f) {
    BasicTable<S> out = f;
    S mean = expectation(f);
    for (auto& cell : out.v) cell -= mean;
    return out;
}

// ------------------------------------------------- distribution distances --

inline Rational l1_distance(const std::vector<Rational>& p, const std::vector<Rational>& q) {
    if (p.size() != q.size()) throw input_error("l1_distance: size mismatch");
    Rational acc = 0;
    for (size_t i = 0; i < p.size(); ++i) acc += rational_abs(p[i] - q[i]);
    return acc;
}

inline double l1_distance(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size()) throw input_error("l1_distance: size mismatch");
    double acc = 0;
    for (size_t i = 0; i < p.size(); ++i) acc += std::abs(p[i] - q[i]);
    return acc;
}

// Relative entropy in bits; requires supp(p) inside supp(q).
inline double kl_divergence(const std::vector<Rational>& p, const std::vector<Rational>& q) {
    if (p.size() != q.size()) throw input_error("kl_divergence: size mismatch");
    double acc = 0;
    for (size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0) continue;
        if (q[i] == 0) throw input_error("kl_divergence: support violation");
        acc += p[i].get_d() * std::log2(p[i].get_d() / q[i].get_d());
    }
    return acc;
}

struct MarginalDriftBound {
    Rational lhs_exact;
    double lhs = 0, rhs = 0;
    Rational event_mass;
};

// For a product distribution conditioned on an event: the average marginal
// l1 drift against sqrt((2/n) log2(1/Pr[F])).
inline MarginalDriftBound marginal_drift_bound(const std::vector<ProbabilitySpace>& spaces,
                                               const std::vector<uint8_t>& event_mask) {
    std::vector<int> sizes;
    for (const auto& sp : spaces) sizes.push_back(sp.size());
    Box b(sizes);
    if (static_cast<int64_t>(event_mask.size()) != b.size())
        throw input_error("marginal_drift_bound: event mask size mismatch");
    int n = static_cast<int>(spaces.size());

    Rational mass = 0;
    std::vector<std::vector<Rational>> cond(n);
    for (int i = 0; i < n; ++i) cond[i].assign(sizes[i], Rational(0));
    std::vector<int> d;
    for (int64_t f = 0; f < b.size(); ++f) {
        if (!event_mask[f]) continue;
        b.unflatten_into(f, d);
        Rational w = 1;
        for (int i = 0; i < n; ++i) w *= spaces[i].mass[d[i]];
        if (w == 0) continue;
        mass += w;
        for (int i = 0; i < n; ++i) cond[i][d[i]] += w;
    }
    if (mass == 0) throw input_error("marginal_drift_bound: event has zero mass");

    MarginalDriftBound out;
    out.event_mass = mass;
    Rational lhs = 0;
    for (int i = 0; i < n; ++i) {
        for (auto& c : cond[i]) c /= mass;
        lhs += l1_distance(cond[i], spaces[i].mass);
    }
    lhs /= n;
    out.lhs_exact = lhs;
    out.lhs = lhs.get_d();
    out.rhs = std::sqrt(2.0 / n * std::log2(1.0 / mass.get_d()));
    return out;
}

// ------------------------------------------- product-correlation ascent --

// One bounded factor per coordinate.
struct ProductFunction {
    std::vector<std::vector<std::complex<double>>> factors;

    static ProductFunction ones(int dim, int alphabet) {
        ProductFunction p;
        p.factors.assign(dim, std::vector<std::complex<double>>(alphabet, {1.0, 0.0}));
        return p;
    }
};

inline std::complex<double> correlation_with_product(const FunctionTable& f, const ProductFunction& p) {
    if (static_cast<int>(p.factors.size()) != f.dim) throw input_error("correlation: arity mismatch");
    std::complex<double> acc = 0;
    int s = f.alphabet();
    for (int64_t x = 0; x < f.points(); ++x) {
        std::complex<double> term = f.v[x];
        double w = 1;
        int64_t rest = x;
        for (int i = f.dim - 1; i >= 0; --i) {
            int a = static_cast<int>(rest % s);
            rest /= s;
            term *= p.factors[i][a];
            w *= f.space.massd[a];
        }
        acc += w * term;
    }
    return acc;
}

struct AscentConfig {
    int restarts = 8;
    int iterations = 200;
    double tolerance = 1e-9;
};

struct AscentResult {
    double value = 0;  // |correlation| at the returned product function
    ProductFunction argmax;
    bool monotone = true;
    int sweeps = 0;
};

// Coordinate ascent over unit-modulus product functions. The objective is
// multilinear in each factor entry, so the per-entry optimum aligns the
// entry's phase with its coefficient; entries with zero coefficient keep
// their previous phase. Yields a lower bound on the true maximum.
inline AscentResult max_product_correlation(const FunctionTable& f, const AscentConfig& cfg = {},
                                            uint64_t seed = 0) {
    const int s = f.alphabet(), n = f.dim;
    AscentResult best;
    if (n == 0) {
        best.value = std::abs(f.v[0]);
        return best;
    }

    auto ascend = [&](ProductFunction p) {
        double current = std::abs(correlation_with_product(f, p));
        bool monotone = true;
        int sweep = 0;
        for (; sweep < cfg.iterations; ++sweep) {
            double at_sweep_start = current;
            for (int i = 0; i < n; ++i) {
                // coefficient of P_i(a): nu(a) E[f prod_{j != i} P_j | x_i = a]
                std::vector<std::complex<double>> coeff(s, 0.0);
                for (int64_t x = 0; x < f.points(); ++x) {
                    std::complex<double> term = f.v[x];
                    double w = 1;
                    int ai = 0;
                    int64_t rest = x;
                    for (int j = n - 1; j >= 0; --j) {
                        int a = static_cast<int>(rest % s);
                        rest /= s;
                        w *= f.space.massd[a];
                        if (j == i)
                            ai = a;
                        else
                            term *= p.factors[j][a];
                    }
                    coeff[ai] += w * term;
                }
                double gain = 0;
                for (int a = 0; a < s; ++a) {
                    double mag = std::abs(coeff[a]);
                    gain += mag;
                    if (mag > 0) p.factors[i][a] = std::conj(coeff[a]) / mag;
                }
                if (gain < current - 1e-12) monotone = false;
                current = gain;
            }
            if (current - at_sweep_start < cfg.tolerance) break;
        }
        return std::tuple{current, p, monotone, sweep};
    };

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2 * M_PI);
    for (int r = 0; r < cfg.restarts; ++r) {
        ProductFunction p0 = ProductFunction::ones(n, s);
        if (r > 0)
            for (auto& fac : p0.factors)
                for (auto& z : fac) z = std::polar(1.0, angle(rng));
        auto [val, p, monotone, sweeps] = ascend(std::move(p0));
        best.monotone = best.monotone && monotone;
        best.sweeps = std::max(best.sweeps, sweeps);
        if (val > best.value) {
            best.value = val;
            best.argmax = p;
        }
    }
    return best;
}

// ------------------------------------- product pseudorandomness estimate --

struct PseudorandomnessPoint {
    double delta = 0;
    double estimate = 0;
    double radius = 0;
};

struct PseudorandomnessReport {
    double gamma = 0;
    int live_target = 0;  // n'
    std::vector<PseudorandomnessPoint> points;
    bool not_pseudorandom = false;  // certified: estimate - radius >= gamma somewhere
    uint64_t seed = 0;
    int samples = 0;
};

namespace detail {

inline std::vector<double> geometric_grid(double lo, double hi, int points) {
    std::vector<double> g;
    if (points <= 1 || lo >= hi) {
        g.push_back(hi);
        return g;
    }
    for (int t = 0; t < points; ++t) g.push_back(lo * std::pow(hi / lo, static_cast<double>(t) / (points - 1)));
    return g;
}

}  // namespace detail

template <class Rng>
Restriction sample_keep_alive_restriction(int n, double keep_probability, const ProbabilitySpace& sp, Rng& rng) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::discrete_distribution<int> letter(sp.massd.begin(), sp.massd.end());
    Restriction r;
    for (int i = 0; i < n; ++i) {
        if (coin(rng) < keep_probability) continue;  // stays alive
        r.fixed.push_back(i);
        r.values.push_back(letter(rng));
    }
    return r;
}

// Samples restrictions at a geometric grid of keep-alive rates spanning
// [n'/n, 1] and tests whether the restricted function is gamma-correlated to
// a bounded product function (via the ascent lower bound). The correlation
// is taken with the restriction's mean removed, so a plain constant shift
// does not count as product structure; a fully-fixed restriction counts
// through its plain value. The verdict "not pseudorandom" is claimed only
// when estimate - radius >= gamma.
inline PseudorandomnessReport product_pseudorandomness_estimate(const FunctionTable& f, int live_target,
                                                                double gamma, int samples, uint64_t seed,
                                                                int grid_points = 8,
                                                                const AscentConfig& ascent = {}) {
    if (live_target > f.dim) throw input_error("pseudorandomness: n' > n");
    if (gamma <= 0) throw input_error("pseudorandomness: gamma must be positive");
    PseudorandomnessReport rep;
    rep.gamma = gamma;
    rep.live_target = live_target;
    rep.seed = seed;
    rep.samples = samples;
    auto grid = detail::geometric_grid(static_cast<double>(live_target) / f.dim, 1.0, grid_points);
    std::mt19937_64 rng(seed);
    for (double delta : grid) {
        int hits = 0;
        for (int t = 0; t < samples; ++t) {
            Restriction rho = sample_keep_alive_restriction(f.dim, delta, f.space, rng);
            FunctionTable g = apply_restriction(f, rho);
            double corr =
                g.dim == 0 ? std::abs(g.v[0]) : max_product_correlation(centered(g), ascent, rng()).value;
            if (corr >= gamma) ++hits;
        }
        PseudorandomnessPoint pt;
        pt.delta = delta;
        pt.estimate = static_cast<double>(hits) / samples;
        pt.radius = 3.0 * std::sqrt(pt.estimate * (1 - pt.estimate) / samples) + 1.0 / samples;
        rep.points.push_back(pt);
        if (pt.estimate - pt.radius >= gamma) rep.not_pseudorandom = true;
    }
    return rep;
}

// ------------------------------------------------- k-wise correlations --

// E over mu^{tensor n} of the product of per-coordinate functions; f[i] lives
// on (Sigma_i)^n. Exact enumeration over support(mu)^n.
inline std::complex<double> k_wise_correlation(const std::vector<FunctionTable>& fs, const JointSpace& mu,
                                               int64_t cap = int64_t{1} << 24) {
    const int k = static_cast<int>(fs.size());
    if (k != static_cast<int>(mu.sizes.size())) throw input_error("k_wise_correlation: arity mismatch");
    const int n = fs.empty() ? 0 : fs[0].dim;
    for (const auto& f : fs)
        if (f.dim != n) throw input_error("k_wise_correlation: dimension mismatch");

    Box b = mu.box();
    std::vector<int64_t> support;
    for (int64_t f = 0; f < b.size(); ++f)
        if (mu.pmf[f] != 0) support.push_back(f);
    checked_ipow(static_cast<int64_t>(support.size()), n, cap);

    std::vector<std::vector<int>> digits;
    for (int64_t f : support) digits.push_back(b.unflatten(f));

    std::vector<int> pick(n, 0);
    std::complex<double> acc = 0;
    while (true) {
        double w = 1;
        for (int t = 0; t < n; ++t) w *= mu.pmf[support[pick[t]]].get_d();
        std::complex<double> term = 1;
        for (int i = 0; i < k; ++i) {
            int64_t flat = 0;
            for (int t = 0; t < n; ++t) flat = flat * mu.sizes[i] + digits[pick[t]][i];
            term *= fs[i].v[flat];
        }
        acc += w * term;
        int t = n - 1;
        while (t >= 0 && pick[t] + 1 == static_cast<int>(support.size())) pick[t--] = 0;
        if (t < 0) break;
        ++pick[t];
    }
    return acc;
}

// | E[prod f_i] - prod E_{mu_i}[f_i] |
inline double independence_gap(const std::vector<FunctionTable>& fs, const JointSpace& mu,
                               int64_t cap = int64_t{1} << 24) {
    std::complex<double> joint = k_wise_correlation(fs, mu, cap);
    std::complex<double> split = 1;
    for (const auto& f : fs) split *= expectation(f);
    return std::abs(joint - split);
}

}  // namespace parlab
