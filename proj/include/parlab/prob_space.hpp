#pragma once

#include <complex>
#include <vector>

#include "parlab/multi_index.hpp"
#include "parlab/rational.hpp"

namespace parlab {

// Finite probability space with exact masses and a float shadow.
struct ProbabilitySpace {
    std::vector<Rational> mass;
    std::vector<double> massd;

    int size() const { return static_cast<int>(mass.size()); }

    bool full_support() const {
        for (const auto& m : mass)
            if (m == 0) return false;
        return true;
    }

    static ProbabilitySpace uniform(int s) {
        ProbabilitySpace p;
        p.mass.assign(s, Rational(1, s));
        p.massd.assign(s, 1.0 / s);
        return p;
    }

    static ProbabilitySpace from_rationals(std::vector<Rational> mass) {
        Rational total = 0;
        for (const auto& m : mass) {
            if (m < 0) throw input_error("probability space: negative mass");
            total += m;
        }
        if (total != 1) throw input_error("probability space: mass " + rational_to_string(total) + " != 1");
        ProbabilitySpace p;
        p.mass = std::move(mass);
        for (const auto& m : p.mass) p.massd.push_back(m.get_d());
        return p;
    }
};

// Distribution over a product of (possibly different) finite alphabets,
// exact; the carrier for k-wise correlation computations.
struct JointSpace {
    std::vector<int> sizes;
    std::vector<Rational> pmf;  // dense over Box(sizes)

    Box box() const { return Box(sizes); }

    static JointSpace uniform_on(std::vector<int> sizes, const std::vector<std::vector<int>>& support) {
        JointSpace j;
        j.sizes = std::move(sizes);
        Box b(j.sizes);
        j.pmf.assign(b.size(), Rational(0));
        Rational w(1, static_cast<long>(support.size()));
        for (const auto& t : support) j.pmf[b.flatten(t)] += w;
        return j;
    }

    ProbabilitySpace marginal(int coord) const {
        std::vector<Rational> m(sizes[coord], Rational(0));
        Box b(sizes);
        std::vector<int> d;
        for (int64_t f = 0; f < b.size(); ++f) {
            if (pmf[f] == 0) continue;
            b.unflatten_into(f, d);
            m[d[coord]] += pmf[f];
        }
        return ProbabilitySpace::from_rationals(std::move(m));
    }

    bool is_product_measure() const {
        Box b(sizes);
        std::vector<ProbabilitySpace> margs;
        for (size_t c = 0; c < sizes.size(); ++c) margs.push_back(marginal(static_cast<int>(c)));
        std::vector<int> d;
        for (int64_t f = 0; f < b.size(); ++f) {
            b.unflatten_into(f, d);
            Rational prod = 1;
            for (size_t c = 0; c < sizes.size(); ++c) prod *= margs[c].mass[d[c]];
            if (prod != pmf[f]) return false;
        }
        return true;
    }
};

// Exact complex numbers with rational parts, for the rational-mode calculus.
struct QComplex {
    Rational re, im;

    QComplex() : re(0), im(0) {}
    QComplex(Rational r) : re(std::move(r)), im(0) {}
    QComplex(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

    QComplex operator+(const QComplex& o) const { return {re + o.re, im + o.im}; }
    QComplex operator-(const QComplex& o) const { return {re - o.re, im - o.im}; }
    QComplex operator*(const QComplex& o) const { return {re * o.re - im * o.im, re * o.im + im * o.re}; }
    QComplex& operator+=(const QComplex& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    QComplex& operator-=(const QComplex& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    bool operator==(const QComplex& o) const { return re == o.re && im == o.im; }

    QComplex conjugated() const { return {re, Rational(-im)}; }
    Rational abs2() const { return re * re + im * im; }
};

inline QComplex operator*(const Rational& c, const QComplex& z) { return {c * z.re, c * z.im}; }

// Scalar abstraction: binary64 complex for the float path, QComplex for the
// exact path. `real` is the matching real type for measures and norms.
template <class S>
struct scalar_traits;

template <>
struct scalar_traits<std::complex<double>> {
    using real = double;
    static double weight(const ProbabilitySpace& sp, int a) { return sp.massd[a]; }
    static std::complex<double> conj(const std::complex<double>& z) { return std::conj(z); }
    static double abs2(const std::complex<double>& z) { return std::norm(z); }
    static std::complex<double> scale(double c, const std::complex<double>& z) { return c * z; }
    static double real_part(const std::complex<double>& z) { return z.real(); }
};

template <>
struct scalar_traits<QComplex> {
    using real = Rational;
    static Rational weight(const ProbabilitySpace& sp, int a) { return sp.mass[a]; }
    static QComplex conj(const QComplex& z) { return z.conjugated(); }
    static Rational abs2(const QComplex& z) { return z.abs2(); }
    static QComplex scale(const Rational& c, const QComplex& z) { return c * z; }
    static Rational real_part(const QComplex& z) { return z.re; }
};

// Dense function on Sigma^n under a product measure.
template <class S>
struct BasicTable {
    int dim = 0;
    ProbabilitySpace space;
    std::vector<S> v;  // size |Sigma|^dim, axis 0 most significant

    int alphabet() const { return space.size(); }
    int64_t points() const { return static_cast<int64_t>(v.size()); }

    static BasicTable constant(const ProbabilitySpace& sp, int dim, S value, int64_t cap = int64_t{1} << 26) {
        BasicTable t;
        t.dim = dim;
        t.space = sp;
        t.v.assign(checked_ipow(sp.size(), dim, cap), value);
        return t;
    }
};

using FunctionTable = BasicTable<std::complex<double>>;
using RationalTable = BasicTable<QComplex>;

// Product measure mu^n as a dense exact vector (capped).
inline std::vector<Rational> product_measure(const ProbabilitySpace& sp, int n,
                                             int64_t cap = int64_t{1} << 26) {
    int64_t total = checked_ipow(sp.size(), n, cap);
    std::vector<Rational> out;
    out.reserve(total);
    out.push_back(Rational(1));
    for (int i = 0; i < n; ++i) {
        std::vector<Rational> next;
        next.reserve(out.size() * sp.size());
        for (const auto& w : out)
            for (int a = 0; a < sp.size(); ++a) next.push_back(w * sp.mass[a]);
        out = std::move(next);
    }
    return out;
}

}  // namespace parlab
