#pragma once

#include <vector>

#include "parlab/generalized_restriction.hpp"
#include "parlab/prob_space.hpp"

namespace parlab {

// f_{I -> z}: live coordinates keep their relative order.
template <class S>
BasicTable<S> apply_restriction(const BasicTable<S>& f, const Restriction& rho) {
    for (size_t t = 0; t < rho.fixed.size(); ++t) {
        if (rho.fixed[t] < 0 || rho.fixed[t] >= f.dim) throw input_error("apply_restriction: bad coordinate");
        if (t > 0 && rho.fixed[t] <= rho.fixed[t - 1]) throw input_error("apply_restriction: fixed set not sorted");
        if (rho.values[t] < 0 || rho.values[t] >= f.alphabet()) throw input_error("apply_restriction: bad value");
    }
    int live = f.dim - static_cast<int>(rho.fixed.size());
    BasicTable<S> out;
    out.dim = live;
    out.space = f.space;
    out.v.resize(checked_ipow(f.alphabet(), live, int64_t{1} << 30));
    int s = f.alphabet();
    std::vector<int> live_digits(live), full(f.dim);
    for (int64_t y = 0; y < out.points(); ++y) {
        int64_t rest = y;
        for (int i = live - 1; i >= 0; --i) {
            live_digits[i] = static_cast<int>(rest % s);
            rest /= s;
        }
        size_t fi = 0;
        int li = 0;
        for (int i = 0; i < f.dim; ++i) {
            if (fi < rho.fixed.size() && rho.fixed[fi] == i)
                full[i] = rho.values[fi++];
            else
                full[i] = live_digits[li++];
        }
        int64_t flat = 0;
        for (int i = 0; i < f.dim; ++i) flat = flat * s + full[i];
        out.v[y] = f.v[flat];
    }
    return out;
}

// f_{=T}: all coordinates of T forced equal; the merged coordinate comes
// first, the remaining coordinates keep their order.
template <class S>
BasicTable<S> merge_coordinates(const BasicTable<S>& f, const std::vector<int>& merge_set) {
    if (merge_set.empty()) throw input_error("merge_coordinates: empty set");
    std::vector<uint8_t> in_set(f.dim, 0);
    for (int i : merge_set) {
        if (i < 0 || i >= f.dim || in_set[i]) throw input_error("merge_coordinates: bad set");
        in_set[i] = 1;
    }
    BasicTable<S> out;
    out.dim = f.dim - static_cast<int>(merge_set.size()) + 1;
    out.space = f.space;
    out.v.resize(checked_ipow(f.alphabet(), out.dim, int64_t{1} << 30));
    int s = f.alphabet();
    std::vector<int> y(out.dim), full(f.dim);
    for (int64_t flat_y = 0; flat_y < out.points(); ++flat_y) {
        int64_t rest = flat_y;
        for (int i = out.dim - 1; i >= 0; --i) {
            y[i] = static_cast<int>(rest % s);
            rest /= s;
        }
        int li = 1;
        for (int i = 0; i < f.dim; ++i) full[i] = in_set[i] ? y[0] : y[li++];
        int64_t flat = 0;
        for (int i = 0; i < f.dim; ++i) flat = flat * s + full[i];
        out.v[flat_y] = f.v[flat];
    }
    return out;
}

// f_rho for a generalized restriction: free coordinate j ranges over class j.
template <class S>
BasicTable<S> apply_generalized(const BasicTable<S>& f, const GeneralizedRestriction& rho) {
    if (rho.n != f.dim) throw input_error("apply_generalized: arity mismatch");
    rho.check();
    for (int v : rho.values)
        if (v < 0 || v >= f.alphabet()) throw input_error("apply_generalized: bad value");
    BasicTable<S> out;
    out.dim = rho.free_count();
    out.space = f.space;
    out.v.resize(checked_ipow(f.alphabet(), out.dim, int64_t{1} << 30));
    int s = f.alphabet();
    std::vector<int> y(out.dim);
    for (int64_t flat_y = 0; flat_y < out.points(); ++flat_y) {
        int64_t rest = flat_y;
        for (int i = out.dim - 1; i >= 0; --i) {
            y[i] = static_cast<int>(rest % s);
            rest /= s;
        }
        auto x = rho.extend(y);
        int64_t flat = 0;
        for (int i = 0; i < f.dim; ++i) flat = flat * s + x[i];
        out.v[flat_y] = f.v[flat];
    }
    return out;
}

// Dense membership mask of E_rho inside Sigma^n.
inline std::vector<uint8_t> event_of(const GeneralizedRestriction& rho, int alphabet,
                                     int64_t cap = int64_t{1} << 24) {
    rho.check();
    int64_t total = checked_ipow(alphabet, rho.n, cap);
    std::vector<uint8_t> mask(total, 0);
    std::vector<int> x(rho.n);
    for (int64_t f = 0; f < total; ++f) {
        int64_t rest = f;
        for (int i = rho.n - 1; i >= 0; --i) {
            x[i] = static_cast<int>(rest % alphabet);
            rest /= alphabet;
        }
        mask[f] = rho.contains(x) ? 1 : 0;
    }
    return mask;
}

}  // namespace parlab
