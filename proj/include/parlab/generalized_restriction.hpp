#pragma once

#include <algorithm>
#include <vector>

#include "parlab/errors.hpp"

namespace parlab {

// Fixes coordinates `fixed` to `values`, everything else stays alive.
struct Restriction {
    std::vector<int> fixed;   // sorted coordinate indices
    std::vector<int> values;  // parallel to fixed
};

// Merge classes plus a plain restriction: the classes and the fixed set
// partition [n]. Free coordinate j of the restricted function ranges over
// class j, so class order is part of the object.
struct GeneralizedRestriction {
    int n = 0;
    std::vector<std::vector<int>> classes;  // each sorted, nonempty, disjoint
    std::vector<int> fixed;                 // sorted
    std::vector<int> values;                // parallel to fixed

    int free_count() const { return static_cast<int>(classes.size()); }

    static GeneralizedRestriction identity(int n) {
        GeneralizedRestriction r;
        r.n = n;
        for (int i = 0; i < n; ++i) r.classes.push_back({i});
        return r;
    }

    static GeneralizedRestriction from_plain(const Restriction& rho, int n) {
        GeneralizedRestriction r;
        r.n = n;
        r.fixed = rho.fixed;
        r.values = rho.values;
        size_t fi = 0;
        for (int i = 0; i < n; ++i) {
            if (fi < rho.fixed.size() && rho.fixed[fi] == i) {
                ++fi;
                continue;
            }
            r.classes.push_back({i});
        }
        return r;
    }

    void check() const {
        std::vector<int> seen(n, 0);
        for (const auto& t : classes) {
            if (t.empty()) throw input_error("generalized restriction: empty class");
            for (int i : t) {
                if (i < 0 || i >= n || seen[i]++) throw input_error("generalized restriction: not a partition");
            }
        }
        if (fixed.size() != values.size()) throw input_error("generalized restriction: values/fixed mismatch");
        for (int i : fixed)
            if (i < 0 || i >= n || seen[i]++) throw input_error("generalized restriction: not a partition");
        for (int i = 0; i < n; ++i)
            if (!seen[i]) throw input_error("generalized restriction: uncovered coordinate");
    }

    // Maps each original coordinate to its class index, or -1 when fixed.
    std::vector<int> coordinate_to_class() const {
        std::vector<int> m(n, -1);
        for (size_t j = 0; j < classes.size(); ++j)
            for (int i : classes[j]) m[i] = static_cast<int>(j);
        return m;
    }

    // Extends a point of the restricted space back to the ambient space.
    std::vector<int> extend(const std::vector<int>& y) const {
        std::vector<int> x(n, -1);
        for (size_t j = 0; j < classes.size(); ++j)
            for (int i : classes[j]) x[i] = y[j];
        for (size_t t = 0; t < fixed.size(); ++t) x[fixed[t]] = values[t];
        return x;
    }

    bool contains(const std::vector<int>& x) const {
        for (const auto& t : classes)
            for (size_t u = 1; u < t.size(); ++u)
                if (x[t[u]] != x[t[0]]) return false;
        for (size_t t = 0; t < fixed.size(); ++t)
            if (x[fixed[t]] != values[t]) return false;
        return true;
    }
};

// rho2 acts on the free coordinates of rho1; the result acts on the ambient
// space: merged classes unite, fixed classes inherit rho2's values.
inline GeneralizedRestriction compose(const GeneralizedRestriction& rho2, const GeneralizedRestriction& rho1) {
    if (rho2.n != rho1.free_count())
        throw input_error("compose: arity mismatch");
    GeneralizedRestriction out;
    out.n = rho1.n;
    for (const auto& s : rho2.classes) {
        std::vector<int> u;
        for (int j : s) u.insert(u.end(), rho1.classes[j].begin(), rho1.classes[j].end());
        std::sort(u.begin(), u.end());
        out.classes.push_back(std::move(u));
    }
    std::vector<std::pair<int, int>> fixed_pairs;
    for (size_t t = 0; t < rho1.fixed.size(); ++t) fixed_pairs.emplace_back(rho1.fixed[t], rho1.values[t]);
    for (size_t t = 0; t < rho2.fixed.size(); ++t) {
        int j = rho2.fixed[t];
        for (int i : rho1.classes[j]) fixed_pairs.emplace_back(i, rho2.values[t]);
    }
    std::sort(fixed_pairs.begin(), fixed_pairs.end());
    for (auto& [i, v] : fixed_pairs) {
        out.fixed.push_back(i);
        out.values.push_back(v);
    }
    return out;
}

}  // namespace parlab
