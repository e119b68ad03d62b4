#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "parlab/errors.hpp"

namespace parlab {

// Support of a distribution over a product of finite alphabets. All the
// structural classifiers and embedding machinery depend on the support only.
struct SupportSet {
    std::vector<std::vector<std::string>> alphabets;  // labels per coordinate
    std::vector<std::vector<int>> tuples;             // sorted, unique, index form

    int coords() const { return static_cast<int>(alphabets.size()); }
    int alphabet_size(int i) const { return static_cast<int>(alphabets[i].size()); }

    static SupportSet from_tuples(std::vector<int> sizes, std::vector<std::vector<int>> tuples) {
        SupportSet s;
        s.alphabets.reserve(sizes.size());
        for (int n : sizes) {
            std::vector<std::string> labels;
            for (int a = 0; a < n; ++a) labels.push_back(std::to_string(a));
            s.alphabets.push_back(std::move(labels));
        }
        std::sort(tuples.begin(), tuples.end());
        tuples.erase(std::unique(tuples.begin(), tuples.end()), tuples.end());
        s.tuples = std::move(tuples);
        s.check();
        return s;
    }

    void check() const {
        if (alphabets.empty()) throw input_error("support: no coordinates");
        if (tuples.empty()) throw input_error("support: empty");
        for (const auto& t : tuples) {
            if (t.size() != alphabets.size()) throw input_error("support: tuple arity mismatch");
            for (size_t i = 0; i < t.size(); ++i)
                if (t[i] < 0 || t[i] >= static_cast<int>(alphabets[i].size()))
                    throw input_error("support: label out of range");
        }
    }

    // Projection onto a subset of coordinates (kept in the given order).
    SupportSet project(const std::vector<int>& coords) const {
        SupportSet s;
        for (int c : coords) s.alphabets.push_back(alphabets[c]);
        std::set<std::vector<int>> seen;
        for (const auto& t : tuples) {
            std::vector<int> p;
            p.reserve(coords.size());
            for (int c : coords) p.push_back(t[c]);
            seen.insert(std::move(p));
        }
        s.tuples.assign(seen.begin(), seen.end());
        return s;
    }

    // All coordinates except i.
    SupportSet drop_coordinate(int i) const {
        std::vector<int> keep;
        for (int c = 0; c < coords(); ++c)
            if (c != i) keep.push_back(c);
        return project(keep);
    }

    // Shrinks each alphabet to the labels that actually occur.
    SupportSet trimmed() const {
        SupportSet s;
        std::vector<std::vector<int>> remap(coords());
        for (int i = 0; i < coords(); ++i) {
            std::vector<uint8_t> used(alphabets[i].size(), 0);
            for (const auto& t : tuples) used[t[i]] = 1;
            remap[i].assign(alphabets[i].size(), -1);
            std::vector<std::string> kept;
            for (size_t a = 0; a < used.size(); ++a)
                if (used[a]) {
                    remap[i][a] = static_cast<int>(kept.size());
                    kept.push_back(alphabets[i][a]);
                }
            s.alphabets.push_back(std::move(kept));
        }
        for (const auto& t : tuples) {
            std::vector<int> r(t.size());
            for (size_t i = 0; i < t.size(); ++i) r[i] = remap[i][t[i]];
            s.tuples.push_back(std::move(r));
        }
        return s;
    }
};

}  // namespace parlab
