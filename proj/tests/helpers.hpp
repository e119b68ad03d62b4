#pragma once

#include <optional>
#include <random>
#include <vector>

#include "parlab/game.hpp"
#include "parlab/support.hpp"

namespace testutil {

using parlab::Game;
using parlab::Rational;
using parlab::SupportSet;

inline std::mt19937_64 rng(uint64_t seed) { return std::mt19937_64(seed); }

// Random support over given alphabet sizes; nonempty.
inline SupportSet random_support(std::mt19937_64& g, const std::vector<int>& sizes, double density = 0.4) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    parlab::Box box(sizes);
    std::vector<std::vector<int>> tuples;
    while (tuples.empty()) {
        for (int64_t f = 0; f < box.size(); ++f)
            if (coin(g) < density) tuples.push_back(box.unflatten(f));
    }
    return SupportSet::from_tuples(sizes, std::move(tuples));
}

// Random k-player game with the given alphabet sizes and uniform distribution
// over a random nonempty support.
inline Game random_game(std::mt19937_64& g, const std::vector<int>& qsizes, const std::vector<int>& asizes,
                        double support_density = 0.5, double win_density = 0.5) {
    Game game;
    game.players = static_cast<int>(qsizes.size());
    for (int j = 0; j < game.players; ++j) {
        std::vector<std::string> ql, al;
        for (int v = 0; v < qsizes[j]; ++v) ql.push_back(std::to_string(v));
        for (int v = 0; v < asizes[j]; ++v) al.push_back(std::to_string(v));
        game.question_labels.push_back(ql);
        game.answer_labels.push_back(al);
    }
    parlab::Box qb = game.question_box(), ab = game.answer_box();
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::vector<int64_t> support;
    while (support.empty()) {
        for (int64_t f = 0; f < qb.size(); ++f)
            if (coin(g) < support_density) support.push_back(f);
    }
    game.query.assign(qb.size(), Rational(0));
    for (int64_t f : support) game.query[f] = Rational(1, static_cast<long>(support.size()));
    game.predicate.assign(qb.size() * ab.size(), 0);
    for (auto& p : game.predicate) p = coin(g) < win_density ? 1 : 0;
    return game;
}

// ---- brute-force embedding oracles (independent of the lattice machinery) --

namespace detail {

struct SearchState {
    const SupportSet* s;
    int total_labels = 0;
    std::vector<int> block_of, offset;
    // tuples as label-index lists
    std::vector<std::vector<int>> tuple_labels;
};

inline SearchState make_state(const SupportSet& s) {
    SearchState st;
    st.s = &s;
    st.offset.resize(s.coords());
    for (int i = 0; i < s.coords(); ++i) {
        st.offset[i] = st.total_labels;
        st.total_labels += s.alphabet_size(i);
        for (int a = 0; a < s.alphabet_size(i); ++a) st.block_of.push_back(i);
    }
    for (const auto& t : s.tuples) {
        std::vector<int> labels;
        for (int i = 0; i < s.coords(); ++i) labels.push_back(st.offset[i] + t[i]);
        st.tuple_labels.push_back(labels);
    }
    return st;
}

// Depth-first assignment with forced-value propagation. Values in Z/m when
// m > 0, else integers in [-box, box]. First labels of blocks 0..k-2 are
// pinned to zero (shift normalization), so the all-zero assignment is the
// unique trivial solution and any other full solution is a witness.
struct DfsSearch {
    const SearchState& st;
    int m;    // modulus, 0 for integer search
    int box;  // only for integer search
    std::vector<long long> value;
    std::vector<uint8_t> assigned;

    DfsSearch(const SearchState& st, int m, int box)
        : st(st), m(m), box(box), value(st.total_labels, 0), assigned(st.total_labels, 0) {}

    bool tuple_ok(const std::vector<int>& labels, long long* forced_label_sum, int* unassigned_label) const {
        long long sum = 0;
        int missing = -1, count = 0;
        for (int l : labels) {
            if (assigned[l])
                sum += value[l];
            else {
                missing = l;
                ++count;
            }
        }
        *forced_label_sum = sum;
        *unassigned_label = missing;
        if (count == 0) return m > 0 ? (sum % m == 0) : (sum == 0);
        return true;
    }

    bool feasible_value(long long v) const { return m > 0 ? true : (v >= -box && v <= box); }

    // returns true when a full assignment with some nonzero value exists
    bool search(int next_label) {
        while (next_label < st.total_labels && assigned[next_label]) ++next_label;
        if (next_label == st.total_labels) {
            for (int l = 0; l < st.total_labels; ++l)
                if (value[l] != 0) return true;
            return false;
        }

        std::vector<long long> candidates;
        if (m > 0) {
            for (int v = 1; v < m; ++v) candidates.push_back(v);  // nonzero first
            candidates.push_back(0);
        } else {
            for (int v = 1; v <= box; ++v) {
                candidates.push_back(v);
                candidates.push_back(-v);
            }
            candidates.push_back(0);
        }
        for (long long v : candidates) {
            std::vector<int> trail;
            if (try_assign(next_label, v, trail)) {
                if (search(next_label + 1)) return true;
            }
            for (int l : trail) {
                assigned[l] = 0;
                value[l] = 0;
            }
        }
        return false;
    }

    // assign + propagate forced values; trail records what to undo
    bool try_assign(int label, long long v, std::vector<int>& trail) {
        if (!feasible_value(v)) return false;
        assigned[label] = 1;
        value[label] = m > 0 ? ((v % m) + m) % m : v;
        trail.push_back(label);
        bool progress = true;
        while (progress) {
            progress = false;
            for (const auto& labels : st.tuple_labels) {
                long long sum;
                int missing;
                if (!tuple_ok(labels, &sum, &missing)) return false;
                int count = 0;
                for (int l : labels)
                    if (!assigned[l]) ++count;
                if (count == 1) {
                    long long forced = m > 0 ? (((-sum) % m) + m) % m : -sum;
                    if (!feasible_value(forced)) return false;
                    assigned[missing] = 1;
                    value[missing] = forced;
                    trail.push_back(missing);
                    progress = true;
                }
            }
        }
        return true;
    }
};

}  // namespace detail

// Does a non-trivial embedding into Z/m exist? Exhaustive search.
inline bool zm_embedding_exists(const SupportSet& s, int m) {
    auto st = detail::make_state(s);
    detail::DfsSearch dfs(st, m, 0);
    std::vector<int> trail;
    // pin first labels of blocks 0..k-2
    for (int i = 0; i + 1 < s.coords(); ++i) {
        if (!dfs.try_assign(st.offset[i], 0, trail)) return false;
    }
    return dfs.search(0);
}

// Does a non-trivial embedding into (Z,+) with values in [-box, box] exist?
inline bool z_embedding_exists_boxed(const SupportSet& s, int box) {
    auto st = detail::make_state(s);
    detail::DfsSearch dfs(st, 0, box);
    std::vector<int> trail;
    for (int i = 0; i + 1 < s.coords(); ++i) {
        if (!dfs.try_assign(st.offset[i], 0, trail)) return false;
    }
    return dfs.search(0);
}

}  // namespace testutil
