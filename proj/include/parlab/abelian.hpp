#pragma once

#include <optional>
#include <vector>

#include "parlab/integer_matrix.hpp"
#include "parlab/structure.hpp"
#include "parlab/support.hpp"

namespace parlab {

// Finitely generated Abelian group in invariant-factor form.
struct AbelianGroupPresentation {
    int free_rank = 0;
    std::vector<Integer> torsion;  // each >= 2, divisibility chain

    bool is_trivial_group() const { return free_rank == 0 && torsion.empty(); }
};

// Maps sigma_i : Sigma_i -> G, one coordinate vector per label: torsion
// coordinates first (canonical representatives in [0, d)), then free ones.
struct EmbeddingWitness {
    AbelianGroupPresentation group;
    std::vector<std::vector<std::vector<Integer>>> sigma;  // [coord][label][group coord]
    bool trivial = true;

    int coords_per_element() const { return static_cast<int>(group.torsion.size()) + group.free_rank; }

    // Machine check: every support tuple sums to the identity, and unless
    // `trivial`, some sigma map is non-constant.
    bool verify(const SupportSet& s) const {
        int gc = coords_per_element();
        for (const auto& t : s.tuples) {
            std::vector<Integer> sum(gc);
            for (int i = 0; i < s.coords(); ++i)
                for (int c = 0; c < gc; ++c) sum[c] += sigma[i][t[i]][c];
            for (size_t c = 0; c < group.torsion.size(); ++c)
                if (sum[c] % group.torsion[c] != 0) return false;
            for (int c = static_cast<int>(group.torsion.size()); c < gc; ++c)
                if (sum[c] != 0) return false;
        }
        if (!trivial) {
            bool nonconstant = false;
            for (int i = 0; i < s.coords() && !nonconstant; ++i)
                for (size_t a = 1; a < sigma[i].size() && !nonconstant; ++a)
                    nonconstant = sigma[i][a] != sigma[i][0];
            if (!nonconstant) return false;
        }
        return true;
    }
};

// One row per support tuple, one column per (coordinate, label) pair; the
// tuple's row has a single 1 in each coordinate block.
inline IntegerMatrix relation_matrix(const SupportSet& s) {
    int cols = 0;
    std::vector<int> offset(s.coords());
    for (int i = 0; i < s.coords(); ++i) {
        offset[i] = cols;
        cols += s.alphabet_size(i);
    }
    IntegerMatrix m(static_cast<int>(s.tuples.size()), cols);
    for (size_t r = 0; r < s.tuples.size(); ++r)
        for (int i = 0; i < s.coords(); ++i) m.at(static_cast<int>(r), offset[i] + s.tuples[r][i]) = 1;
    return m;
}

inline std::vector<int> block_offsets(const SupportSet& s) {
    std::vector<int> offset(s.coords());
    int cols = 0;
    for (int i = 0; i < s.coords(); ++i) {
        offset[i] = cols;
        cols += s.alphabet_size(i);
    }
    offset.push_back(cols);
    return offset;
}

// The canonical embedding into Z^N / rowLattice(relation matrix). Every
// Abelian embedding factors through it, so it is non-trivial exactly when a
// non-trivial embedding into some Abelian group exists. The decision uses
// the difference-vector criterion, independent of presentation choices:
// non-trivial iff some e_(i,a) - e_(i,a') is outside the row lattice.
inline EmbeddingWitness universal_embedding(const SupportSet& s) {
    IntegerMatrix m = relation_matrix(s);
    SNFDecomposition snf = smith_normal_form(m);
    auto factors = snf.invariant_factors();
    int rank = static_cast<int>(factors.size());
    int n = m.cols;

    EmbeddingWitness w;
    std::vector<int> torsion_cols;  // indices t < rank with d_t >= 2
    for (int t = 0; t < rank; ++t)
        if (factors[t] >= 2) {
            torsion_cols.push_back(t);
            w.group.torsion.push_back(factors[t]);
        }
    w.group.free_rank = n - rank;

    auto offsets = block_offsets(s);
    w.sigma.resize(s.coords());
    for (int i = 0; i < s.coords(); ++i) {
        w.sigma[i].resize(s.alphabet_size(i));
        for (int a = 0; a < s.alphabet_size(i); ++a) {
            int col = offsets[i] + a;  // e_(i,a) V = row `col` of V
            std::vector<Integer> g;
            for (size_t c = 0; c < torsion_cols.size(); ++c) {
                Integer v;
                mpz_fdiv_r(v.get_mpz_t(), snf.V.at(col, torsion_cols[c]).get_mpz_t(),
                           w.group.torsion[c].get_mpz_t());
                g.push_back(v);
            }
            for (int t = rank; t < n; ++t) g.push_back(snf.V.at(col, t));
            w.sigma[i][a] = std::move(g);
        }
    }

    // sign-normalize the free coordinates: first nonzero value positive
    int tc = static_cast<int>(torsion_cols.size());
    for (int c = tc; c < tc + w.group.free_rank; ++c) {
        int sign = 0;
        for (int i = 0; i < s.coords() && sign == 0; ++i)
            for (int a = 0; a < s.alphabet_size(i) && sign == 0; ++a)
                if (w.sigma[i][a][c] != 0) sign = w.sigma[i][a][c] > 0 ? 1 : -1;
        if (sign < 0)
            for (int i = 0; i < s.coords(); ++i)
                for (int a = 0; a < s.alphabet_size(i); ++a) w.sigma[i][a][c] = -w.sigma[i][a][c];
    }

    // difference-vector criterion for triviality
    w.trivial = true;
    for (int i = 0; i < s.coords() && w.trivial; ++i) {
        for (int a = 1; a < s.alphabet_size(i) && w.trivial; ++a) {
            // c = (e_(i,a) - e_(i,0)) V, membership iff divisibility per factor
            for (int t = 0; t < n; ++t) {
                Integer c = snf.V.at(offsets[i] + a, t) - snf.V.at(offsets[i], t);
                if (t < rank ? (c % factors[t] != 0) : (c != 0)) {
                    w.trivial = false;
                    break;
                }
            }
        }
    }
    return w;
}

inline bool has_nontrivial_embedding(const SupportSet& s) { return !universal_embedding(s).trivial; }

// Integer-valued witness, one number per (coordinate, label); summing to zero
// over every support tuple and non-constant on some coordinate.
struct ZEmbeddingWitness {
    std::vector<std::vector<Integer>> sigma;  // [coord][label]

    bool verify(const SupportSet& s) const {
        for (const auto& t : s.tuples) {
            Integer sum = 0;
            for (int i = 0; i < s.coords(); ++i) sum += sigma[i][t[i]];
            if (sum != 0) return false;
        }
        for (int i = 0; i < s.coords(); ++i)
            for (size_t a = 1; a < sigma[i].size(); ++a)
                if (sigma[i][a] != sigma[i][0]) return true;
        return false;
    }
};

// Rational kernel of the relation matrix always contains the constant-per-
// block solutions with coordinate sums zero (dimension k-1); a non-trivial
// integer embedding exists iff the kernel is strictly larger.
inline std::optional<ZEmbeddingWitness> has_Z_embedding(const SupportSet& s) {
    IntegerMatrix m = relation_matrix(s);
    SNFDecomposition snf = smith_normal_form(m);
    int rank = snf.rank();
    int n = m.cols;
    if (n - rank <= s.coords() - 1) return std::nullopt;

    auto offsets = block_offsets(s);
    // kernel basis = columns of V past the rank; at least one is non-constant
    // per block (the constant solutions span only k-1 dimensions)
    for (int t = rank; t < n; ++t) {
        bool nonconstant = false;
        for (int i = 0; i < s.coords() && !nonconstant; ++i)
            for (int a = 1; a < s.alphabet_size(i) && !nonconstant; ++a)
                nonconstant = snf.V.at(offsets[i] + a, t) != snf.V.at(offsets[i], t);
        if (!nonconstant) continue;
        ZEmbeddingWitness w;
        Integer g = 0;
        for (int col = 0; col < n; ++col) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), snf.V.at(col, t).get_mpz_t());
        if (g == 0) g = 1;
        int sign = 0;
        for (int col = 0; col < n && sign == 0; ++col)
            if (snf.V.at(col, t) != 0) sign = snf.V.at(col, t) > 0 ? 1 : -1;
        w.sigma.resize(s.coords());
        for (int i = 0; i < s.coords(); ++i) {
            w.sigma[i].resize(s.alphabet_size(i));
            for (int a = 0; a < s.alphabet_size(i); ++a) {
                Integer v = snf.V.at(offsets[i] + a, t) / g;
                w.sigma[i][a] = sign < 0 ? Integer(-v) : v;
            }
        }
        return w;
    }
    return std::nullopt;  // unreachable when the dimension check passed
}

struct MarginalConditionReport {
    bool pairwise_connected = false;
    std::vector<uint8_t> marginal_has_no_embedding;  // per dropped coordinate
    bool holds = false;                              // pairwise && at least two marginals pass
};

inline MarginalConditionReport check_marginal_condition(const SupportSet& s) {
    MarginalConditionReport r;
    r.pairwise_connected = is_pairwise_connected(s).first;
    int passing = 0;
    for (int i = 0; i < s.coords(); ++i) {
        bool none = s.coords() >= 2 ? !has_nontrivial_embedding(s.drop_coordinate(i)) : false;
        r.marginal_has_no_embedding.push_back(none ? 1 : 0);
        if (none) ++passing;
    }
    r.holds = r.pairwise_connected && passing >= 2;
    return r;
}

// Turns a certified disconnection of the (i,j) projection graph into a Z/2
// witness: 1 on the first parts, 0 elsewhere (so -g = g), zero maps on the
// remaining coordinates.
inline EmbeddingWitness bipartition_embedding_witness(const SupportSet& s, int i, int j,
                                                      const BipartitionWitness& part) {
    if (i == j || i < 0 || j < 0 || i >= s.coords() || j >= s.coords())
        throw input_error("bipartition witness: bad coordinates");
    std::vector<uint8_t> in_left(s.alphabet_size(i), 0), in_right(s.alphabet_size(j), 0);
    for (int a : part.left_part) in_left.at(a) = 1;
    for (int b : part.right_part) in_right.at(b) = 1;
    for (const auto& t : s.tuples)
        if (in_left[t[i]] != in_right[t[j]])
            throw input_error("bipartition witness: partition does not certify disconnection");
    bool left_proper = !part.left_part.empty() && part.left_part.size() < static_cast<size_t>(s.alphabet_size(i));
    bool right_proper = !part.right_part.empty() && part.right_part.size() < static_cast<size_t>(s.alphabet_size(j));
    if (!left_proper && !right_proper)
        throw input_error("bipartition witness: partition yields a trivial embedding");

    EmbeddingWitness w;
    w.group.free_rank = 0;
    w.group.torsion = {Integer(2)};
    w.trivial = false;
    w.sigma.resize(s.coords());
    for (int c = 0; c < s.coords(); ++c) {
        w.sigma[c].assign(s.alphabet_size(c), {Integer(0)});
        if (c == i)
            for (int a : part.left_part) w.sigma[c][a] = {Integer(1)};
        if (c == j)
            for (int b : part.right_part) w.sigma[c][b] = {Integer(1)};
    }
    if (!w.verify(s)) throw input_error("bipartition witness: verification failed");
    return w;
}

}  // namespace parlab
