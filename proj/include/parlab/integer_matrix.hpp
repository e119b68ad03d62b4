#pragma once

#include <vector>

#include "parlab/rational.hpp"

namespace parlab {

struct IntegerMatrix {
    int rows = 0, cols = 0;
    std::vector<Integer> a;  // row-major

    IntegerMatrix() = default;
    IntegerMatrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c) {}

    Integer& at(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    const Integer& at(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

    static IntegerMatrix identity(int n) {
        IntegerMatrix m(n, n);
        for (int i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }

    IntegerMatrix operator*(const IntegerMatrix& o) const {
        if (cols != o.rows) throw input_error("matrix product: dimension mismatch");
        IntegerMatrix r(rows, o.cols);
        for (int i = 0; i < rows; ++i)
            for (int t = 0; t < cols; ++t) {
                if (at(i, t) == 0) continue;
                for (int j = 0; j < o.cols; ++j) r.at(i, j) += at(i, t) * o.at(t, j);
            }
        return r;
    }

    bool operator==(const IntegerMatrix& o) const { return rows == o.rows && cols == o.cols && a == o.a; }
};

// Fraction-free Gaussian elimination (Bareiss).
inline Integer determinant(IntegerMatrix m) {
    if (m.rows != m.cols) throw input_error("determinant: not square");
    int n = m.rows;
    if (n == 0) return 1;
    Integer prev = 1;
    int sign = 1;
    for (int t = 0; t < n - 1; ++t) {
        if (m.at(t, t) == 0) {
            int p = -1;
            for (int i = t + 1; i < n; ++i)
                if (m.at(i, t) != 0) {
                    p = i;
                    break;
                }
            if (p < 0) return 0;
            for (int j = 0; j < n; ++j) std::swap(m.at(t, j), m.at(p, j));
            sign = -sign;
        }
        for (int i = t + 1; i < n; ++i)
            for (int j = t + 1; j < n; ++j) {
                Integer v = m.at(i, j) * m.at(t, t) - m.at(i, t) * m.at(t, j);
                mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
                m.at(i, j) = v;
            }
        prev = m.at(t, t);
    }
    return sign > 0 ? m.at(n - 1, n - 1) : Integer(-m.at(n - 1, n - 1));
}

// U * M * V = D with U, V unimodular and the diagonal entries forming a
// divisibility chain d1 | d2 | ...
struct SNFDecomposition {
    IntegerMatrix U, D, V;

    std::vector<Integer> invariant_factors() const {
        std::vector<Integer> f;
        for (int t = 0; t < std::min(D.rows, D.cols); ++t)
            if (D.at(t, t) != 0) f.push_back(D.at(t, t));
        return f;
    }
    int rank() const { return static_cast<int>(invariant_factors().size()); }
};

namespace detail {

// Quotient minimizing |a - q*b| for b > 0.
inline Integer nearest_quotient(const Integer& a, const Integer& b) {
    Integer q, r;
    mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    if (r * 2 > b) q += 1;
    return q;
}

}  // namespace detail

// Smallest-nonzero-entry pivoting keeps coefficient growth tame; correctness
// over speed at these sizes.
inline SNFDecomposition smith_normal_form(const IntegerMatrix& m) {
    SNFDecomposition s;
    s.D = m;
    s.U = IntegerMatrix::identity(m.rows);
    s.V = IntegerMatrix::identity(m.cols);
    IntegerMatrix& D = s.D;
    IntegerMatrix& U = s.U;
    IntegerMatrix& V = s.V;

    auto swap_rows = [&](int i1, int i2) {
        if (i1 == i2) return;
        for (int j = 0; j < D.cols; ++j) std::swap(D.at(i1, j), D.at(i2, j));
        for (int j = 0; j < U.cols; ++j) std::swap(U.at(i1, j), U.at(i2, j));
    };
    auto swap_cols = [&](int j1, int j2) {
        if (j1 == j2) return;
        for (int i = 0; i < D.rows; ++i) std::swap(D.at(i, j1), D.at(i, j2));
        for (int i = 0; i < V.rows; ++i) std::swap(V.at(i, j1), V.at(i, j2));
    };
    auto add_row = [&](int dst, int src, const Integer& c) {  // row dst += c * row src
        if (c == 0) return;
        for (int j = 0; j < D.cols; ++j) D.at(dst, j) += c * D.at(src, j);
        for (int j = 0; j < U.cols; ++j) U.at(dst, j) += c * U.at(src, j);
    };
    auto add_col = [&](int dst, int src, const Integer& c) {
        if (c == 0) return;
        for (int i = 0; i < D.rows; ++i) D.at(i, dst) += c * D.at(i, src);
        for (int i = 0; i < V.rows; ++i) V.at(i, dst) += c * V.at(i, src);
    };
    auto negate_row = [&](int i) {
        for (int j = 0; j < D.cols; ++j) D.at(i, j) = -D.at(i, j);
        for (int j = 0; j < U.cols; ++j) U.at(i, j) = -U.at(i, j);
    };

    int steps = std::min(m.rows, m.cols);
    for (int t = 0; t < steps; ++t) {
        while (true) {
            int pi = -1, pj = -1;
            for (int i = t; i < D.rows; ++i)
                for (int j = t; j < D.cols; ++j) {
                    if (D.at(i, j) == 0) continue;
                    if (pi < 0 || mpz_cmpabs(D.at(i, j).get_mpz_t(), D.at(pi, pj).get_mpz_t()) < 0) {
                        pi = i;
                        pj = j;
                    }
                }
            if (pi < 0) {
                t = steps;  // all remaining entries are zero
                break;
            }
            swap_rows(t, pi);
            swap_cols(t, pj);
            if (D.at(t, t) < 0) negate_row(t);

            bool residue = false;
            for (int i = t + 1; i < D.rows; ++i) {
                if (D.at(i, t) == 0) continue;
                add_row(i, t, -detail::nearest_quotient(D.at(i, t), D.at(t, t)));
                residue = residue || D.at(i, t) != 0;
            }
            for (int j = t + 1; j < D.cols; ++j) {
                if (D.at(t, j) == 0) continue;
                add_col(j, t, -detail::nearest_quotient(D.at(t, j), D.at(t, t)));
                residue = residue || D.at(t, j) != 0;
            }
            if (residue) continue;  // a smaller pivot appeared; reselect

            // pull any non-multiple into row t so the next pass shrinks the pivot
            int bi = -1;
            for (int i = t + 1; i < D.rows && bi < 0; ++i)
                for (int j = t + 1; j < D.cols; ++j)
                    if (D.at(i, j) % D.at(t, t) != 0) {
                        bi = i;
                        break;
                    }
            if (bi >= 0) {
                add_row(t, bi, Integer(1));
                continue;
            }
            break;
        }
        if (t >= steps) break;
    }
    return s;
}

// Row-style Hermite echelon of the row lattice; rows with pivots only.
inline IntegerMatrix hermite_normal_form(const IntegerMatrix& m) {
    IntegerMatrix h = m;
    int r = 0;
    for (int col = 0; col < h.cols && r < h.rows; ++col) {
        while (true) {
            int p = -1;
            for (int i = r; i < h.rows; ++i) {
                if (h.at(i, col) == 0) continue;
                if (p < 0 || mpz_cmpabs(h.at(i, col).get_mpz_t(), h.at(p, col).get_mpz_t()) < 0) p = i;
            }
            if (p < 0) break;
            if (p != r)
                for (int j = 0; j < h.cols; ++j) std::swap(h.at(r, j), h.at(p, j));
            if (h.at(r, col) < 0)
                for (int j = 0; j < h.cols; ++j) h.at(r, j) = -h.at(r, j);
            bool residue = false;
            for (int i = r + 1; i < h.rows; ++i) {
                if (h.at(i, col) == 0) continue;
                Integer q = detail::nearest_quotient(h.at(i, col), h.at(r, col));
                for (int j = 0; j < h.cols; ++j) h.at(i, j) -= q * h.at(r, j);
                residue = residue || h.at(i, col) != 0;
            }
            if (!residue) break;
        }
        if (h.at(r, col) != 0) {
            for (int i = 0; i < r; ++i) {  // canonical: entries above pivot in [0, pivot)
                Integer q;
                mpz_fdiv_q(q.get_mpz_t(), h.at(i, col).get_mpz_t(), h.at(r, col).get_mpz_t());
                if (q != 0)
                    for (int j = 0; j < h.cols; ++j) h.at(i, j) -= q * h.at(r, j);
            }
            ++r;
        }
    }
    IntegerMatrix out(r, h.cols);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < h.cols; ++j) out.at(i, j) = h.at(i, j);
    return out;
}

// Is v in the lattice generated by the rows of `basis`?
inline bool lattice_membership(const IntegerMatrix& basis, std::vector<Integer> v) {
    if (static_cast<int>(v.size()) != basis.cols) throw input_error("lattice_membership: dimension mismatch");
    IntegerMatrix h = hermite_normal_form(basis);
    int row = 0;
    for (int col = 0; col < h.cols; ++col) {
        int pivot_row = -1;
        if (row < h.rows && h.at(row, col) != 0) pivot_row = row;
        if (pivot_row < 0) {
            if (v[col] != 0) return false;
            continue;
        }
        if (v[col] % h.at(pivot_row, col) != 0) return false;
        Integer q = v[col] / h.at(pivot_row, col);
        for (int j = col; j < h.cols; ++j) v[j] -= q * h.at(pivot_row, j);
        ++row;
    }
    for (const auto& x : v)
        if (x != 0) return false;
    return true;
}

}  // namespace parlab
