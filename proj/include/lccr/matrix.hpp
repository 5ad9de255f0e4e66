#pragma once

// Dense row-major matrices over GF(2^w) and the elimination routines the
// codecs are built on. All matrices here are small (at most a few hundred
// columns), so there is no sparse format and no blocking.

#include <cstddef>
#include <span>
#include <vector>

#include "lccr/errors.hpp"
#include "lccr/field.hpp"

namespace lccr {

struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<gf_t> data; // row-major, rows*cols entries

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }

    gf_t& at(std::size_t r, std::size_t c) {
        assert(r < rows && c < cols);
        return data[r * cols + c];
    }
    gf_t at(std::size_t r, std::size_t c) const {
        assert(r < rows && c < cols);
        return data[r * cols + c];
    }

    std::span<const gf_t> row(std::size_t r) const {
        return {data.data() + r * cols, cols};
    }

    bool operator==(const Matrix& o) const {
        return rows == o.rows && cols == o.cols && data == o.data;
    }
};

inline Matrix transpose(const Matrix& a) {
    Matrix t(a.cols, a.rows);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < a.cols; ++j) t.at(j, i) = a.at(i, j);
    return t;
}

inline Matrix mat_mul(const Field& f, const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows)
        throw DimensionMismatch("mat_mul: " + std::to_string(a.cols) + " columns vs " +
                                std::to_string(b.rows) + " rows");
    Matrix c(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t k = 0; k < a.cols; ++k) {
            const gf_t aik = a.at(i, k);
            if (aik == 0) continue;
            for (std::size_t j = 0; j < b.cols; ++j)
                c.at(i, j) ^= f.mul(aik, b.at(k, j));
        }
    return c;
}

// row vector times matrix
inline std::vector<gf_t> vec_mat(const Field& f, std::span<const gf_t> v, const Matrix& m) {
    if (v.size() != m.rows) throw DimensionMismatch("vec_mat: vector length vs matrix rows");
    std::vector<gf_t> out(m.cols, 0);
    for (std::size_t i = 0; i < m.rows; ++i) {
        const gf_t vi = v[i];
        if (vi == 0) continue;
        for (std::size_t j = 0; j < m.cols; ++j) out[j] ^= f.mul(vi, m.at(i, j));
    }
    return out;
}

// Gauss-Jordan with row pivoting (first nonzero pivot; there is no magnitude
// ordering over a finite field).
inline Matrix mat_inv(const Field& f, const Matrix& a) {
    if (a.rows != a.cols) throw DimensionMismatch("mat_inv: matrix not square");
    const std::size_t n = a.rows;
    Matrix w = a;
    Matrix inv = Matrix::identity(n);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && w.at(piv, col) == 0) ++piv;
        if (piv == n) throw Singular("mat_inv: rank deficient at column " + std::to_string(col));
        if (piv != col)
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(w.at(piv, j), w.at(col, j));
                std::swap(inv.at(piv, j), inv.at(col, j));
            }
        const gf_t scale = f.inv(w.at(col, col));
        for (std::size_t j = 0; j < n; ++j) {
            w.at(col, j) = f.mul(w.at(col, j), scale);
            inv.at(col, j) = f.mul(inv.at(col, j), scale);
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const gf_t factor = w.at(r, col);
            if (factor == 0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                w.at(r, j) ^= f.mul(factor, w.at(col, j));
                inv.at(r, j) ^= f.mul(factor, inv.at(col, j));
            }
        }
    }
    return inv;
}

inline std::size_t mat_rank(const Field& f, Matrix a) {
    std::size_t rank = 0;
    for (std::size_t col = 0; col < a.cols && rank < a.rows; ++col) {
        std::size_t piv = rank;
        while (piv < a.rows && a.at(piv, col) == 0) ++piv;
        if (piv == a.rows) continue;
        if (piv != rank)
            for (std::size_t j = 0; j < a.cols; ++j) std::swap(a.at(piv, j), a.at(rank, j));
        const gf_t scale = f.inv(a.at(rank, col));
        for (std::size_t j = col; j < a.cols; ++j) a.at(rank, j) = f.mul(a.at(rank, j), scale);
        for (std::size_t r = 0; r < a.rows; ++r) {
            if (r == rank) continue;
            const gf_t factor = a.at(r, col);
            if (factor == 0) continue;
            for (std::size_t j = col; j < a.cols; ++j)
                a.at(r, j) ^= f.mul(factor, a.at(rank, j));
        }
        ++rank;
    }
    return rank;
}

// Cauchy matrix: entry (i,j) = 1 / (x_i + y_j). Every square submatrix is
// invertible, which is exactly what the systematic MDS generator needs.
inline Matrix cauchy_matrix(const Field& f, std::span<const gf_t> xs, std::span<const gf_t> ys) {
    std::vector<bool> seen(f.order(), false);
    for (gf_t v : xs) {
        if (!f.contains(v) || seen[v]) throw BadSupport("cauchy support elements must be distinct");
        seen[v] = true;
    }
    for (gf_t v : ys) {
        if (!f.contains(v) || seen[v]) throw BadSupport("cauchy support elements must be distinct");
        seen[v] = true;
    }
    Matrix m(xs.size(), ys.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = 0; j < ys.size(); ++j) {
            const gf_t s = f.add(xs[i], ys[j]);
            if (s == 0) throw BadSupport("cauchy support pair sums to zero");
            m.at(i, j) = f.inv(s);
        }
    return m;
}

enum class SolveStatus { Ok, RankDeficient, Inconsistent };

struct SolveResult {
    SolveStatus status = SolveStatus::Ok;
    std::vector<gf_t> x;
};

// Solve A x = b exactly, A of size N x K with N >= K allowed. Requires full
// column rank for Ok; an overdetermined system with contradictory rows
// reports Inconsistent (corruption signal, not erasure).
inline SolveResult solve_exact(const Field& f, Matrix a, std::vector<gf_t> b) {
    if (a.rows != b.size()) throw DimensionMismatch("solve_exact: rows vs rhs length");
    const std::size_t n = a.rows, k = a.cols;
    std::vector<std::size_t> pivot_col;
    std::size_t rank = 0;
    for (std::size_t col = 0; col < k && rank < n; ++col) {
        std::size_t piv = rank;
        while (piv < n && a.at(piv, col) == 0) ++piv;
        if (piv == n) continue;
        if (piv != rank) {
            for (std::size_t j = 0; j < k; ++j) std::swap(a.at(piv, j), a.at(rank, j));
            std::swap(b[piv], b[rank]);
        }
        const gf_t scale = f.inv(a.at(rank, col));
        for (std::size_t j = col; j < k; ++j) a.at(rank, j) = f.mul(a.at(rank, j), scale);
        b[rank] = f.mul(b[rank], scale);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == rank) continue;
            const gf_t factor = a.at(r, col);
            if (factor == 0) continue;
            for (std::size_t j = col; j < k; ++j) a.at(r, j) ^= f.mul(factor, a.at(rank, j));
            b[r] ^= f.mul(factor, b[rank]);
        }
        pivot_col.push_back(col);
        ++rank;
    }
    SolveResult res;
    for (std::size_t r = rank; r < n; ++r) {
        if (b[r] == 0) continue;
        bool all_zero = true;
        for (std::size_t j = 0; j < k && all_zero; ++j) all_zero = (a.at(r, j) == 0);
        if (all_zero) {
            res.status = SolveStatus::Inconsistent;
            return res;
        }
    }
    if (rank < k) {
        res.status = SolveStatus::RankDeficient;
        return res;
    }
    res.x.assign(k, 0);
    for (std::size_t r = 0; r < rank; ++r) res.x[pivot_col[r]] = b[r];
    return res;
}

} // namespace lccr
