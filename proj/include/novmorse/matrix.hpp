#ifndef NOVMORSE_MATRIX_HPP
#define NOVMORSE_MATRIX_HPP

// Small dense matrices over an arbitrary coefficient ring.  The ring is
// passed explicitly to every operation (a ring instance may carry state,
// e.g. the monodromy context), matching the templated chain layer.

#include <functional>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include "novmorse/errors.hpp"

namespace novmorse {

template <class T>
class Matrix {
public:
    Matrix() : rows_(0), cols_(0) {}

    Matrix(long long rows, long long cols, const T& fill)
        : rows_(rows), cols_(cols),
          a_(static_cast<std::size_t>(rows * cols), fill) {
        if (rows < 0 || cols < 0)
            throw std::invalid_argument("Matrix: negative dimensions");
    }

    long long rows() const { return rows_; }
    long long cols() const { return cols_; }

    T& at(long long r, long long c) {
        check(r, c);
        return a_[static_cast<std::size_t>(r * cols_ + c)];
    }
    const T& at(long long r, long long c) const {
        check(r, c);
        return a_[static_cast<std::size_t>(r * cols_ + c)];
    }

    bool same_shape(const Matrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_;
    }

private:
    void check(long long r, long long c) const {
        if (r < 0 || r >= rows_ || c < 0 || c >= cols_)
            throw std::out_of_range("Matrix: index out of range");
    }

    long long rows_, cols_;
    std::vector<T> a_;
};

template <class R>
Matrix<typename R::Elem> mat_zero(const R& ring, long long rows, long long cols) {
    return Matrix<typename R::Elem>(rows, cols, ring.zero());
}

template <class R>
Matrix<typename R::Elem> mat_identity(const R& ring, long long n) {
    auto m = mat_zero(ring, n, n);
    for (long long i = 0; i < n; ++i) m.at(i, i) = ring.one();
    return m;
}

template <class R>
Matrix<typename R::Elem> mat_add(const R& ring, const Matrix<typename R::Elem>& a,
                                 const Matrix<typename R::Elem>& b) {
    if (!a.same_shape(b)) throw ShapeMismatch("mat_add: shapes differ");
    auto r = a;
    for (long long i = 0; i < a.rows(); ++i)
        for (long long j = 0; j < a.cols(); ++j)
            r.at(i, j) = ring.add(a.at(i, j), b.at(i, j));
    return r;
}

template <class R>
Matrix<typename R::Elem> mat_sub(const R& ring, const Matrix<typename R::Elem>& a,
                                 const Matrix<typename R::Elem>& b) {
    if (!a.same_shape(b)) throw ShapeMismatch("mat_sub: shapes differ");
    auto r = a;
    for (long long i = 0; i < a.rows(); ++i)
        for (long long j = 0; j < a.cols(); ++j)
            r.at(i, j) = ring.sub(a.at(i, j), b.at(i, j));
    return r;
}

template <class R>
Matrix<typename R::Elem> mat_neg(const R& ring, const Matrix<typename R::Elem>& a) {
    auto r = a;
    for (long long i = 0; i < a.rows(); ++i)
        for (long long j = 0; j < a.cols(); ++j)
            r.at(i, j) = ring.neg(a.at(i, j));
    return r;
}

template <class R>
Matrix<typename R::Elem> mat_scale(const R& ring, const typename R::Elem& s,
                                   const Matrix<typename R::Elem>& a) {
    auto r = a;
    for (long long i = 0; i < a.rows(); ++i)
        for (long long j = 0; j < a.cols(); ++j)
            r.at(i, j) = ring.mul(s, a.at(i, j));
    return r;
}

template <class R>
Matrix<typename R::Elem> mat_mul(const R& ring, const Matrix<typename R::Elem>& a,
                                 const Matrix<typename R::Elem>& b) {
    if (a.cols() != b.rows())
        throw ShapeMismatch("mat_mul: inner dimensions differ (" +
                            std::to_string(a.cols()) + " vs " +
                            std::to_string(b.rows()) + ")");
    auto r = mat_zero(ring, a.rows(), b.cols());
    for (long long i = 0; i < a.rows(); ++i)
        for (long long k = 0; k < a.cols(); ++k) {
            if (ring.is_zero(a.at(i, k))) continue;
            for (long long j = 0; j < b.cols(); ++j)
                r.at(i, j) = ring.add(r.at(i, j), ring.mul(a.at(i, k), b.at(k, j)));
        }
    return r;
}

template <class R>
bool mat_is_zero(const R& ring, const Matrix<typename R::Elem>& a) {
    for (long long i = 0; i < a.rows(); ++i)
        for (long long j = 0; j < a.cols(); ++j)
            if (!ring.is_zero(a.at(i, j))) return false;
    return true;
}

template <class R>
bool mat_eq(const R& ring, const Matrix<typename R::Elem>& a,
            const Matrix<typename R::Elem>& b) {
    if (!a.same_shape(b)) return false;
    for (long long i = 0; i < a.rows(); ++i)
        for (long long j = 0; j < a.cols(); ++j)
            if (!ring.eq(a.at(i, j), b.at(i, j))) return false;
    return true;
}

// Builder for matrices assembled from blocks: row and column sizes are fixed
// up front, unset blocks are zero.
template <class R>
class BlockMatrix {
public:
    BlockMatrix(const R& ring, std::vector<long long> row_sizes,
                std::vector<long long> col_sizes)
        : ring_(ring), row_sizes_(std::move(row_sizes)),
          col_sizes_(std::move(col_sizes)) {
        long long rows = 0, cols = 0;
        for (auto s : row_sizes_) rows += s;
        for (auto s : col_sizes_) cols += s;
        m_ = mat_zero(ring_, rows, cols);
    }

    void set(std::size_t bi, std::size_t bj, const Matrix<typename R::Elem>& blk) {
        if (bi >= row_sizes_.size() || bj >= col_sizes_.size())
            throw ShapeMismatch("BlockMatrix: block index out of range");
        if (blk.rows() != row_sizes_[bi] || blk.cols() != col_sizes_[bj])
            throw ShapeMismatch("BlockMatrix: block (" + std::to_string(bi) + "," +
                                std::to_string(bj) + ") has shape " +
                                std::to_string(blk.rows()) + "x" +
                                std::to_string(blk.cols()) + ", expected " +
                                std::to_string(row_sizes_[bi]) + "x" +
                                std::to_string(col_sizes_[bj]));
        long long r0 = offset(row_sizes_, bi), c0 = offset(col_sizes_, bj);
        for (long long i = 0; i < blk.rows(); ++i)
            for (long long j = 0; j < blk.cols(); ++j)
                m_.at(r0 + i, c0 + j) = blk.at(i, j);
    }

    const Matrix<typename R::Elem>& done() const { return m_; }

private:
    static long long offset(const std::vector<long long>& sizes, std::size_t b) {
        long long o = 0;
        for (std::size_t i = 0; i < b; ++i) o += sizes[i];
        return o;
    }

    R ring_;
    std::vector<long long> row_sizes_, col_sizes_;
    Matrix<typename R::Elem> m_;
};

// extract the sub-matrix with the given row and column index sets
template <class T>
Matrix<T> mat_slice(const Matrix<T>& a, const std::vector<long long>& rows,
                    const std::vector<long long>& cols) {
    T fill = (a.rows() > 0 && a.cols() > 0) ? a.at(0, 0) : T{};
    Matrix<T> r(static_cast<long long>(rows.size()),
                static_cast<long long>(cols.size()), fill);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j)
            r.at(static_cast<long long>(i), static_cast<long long>(j)) =
                a.at(rows[i], cols[j]);
    return r;
}

} // namespace novmorse

#endif
