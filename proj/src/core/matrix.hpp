#pragma once

#include <cassert>
#include <cstdint>
#include <cstddef>
#include <vector>

#include "errors.hpp"

namespace ptelm {

// Dense row-major matrix of doubles. Construction rejects zero dimensions
// and non-finite entries; the one sanctioned degenerate shape is a matrix
// with zero rows (see zero_rows), which represents an empty sample set in
// the transfer solver and the split pipeline.
class DenseMatrix {
public:
    DenseMatrix() = default;

    DenseMatrix(std::size_t rows, std::size_t cols);
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

    static DenseMatrix identity(std::size_t n);
    static DenseMatrix zero_rows(std::size_t cols);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0; }

    double operator()(std::size_t i, std::size_t j) const {
        assert(i < rows_ && j < cols_);
        return values_[i * cols_ + j];
    }
    double& operator()(std::size_t i, std::size_t j) {
        assert(i < rows_ && j < cols_);
        return values_[i * cols_ + j];
    }

    const double* row_ptr(std::size_t i) const { return values_.data() + i * cols_; }
    double* row_ptr(std::size_t i) { return values_.data() + i * cols_; }

    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

DenseMatrix transpose(const DenseMatrix& a);

// c = a * b
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);

// a^T * a, exploiting symmetry (only the upper triangle is computed, then
// mirrored). An input with zero rows yields the zero matrix.
DenseMatrix gram(const DenseMatrix& a);

// a^T * b without forming the transpose.
DenseMatrix matmul_transposed_left(const DenseMatrix& a, const DenseMatrix& b);

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b);
void add_in_place(DenseMatrix& a, const DenseMatrix& b);
void add_scaled_in_place(DenseMatrix& a, const DenseMatrix& b, double scale);
void scale_in_place(DenseMatrix& a, double scale);
void add_scaled_identity_in_place(DenseMatrix& a, double scale);
void add_diagonal_in_place(DenseMatrix& a, const std::vector<double>& diagonal);

double frobenius_norm(const DenseMatrix& a);

// Sum over rows of the row Euclidean norms (the group-sparsity norm used to
// prune hidden nodes in the transfer objective).
double l21_norm(const DenseMatrix& a);

std::vector<double> row_norms(const DenseMatrix& a);

// Rows of a followed by rows of b (column counts must agree; either side
// may have zero rows).
DenseMatrix vstack(const DenseMatrix& a, const DenseMatrix& b);

// New matrix holding the given rows of a in the given order.
DenseMatrix take_rows(const DenseMatrix& a, const std::vector<std::size_t>& indices);

// Solve A X = B for symmetric positive definite A via Cholesky. Only the
// lower triangle of A is referenced; throws ErrorKind::not_positive_definite
// when a pivot is not strictly positive.
DenseMatrix solve_spd(const DenseMatrix& a, const DenseMatrix& b);

// rows x cols matrix with i.i.d. uniform [lo, hi) entries drawn row-major
// from a RandomStream seeded with `seed`. Requires lo < hi.
DenseMatrix random_uniform_matrix(std::size_t rows, std::size_t cols,
                                  std::uint64_t seed, double lo, double hi);

} // namespace ptelm
