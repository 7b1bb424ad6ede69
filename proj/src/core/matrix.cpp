#include "matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rng.hpp"

namespace ptelm {

namespace {

void require_same_shape(const DenseMatrix& a, const DenseMatrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        raise(ErrorKind::dimension_mismatch,
              std::string(op) + ": shapes " + std::to_string(a.rows()) + "x" +
                  std::to_string(a.cols()) + " and " + std::to_string(b.rows()) + "x" +
                  std::to_string(b.cols()) + " differ");
    }
}

} // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {
    if (rows == 0 || cols == 0) {
        raise(ErrorKind::invalid_dimension, "matrix dimensions must be positive");
    }
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (rows == 0 || cols == 0) {
        raise(ErrorKind::invalid_dimension, "matrix dimensions must be positive");
    }
    if (values_.size() != rows * cols) {
        raise(ErrorKind::invalid_dimension,
              "value count " + std::to_string(values_.size()) + " does not match " +
                  std::to_string(rows) + "x" + std::to_string(cols));
    }
    for (double v : values_) {
        if (!std::isfinite(v)) {
            raise(ErrorKind::non_finite, "matrix entries must be finite");
        }
    }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

DenseMatrix DenseMatrix::zero_rows(std::size_t cols) {
    if (cols == 0) {
        raise(ErrorKind::invalid_dimension, "matrix dimensions must be positive");
    }
    DenseMatrix m;
    m.rows_ = 0;
    m.cols_ = cols;
    return m;
}

DenseMatrix transpose(const DenseMatrix& a) {
    if (a.empty()) {
        raise(ErrorKind::invalid_dimension, "transpose: matrix has no rows");
    }
    DenseMatrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            t(j, i) = a(i, j);
        }
    }
    return t;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) {
        raise(ErrorKind::dimension_mismatch,
              "matmul: inner dimensions " + std::to_string(a.cols()) + " and " +
                  std::to_string(b.rows()) + " differ");
    }
    if (a.empty()) return DenseMatrix::zero_rows(b.cols());
    DenseMatrix c(a.rows(), b.cols());
    // i-k-j order: the inner loop walks rows of b and c contiguously.
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* ci = c.row_ptr(i);
        const double* ai = a.row_ptr(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = ai[k];
            if (aik == 0.0) continue;
            const double* bk = b.row_ptr(k);
            for (std::size_t j = 0; j < b.cols(); ++j) {
                ci[j] += aik * bk[j];
            }
        }
    }
    return c;
}

DenseMatrix gram(const DenseMatrix& a) {
    DenseMatrix g(a.cols(), a.cols());
    for (std::size_t k = 0; k < a.rows(); ++k) {
        const double* ak = a.row_ptr(k);
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double aki = ak[i];
            if (aki == 0.0) continue;
            double* gi = g.row_ptr(i);
            for (std::size_t j = i; j < a.cols(); ++j) {
                gi[j] += aki * ak[j];
            }
        }
    }
    for (std::size_t i = 0; i < a.cols(); ++i) {
        for (std::size_t j = i + 1; j < a.cols(); ++j) {
            g(j, i) = g(i, j);
        }
    }
    return g;
}

DenseMatrix matmul_transposed_left(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows()) {
        raise(ErrorKind::dimension_mismatch,
              "matmul_transposed_left: row counts " + std::to_string(a.rows()) + " and " +
                  std::to_string(b.rows()) + " differ");
    }
    DenseMatrix c(a.cols(), b.cols());
    for (std::size_t k = 0; k < a.rows(); ++k) {
        const double* ak = a.row_ptr(k);
        const double* bk = b.row_ptr(k);
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double aki = ak[i];
            if (aki == 0.0) continue;
            double* ci = c.row_ptr(i);
            for (std::size_t j = 0; j < b.cols(); ++j) {
                ci[j] += aki * bk[j];
            }
        }
    }
    return c;
}

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b) {
    require_same_shape(a, b, "add");
    DenseMatrix c = a;
    add_in_place(c, b);
    return c;
}

DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b) {
    require_same_shape(a, b, "subtract");
    DenseMatrix c = a;
    add_scaled_in_place(c, b, -1.0);
    return c;
}

void add_in_place(DenseMatrix& a, const DenseMatrix& b) {
    require_same_shape(a, b, "add_in_place");
    for (std::size_t i = 0; i < a.values().size(); ++i) {
        a.values()[i] += b.values()[i];
    }
}

void add_scaled_in_place(DenseMatrix& a, const DenseMatrix& b, double scale) {
    require_same_shape(a, b, "add_scaled_in_place");
    for (std::size_t i = 0; i < a.values().size(); ++i) {
        a.values()[i] += scale * b.values()[i];
    }
}

void scale_in_place(DenseMatrix& a, double scale) {
    for (double& v : a.values()) v *= scale;
}

void add_scaled_identity_in_place(DenseMatrix& a, double scale) {
    if (a.rows() != a.cols()) {
        raise(ErrorKind::dimension_mismatch, "add_scaled_identity_in_place: matrix not square");
    }
    for (std::size_t i = 0; i < a.rows(); ++i) a(i, i) += scale;
}

void add_diagonal_in_place(DenseMatrix& a, const std::vector<double>& diagonal) {
    if (a.rows() != a.cols() || a.rows() != diagonal.size()) {
        raise(ErrorKind::dimension_mismatch, "add_diagonal_in_place: diagonal length mismatch");
    }
    for (std::size_t i = 0; i < a.rows(); ++i) a(i, i) += diagonal[i];
}

double frobenius_norm(const DenseMatrix& a) {
    double sum = 0.0;
    for (double v : a.values()) sum += v * v;
    return std::sqrt(sum);
}

double l21_norm(const DenseMatrix& a) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* row = a.row_ptr(i);
        double sq = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) sq += row[j] * row[j];
        sum += std::sqrt(sq);
    }
    return sum;
}

std::vector<double> row_norms(const DenseMatrix& a) {
    std::vector<double> norms(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* row = a.row_ptr(i);
        double sq = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) sq += row[j] * row[j];
        norms[i] = std::sqrt(sq);
    }
    return norms;
}

DenseMatrix vstack(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.cols()) {
        raise(ErrorKind::dimension_mismatch, "vstack: column counts differ");
    }
    if (a.empty()) return b;
    if (b.empty()) return a;
    DenseMatrix c(a.rows() + b.rows(), a.cols());
    std::copy(a.values().begin(), a.values().end(), c.values().begin());
    std::copy(b.values().begin(), b.values().end(), c.values().begin() + a.values().size());
    return c;
}

DenseMatrix take_rows(const DenseMatrix& a, const std::vector<std::size_t>& indices) {
    if (indices.empty()) return DenseMatrix::zero_rows(a.cols());
    DenseMatrix c(indices.size(), a.cols());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] >= a.rows()) {
            raise(ErrorKind::invalid_range, "take_rows: index out of range");
        }
        std::copy(a.row_ptr(indices[i]), a.row_ptr(indices[i]) + a.cols(), c.row_ptr(i));
    }
    return c;
}

DenseMatrix solve_spd(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != a.cols()) {
        raise(ErrorKind::dimension_mismatch, "solve_spd: matrix not square");
    }
    if (a.rows() != b.rows()) {
        raise(ErrorKind::dimension_mismatch,
              "solve_spd: system order " + std::to_string(a.rows()) +
                  " does not match right-hand side rows " + std::to_string(b.rows()));
    }
    if (a.empty()) {
        raise(ErrorKind::invalid_dimension, "solve_spd: matrix has no rows");
    }
    const std::size_t n = a.rows();

    // Cholesky factor L (lower triangular, row-major), referencing only the
    // lower triangle of a. A non-positive pivot means a is not positive
    // definite to working precision.
    DenseMatrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        const double* lj = l.row_ptr(j);
        for (std::size_t k = 0; k < j; ++k) d -= lj[k] * lj[k];
        if (!(d > 0.0)) {
            raise(ErrorKind::not_positive_definite,
                  "solve_spd: pivot " + std::to_string(j) + " is not positive");
        }
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            const double* li = l.row_ptr(i);
            for (std::size_t k = 0; k < j; ++k) s -= li[k] * lj[k];
            l(i, j) = s / ljj;
        }
    }

    // Forward substitution L Z = B, processing whole right-hand-side rows.
    DenseMatrix x = b;
    const std::size_t m = b.cols();
    for (std::size_t i = 0; i < n; ++i) {
        double* xi = x.row_ptr(i);
        const double* li = l.row_ptr(i);
        for (std::size_t k = 0; k < i; ++k) {
            const double lik = li[k];
            if (lik == 0.0) continue;
            const double* xk = x.row_ptr(k);
            for (std::size_t j = 0; j < m; ++j) xi[j] -= lik * xk[j];
        }
        const double inv = 1.0 / li[i];
        for (std::size_t j = 0; j < m; ++j) xi[j] *= inv;
    }

    // Back substitution L^T X = Z.
    for (std::size_t ip = n; ip > 0; --ip) {
        const std::size_t i = ip - 1;
        double* xi = x.row_ptr(i);
        for (std::size_t k = i + 1; k < n; ++k) {
            const double lki = l(k, i);
            if (lki == 0.0) continue;
            const double* xk = x.row_ptr(k);
            for (std::size_t j = 0; j < m; ++j) xi[j] -= lki * xk[j];
        }
        const double inv = 1.0 / l(i, i);
        for (std::size_t j = 0; j < m; ++j) xi[j] *= inv;
    }
    return x;
}

DenseMatrix random_uniform_matrix(std::size_t rows, std::size_t cols,
                                  std::uint64_t seed, double lo, double hi) {
    if (!(lo < hi)) {
        raise(ErrorKind::invalid_range, "random_uniform_matrix: requires lo < hi");
    }
    DenseMatrix m(rows, cols);
    RandomStream stream(seed);
    for (double& v : m.values()) v = stream.uniform(lo, hi);
    return m;
}

} // namespace ptelm
