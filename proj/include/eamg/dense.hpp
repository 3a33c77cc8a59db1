#pragma once

#include "eamg/common.hpp"

#include <span>
#include <vector>

namespace eamg {

/// Small dense matrix, column-major.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(Index rows, Index cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

    static DenseMatrix identity(Index n);

    Index rows() const { return rows_; }
    Index cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(Index i, Index j) { return data_[static_cast<std::size_t>(j) * rows_ + i]; }
    double operator()(Index i, Index j) const { return data_[static_cast<std::size_t>(j) * rows_ + i]; }

    std::span<double> col(Index j) { return {data_.data() + static_cast<std::size_t>(j) * rows_, static_cast<std::size_t>(rows_)}; }
    std::span<const double> col(Index j) const {
        return {data_.data() + static_cast<std::size_t>(j) * rows_, static_cast<std::size_t>(rows_)};
    }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    DenseMatrix transposed() const;

private:
    Index rows_ = 0;
    Index cols_ = 0;
    std::vector<double> data_;
};

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b);
Vector matvec(const DenseMatrix& a, std::span<const double> x);
/// aᵀ x
Vector matvec_t(const DenseMatrix& a, std::span<const double> x);
double frobenius_norm(const DenseMatrix& a);

struct QrResult {
    DenseMatrix Q;  ///< rows x cols, orthonormal columns
    DenseMatrix R;  ///< cols x cols, upper triangular
    Index rank = 0; ///< number of k with |R_kk| > kRankTol * |R_00|
};

/// Householder economy QR of a matrix with rows >= cols.
QrResult qr_economy(const DenseMatrix& B);

struct SvdResult {
    DenseMatrix U;       ///< rows x p, p = min(rows, cols)
    Vector sigma;        ///< p values, nonincreasing
    DenseMatrix V;       ///< cols x p
    Index rank = 0;      ///< number of sigma_i > kRankTol * sigma_max
};

/// Thin SVD by one-sided Jacobi rotations.
SvdResult svd(const DenseMatrix& B);

/// Solves R x = b for upper triangular R.
Vector solve_upper(const DenseMatrix& R, std::span<const double> b);

/// Minimum-norm least-squares solution of B x ≈ b via SVD.
Vector lstsq(const DenseMatrix& B, std::span<const double> b);

/// In-place Cholesky factor (lower triangle) of an SPD matrix.
class Cholesky {
public:
    Cholesky() = default;
    explicit Cholesky(DenseMatrix A);
    Vector solve(std::span<const double> b) const;
    Index size() const { return U_.rows(); }

private:
    DenseMatrix U_;  ///< upper factor, A = UᵀU; columns are contiguous
};

}  // namespace eamg
