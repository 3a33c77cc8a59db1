#pragma once

#include "eamg/coarsening.hpp"
#include "eamg/dense.hpp"
#include "eamg/prolongation.hpp"
#include "eamg/sparse_matrix.hpp"

#include <functional>
#include <span>
#include <vector>

namespace eamg {

// Vectors "in W layout" hold one value per stored entry of the fine rows of
// the prolongation pattern, row by row (the order of W.values).

enum class FactorMethod { QR, SVD };

/// Orthonormal basis of the local constraint range for one fine row.
struct LocalProjector {
    Index offset = 0;  ///< first position of the row in W layout
    Index size = 0;    ///< number of stored entries in the row
    Index rank = 0;
    FactorMethod method = FactorMethod::QR;
    DenseMatrix Q;     ///< size x rank
};

/// Block-diagonal projector onto ker(Bᵀ), applied as I - Q_i Q_iᵀ per row.
struct ConstraintProjector {
    std::vector<LocalProjector> rows;
    Index total_nnz = 0;
    Index svd_rows = 0;

    /// In place: x_i <- x_i - Q_i (Q_iᵀ x_i).
    void apply(std::span<double> x) const;
};

Vector apply_projector(const ConstraintProjector& proj, std::span<const double> x);

struct EminSetupResult {
    ConstraintProjector projector;
    ProlongationState P0;
};

/// Factors every local constraint block over the enlarged pattern (QR when
/// the block is tall and of full rank, truncated SVD otherwise) and moves each
/// fine row of the tentative interpolation onto its constraint with the
/// minimum-norm correction. `pattern` is the assembled n x n_c pattern and
/// must contain the tentative pattern on fine rows.
EminSetupResult emin_setup(const NearKernel& nk, const ProlongationState& tentative, const SparseMatrix& pattern);

/// max over non-violating fine rows of |V_c(J_i,:)ᵀ w_i - v_i|, as a 2-norm
/// over all such rows, together with the 2-norm of the stacked targets.
struct ConstraintResidual {
    double residual = 0.0;
    double target_norm = 0.0;
    double relative() const { return target_norm > 0.0 ? residual / target_norm : residual; }
};
ConstraintResidual constraint_residual(const NearKernel& nk, const ProlongationState& P);

/// Matrix-free K and its companions over a fixed fine-row pattern.
///
/// K couples two positions only when they share a coarse column; the block
/// of column c is A restricted to the fine rows that carry c. K x is the
/// product A X evaluated on the pattern of X, where X holds x on fine rows
/// and zero on coarse rows.
class EnergyOperator {
public:
    EnergyOperator(const SparseMatrix& A, const CfSplitting& cf, const SparseMatrix& W_pattern);

    Index size() const { return W_.nnz(); }
    const SparseMatrix& pattern() const { return W_; }

    Vector apply_K(std::span<const double> x) const;
    /// K w - f, i.e. (A P) on the fine-row pattern with P = [W; I].
    Vector apply_K_minus_f(std::span<const double> w) const;
    /// f: entry (i, c) is -A(i, node of c).
    Vector rhs_f() const;

    /// M_J^{-1} r: row i scaled by 1 / A(i,i).
    Vector precond_jacobi(std::span<const double> r) const;
    /// (L+D)^{-T} D (L+D)^{-1} r, block by block over coarse columns in
    /// ascending order, rows of each block in ascending node order.
    Vector precond_sgs(std::span<const double> r) const;

    /// diag(K) in W layout.
    Vector diag_K() const;

private:
    Vector masked_product(std::span<const double> w, double coarse_value) const;
    void check_diagonal() const;

    const SparseMatrix* A_;
    const CfSplitting* cf_;
    SparseMatrix W_;
    SparseMatrix P_;                 ///< assembled pattern, scratch for the masked product
    std::vector<Index> fine_to_p_;   ///< W position -> P position
    std::vector<double> row_diag_;   ///< A(i,i) per fine row
    // Column blocks for SGS: for coarse column c, block entries
    // col_ptr_[c]..col_ptr_[c+1] list (node, W position) in ascending node order.
    std::vector<Index> col_ptr_;
    std::vector<Index> col_node_;
    std::vector<Index> col_pos_;
};

enum class Preconditioner { Jacobi, BlockSGS };

struct EminConfig {
    Index maxit = 10;
    double tau = 0.1;
    Preconditioner precond = Preconditioner::Jacobi;
    Index pattern_distance = 1;
    /// Run exactly maxit iterations (the relative-decrease test is skipped).
    bool fixed_iterations = false;
    /// Jacobi only: also project z and require both paths to agree.
    bool check_jacobi_projection = false;

    void validate() const;
};

struct EminReport {
    Index iterations = 0;
    Vector dE;      ///< energy decrease of each applied step (positive)
    Vector dE_rel;  ///< dE / dE_1
    Vector energy;  ///< energy after each applied step, by telescoping
    double energy_initial = 0.0;
    double energy_final = 0.0;
    double constraint_residual = 0.0;
    double time_seconds = 0.0;
};

/// Called after each applied step with the iteration number and the current
/// fine-row weights w0 + dw.
using EminMonitor = std::function<void(Index, std::span<const double>)>;

struct EminResult {
    ProlongationState P;
    EminReport report;
};

/// Restricted PCG on Π K Π dw = Π (f - K w0) from dw = 0. Each step's energy
/// decrease is gamma * alpha; iteration stops when it falls below
/// tau times the first one or after maxit steps.
EminResult emin_pcg(const EminConfig& cfg, const SparseMatrix& A, const ProlongationState& P0,
                    const ConstraintProjector& proj, const EminMonitor& monitor = {});

/// tr(Pᵀ A P) without forming the product.
double energy_of(const SparseMatrix& A, const SparseMatrix& P);

}  // namespace eamg
