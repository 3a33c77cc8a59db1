#pragma once

#include "eamg/coarsening.hpp"
#include "eamg/dense.hpp"
#include "eamg/emin.hpp"
#include "eamg/sparse_matrix.hpp"
#include "eamg/tentative.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace eamg {

enum class ProlongationKind { Tentative, Smoothed, Emin };
enum class Smoother { SymmetricGaussSeidel, Jacobi };

struct HierarchyConfig {
    ProlongationKind kind = ProlongationKind::Emin;
    double theta = 0.25;
    Index l_max = 3;
    std::uint64_t seed = 42;
    EminConfig emin;
    double smoothing_weight = 0.7;
    Index coarse_size = 500;
    Index max_levels = 25;
    Smoother smoother = Smoother::SymmetricGaussSeidel;
    double jacobi_weight = 2.0 / 3.0;
};

struct Level {
    SparseMatrix A;
    SparseMatrix P;  ///< empty on the coarsest level
    SparseMatrix R;  ///< Pᵀ
    Vector inv_diag;
    DenseMatrix V;   ///< near kernel on this level

    // Set-up diagnostics (absent on the coarsest level).
    std::optional<CfSplitting> cf;
    std::optional<TentativeReport> tentative;
    std::optional<EminReport> emin;
    Index svd_rows = 0;
    double tentative_constraint_residual = 0.0;
};

struct Hierarchy {
    std::vector<Level> levels;
    Cholesky coarse_solver;
    Smoother smoother = Smoother::SymmetricGaussSeidel;
    double jacobi_weight = 2.0 / 3.0;
    double grid_complexity = 1.0;
    double operator_complexity = 1.0;
    double setup_seconds = 0.0;
    double improve_seconds = 0.0;  ///< part of set-up spent building and improving P beyond the tentative one
    std::vector<std::string> warnings;
};

/// A_c = Pᵀ A P, symmetrized by averaging. Throws when the asymmetry before
/// averaging exceeds 1e-12 max|A_c|.
SparseMatrix galerkin(const SparseMatrix& A, const SparseMatrix& P);

Hierarchy build_hierarchy(const SparseMatrix& A, const NearKernel& nk, const HierarchyConfig& cfg);

/// One V(1,1) cycle from a zero initial guess.
Vector vcycle(const Hierarchy& H, std::span<const double> r);

struct SolveReport {
    Index iterations = 0;
    bool converged = false;
    Vector relative_residuals;  ///< entry k = |r_k| / |b|, starting with k = 0
    double setup_seconds = 0.0;
    double solve_seconds = 0.0;
    double total_seconds = 0.0;
    double improve_seconds = 0.0;
    std::vector<Index> level_sizes;
};

struct SolveResult {
    Vector x;
    SolveReport report;
};

/// PCG from a zero initial guess preconditioned by one V-cycle per iteration;
/// converged when |r| <= tol |b|.
SolveResult pcg_solve(const SparseMatrix& A, std::span<const double> b, const Hierarchy& H, double tol = 1e-8,
                      Index maxit = 1000);

}  // namespace eamg
