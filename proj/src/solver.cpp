#include "eamg/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace eamg {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

DenseMatrix densify(const SparseMatrix& A) {
    DenseMatrix D(A.nrows, A.ncols);
    for (Index i = 0; i < A.nrows; ++i)
        for (Index p = A.row_begin(i); p < A.row_end(i); ++p) D(i, A.col_indices[p]) = A.values[p];
    return D;
}

void finish_level(Level& L) {
    L.inv_diag.resize(L.A.nrows);
    for (Index i = 0; i < L.A.nrows; ++i) {
        const double d = L.A.at(i, i);
        if (!(d > 0.0)) throw Error(ErrorCode::ZeroDiagonal, "non-positive diagonal at row " + std::to_string(i));
        L.inv_diag[i] = 1.0 / d;
    }
}

}  // namespace

SparseMatrix galerkin(const SparseMatrix& A, const SparseMatrix& P) {
    if (A.nrows != A.ncols || A.ncols != P.nrows) throw Error(ErrorCode::DimensionMismatch, "galerkin: size mismatch");
    SparseMatrix Ac = spmm(transpose(P), spmm(A, P));
    SparseMatrix At = transpose(Ac);
    const double dev = symmetry_deviation(Ac);
    const double scale = max_abs(Ac);
    if (dev > 1e-12 * scale)
        throw Error(ErrorCode::InvalidArgument, "galerkin: coarse operator asymmetry " + std::to_string(dev) +
                                                    " exceeds tolerance");
    if (At.col_indices == Ac.col_indices && At.row_offsets == Ac.row_offsets) {
        for (std::size_t k = 0; k < Ac.values.size(); ++k) Ac.values[k] = 0.5 * (Ac.values[k] + At.values[k]);
        return Ac;
    }
    SparseMatrix U = pattern_union(Ac, At);
    for (Index i = 0; i < U.nrows; ++i)
        for (Index p = U.row_begin(i); p < U.row_end(i); ++p)
            U.values[p] = 0.5 * (Ac.at(i, U.col_indices[p]) + At.at(i, U.col_indices[p]));
    return U;
}

Hierarchy build_hierarchy(const SparseMatrix& A, const NearKernel& nk, const HierarchyConfig& cfg) {
    const auto t_setup = Clock::now();
    if (A.nrows != A.ncols || nk.size() != A.nrows) throw Error(ErrorCode::DimensionMismatch, "build_hierarchy: size mismatch");
    if (cfg.kind == ProlongationKind::Emin) cfg.emin.validate();

    Hierarchy H;
    H.smoother = cfg.smoother;
    H.jacobi_weight = cfg.jacobi_weight;
    H.levels.emplace_back();
    H.levels.back().A = A;
    H.levels.back().V = nk.V;

    while (true) {
        Level& L = H.levels.back();
        const Index n = L.A.nrows;
        if (n <= cfg.coarse_size || static_cast<Index>(H.levels.size()) >= cfg.max_levels) break;
        if (n <= L.V.cols()) break;

        NearKernel lnk{L.V};
        try {
            lnk.validate();
        } catch (const Error& e) {
            H.warnings.push_back("level " + std::to_string(H.levels.size() - 1) + ": " + e.what() + "; coarsening stopped");
            break;
        }

        StrengthGraph S = strength_of_connection(L.A, cfg.theta);
        CfSplitting cf = cf_split_pmis(S, cfg.seed + H.levels.size() - 1);
        const Index nc = cf.n_coarse();
        if (nc >= static_cast<Index>(0.95 * n) || nc <= L.V.cols()) {
            H.warnings.push_back("level " + std::to_string(H.levels.size() - 1) + ": coarsening stagnated (" +
                                 std::to_string(n) + " -> " + std::to_string(nc) + "); stopped");
            break;
        }

        TentativeResult tent = ptent_setup(S, lnk, cf, cfg.l_max);
        L.tentative = tent.report;
        L.tentative_constraint_residual = constraint_residual(lnk, tent.state).relative();

        const auto t_improve = Clock::now();
        switch (cfg.kind) {
        case ProlongationKind::Tentative:
            L.P = tent.state.assemble();
            break;
        case ProlongationKind::Smoothed:
            L.P = smoothed_prolongation(L.A, tent.state.assemble(), cfg.smoothing_weight);
            break;
        case ProlongationKind::Emin: {
            SparseMatrix pattern =
                expand_pattern(S, cf, assemble_pattern(cf, tent.state.W), cfg.emin.pattern_distance);
            EminSetupResult setup = emin_setup(lnk, tent.state, pattern);
            L.svd_rows = setup.projector.svd_rows;
            EminResult res = emin_pcg(cfg.emin, L.A, setup.P0, setup.projector);
            res.report.constraint_residual = constraint_residual(lnk, res.P).relative();
            L.emin = std::move(res.report);
            L.P = res.P.assemble();
            break;
        }
        }
        H.improve_seconds += seconds_since(t_improve);

        L.R = transpose(L.P);
        SparseMatrix Ac = galerkin(L.A, L.P);
        DenseMatrix Vc(nc, L.V.cols());
        for (Index j = 0; j < L.V.cols(); ++j)
            for (Index r = 0; r < nc; ++r) Vc(r, j) = L.V(cf.c_list[r], j);
        L.cf = std::move(cf);

        Level next;
        next.A = std::move(Ac);
        next.V = std::move(Vc);
        H.levels.push_back(std::move(next));
    }

    double rows = 0.0, nnz = 0.0;
    for (Level& L : H.levels) {
        finish_level(L);
        rows += L.A.nrows;
        nnz += L.A.nnz();
    }
    H.grid_complexity = rows / A.nrows;
    H.operator_complexity = nnz / std::max<Index>(A.nnz(), 1);
    H.coarse_solver = Cholesky(densify(H.levels.back().A));
    H.setup_seconds = seconds_since(t_setup);
    return H;
}

namespace {

void gauss_seidel(const SparseMatrix& A, const Vector& inv_diag, std::span<const double> b, std::span<double> x,
                  bool forward) {
    const Index n = A.nrows;
    for (Index t = 0; t < n; ++t) {
        const Index i = forward ? t : n - 1 - t;
        double s = b[i];
        for (Index p = A.row_begin(i); p < A.row_end(i); ++p) {
            const Index j = A.col_indices[p];
            if (j != i) s -= A.values[p] * x[j];
        }
        x[i] = s * inv_diag[i];
    }
}

void jacobi(const SparseMatrix& A, const Vector& inv_diag, double omega, std::span<const double> b, std::span<double> x) {
    Vector ax = spmv(A, x);
    for (Index i = 0; i < A.nrows; ++i) x[i] += omega * inv_diag[i] * (b[i] - ax[i]);
}

void smooth(const Hierarchy& H, const Level& L, std::span<const double> b, std::span<double> x, bool pre) {
    if (H.smoother == Smoother::SymmetricGaussSeidel) gauss_seidel(L.A, L.inv_diag, b, x, pre);
    else jacobi(L.A, L.inv_diag, H.jacobi_weight, b, x);
}

Vector cycle(const Hierarchy& H, std::size_t l, std::span<const double> r) {
    const Level& L = H.levels[l];
    if (l + 1 == H.levels.size()) return H.coarse_solver.solve(r);
    Vector x(L.A.nrows, 0.0);
    smooth(H, L, r, x, true);
    Vector res = spmv(L.A, x);
    for (Index i = 0; i < L.A.nrows; ++i) res[i] = r[i] - res[i];
    Vector rc = spmv(L.R, res);
    Vector xc = cycle(H, l + 1, rc);
    Vector corr = spmv(L.P, xc);
    for (Index i = 0; i < L.A.nrows; ++i) x[i] += corr[i];
    smooth(H, L, r, x, false);
    return x;
}

}  // namespace

Vector vcycle(const Hierarchy& H, std::span<const double> r) {
    if (H.levels.empty()) throw Error(ErrorCode::InvalidArgument, "vcycle: empty hierarchy");
    if (r.size() != static_cast<std::size_t>(H.levels.front().A.nrows))
        throw Error(ErrorCode::DimensionMismatch, "vcycle: residual length mismatch");
    return cycle(H, 0, r);
}

SolveResult pcg_solve(const SparseMatrix& A, std::span<const double> b, const Hierarchy& H, double tol, Index maxit) {
    const auto t0 = Clock::now();
    if (static_cast<std::size_t>(A.nrows) != b.size()) throw Error(ErrorCode::DimensionMismatch, "pcg_solve: rhs length");
    SolveResult out;
    SolveReport& rep = out.report;
    for (const Level& L : H.levels) rep.level_sizes.push_back(L.A.nrows);
    rep.setup_seconds = H.setup_seconds;
    rep.improve_seconds = H.improve_seconds;

    const Index n = A.nrows;
    out.x.assign(n, 0.0);
    const double bnorm = norm2(b);
    rep.relative_residuals.push_back(bnorm > 0.0 ? 1.0 : 0.0);
    if (bnorm == 0.0) {
        rep.converged = true;
    } else {
        Vector r(b.begin(), b.end());
        Vector z = vcycle(H, r);
        Vector p = z;
        double rz = dot(r, z);
        for (Index k = 1; k <= maxit; ++k) {
            Vector ap = spmv(A, p);
            const double pap = dot(p, ap);
            if (!(pap > 0.0) || !std::isfinite(pap)) break;
            const double alpha = rz / pap;
            axpy(alpha, p, out.x);
            axpy(-alpha, ap, r);
            const double rel = norm2(r) / bnorm;
            rep.relative_residuals.push_back(rel);
            rep.iterations = k;
            if (!std::isfinite(rel)) break;
            if (rel <= tol) {
                rep.converged = true;
                break;
            }
            z = vcycle(H, r);
            const double rz_new = dot(r, z);
            const double beta = rz_new / rz;
            rz = rz_new;
            for (Index i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
        }
    }
    rep.solve_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    rep.total_seconds = rep.setup_seconds + rep.solve_seconds;
    return out;
}

}  // namespace eamg
