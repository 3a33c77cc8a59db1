#include "eamg/emin.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace eamg {

void ConstraintProjector::apply(std::span<double> x) const {
    if (x.size() != static_cast<std::size_t>(total_nnz))
        throw Error(ErrorCode::DimensionMismatch, "apply_projector: vector does not match the W layout");
    parallel_for(static_cast<Index>(rows.size()), [&](Index r) {
        const LocalProjector& lp = rows[r];
        if (lp.rank == 0) return;
        std::span<double> xi = x.subspan(lp.offset, lp.size);
        for (Index k = 0; k < lp.rank; ++k) {
            auto q = lp.Q.col(k);
            double s = 0.0;
            for (Index t = 0; t < lp.size; ++t) s += q[t] * xi[t];
            for (Index t = 0; t < lp.size; ++t) xi[t] -= s * q[t];
        }
    });
}

Vector apply_projector(const ConstraintProjector& proj, std::span<const double> x) {
    Vector y(x.begin(), x.end());
    proj.apply(y);
    return y;
}

EminSetupResult emin_setup(const NearKernel& nk, const ProlongationState& tentative, const SparseMatrix& pattern) {
    const CfSplitting& cf = tentative.cf;
    if (nk.size() != cf.size() || pattern.nrows != cf.size() || pattern.ncols != cf.n_coarse())
        throw Error(ErrorCode::DimensionMismatch, "emin_setup: size mismatch");
    SparseMatrix W = fine_rows(cf, pattern);
    if (!pattern_contains(W, tentative.W))
        throw Error(ErrorCode::InvalidArgument, "emin_setup: pattern does not contain the tentative pattern");

    const Index m = nk.modes();
    const Index nf = cf.n_fine();
    const DenseMatrix& V = nk.V;

    EminSetupResult out;
    out.projector.rows.resize(nf);
    out.projector.total_nnz = W.nnz();
    std::fill(W.values.begin(), W.values.end(), 0.0);

    parallel_for(nf, [&](Index r) {
        const Index i = cf.f_list[r];
        const Index nl = W.row_size(r);
        LocalProjector& lp = out.projector.rows[r];
        lp.offset = W.row_begin(r);
        lp.size = nl;
        if (nl == 0) {
            lp.method = FactorMethod::SVD;
            return;
        }
        auto cols = W.row_cols(r);

        // Starting weights on the enlarged support.
        Vector w(nl, 0.0);
        for (Index q = tentative.W.row_begin(r); q < tentative.W.row_end(r); ++q) {
            auto it = std::lower_bound(cols.begin(), cols.end(), tentative.W.col_indices[q]);
            w[it - cols.begin()] = tentative.W.values[q];
        }

        // Local block V_c(J_i, :), n_l x m; its columns span the constraint range.
        DenseMatrix Bt(nl, m);
        for (Index k = 0; k < m; ++k)
            for (Index t = 0; t < nl; ++t) Bt(t, k) = V(cf.c_list[cols[t]], k);

        Vector res(m);
        Vector Btw = matvec_t(Bt, w);
        for (Index k = 0; k < m; ++k) res[k] = V(i, k) - Btw[k];

        Vector delta;
        bool done = false;
        if (nl >= m) {
            QrResult qr = qr_economy(Bt);
            if (qr.rank == m) {
                // Minimum-norm solution of Btᵀ delta = res: delta = Q R^{-T} res.
                Vector y(m);
                for (Index k = 0; k < m; ++k) {
                    double s = res[k];
                    for (Index j = 0; j < k; ++j) s -= qr.R(j, k) * y[j];
                    y[k] = s / qr.R(k, k);
                }
                delta = matvec(qr.Q, y);
                lp.Q = std::move(qr.Q);
                lp.rank = m;
                lp.method = FactorMethod::QR;
                done = true;
            }
        }
        if (!done) {
            SvdResult s = svd(Bt);
            lp.rank = s.rank;
            lp.method = FactorMethod::SVD;
            lp.Q = DenseMatrix(nl, s.rank);
            for (Index k = 0; k < s.rank; ++k) std::copy(s.U.col(k).begin(), s.U.col(k).end(), lp.Q.col(k).begin());
            // Least-squares solution of Btᵀ delta = res with Btᵀ = V Σ Uᵀ.
            Vector y = matvec_t(s.V, res);
            for (Index k = 0; k < static_cast<Index>(y.size()); ++k) y[k] = k < s.rank ? y[k] / s.sigma[k] : 0.0;
            delta = Vector(nl, 0.0);
            for (Index k = 0; k < s.rank; ++k) {
                auto u = s.U.col(k);
                for (Index t = 0; t < nl; ++t) delta[t] += u[t] * y[k];
            }
        }
        for (Index t = 0; t < nl; ++t) W.values[lp.offset + t] = w[t] + delta[t];
    });

    for (const auto& lp : out.projector.rows)
        if (lp.method == FactorMethod::SVD && lp.size > 0) ++out.projector.svd_rows;

    out.P0.cf = cf;
    out.P0.W = std::move(W);
    out.P0.violating = tentative.violating;
    return out;
}

ConstraintResidual constraint_residual(const NearKernel& nk, const ProlongationState& P) {
    const CfSplitting& cf = P.cf;
    const Index m = nk.modes();
    ConstraintResidual out;
    double res2 = 0.0, tgt2 = 0.0;
    for (Index r = 0; r < cf.n_fine(); ++r) {
        if (!P.violating.empty() && P.violating[r]) continue;
        const Index i = cf.f_list[r];
        for (Index k = 0; k < m; ++k) {
            double s = 0.0;
            for (Index q = P.W.row_begin(r); q < P.W.row_end(r); ++q)
                s += nk.V(cf.c_list[P.W.col_indices[q]], k) * P.W.values[q];
            const double v = nk.V(i, k);
            res2 += (s - v) * (s - v);
            tgt2 += v * v;
        }
    }
    out.residual = std::sqrt(res2);
    out.target_norm = std::sqrt(tgt2);
    return out;
}

EnergyOperator::EnergyOperator(const SparseMatrix& A, const CfSplitting& cf, const SparseMatrix& W_pattern)
    : A_(&A), cf_(&cf), W_(unit_pattern(W_pattern)) {
    if (A.nrows != A.ncols || A.nrows != cf.size() || W_.nrows != cf.n_fine() || W_.ncols != cf.n_coarse())
        throw Error(ErrorCode::DimensionMismatch, "EnergyOperator: size mismatch");
    P_ = assemble_pattern(cf, W_);
    fine_to_p_.resize(W_.nnz());
    row_diag_.resize(cf.n_fine());
    for (Index r = 0; r < cf.n_fine(); ++r) {
        const Index i = cf.f_list[r];
        const Index base = P_.row_begin(i);
        for (Index q = W_.row_begin(r); q < W_.row_end(r); ++q) fine_to_p_[q] = base + (q - W_.row_begin(r));
        row_diag_[r] = A.at(i, i);
    }

    // Column-wise enumeration of the fine-row pattern.
    const Index nc = cf.n_coarse();
    col_ptr_.assign(nc + 1, 0);
    for (Index c : W_.col_indices) ++col_ptr_[c + 1];
    for (Index c = 0; c < nc; ++c) col_ptr_[c + 1] += col_ptr_[c];
    col_node_.resize(W_.nnz());
    col_pos_.resize(W_.nnz());
    std::vector<Index> next(col_ptr_.begin(), col_ptr_.end() - 1);
    for (Index r = 0; r < cf.n_fine(); ++r) {
        for (Index q = W_.row_begin(r); q < W_.row_end(r); ++q) {
            const Index slot = next[W_.col_indices[q]]++;
            col_node_[slot] = cf.f_list[r];
            col_pos_[slot] = q;
        }
    }
}

Vector EnergyOperator::masked_product(std::span<const double> w, double coarse_value) const {
    if (w.size() != static_cast<std::size_t>(W_.nnz()))
        throw Error(ErrorCode::DimensionMismatch, "EnergyOperator: vector does not match the W layout");
    SparseMatrix P = P_;
    for (Index i = 0; i < cf_->size(); ++i)
        if (cf_->is_coarse(i)) P.values[P.row_begin(i)] = coarse_value;
    for (std::size_t q = 0; q < w.size(); ++q) P.values[fine_to_p_[q]] = w[q];
    return masked_spmm(*A_, P, cf_->f_list);
}

Vector EnergyOperator::apply_K(std::span<const double> x) const { return masked_product(x, 0.0); }

Vector EnergyOperator::apply_K_minus_f(std::span<const double> w) const { return masked_product(w, 1.0); }

Vector EnergyOperator::rhs_f() const {
    Vector zero(W_.nnz(), 0.0);
    Vector f = masked_product(zero, 1.0);
    for (double& v : f) v = -v;
    return f;
}

Vector EnergyOperator::diag_K() const {
    Vector d(W_.nnz());
    for (Index r = 0; r < W_.nrows; ++r)
        for (Index q = W_.row_begin(r); q < W_.row_end(r); ++q) d[q] = row_diag_[r];
    return d;
}

void EnergyOperator::check_diagonal() const {
    for (double d : row_diag_)
        if (d == 0.0) throw Error(ErrorCode::ZeroDiagonal, "energy preconditioner: zero diagonal entry in A");
}

Vector EnergyOperator::precond_jacobi(std::span<const double> r) const {
    if (r.size() != static_cast<std::size_t>(W_.nnz()))
        throw Error(ErrorCode::DimensionMismatch, "precond_jacobi: vector does not match the W layout");
    check_diagonal();
    Vector z(r.size());
    parallel_for(W_.nrows, [&](Index row) {
        const double d = row_diag_[row];
        for (Index q = W_.row_begin(row); q < W_.row_end(row); ++q) z[q] = r[q] / d;
    });
    return z;
}

Vector EnergyOperator::precond_sgs(std::span<const double> r) const {
    if (r.size() != static_cast<std::size_t>(W_.nnz()))
        throw Error(ErrorCode::DimensionMismatch, "precond_sgs: vector does not match the W layout");
    check_diagonal();
    const SparseMatrix& A = *A_;
    Vector z(r.size(), 0.0);
    const Index nc = static_cast<Index>(col_ptr_.size()) - 1;

#if defined(_OPENMP)
#pragma omp parallel num_threads(num_threads())
#endif
    {
        std::vector<Index> loc(A.nrows, -1);
        std::vector<double> u;
        std::vector<double> diag;
#if defined(_OPENMP)
#pragma omp for schedule(dynamic, 16)
#endif
        for (Index c = 0; c < nc; ++c) {
            const Index b = col_ptr_[c];
            const Index len = col_ptr_[c + 1] - b;
            if (len == 0) continue;
            u.assign(len, 0.0);
            diag.assign(len, 0.0);
            for (Index t = 0; t < len; ++t) loc[col_node_[b + t]] = t;

            // Forward: (L + D) u = r.
            for (Index t = 0; t < len; ++t) {
                const Index i = col_node_[b + t];
                double s = r[col_pos_[b + t]];
                double d = 0.0;
                for (Index p = A.row_begin(i); p < A.row_end(i); ++p) {
                    const Index j = A.col_indices[p];
                    const Index lj = loc[j];
                    if (j == i) d = A.values[p];
                    else if (lj >= 0 && lj < t) s -= A.values[p] * u[lj];
                }
                diag[t] = d;
                u[t] = s / d;
            }
            // Scale by D, then backward: (L + D)ᵀ z = D u.
            for (Index t = 0; t < len; ++t) u[t] *= diag[t];
            for (Index t = len - 1; t >= 0; --t) {
                const Index i = col_node_[b + t];
                double s = u[t];
                for (Index p = A.row_begin(i); p < A.row_end(i); ++p) {
                    const Index lj = loc[A.col_indices[p]];
                    if (lj > t) s -= A.values[p] * u[lj];
                }
                u[t] = s / diag[t];
            }
            for (Index t = 0; t < len; ++t) {
                z[col_pos_[b + t]] = u[t];
                loc[col_node_[b + t]] = -1;
            }
        }
    }
    return z;
}

void EminConfig::validate() const {
    if (maxit < 1) throw Error(ErrorCode::InvalidArgument, "emin maxit must be >= 1");
    if (!(tau > 0.0 && tau <= 1.0)) throw Error(ErrorCode::InvalidArgument, "emin tau must lie in (0,1]");
    if (pattern_distance < 0) throw Error(ErrorCode::InvalidArgument, "pattern distance must be >= 0");
}

EminResult emin_pcg(const EminConfig& cfg, const SparseMatrix& A, const ProlongationState& P0,
                    const ConstraintProjector& proj, const EminMonitor& monitor) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    EnergyOperator op(A, P0.cf, P0.W);
    const Index n = op.size();
    if (proj.total_nnz != n) throw Error(ErrorCode::DimensionMismatch, "emin_pcg: projector does not match P0");

    EminResult out;
    EminReport& rep = out.report;
    rep.energy_initial = energy_of(A, P0.assemble());

    const Vector& w0 = P0.W.values;
    Vector dw(n, 0.0);
    // r = Π (f - K w0)
    Vector r = op.apply_K_minus_f(w0);
    for (double& v : r) v = -v;
    proj.apply(r);
    // Residuals below this are rounding noise of f - K w0.
    const double r_floor = 1e-13 * (norm2(op.apply_K(w0)) + norm2(op.rhs_f()));

    Vector y(n, 0.0), z, ky;
    double gamma_old = 0.0;
    double dE1 = 0.0;
    double energy = rep.energy_initial;

    for (Index k = 1; k <= cfg.maxit; ++k) {
        if (cfg.precond == Preconditioner::Jacobi) {
            z = op.precond_jacobi(r);
        } else {
            z = op.precond_sgs(r);
            proj.apply(z);
        }
        const double gamma = dot(r, z);
        if (!std::isfinite(gamma)) throw Error(ErrorCode::NonFinite, "emin_pcg: non-finite inner product");
        const bool converged = gamma == 0.0 || norm2(r) <= r_floor;
        if (converged && k > 1) break;
        if (cfg.precond == Preconditioner::Jacobi && cfg.check_jacobi_projection && !converged) {
            Vector zp = apply_projector(proj, z);
            double diff = 0.0;
            for (Index t = 0; t < n; ++t) diff = std::max(diff, std::abs(zp[t] - z[t]));
            double scale = 0.0;
            for (double v : z) scale = std::max(scale, std::abs(v));
            if (diff > 1e-12 * scale) throw Error(ErrorCode::InvalidArgument, "Jacobi step left the constraint space");
        }
        if (k == 1) {
            y = z;
        } else {
            const double beta = gamma / gamma_old;
            for (Index t = 0; t < n; ++t) y[t] = z[t] + beta * y[t];
        }
        gamma_old = gamma;

        if (k == 1 && converged) {
            // Already optimal on the pattern.
            rep.iterations = 1;
            rep.dE = {0.0};
            rep.dE_rel = {1.0};
            rep.energy = {energy};
            break;
        }

        ky = op.apply_K(y);
        proj.apply(ky);
        const double den = dot(y, ky);
        if (!std::isfinite(den)) throw Error(ErrorCode::NonFinite, "emin_pcg: non-finite curvature");
        if (!(den > 0.0))
            throw Error(ErrorCode::IndefiniteBreakdown, "emin_pcg: yᵀΠKy <= 0 at iteration " + std::to_string(k));
        const double alpha = gamma / den;
        const double dE = gamma * alpha;
        if (k == 1) dE1 = dE;
        if (!cfg.fixed_iterations && dE < cfg.tau * dE1) break;

        axpy(alpha, y, dw);
        axpy(-alpha, ky, r);
        energy -= dE;
        rep.iterations = k;
        rep.dE.push_back(dE);
        rep.dE_rel.push_back(dE1 > 0.0 ? dE / dE1 : 1.0);
        rep.energy.push_back(energy);

        if (monitor) {
            Vector w = w0;
            axpy(1.0, dw, w);
            monitor(k, w);
        }
    }

    out.P.cf = P0.cf;
    out.P.W = P0.W;
    out.P.violating = P0.violating;
    axpy(1.0, dw, out.P.W.values);
    if (!all_finite(out.P.W.values)) throw Error(ErrorCode::NonFinite, "emin_pcg: non-finite prolongation");
    rep.energy_final = energy_of(A, out.P.assemble());
    rep.time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

double energy_of(const SparseMatrix& A, const SparseMatrix& P) {
    if (A.ncols != P.nrows || A.nrows != P.nrows) throw Error(ErrorCode::DimensionMismatch, "energy_of: size mismatch");
    Vector ap = masked_spmm(A, P);
    return dot(P.values, ap);
}

}  // namespace eamg
