#include "eamg/tentative.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace eamg {

namespace {

DenseMatrix select_columns(const DenseMatrix& B, const std::vector<Index>& cols) {
    DenseMatrix out(B.rows(), static_cast<Index>(cols.size()));
    for (Index j = 0; j < out.cols(); ++j) std::copy(B.col(cols[j]).begin(), B.col(cols[j]).end(), out.col(j).begin());
    return out;
}

// Coefficients C = B_sel^{-1} B; |C(i,j)| is the |det| growth factor for
// replacing selected column i by column j.
DenseMatrix swap_factors(const DenseMatrix& B, const std::vector<Index>& sel) {
    QrResult qr = qr_economy(select_columns(B, sel));
    DenseMatrix C(B.rows(), B.cols());
    for (Index j = 0; j < B.cols(); ++j) {
        Vector x = solve_upper(qr.R, matvec_t(qr.Q, B.col(j)));
        std::copy(x.begin(), x.end(), C.col(j).begin());
    }
    return C;
}

double abs_det(const DenseMatrix& B, const std::vector<Index>& cols) {
    const QrResult qr = qr_economy(select_columns(B, cols));
    double d = 1.0;
    for (Index i = 0; i < qr.R.rows(); ++i) d *= std::abs(qr.R(i, i));
    return d;
}

// Number of m-subsets of n columns, saturating at `cap`.
std::int64_t subset_count(Index n, Index m, std::int64_t cap) {
    std::int64_t c = 1;
    for (Index k = 1; k <= m; ++k) {
        c = c * (n - m + k) / k;
        if (c > cap) return cap + 1;
    }
    return c;
}

}  // namespace

std::vector<Index> max_vol_select(const DenseMatrix& B, Index m) {
    const Index n = B.cols();
    if (B.rows() != m) throw Error(ErrorCode::DimensionMismatch, "max_vol_select: B must have m rows");
    if (n < m) throw Error(ErrorCode::RankDeficient, "max_vol_select: fewer columns than modes");
    if (m == 0) return {};

    // Greedy stage: column-pivoted Gram-Schmidt.
    DenseMatrix R = B;
    std::vector<double> norms(n);
    double scale = 0.0;
    for (Index j = 0; j < n; ++j) {
        double s = 0.0;
        for (double v : R.col(j)) s += v * v;
        norms[j] = s;
        scale = std::max(scale, std::sqrt(s));
    }
    std::vector<Index> sel;
    std::vector<char> used(n, 0);
    for (Index k = 0; k < m; ++k) {
        Index best = -1;
        double best_norm = -1.0;
        for (Index j = 0; j < n; ++j) {
            if (used[j]) continue;
            if (norms[j] > best_norm) {
                best_norm = norms[j];
                best = j;
            }
        }
        if (best < 0 || !(std::sqrt(best_norm) > kRankTol * scale) || scale == 0.0)
            throw Error(ErrorCode::RankDeficient, "max_vol_select: block has rank below " + std::to_string(m));
        used[best] = 1;
        sel.push_back(best);
        auto q = R.col(best);
        const double qn = std::sqrt(best_norm);
        Vector qv(q.begin(), q.end());
        for (double& v : qv) v /= qn;
        for (Index j = 0; j < n; ++j) {
            if (used[j]) continue;
            auto c = R.col(j);
            double d = 0.0;
            for (Index i = 0; i < m; ++i) d += qv[i] * c[i];
            double s = 0.0;
            for (Index i = 0; i < m; ++i) {
                c[i] -= d * qv[i];
                s += c[i] * c[i];
            }
            norms[j] = s;
        }
    }

    // Small blocks: exact search in lexicographic order, near-ties keep the
    // earlier subset.
    constexpr std::int64_t kExhaustiveLimit = 1024;
    if (subset_count(n, m, kExhaustiveLimit) <= kExhaustiveLimit) {
        std::vector<Index> cur(m);
        std::iota(cur.begin(), cur.end(), Index{0});
        std::vector<Index> best_sel = cur;
        double best = -1.0;
        while (true) {
            const double d = abs_det(B, cur);
            if (d > best * (1.0 + 1e-12)) {
                best = d;
                best_sel = cur;
            }
            Index i = m - 1;
            while (i >= 0 && cur[i] == n - m + i) --i;
            if (i < 0) break;
            ++cur[i];
            for (Index j = i + 1; j < m; ++j) cur[j] = cur[j - 1] + 1;
        }
        return best_sel;
    }

    // Swap stage.
    constexpr double kGrowth = 1.0 + 1e-9;
    const int max_swaps = 16 * static_cast<int>(n) + 16;
    for (int it = 0; it < max_swaps; ++it) {
        DenseMatrix C = swap_factors(B, sel);
        Index bi = -1, bj = -1;
        double best = kGrowth;
        for (Index j = 0; j < n; ++j) {
            if (std::find(sel.begin(), sel.end(), j) != sel.end()) continue;
            for (Index i = 0; i < m; ++i) {
                if (std::abs(C(i, j)) > best) {
                    best = std::abs(C(i, j));
                    bi = i;
                    bj = j;
                }
            }
        }
        if (bi < 0) break;
        sel[bi] = bj;
    }
    std::sort(sel.begin(), sel.end());
    return sel;
}

namespace {

struct RowFit {
    std::vector<Index> cols;  // coarse-local, ascending
    Vector vals;
    bool violating = false;
    Index distance = 0;
};

// Coarse nodes (as coarse-local indices, ascending) within strong distance
// `depth` of `root`.
void coarse_neighbourhood(const SparseMatrix& S, const CfSplitting& cf, Index root, Index depth,
                          std::vector<Index>& mark, Index stamp, std::vector<Index>& out) {
    out.clear();
    std::vector<Index> frontier{root}, next;
    mark[root] = stamp;
    for (Index d = 0; d < depth && !frontier.empty(); ++d) {
        next.clear();
        for (Index u : frontier) {
            for (Index v : S.row_cols(u)) {
                if (mark[v] == stamp) continue;
                mark[v] = stamp;
                next.push_back(v);
                if (cf.is_coarse(v)) out.push_back(cf.coarse_local[v]);
            }
        }
        frontier.swap(next);
    }
    std::sort(out.begin(), out.end());
}

}  // namespace

TentativeResult ptent_setup(const StrengthGraph& graph, const NearKernel& nk, const CfSplitting& cf, Index l_max) {
    if (l_max < 1) throw Error(ErrorCode::InvalidArgument, "ptent_setup: l_max must be >= 1");
    if (graph.size() != cf.size() || nk.size() != cf.size())
        throw Error(ErrorCode::DimensionMismatch, "ptent_setup: size mismatch");
    nk.validate();

    const Index m = nk.modes();
    const Index nf = cf.n_fine();
    const DenseMatrix& V = nk.V;
    std::vector<RowFit> fits(nf);

#if defined(_OPENMP)
#pragma omp parallel num_threads(num_threads())
#endif
    {
        std::vector<Index> mark(cf.size(), -1);
        std::vector<Index> nbr;
        Index stamp = 0;
#if defined(_OPENMP)
#pragma omp for schedule(dynamic, 64)
#endif
        for (Index r = 0; r < nf; ++r) {
            const Index i = cf.f_list[r];
            Vector v(m);
            for (Index k = 0; k < m; ++k) v[k] = V(i, k);
            const double vnorm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
            RowFit& fit = fits[r];

            for (Index l = 1; l <= l_max; ++l) {
                coarse_neighbourhood(graph.S, cf, i, l, mark, stamp++, nbr);
                DenseMatrix B(m, static_cast<Index>(nbr.size()));
                for (Index j = 0; j < B.cols(); ++j)
                    for (Index k = 0; k < m; ++k) B(k, j) = V(cf.c_list[nbr[j]], k);

                if (l == l_max) {
                    fit.cols = nbr;
                    fit.vals = B.cols() > 0 ? lstsq(B, v) : Vector{};
                    fit.violating = true;
                    fit.distance = l;
                }
                if (B.cols() < m) continue;

                std::vector<Index> sel;
                try {
                    sel = max_vol_select(B, m);
                } catch (const Error& e) {
                    if (e.code() == ErrorCode::RankDeficient) continue;
                    throw;
                }
                DenseMatrix Bs = select_columns(B, sel);
                QrResult qr = qr_economy(Bs);
                if (qr.rank < m) continue;
                Vector w = solve_upper(qr.R, matvec_t(qr.Q, v));
                Vector res = matvec(Bs, w);
                double rn = 0.0;
                for (Index k = 0; k < m; ++k) rn += (v[k] - res[k]) * (v[k] - res[k]);
                rn = std::sqrt(rn);
                if (rn <= 1e-12 * vnorm || rn == 0.0) {
                    fit.cols.clear();
                    for (Index s : sel) fit.cols.push_back(nbr[s]);
                    fit.vals = std::move(w);
                    fit.violating = false;
                    fit.distance = l;
                    break;
                }
            }
        }
    }

    TentativeResult out;
    out.report.accepted_at_distance.assign(l_max, 0);
    ProlongationState& st = out.state;
    st.cf = cf;
    st.W = SparseMatrix(nf, cf.n_coarse());
    st.violating.assign(nf, 0);
    for (Index r = 0; r < nf; ++r) {
        const RowFit& fit = fits[r];
        st.W.col_indices.insert(st.W.col_indices.end(), fit.cols.begin(), fit.cols.end());
        st.W.values.insert(st.W.values.end(), fit.vals.begin(), fit.vals.end());
        st.W.row_offsets[r + 1] = static_cast<Index>(st.W.col_indices.size());
        if (fit.violating) {
            st.violating[r] = 1;
            ++out.report.violating;
            if (fit.cols.empty()) ++out.report.empty_rows;
        } else {
            ++out.report.accepted_at_distance[fit.distance - 1];
        }
    }
    return out;
}

SparseMatrix smoothed_prolongation(const SparseMatrix& A, const SparseMatrix& P0, double omega) {
    if (!(omega >= 0.0 && omega < 2.0)) throw Error(ErrorCode::InvalidArgument, "smoothing weight must lie in [0,2)");
    if (A.ncols != P0.nrows || A.nrows != A.ncols) throw Error(ErrorCode::DimensionMismatch, "smoothed_prolongation");
    if (omega == 0.0) return P0;

    // S = I - omega D^-1 A, with the diagonal always present.
    SparseMatrix S = pattern_union(A, SparseMatrix::identity(A.nrows));
    for (Index i = 0; i < A.nrows; ++i) {
        const double d = A.at(i, i);
        if (d == 0.0) throw Error(ErrorCode::ZeroDiagonal, "smoothed_prolongation: zero diagonal at row " + std::to_string(i));
        for (Index p = S.row_begin(i); p < S.row_end(i); ++p) {
            const Index j = S.col_indices[p];
            S.values[p] = (j == i ? 1.0 : 0.0) - omega * A.at(i, j) / d;
        }
    }
    return spmm(S, P0);
}

}  // namespace eamg
