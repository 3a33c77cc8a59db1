// Dense reference implementations for small instances. Everything here is
// computed with Eigen and plain loops, independent of the library kernels.
#pragma once

#include "eamg/coarsening.hpp"
#include "eamg/dense.hpp"
#include "eamg/prolongation.hpp"
#include "eamg/sparse_matrix.hpp"

#include <Eigen/Dense>

#include <random>
#include <vector>

namespace oracle {

using eamg::Index;
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

inline Mat dense(const eamg::SparseMatrix& A) {
    Mat D = Mat::Zero(A.nrows, A.ncols);
    for (Index i = 0; i < A.nrows; ++i)
        for (Index p = A.row_begin(i); p < A.row_end(i); ++p) D(i, A.col_indices[p]) += A.values[p];
    return D;
}

inline Mat dense(const eamg::DenseMatrix& A) {
    Mat D(A.rows(), A.cols());
    for (Index j = 0; j < A.cols(); ++j)
        for (Index i = 0; i < A.rows(); ++i) D(i, j) = A(i, j);
    return D;
}

inline eamg::DenseMatrix to_dense(const Mat& M) {
    eamg::DenseMatrix D(static_cast<Index>(M.rows()), static_cast<Index>(M.cols()));
    for (Index j = 0; j < D.cols(); ++j)
        for (Index i = 0; i < D.rows(); ++i) D(i, j) = M(i, j);
    return D;
}

inline eamg::SparseMatrix to_sparse(const Mat& M, double drop = 0.0) {
    std::vector<eamg::SparseMatrix::Triplet> t;
    for (Index i = 0; i < M.rows(); ++i)
        for (Index j = 0; j < M.cols(); ++j)
            if (std::abs(M(i, j)) > drop) t.push_back({i, j, M(i, j)});
    return eamg::SparseMatrix::from_triplets(static_cast<Index>(M.rows()), static_cast<Index>(M.cols()), t);
}

inline Vec vec(const std::vector<double>& v) { return Eigen::Map<const Vec>(v.data(), static_cast<Index>(v.size())); }

inline std::vector<double> stdvec(const Vec& v) { return {v.data(), v.data() + v.size()}; }

inline Mat random_matrix(Index r, Index c, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Mat M(r, c);
    for (Index j = 0; j < c; ++j)
        for (Index i = 0; i < r; ++i) M(i, j) = u(rng);
    return M;
}

inline std::vector<double> random_vector(Index n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(n);
    for (double& x : v) x = u(rng);
    return v;
}

/// Random sparse matrix with roughly `density` fill, values in [-1, 1].
inline eamg::SparseMatrix random_sparse(Index r, Index c, double density, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0), v(-1.0, 1.0);
    std::vector<eamg::SparseMatrix::Triplet> t;
    for (Index i = 0; i < r; ++i)
        for (Index j = 0; j < c; ++j)
            if (u(rng) < density) t.push_back({i, j, v(rng)});
    return eamg::SparseMatrix::from_triplets(r, c, t);
}

/// Random sparse SPD matrix: symmetric random off-diagonal part plus a
/// dominant diagonal.
inline eamg::SparseMatrix random_spd(Index n, double density, std::mt19937_64& rng) {
    Mat M = dense(random_sparse(n, n, density, rng));
    Mat S = 0.5 * (M + M.transpose());
    for (Index i = 0; i < n; ++i) S(i, i) = 0.0;
    for (Index i = 0; i < n; ++i) S(i, i) = S.row(i).cwiseAbs().sum() + 1.0;
    return to_sparse(S);
}

/// Positions of the fine-row pattern in W layout.
struct Position {
    Index node;    ///< fine node
    Index row;     ///< fine-local row
    Index column;  ///< coarse-local column
};

inline std::vector<Position> positions(const eamg::CfSplitting& cf, const eamg::SparseMatrix& W) {
    std::vector<Position> out;
    for (Index r = 0; r < W.nrows; ++r)
        for (Index p = W.row_begin(r); p < W.row_end(r); ++p) out.push_back({cf.f_list[r], r, W.col_indices[p]});
    return out;
}

/// K(p, q) = A(node_p, node_q) when p and q share a coarse column.
inline Mat explicit_K(const eamg::SparseMatrix& A, const eamg::CfSplitting& cf, const eamg::SparseMatrix& W) {
    const auto pos = positions(cf, W);
    const Mat Ad = dense(A);
    const Index n = static_cast<Index>(pos.size());
    Mat K = Mat::Zero(n, n);
    for (Index p = 0; p < n; ++p)
        for (Index q = 0; q < n; ++q)
            if (pos[p].column == pos[q].column) K(p, q) = Ad(pos[p].node, pos[q].node);
    return K;
}

/// f(p) = -A(node_p, coarse node of column_p).
inline Vec explicit_f(const eamg::SparseMatrix& A, const eamg::CfSplitting& cf, const eamg::SparseMatrix& W) {
    const auto pos = positions(cf, W);
    const Mat Ad = dense(A);
    Vec f(pos.size());
    for (std::size_t p = 0; p < pos.size(); ++p) f(p) = -Ad(pos[p].node, cf.c_list[pos[p].column]);
    return f;
}

/// Global constraint matrix Bᵀ (n_f*m x nnz): block r holds V_c(J_r,:)ᵀ.
inline Mat explicit_Bt(const eamg::DenseMatrix& V, const eamg::CfSplitting& cf, const eamg::SparseMatrix& W) {
    const Index m = V.cols();
    Mat Bt = Mat::Zero(W.nrows * m, W.nnz());
    for (Index r = 0; r < W.nrows; ++r)
        for (Index p = W.row_begin(r); p < W.row_end(r); ++p)
            for (Index k = 0; k < m; ++k) Bt(r * m + k, p) = V(cf.c_list[W.col_indices[p]], k);
    return Bt;
}

/// Stacked targets g (n_f*m): row r holds V(f_list[r], :).
inline Vec explicit_g(const eamg::DenseMatrix& V, const eamg::CfSplitting& cf) {
    const Index m = V.cols();
    Vec g(cf.n_fine() * m);
    for (Index r = 0; r < cf.n_fine(); ++r)
        for (Index k = 0; k < m; ++k) g(r * m + k) = V(cf.f_list[r], k);
    return g;
}

/// Orthonormal bases of range(B) (Q) and ker(Bᵀ) (Z), block diagonal by row,
/// from Eigen's SVD of every local block.
struct Bases {
    Mat Q;
    Mat Z;
};

inline Bases explicit_bases(const eamg::DenseMatrix& V, const eamg::CfSplitting& cf, const eamg::SparseMatrix& W) {
    const Index m = V.cols();
    const Index n = W.nnz();
    std::vector<std::pair<Index, Vec>> qcols, zcols;
    for (Index r = 0; r < W.nrows; ++r) {
        const Index off = W.row_begin(r), sz = W.row_size(r);
        if (sz == 0) continue;
        Mat B(sz, m);  // n_l x m
        for (Index p = 0; p < sz; ++p)
            for (Index k = 0; k < m; ++k) B(p, k) = V(cf.c_list[W.col_indices[off + p]], k);
        Eigen::JacobiSVD<Mat> svd(B, Eigen::ComputeFullU);
        const auto& s = svd.singularValues();
        Index rank = 0;
        for (Index k = 0; k < s.size(); ++k)
            if (s(k) > 1e-10 * s(0)) ++rank;
        const Mat& U = svd.matrixU();
        for (Index k = 0; k < sz; ++k) {
            Vec c = Vec::Zero(n);
            c.segment(off, sz) = U.col(k);
            (k < rank ? qcols : zcols).push_back({r, c});
        }
    }
    Bases b{Mat(n, qcols.size()), Mat(n, zcols.size())};
    for (std::size_t k = 0; k < qcols.size(); ++k) b.Q.col(k) = qcols[k].second;
    for (std::size_t k = 0; k < zcols.size(); ++k) b.Z.col(k) = zcols[k].second;
    return b;
}

/// Strictly lower part L and diagonal D of K as used by block SGS, where the
/// ordering inside each column block is ascending node index and the blocks
/// are independent.
inline Mat explicit_sgs_inverse(const Mat& K, const eamg::CfSplitting& cf, const eamg::SparseMatrix& W) {
    const auto pos = positions(cf, W);
    const Index n = static_cast<Index>(pos.size());
    // Order positions column by column, ascending node within a column.
    std::vector<Index> order(n);
    for (Index p = 0; p < n; ++p) order[p] = p;
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        if (pos[a].column != pos[b].column) return pos[a].column < pos[b].column;
        return pos[a].node < pos[b].node;
    });
    Mat Kp(n, n);
    for (Index a = 0; a < n; ++a)
        for (Index b = 0; b < n; ++b) Kp(a, b) = K(order[a], order[b]);
    Mat LD = Kp.triangularView<Eigen::Lower>();
    Mat D = Kp.diagonal().asDiagonal();
    Mat LDinv = LD.inverse();
    Mat Mp = LDinv.transpose() * D * LDinv;
    Mat M(n, n);
    for (Index a = 0; a < n; ++a)
        for (Index b = 0; b < n; ++b) M(order[a], order[b]) = Mp(a, b);
    return M;
}

}  // namespace oracle
