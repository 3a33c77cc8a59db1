#include "eamg/coarsening.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace eamg {

StrengthGraph strength_of_connection(const SparseMatrix& A, double theta) {
    if (A.nrows != A.ncols) throw Error(ErrorCode::DimensionMismatch, "strength_of_connection: A not square");
    if (!(theta >= 0.0 && theta < 1.0)) throw Error(ErrorCode::InvalidArgument, "theta must lie in [0,1)");
    const Index n = A.nrows;

    std::vector<std::vector<Index>> strong(n);
    parallel_for(n, [&](Index i) {
        double rowmax = 0.0;
        for (Index p = A.row_begin(i); p < A.row_end(i); ++p)
            if (A.col_indices[p] != i) rowmax = std::max(rowmax, std::abs(A.values[p]));
        if (rowmax == 0.0) return;
        const double cut = theta * rowmax;
        for (Index p = A.row_begin(i); p < A.row_end(i); ++p) {
            const Index j = A.col_indices[p];
            if (j != i && std::abs(A.values[p]) >= cut && A.values[p] != 0.0) strong[i].push_back(j);
        }
    });

    SparseMatrix one_sided(n, n);
    for (Index i = 0; i < n; ++i) {
        one_sided.col_indices.insert(one_sided.col_indices.end(), strong[i].begin(), strong[i].end());
        one_sided.row_offsets[i + 1] = static_cast<Index>(one_sided.col_indices.size());
    }
    one_sided.values.assign(one_sided.col_indices.size(), 1.0);

    StrengthGraph g;
    g.theta = theta;
    g.S = pattern_union(one_sided, transpose(one_sided));
    return g;
}

CfSplitting CfSplitting::from_labels(std::vector<NodeLabel> labels) {
    CfSplitting cf;
    const Index n = static_cast<Index>(labels.size());
    cf.labels = std::move(labels);
    cf.fine_local.assign(n, -1);
    cf.coarse_local.assign(n, -1);
    for (Index i = 0; i < n; ++i) {
        if (cf.labels[i] == NodeLabel::Coarse) {
            cf.coarse_local[i] = static_cast<Index>(cf.c_list.size());
            cf.c_list.push_back(i);
        } else {
            cf.fine_local[i] = static_cast<Index>(cf.f_list.size());
            cf.f_list.push_back(i);
        }
    }
    return cf;
}

CfSplitting cf_split_pmis(const StrengthGraph& graph, std::uint64_t seed) {
    const SparseMatrix& S = graph.S;
    const Index n = S.nrows;
    std::mt19937_64 rng(seed);
    std::vector<double> weight(n);
    for (Index i = 0; i < n; ++i) {
        // 53 random bits -> uniform [0,1); independent of the library's distributions.
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        weight[i] = static_cast<double>(S.row_size(i)) + u;
    }
    auto beats = [&](Index a, Index b) {
        return weight[a] != weight[b] ? weight[a] > weight[b] : a < b;
    };

    enum : std::uint8_t { Undecided, Coarse, Fine };
    std::vector<std::uint8_t> state(n, Undecided);
    for (Index i = 0; i < n; ++i)
        if (S.row_size(i) == 0) state[i] = Coarse;

    std::vector<Index> undecided;
    for (Index i = 0; i < n; ++i)
        if (state[i] == Undecided) undecided.push_back(i);

    std::vector<Index> new_coarse;
    while (!undecided.empty()) {
        new_coarse.clear();
        for (Index i : undecided) {
            bool local_max = true;
            for (Index j : S.row_cols(i)) {
                if (state[j] == Undecided && beats(j, i)) {
                    local_max = false;
                    break;
                }
            }
            if (local_max) new_coarse.push_back(i);
        }
        for (Index i : new_coarse) state[i] = Coarse;
        for (Index i : new_coarse)
            for (Index j : S.row_cols(i))
                if (state[j] == Undecided) state[j] = Fine;
        std::erase_if(undecided, [&](Index i) { return state[i] != Undecided; });
    }

    std::vector<NodeLabel> labels(n);
    for (Index i = 0; i < n; ++i) labels[i] = state[i] == Coarse ? NodeLabel::Coarse : NodeLabel::Fine;
    return CfSplitting::from_labels(std::move(labels));
}

SparseMatrix expand_pattern(const StrengthGraph& graph, const CfSplitting& cf, const SparseMatrix& p0, Index k) {
    if (k < 0) throw Error(ErrorCode::InvalidArgument, "expand_pattern: k must be >= 0");
    if (p0.nrows != graph.size() || cf.size() != p0.nrows)
        throw Error(ErrorCode::DimensionMismatch, "expand_pattern: size mismatch");
    SparseMatrix current = unit_pattern(p0);
    if (k == 0) return current;

    SparseMatrix SI = pattern_union(graph.S, SparseMatrix::identity(graph.size()));
    for (Index step = 0; step < k; ++step) {
        SparseMatrix grown = unit_pattern(spmm(SI, current));
        // Coarse rows keep their injection entry.
        SparseMatrix next(p0.nrows, p0.ncols);
        for (Index i = 0; i < p0.nrows; ++i) {
            const SparseMatrix& src = cf.is_coarse(i) ? current : grown;
            auto cols = src.row_cols(i);
            next.col_indices.insert(next.col_indices.end(), cols.begin(), cols.end());
            next.row_offsets[i + 1] = static_cast<Index>(next.col_indices.size());
        }
        next.values.assign(next.col_indices.size(), 1.0);
        current = std::move(next);
    }
    return current;
}

void NearKernel::validate() const {
    if (V.cols() == 0) throw Error(ErrorCode::InvalidArgument, "near kernel has no modes");
    SvdResult s = svd(V);
    const double smax = s.sigma.front();
    const double smin = s.sigma.back();
    if (!(smax > 0.0) || smin / smax <= 1e-12)
        throw Error(ErrorCode::RankDeficient, "near-kernel columns are not linearly independent");
}

DenseMatrix NearKernelView::materialize() const {
    DenseMatrix out(rows(), cols());
    for (Index j = 0; j < cols(); ++j)
        for (Index i = 0; i < rows(); ++i) out(i, j) = (*this)(i, j);
    return out;
}

NearKernelSplit split_near_kernel(const NearKernel& nk, const CfSplitting& cf) {
    if (nk.size() != cf.size()) throw Error(ErrorCode::DimensionMismatch, "split_near_kernel: size mismatch");
    return {NearKernelView(nk.V, cf.f_list), NearKernelView(nk.V, cf.c_list)};
}

DenseMatrix scatter_near_kernel(const DenseMatrix& v_fine, const DenseMatrix& v_coarse, const CfSplitting& cf) {
    if (v_fine.rows() != cf.n_fine() || v_coarse.rows() != cf.n_coarse() ||
        (v_fine.rows() > 0 && v_coarse.rows() > 0 && v_fine.cols() != v_coarse.cols()))
        throw Error(ErrorCode::DimensionMismatch, "scatter_near_kernel: size mismatch");
    const Index m = std::max(v_fine.cols(), v_coarse.cols());
    DenseMatrix V(cf.size(), m);
    for (Index j = 0; j < m; ++j) {
        for (Index r = 0; r < cf.n_fine(); ++r) V(cf.f_list[r], j) = v_fine(r, j);
        for (Index r = 0; r < cf.n_coarse(); ++r) V(cf.c_list[r], j) = v_coarse(r, j);
    }
    return V;
}

}  // namespace eamg
