#include "eamg/prolongation.hpp"

#include <algorithm>

namespace eamg {

Index ProlongationState::violating_count() const {
    return static_cast<Index>(std::count(violating.begin(), violating.end(), std::uint8_t{1}));
}

namespace {

SparseMatrix assemble_impl(const CfSplitting& cf, const SparseMatrix& W, bool unit) {
    if (W.nrows != cf.n_fine() || W.ncols != cf.n_coarse())
        throw Error(ErrorCode::DimensionMismatch, "prolongation: W does not match the splitting");
    const Index n = cf.size();
    SparseMatrix P(n, W.ncols);
    P.col_indices.reserve(static_cast<std::size_t>(W.nnz()) + cf.n_coarse());
    P.values.reserve(P.col_indices.capacity());
    for (Index i = 0; i < n; ++i) {
        if (cf.is_coarse(i)) {
            P.col_indices.push_back(cf.coarse_local[i]);
            P.values.push_back(1.0);
        } else {
            const Index r = cf.fine_local[i];
            auto cols = W.row_cols(r);
            auto vals = W.row_vals(r);
            P.col_indices.insert(P.col_indices.end(), cols.begin(), cols.end());
            if (unit) P.values.insert(P.values.end(), cols.size(), 1.0);
            else P.values.insert(P.values.end(), vals.begin(), vals.end());
        }
        P.row_offsets[i + 1] = static_cast<Index>(P.col_indices.size());
    }
    return P;
}

}  // namespace

SparseMatrix ProlongationState::assemble() const { return assemble_impl(cf, W, false); }

SparseMatrix assemble_pattern(const CfSplitting& cf, const SparseMatrix& W) { return assemble_impl(cf, W, true); }

SparseMatrix fine_rows(const CfSplitting& cf, const SparseMatrix& P) {
    if (P.nrows != cf.size()) throw Error(ErrorCode::DimensionMismatch, "fine_rows: size mismatch");
    SparseMatrix W(cf.n_fine(), P.ncols);
    for (Index r = 0; r < cf.n_fine(); ++r) {
        const Index i = cf.f_list[r];
        auto cols = P.row_cols(i);
        auto vals = P.row_vals(i);
        W.col_indices.insert(W.col_indices.end(), cols.begin(), cols.end());
        W.values.insert(W.values.end(), vals.begin(), vals.end());
        W.row_offsets[r + 1] = static_cast<Index>(W.col_indices.size());
    }
    return W;
}

ProlongationState ProlongationState::from_assembled(const CfSplitting& cf, const SparseMatrix& P) {
    ProlongationState s;
    s.cf = cf;
    s.W = fine_rows(cf, P);
    s.violating.assign(cf.n_fine(), 0);
    return s;
}

}  // namespace eamg
