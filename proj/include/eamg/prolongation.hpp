#pragma once

#include "eamg/coarsening.hpp"
#include "eamg/sparse_matrix.hpp"

#include <cstdint>
#include <vector>

namespace eamg {

/// Prolongation of the form P = [W; I] in the original node ordering.
///
/// W is stored as an n_f x n_c CSR matrix whose row r belongs to fine node
/// cf.f_list[r]; W.values is the row-wise nonzero vector that every emin
/// kernel operates on. Coarse rows are never stored: they are the identity
/// by construction.
struct ProlongationState {
    CfSplitting cf;
    SparseMatrix W;
    std::vector<std::uint8_t> violating;  ///< per fine row

    Index n_fine() const { return W.nrows; }
    Index n_coarse() const { return W.ncols; }
    Index violating_count() const;

    /// n x n_c matrix with identity coarse rows.
    SparseMatrix assemble() const;

    /// Builds a state from an assembled n x n_c matrix; coarse rows are
    /// dropped and must be checked by the caller.
    static ProlongationState from_assembled(const CfSplitting& cf, const SparseMatrix& P);
};

/// Assembled n x n_c pattern with unit values: fine rows from `W`, coarse
/// rows the identity.
SparseMatrix assemble_pattern(const CfSplitting& cf, const SparseMatrix& W);

/// Fine rows of an n x n_c matrix as an n_f x n_c matrix.
SparseMatrix fine_rows(const CfSplitting& cf, const SparseMatrix& P);

}  // namespace eamg
