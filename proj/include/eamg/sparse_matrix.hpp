#pragma once

#include "eamg/common.hpp"

#include <span>
#include <tuple>
#include <vector>

namespace eamg {

/// Compressed sparse row matrix. Column indices are strictly increasing
/// within each row. Explicit zeros are legal and preserved by every kernel.
struct SparseMatrix {
    Index nrows = 0;
    Index ncols = 0;
    std::vector<Index> row_offsets{0};
    std::vector<Index> col_indices;
    std::vector<double> values;

    SparseMatrix() = default;
    SparseMatrix(Index rows, Index cols);

    Index nnz() const { return static_cast<Index>(col_indices.size()); }
    Index row_begin(Index i) const { return row_offsets[i]; }
    Index row_end(Index i) const { return row_offsets[i + 1]; }
    Index row_size(Index i) const { return row_offsets[i + 1] - row_offsets[i]; }

    std::span<const Index> row_cols(Index i) const {
        return {col_indices.data() + row_offsets[i], static_cast<std::size_t>(row_size(i))};
    }
    std::span<const double> row_vals(Index i) const {
        return {values.data() + row_offsets[i], static_cast<std::size_t>(row_size(i))};
    }

    /// Position of (i, j) in the value array, or -1 when not stored.
    Index find(Index i, Index j) const;
    /// A(i, j) with zero for entries outside the pattern.
    double at(Index i, Index j) const;

    /// Throws Error(InvalidArgument) when the CSR invariants do not hold.
    void validate() const;

    static SparseMatrix identity(Index n);

    struct Triplet {
        Index row;
        Index col;
        double value;
    };
    /// Duplicates are summed. Entries are kept even when the sum is zero.
    static SparseMatrix from_triplets(Index rows, Index cols, std::vector<Triplet> triplets);
};

SparseMatrix transpose(const SparseMatrix& A);

/// Same pattern with every stored value set to one.
SparseMatrix unit_pattern(const SparseMatrix& A);

/// Union of the two patterns (values of the result are one).
SparseMatrix pattern_union(const SparseMatrix& A, const SparseMatrix& B);

/// True when pattern(A) is a subset of pattern(B).
bool pattern_contains(const SparseMatrix& B, const SparseMatrix& A);

Vector diagonal(const SparseMatrix& A);

/// max |A(i,j) - A(j,i)|
double symmetry_deviation(const SparseMatrix& A);
double max_abs(const SparseMatrix& A);

/// y = A x. Each row is summed left to right over its stored entries.
Vector spmv(const SparseMatrix& A, std::span<const double> x);
void spmv(const SparseMatrix& A, std::span<const double> x, std::span<double> y);

/// C = A B. Rows of C are sorted; zeros produced by cancellation are kept.
SparseMatrix spmm(const SparseMatrix& A, const SparseMatrix& B);

/// Entries of A P at the stored positions of P, returned in the order of
/// P.values. Only rows listed in `rows` are evaluated; the output has one
/// slot per stored entry of those rows, concatenated in the order given.
/// Accumulation order matches spmm, so the result equals gather(spmm(A,P))
/// bit for bit.
Vector masked_spmm(const SparseMatrix& A, const SparseMatrix& P, std::span<const Index> rows);
Vector masked_spmm(const SparseMatrix& A, const SparseMatrix& P);

/// Values of `full` gathered at the positions of `pattern`; zero where
/// `full` has no entry.
Vector gather(const SparseMatrix& full, const SparseMatrix& pattern);

}  // namespace eamg
