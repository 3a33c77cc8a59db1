#pragma once

#include "eamg/coarsening.hpp"
#include "eamg/dense.hpp"
#include "eamg/prolongation.hpp"

#include <vector>

namespace eamg {

/// Picks `m` columns of the m x n block B whose square submatrix has locally
/// maximal |det|: greedy pivoted selection, then single-column swaps while
/// any swap grows |det| by more than a factor 1 + 1e-9. Returned indices are
/// ascending. Throws Error(RankDeficient) when rank(B) < m.
std::vector<Index> max_vol_select(const DenseMatrix& B, Index m);

struct TentativeReport {
    /// accepted_at_distance[l-1] = fine rows satisfied with neighbourhood distance l.
    std::vector<Index> accepted_at_distance;
    Index violating = 0;
    Index empty_rows = 0;
};

struct TentativeResult {
    ProlongationState state;
    TentativeReport report;
};

/// Builds the tentative interpolation row by row: the strong neighbourhood of
/// each fine node grows one distance level at a time up to l_max until the
/// coarse modes there admit an exact interpolant on a max-vol column subset.
/// Rows that never succeed keep the least-squares fit over the distance-l_max
/// neighbourhood and are flagged as constraint violating.
TentativeResult ptent_setup(const StrengthGraph& graph, const NearKernel& nk, const CfSplitting& cf, Index l_max);

/// Classical smoothing P = (I - omega D^-1 A) P0 applied to every row of the
/// assembled P0. The result no longer has identity coarse rows.
SparseMatrix smoothed_prolongation(const SparseMatrix& A, const SparseMatrix& P0, double omega = 0.7);

}  // namespace eamg
