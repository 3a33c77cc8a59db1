#pragma once

#include "eamg/dense.hpp"
#include "eamg/sparse_matrix.hpp"

#include <cstdint>
#include <vector>

namespace eamg {

/// Symmetric strong-coupling graph. S has unit values and no diagonal.
struct StrengthGraph {
    SparseMatrix S;
    double theta = 0.25;

    Index size() const { return S.nrows; }
};

/// (i,j) is strong when |A(i,j)| >= theta * max_{k != i} |A(i,k)|; the
/// result is symmetrized by union.
StrengthGraph strength_of_connection(const SparseMatrix& A, double theta);

enum class NodeLabel : std::uint8_t { Coarse, Fine };

struct CfSplitting {
    std::vector<NodeLabel> labels;
    std::vector<Index> f_list;        ///< fine nodes, ascending
    std::vector<Index> c_list;        ///< coarse nodes, ascending
    std::vector<Index> fine_local;    ///< node -> position in f_list, or -1
    std::vector<Index> coarse_local;  ///< node -> position in c_list, or -1

    Index size() const { return static_cast<Index>(labels.size()); }
    Index n_fine() const { return static_cast<Index>(f_list.size()); }
    Index n_coarse() const { return static_cast<Index>(c_list.size()); }
    bool is_coarse(Index i) const { return labels[i] == NodeLabel::Coarse; }

    static CfSplitting from_labels(std::vector<NodeLabel> labels);
};

/// PMIS splitting. Weight = strong degree + uniform(0,1) drawn from a
/// 64-bit seeded generator; ties broken by index. Nodes without strong
/// neighbours become coarse.
CfSplitting cf_split_pmis(const StrengthGraph& graph, std::uint64_t seed);

/// Pattern of (S + I)^k applied to `p0` (n x n_c). Coarse rows are kept as
/// they are in `p0`; k = 0 returns `p0`'s pattern.
SparseMatrix expand_pattern(const StrengthGraph& graph, const CfSplitting& cf, const SparseMatrix& p0, Index k);

/// n x m block of near-kernel modes.
struct NearKernel {
    DenseMatrix V;

    Index size() const { return V.rows(); }
    Index modes() const { return V.cols(); }
    /// Throws RankDeficient when sigma_min / sigma_max <= 1e-12.
    void validate() const;
};

/// Row view of a near-kernel block through an index list.
class NearKernelView {
public:
    NearKernelView(const DenseMatrix& V, const std::vector<Index>& rows) : V_(&V), rows_(&rows) {}

    Index rows() const { return static_cast<Index>(rows_->size()); }
    Index cols() const { return V_->cols(); }
    double operator()(Index i, Index j) const { return (*V_)((*rows_)[i], j); }
    Index source_row(Index i) const { return (*rows_)[i]; }

    DenseMatrix materialize() const;

private:
    const DenseMatrix* V_;
    const std::vector<Index>* rows_;
};

struct NearKernelSplit {
    NearKernelView fine;
    NearKernelView coarse;
};

NearKernelSplit split_near_kernel(const NearKernel& nk, const CfSplitting& cf);

/// Inverse of split_near_kernel.
DenseMatrix scatter_near_kernel(const DenseMatrix& v_fine, const DenseMatrix& v_coarse, const CfSplitting& cf);

}  // namespace eamg
