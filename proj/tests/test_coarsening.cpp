#include "eamg/coarsening.hpp"
#include "eamg/problems.hpp"
#include "oracle.hpp"

#include <gtest/gtest.h>

using namespace eamg;

namespace {

SparseMatrix path_laplacian(Index n) { return gen_poisson({n}).A; }

SparseMatrix anisotropic(Index nx, Index ny, double eps) {
    std::vector<SparseMatrix::Triplet> t;
    auto id = [&](Index i, Index j) { return i + nx * j; };
    for (Index j = 0; j < ny; ++j)
        for (Index i = 0; i < nx; ++i) {
            t.push_back({id(i, j), id(i, j), 2.0 + 2.0 * eps});
            if (i > 0) t.push_back({id(i, j), id(i - 1, j), -1.0});
            if (i + 1 < nx) t.push_back({id(i, j), id(i + 1, j), -1.0});
            if (j > 0) t.push_back({id(i, j), id(i, j - 1), -eps});
            if (j + 1 < ny) t.push_back({id(i, j), id(i, j + 1), -eps});
        }
    return SparseMatrix::from_triplets(nx * ny, nx * ny, t);
}

// Independence and maximality of the coarse set, checked by brute force.
void expect_valid_mis(const StrengthGraph& g, const CfSplitting& cf) {
    const Index n = g.size();
    const oracle::Mat S = oracle::dense(g.S);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
            if (S(i, j) != 0.0) EXPECT_FALSE(cf.is_coarse(i) && cf.is_coarse(j)) << i << " " << j;
    for (Index i = 0; i < n; ++i) {
        if (cf.is_coarse(i)) continue;
        bool has_coarse = false;
        for (Index j = 0; j < n; ++j) has_coarse = has_coarse || (S(i, j) != 0.0 && cf.is_coarse(j));
        EXPECT_TRUE(has_coarse) << "fine node " << i << " could join C";
    }
}

}  // namespace

TEST(Strength, LaplacianDiagonalAndAnisotropic) {
    const SparseMatrix L = path_laplacian(6);
    const StrengthGraph g = strength_of_connection(L, 0.25);
    EXPECT_EQ(g.S.nnz(), L.nnz() - 6);
    for (Index i = 0; i < 6; ++i) EXPECT_EQ(g.S.find(i, i), -1);

    EXPECT_EQ(strength_of_connection(SparseMatrix::identity(5), 0.25).S.nnz(), 0);

    const Index nx = 5, ny = 4;
    const SparseMatrix A = anisotropic(nx, ny, 0.01);
    const StrengthGraph a = strength_of_connection(A, 0.25);
    // Direct rule evaluation.
    const oracle::Mat D = oracle::dense(A);
    for (Index i = 0; i < A.nrows; ++i) {
        double mx = 0.0;
        for (Index j = 0; j < A.ncols; ++j)
            if (j != i) mx = std::max(mx, std::abs(D(i, j)));
        for (Index j = 0; j < A.ncols; ++j) {
            const bool strong = j != i && D(i, j) != 0.0 && std::abs(D(i, j)) >= 0.25 * mx;
            EXPECT_EQ(a.S.find(i, j) >= 0, strong);
            if (strong) EXPECT_EQ(std::abs(i - j), 1);  // x-direction only
        }
    }
    EXPECT_THROW(strength_of_connection(A, 1.0), Error);
}

TEST(Strength, UnionSymmetrization) {
    // Row 0 sees 1 as weak, row 1 sees 0 as strong.
    const SparseMatrix A = SparseMatrix::from_triplets(
        3, 3, {{0, 0, 4}, {0, 1, -0.1}, {0, 2, -1}, {1, 0, -0.1}, {1, 1, 4}, {2, 0, -1}, {2, 2, 4}});
    const StrengthGraph g = strength_of_connection(A, 0.25);
    EXPECT_GE(g.S.find(0, 1), 0);
    EXPECT_GE(g.S.find(1, 0), 0);
    EXPECT_LE(symmetry_deviation(g.S), 0.0);
    EXPECT_TRUE(pattern_contains(A, g.S));
}

TEST(Pmis, EmptyGraphAndSingleEdge) {
    const CfSplitting all = cf_split_pmis(strength_of_connection(SparseMatrix::identity(4), 0.25), 42);
    EXPECT_EQ(all.n_coarse(), 4);
    const CfSplitting two = cf_split_pmis(strength_of_connection(path_laplacian(2), 0.25), 42);
    EXPECT_EQ(two.n_coarse(), 1);
    EXPECT_EQ(two.n_fine(), 1);
}

TEST(Pmis, BruteForceValidity) {
    const StrengthGraph p5 = strength_of_connection(path_laplacian(5), 0.25);
    expect_valid_mis(p5, cf_split_pmis(p5, 42));
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const StrengthGraph g = strength_of_connection(gen_poisson({12, 11}).A, 0.25);
        expect_valid_mis(g, cf_split_pmis(g, seed));
    }
    std::mt19937_64 rng(3);
    const StrengthGraph r = strength_of_connection(oracle::random_spd(150, 0.03, rng), 0.25);
    expect_valid_mis(r, cf_split_pmis(r, 7));
}

TEST(Pmis, LabelsListsAndDeterminism) {
    const StrengthGraph g = strength_of_connection(gen_poisson({20, 20}).A, 0.25);
    const CfSplitting a = cf_split_pmis(g, 42), b = cf_split_pmis(g, 42);
    EXPECT_EQ(a.labels, b.labels);
    EXPECT_EQ(a.n_fine() + a.n_coarse(), 400);
    for (Index r = 0; r < a.n_fine(); ++r) EXPECT_EQ(a.fine_local[a.f_list[r]], r);
    for (Index r = 0; r < a.n_coarse(); ++r) EXPECT_EQ(a.coarse_local[a.c_list[r]], r);
    EXPECT_TRUE(std::is_sorted(a.f_list.begin(), a.f_list.end()));
}

TEST(ExpandPattern, ZeroStepsMonotoneAndOracle) {
    const SparseMatrix A = path_laplacian(9);
    const StrengthGraph g = strength_of_connection(A, 0.25);
    // C at even nodes; P0 injects each F node onto its left neighbour.
    std::vector<NodeLabel> labels(9);
    for (Index i = 0; i < 9; ++i) labels[i] = i % 2 == 0 ? NodeLabel::Coarse : NodeLabel::Fine;
    const CfSplitting cf = CfSplitting::from_labels(labels);
    std::vector<SparseMatrix::Triplet> t;
    for (Index i = 0; i < 9; ++i) t.push_back({i, cf.is_coarse(i) ? cf.coarse_local[i] : cf.coarse_local[i - 1], 1.0});
    const SparseMatrix P0 = SparseMatrix::from_triplets(9, cf.n_coarse(), t);

    const SparseMatrix e0 = expand_pattern(g, cf, P0, 0);
    EXPECT_EQ(e0.col_indices, P0.col_indices);
    EXPECT_EQ(e0.row_offsets, P0.row_offsets);

    // Boolean oracle: (S + I) P0 on fine rows, identity on coarse rows.
    const oracle::Mat SI = oracle::dense(g.S) + oracle::Mat::Identity(9, 9);
    const oracle::Mat prod = SI * oracle::dense(P0);
    const SparseMatrix e1 = expand_pattern(g, cf, P0, 1);
    for (Index i = 0; i < 9; ++i)
        for (Index c = 0; c < cf.n_coarse(); ++c) {
            const bool want = cf.is_coarse(i) ? cf.coarse_local[i] == c : prod(i, c) != 0.0;
            EXPECT_EQ(e1.find(i, c) >= 0, want) << i << "," << c;
        }

    SparseMatrix prev = e0;
    bool reached_fixed_point = false;
    for (Index k = 1; k <= 10; ++k) {
        const SparseMatrix ek = expand_pattern(g, cf, P0, k);
        EXPECT_TRUE(pattern_contains(ek, prev));
        if (ek.col_indices == prev.col_indices && ek.row_offsets == prev.row_offsets) reached_fixed_point = true;
        prev = ek;
    }
    EXPECT_TRUE(reached_fixed_point);
}

TEST(NearKernel, SplitScatterAndValidate) {
    NearKernel ones{DenseMatrix(4, 1, 1.0)};
    const CfSplitting alt = CfSplitting::from_labels({NodeLabel::Coarse, NodeLabel::Fine, NodeLabel::Coarse, NodeLabel::Fine});
    const NearKernelSplit s = split_near_kernel(ones, alt);
    EXPECT_EQ(s.fine.rows(), 2);
    EXPECT_EQ(s.coarse.rows(), 2);
    EXPECT_EQ(s.fine(0, 0), 1.0);
    EXPECT_EQ(s.coarse(1, 0), 1.0);

    const CfSplitting allc = CfSplitting::from_labels(std::vector<NodeLabel>(4, NodeLabel::Coarse));
    EXPECT_EQ(split_near_kernel(ones, allc).fine.rows(), 0);
    EXPECT_EQ(split_near_kernel(ones, allc).coarse.rows(), 4);

    std::mt19937_64 rng(4);
    NearKernel r{oracle::to_dense(oracle::random_matrix(10, 3, rng))};
    std::vector<NodeLabel> labels(10);
    for (auto& l : labels) l = (rng() & 1) ? NodeLabel::Coarse : NodeLabel::Fine;
    const CfSplitting cf = CfSplitting::from_labels(labels);
    const NearKernelSplit rs = split_near_kernel(r, cf);
    const DenseMatrix back = scatter_near_kernel(rs.fine.materialize(), rs.coarse.materialize(), cf);
    EXPECT_EQ(back.data(), r.V.data());

    DenseMatrix dup(5, 2, 1.0);
    try {
        NearKernel{dup}.validate();
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::RankDeficient);
    }
}
