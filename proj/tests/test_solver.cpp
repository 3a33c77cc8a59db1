#include "eamg/problems.hpp"
#include "eamg/solver.hpp"
#include "oracle.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

using namespace eamg;

TEST(Galerkin, IdentityAndLinearInterpolation) {
    const SparseMatrix A = gen_poisson({5}).A;
    const SparseMatrix I = galerkin(A, SparseMatrix::identity(5));
    EXPECT_EQ(oracle::dense(I), oracle::dense(A));

    // Linear interpolation from coarse nodes 1 and 3.
    const SparseMatrix P = SparseMatrix::from_triplets(
        5, 2, {{0, 0, 0.5}, {1, 0, 1.0}, {2, 0, 0.5}, {2, 1, 0.5}, {3, 1, 1.0}, {4, 1, 0.5}});
    const oracle::Mat want = oracle::dense(P).transpose() * oracle::dense(A) * oracle::dense(P);
    const oracle::Mat got = oracle::dense(galerkin(A, P));
    EXPECT_LE((got - want).norm(), 1e-15);
    // Half the 1D Laplacian on two points.
    EXPECT_NEAR(got(0, 0), 1.0, 1e-15);
    EXPECT_NEAR(got(0, 1), -0.5, 1e-15);
}

TEST(Galerkin, PreservesDefiniteness) {
    std::mt19937_64 rng(41);
    for (int t = 0; t < 5; ++t) {
        const SparseMatrix A = oracle::random_spd(50, 0.08, rng);
        oracle::Mat P = oracle::random_matrix(50, 12, rng);
        const SparseMatrix Ac = galerkin(A, oracle::to_sparse(P));
        EXPECT_EQ(symmetry_deviation(Ac), 0.0);
        Eigen::SelfAdjointEigenSolver<oracle::Mat> es(oracle::dense(Ac));
        EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
    }
}

TEST(Hierarchy, SmallInputIsSingleLevel) {
    const Problem p = gen_poisson({10, 10});
    const Hierarchy H = build_hierarchy(p.A, p.near_kernel, HierarchyConfig{});
    ASSERT_EQ(H.levels.size(), 1u);
    std::mt19937_64 rng(42);
    const Vector r = oracle::random_vector(100, rng);
    const Vector x = vcycle(H, r);
    const oracle::Vec want = oracle::dense(p.A).ldlt().solve(oracle::vec(r));
    EXPECT_LE((oracle::vec(x) - want).norm(), 1e-12 * want.norm());
    EXPECT_EQ(H.grid_complexity, 1.0);
    EXPECT_EQ(H.operator_complexity, 1.0);
}

TEST(Hierarchy, PoissonEnvelopeAndNearKernelChain) {
    const Problem p = gen_poisson({64, 64});
    HierarchyConfig cfg;
    cfg.kind = ProlongationKind::Emin;
    const Hierarchy H = build_hierarchy(p.A, p.near_kernel, cfg);
    EXPECT_GE(H.levels.size(), 3u);
    EXPECT_GE(H.operator_complexity, 1.0);
    EXPECT_LE(H.operator_complexity, 2.5);
    EXPECT_GE(H.grid_complexity, 1.0);
    for (std::size_t l = 0; l + 1 < H.levels.size(); ++l) {
        const Level& L = H.levels[l];
        EXPECT_EQ(H.levels[l + 1].A.nrows, L.P.ncols);
        ASSERT_TRUE(L.emin.has_value());
        EXPECT_LE(L.emin->constraint_residual, 1e-10);
        // P V_c reproduces V on this level.
        for (Index k = 0; k < L.V.cols(); ++k) {
            const Vector vc(H.levels[l + 1].V.col(k).begin(), H.levels[l + 1].V.col(k).end());
            const Vector pv = spmv(L.P, vc);
            for (Index i = 0; i < L.A.nrows; ++i) EXPECT_NEAR(pv[i], L.V(i, k), 1e-10);
        }
    }
}

TEST(Hierarchy, CoarseOperatorsAreSpd) {
    const Problem p = gen_poisson({40, 40});
    HierarchyConfig cfg;
    cfg.coarse_size = 50;
    const Hierarchy H = build_hierarchy(p.A, p.near_kernel, cfg);
    ASSERT_GE(H.levels.size(), 3u);
    std::mt19937_64 rng(43);
    for (std::size_t l = 1; l < H.levels.size(); ++l) {
        const SparseMatrix& Ac = H.levels[l].A;
        EXPECT_LE(symmetry_deviation(Ac), 1e-12 * max_abs(Ac));
        // Plain CG on a random right-hand side must not break down.
        Vector b = oracle::random_vector(Ac.nrows, rng), x(Ac.nrows, 0.0), r = b, d = b;
        double rr = dot(r, r);
        for (int it = 0; it < 5 * Ac.nrows && std::sqrt(rr) > 1e-10 * norm2(b); ++it) {
            const Vector ad = spmv(Ac, d);
            const double dad = dot(d, ad);
            ASSERT_GT(dad, 0.0) << "level " << l;
            const double a = rr / dad;
            axpy(a, d, x);
            axpy(-a, ad, r);
            const double rr2 = dot(r, r);
            for (Index i = 0; i < Ac.nrows; ++i) d[i] = r[i] + rr2 / rr * d[i];
            rr = rr2;
        }
        EXPECT_LE(std::sqrt(rr), 1e-10 * norm2(b));
    }
}

TEST(Vcycle, LinearAndSymmetric) {
    const Problem p = gen_poisson({30, 30});
    HierarchyConfig cfg;
    cfg.coarse_size = 60;
    for (Smoother sm : {Smoother::SymmetricGaussSeidel, Smoother::Jacobi}) {
        cfg.smoother = sm;
        const Hierarchy H = build_hierarchy(p.A, p.near_kernel, cfg);
        ASSERT_GE(H.levels.size(), 2u);
        std::mt19937_64 rng(44);
        for (int t = 0; t < 5; ++t) {
            const Vector r = oracle::random_vector(900, rng), s = oracle::random_vector(900, rng);
            Vector r3 = r;
            for (double& v : r3) v *= 3.0;
            const Vector a = vcycle(H, r), b = vcycle(H, r3);
            for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(b[i], 3.0 * a[i], 1e-12 * (1.0 + std::abs(b[i])));
            const double rs = dot(r, vcycle(H, s)), sr = dot(s, a);
            EXPECT_NEAR(rs, sr, 1e-10 * (std::abs(rs) + std::abs(sr)));
        }
    }
}

TEST(Pcg, ZeroRhsAndIdentity) {
    const Problem p = gen_poisson({30, 30});
    const Hierarchy H = build_hierarchy(p.A, p.near_kernel, HierarchyConfig{});
    const SolveResult z = pcg_solve(p.A, Vector(900, 0.0), H);
    EXPECT_TRUE(z.report.converged);
    EXPECT_EQ(z.report.iterations, 0);
    EXPECT_EQ(z.x, Vector(900, 0.0));

    const SparseMatrix I = SparseMatrix::identity(700);
    const Hierarchy HI = build_hierarchy(I, NearKernel{DenseMatrix(700, 1, 1.0)}, HierarchyConfig{});
    std::mt19937_64 rng(45);
    const SolveResult s = pcg_solve(I, oracle::random_vector(700, rng), HI);
    EXPECT_TRUE(s.report.converged);
    EXPECT_EQ(s.report.iterations, 1);
}

TEST(Pcg, Poisson128WithEminConvergesQuickly) {
    const Problem p = gen_poisson({128, 128});
    HierarchyConfig cfg;
    cfg.kind = ProlongationKind::Emin;
    cfg.emin.maxit = 2;
    cfg.emin.fixed_iterations = true;
    const Hierarchy H = build_hierarchy(p.A, p.near_kernel, cfg);
    const Vector b(p.A.nrows, 1.0 / 128.0);
    const SolveResult s = pcg_solve(p.A, b, H);
    EXPECT_TRUE(s.report.converged);
    EXPECT_LE(s.report.iterations, 25);
    const Vector ax = spmv(p.A, s.x);
    double res = 0.0;
    for (Index i = 0; i < p.A.nrows; ++i) res += (b[i] - ax[i]) * (b[i] - ax[i]);
    EXPECT_LE(std::sqrt(res), 1e-8 * norm2(b));
    EXPECT_EQ(s.report.relative_residuals.size(), static_cast<std::size_t>(s.report.iterations + 1));
}

TEST(Pcg, MaxitReportsNonConvergence) {
    const Problem p = gen_poisson({40, 40});
    const Hierarchy H = build_hierarchy(p.A, p.near_kernel, HierarchyConfig{});
    const SolveResult s = pcg_solve(p.A, Vector(1600, 1.0), H, 1e-14, 2);
    EXPECT_FALSE(s.report.converged);
    EXPECT_EQ(s.report.iterations, 2);
}

TEST(Pcg, SameSeedSameIterations) {
    const Problem p = gen_elasticity_cube(5, 5, 5);
    HierarchyConfig cfg;
    cfg.theta = 0.06;
    cfg.coarse_size = 100;
    const Vector b(p.A.nrows, 1.0);
    const SolveResult a = pcg_solve(p.A, b, build_hierarchy(p.A, p.near_kernel, cfg));
    const SolveResult c = pcg_solve(p.A, b, build_hierarchy(p.A, p.near_kernel, cfg));
    EXPECT_EQ(a.report.iterations, c.report.iterations);
    EXPECT_EQ(a.report.relative_residuals, c.report.relative_residuals);
    EXPECT_TRUE(a.report.converged);
}
