#include "eamg/dense.hpp"
#include "oracle.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

using namespace eamg;

TEST(Qr, IdentityAndHandExample) {
    const QrResult I = qr_economy(DenseMatrix::identity(3));
    EXPECT_LE((oracle::dense(I.Q).cwiseAbs() - oracle::Mat::Identity(3, 3)).norm(), 1e-15);
    EXPECT_LE((oracle::dense(I.R).cwiseAbs() - oracle::Mat::Identity(3, 3)).norm(), 1e-15);
    EXPECT_EQ(I.rank, 3);

    DenseMatrix B(2, 1);
    B(0, 0) = 3.0;
    B(1, 0) = 4.0;
    const QrResult r = qr_economy(B);
    EXPECT_NEAR(std::abs(r.R(0, 0)), 5.0, 1e-15);
    const double s = r.R(0, 0) > 0 ? 1.0 : -1.0;
    EXPECT_NEAR(s * r.Q(0, 0), 0.6, 1e-15);
    EXPECT_NEAR(s * r.Q(1, 0), 0.8, 1e-15);
}

TEST(Qr, RankDeficientAndWide) {
    DenseMatrix B(3, 2);
    for (Index i = 0; i < 3; ++i) B(i, 0) = B(i, 1) = i + 1.0;
    EXPECT_EQ(qr_economy(B).rank, 1);
    EXPECT_THROW(qr_economy(DenseMatrix(2, 3, 1.0)), Error);
}

TEST(Qr, RandomFactorizationBounds) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const Index r = 3 + trial % 7, c = 1 + trial % 3;
        const oracle::Mat M = oracle::random_matrix(r, c, rng);
        const QrResult q = qr_economy(oracle::to_dense(M));
        const oracle::Mat Q = oracle::dense(q.Q), R = oracle::dense(q.R);
        EXPECT_LE((Q * R - M).norm(), 1e-12 * M.norm());
        EXPECT_LE((Q.transpose() * Q - oracle::Mat::Identity(c, c)).norm(), 1e-12);
        EXPECT_EQ(R.triangularView<Eigen::StrictlyLower>().toDenseMatrix().norm(), 0.0);
        EXPECT_EQ(q.rank, c);
    }
}

TEST(Svd, DiagonalAndRankOne) {
    DenseMatrix D(2, 2);
    D(0, 0) = 2.0;
    D(1, 1) = 3.0;
    const SvdResult s = svd(D);
    EXPECT_NEAR(s.sigma[0], 3.0, 1e-15);
    EXPECT_NEAR(s.sigma[1], 2.0, 1e-15);

    std::mt19937_64 rng(12);
    const oracle::Mat u = oracle::random_matrix(4, 1, rng), v = oracle::random_matrix(5, 1, rng);
    const SvdResult r1 = svd(oracle::to_dense(u * v.transpose()));
    EXPECT_EQ(r1.rank, 1);
}

TEST(Svd, RandomAgainstEigenvaluesOfGram) {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 10; ++trial) {
        const oracle::Mat B = oracle::random_matrix(4, 6, rng);
        const SvdResult s = svd(oracle::to_dense(B));
        Eigen::SelfAdjointEigenSolver<oracle::Mat> es(B * B.transpose());
        oracle::Vec ev = es.eigenvalues().reverse();
        ASSERT_EQ(s.sigma.size(), 4u);
        for (int k = 0; k < 4; ++k) EXPECT_NEAR(s.sigma[k] * s.sigma[k], ev(k), 1e-12 * ev(0));
        for (int k = 0; k + 1 < 4; ++k) EXPECT_GE(s.sigma[k], s.sigma[k + 1]);
        const oracle::Mat U = oracle::dense(s.U), V = oracle::dense(s.V);
        const oracle::Mat S = oracle::vec(s.sigma).asDiagonal();
        EXPECT_LE((U * S * V.transpose() - B).norm(), 1e-10 * B.norm());
        EXPECT_LE((U.transpose() * U - oracle::Mat::Identity(4, 4)).norm(), 1e-12);
        EXPECT_LE((V.transpose() * V - oracle::Mat::Identity(4, 4)).norm(), 1e-12);
    }
}

TEST(Svd, TallRankDeficientHasOrthonormalU) {
    std::mt19937_64 rng(14);
    oracle::Mat B = oracle::random_matrix(6, 3, rng);
    B.col(2) = B.col(0) - 2.0 * B.col(1);
    const SvdResult s = svd(oracle::to_dense(B));
    EXPECT_EQ(s.rank, 2);
    const oracle::Mat U = oracle::dense(s.U);
    EXPECT_LE((U.transpose() * U - oracle::Mat::Identity(3, 3)).norm(), 1e-12);
    EXPECT_THROW(svd(DenseMatrix(2, 2, std::numeric_limits<double>::quiet_NaN())), Error);
}

TEST(Lstsq, MinimumNormSolution) {
    // (1, 1) w = 1 -> w = (0.5, 0.5)
    DenseMatrix B(1, 2, 1.0);
    const Vector w = lstsq(B, std::vector<double>{1.0});
    EXPECT_NEAR(w[0], 0.5, 1e-15);
    EXPECT_NEAR(w[1], 0.5, 1e-15);

    std::mt19937_64 rng(15);
    const oracle::Mat M = oracle::random_matrix(7, 3, rng);
    const oracle::Vec b = oracle::random_matrix(7, 1, rng).col(0);
    const Vector x = lstsq(oracle::to_dense(M), oracle::stdvec(b));
    const oracle::Vec ref = M.colPivHouseholderQr().solve(b);
    EXPECT_LE((oracle::vec(x) - ref).norm(), 1e-12 * ref.norm());
}

TEST(Cholesky, SolvesAndRejectsIndefinite) {
    std::mt19937_64 rng(16);
    const oracle::Mat M = oracle::random_matrix(6, 6, rng);
    const oracle::Mat A = M * M.transpose() + oracle::Mat::Identity(6, 6);
    const oracle::Vec b = oracle::random_matrix(6, 1, rng).col(0);
    const Vector x = Cholesky(oracle::to_dense(A)).solve(oracle::stdvec(b));
    EXPECT_LE((A * oracle::vec(x) - b).norm(), 1e-12 * b.norm());

    DenseMatrix bad = DenseMatrix::identity(2);
    bad(1, 1) = -1.0;
    try {
        Cholesky c(bad);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::IndefiniteBreakdown);
    }
}
