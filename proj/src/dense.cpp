#include "eamg/dense.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace eamg {

DenseMatrix DenseMatrix::identity(Index n) {
    DenseMatrix I(n, n);
    for (Index i = 0; i < n; ++i) I(i, i) = 1.0;
    return I;
}

DenseMatrix DenseMatrix::transposed() const {
    DenseMatrix t(cols_, rows_);
    for (Index j = 0; j < cols_; ++j)
        for (Index i = 0; i < rows_; ++i) t(j, i) = (*this)(i, j);
    return t;
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) throw Error(ErrorCode::DimensionMismatch, "dense product: inner dimensions differ");
    DenseMatrix c(a.rows(), b.cols());
    for (Index j = 0; j < b.cols(); ++j)
        for (Index k = 0; k < a.cols(); ++k) {
            const double bkj = b(k, j);
            if (bkj == 0.0) continue;
            for (Index i = 0; i < a.rows(); ++i) c(i, j) += a(i, k) * bkj;
        }
    return c;
}

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw Error(ErrorCode::DimensionMismatch, "dense difference: shape mismatch");
    DenseMatrix c = a;
    for (std::size_t k = 0; k < c.data().size(); ++k) c.data()[k] -= b.data()[k];
    return c;
}

Vector matvec(const DenseMatrix& a, std::span<const double> x) {
    if (static_cast<std::size_t>(a.cols()) != x.size()) throw Error(ErrorCode::DimensionMismatch, "matvec");
    Vector y(a.rows(), 0.0);
    for (Index j = 0; j < a.cols(); ++j) {
        auto c = a.col(j);
        for (Index i = 0; i < a.rows(); ++i) y[i] += c[i] * x[j];
    }
    return y;
}

Vector matvec_t(const DenseMatrix& a, std::span<const double> x) {
    if (static_cast<std::size_t>(a.rows()) != x.size()) throw Error(ErrorCode::DimensionMismatch, "matvec_t");
    Vector y(a.cols(), 0.0);
    for (Index j = 0; j < a.cols(); ++j) {
        auto c = a.col(j);
        double s = 0.0;
        for (Index i = 0; i < a.rows(); ++i) s += c[i] * x[i];
        y[j] = s;
    }
    return y;
}

double frobenius_norm(const DenseMatrix& a) {
    double s = 0.0;
    for (double v : a.data()) s += v * v;
    return std::sqrt(s);
}

QrResult qr_economy(const DenseMatrix& B) {
    const Index m = B.rows();
    const Index n = B.cols();
    if (m < n) throw Error(ErrorCode::InvalidArgument, "qr_economy requires rows >= cols");
    for (double v : B.data())
        if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "qr_economy: non-finite input");

    DenseMatrix A = B;
    std::vector<Vector> reflectors(n);
    for (Index k = 0; k < n; ++k) {
        Vector v(m - k);
        double norm = 0.0;
        for (Index i = k; i < m; ++i) {
            v[i - k] = A(i, k);
            norm += v[i - k] * v[i - k];
        }
        norm = std::sqrt(norm);
        if (norm == 0.0) continue;  // zero column: identity reflector
        const double alpha = v[0] >= 0.0 ? -norm : norm;
        v[0] -= alpha;
        double vnorm = 0.0;
        for (double t : v) vnorm += t * t;
        vnorm = std::sqrt(vnorm);
        if (vnorm == 0.0) continue;
        for (double& t : v) t /= vnorm;
        for (Index j = k; j < n; ++j) {
            double s = 0.0;
            for (Index i = k; i < m; ++i) s += v[i - k] * A(i, j);
            for (Index i = k; i < m; ++i) A(i, j) -= 2.0 * s * v[i - k];
        }
        reflectors[k] = std::move(v);
    }

    QrResult out;
    out.R = DenseMatrix(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i <= j; ++i) out.R(i, j) = A(i, j);

    out.Q = DenseMatrix(m, n);
    for (Index j = 0; j < n; ++j) out.Q(j, j) = 1.0;
    for (Index k = n - 1; k >= 0; --k) {
        const Vector& v = reflectors[k];
        if (v.empty()) continue;
        for (Index j = 0; j < n; ++j) {
            double s = 0.0;
            for (Index i = k; i < m; ++i) s += v[i - k] * out.Q(i, j);
            for (Index i = k; i < m; ++i) out.Q(i, j) -= 2.0 * s * v[i - k];
        }
    }

    double rmax = 0.0;
    for (Index k = 0; k < n; ++k) rmax = std::max(rmax, std::abs(out.R(k, k)));
    out.rank = 0;
    for (Index k = 0; k < n; ++k)
        if (std::abs(out.R(k, k)) > kRankTol * rmax) ++out.rank;
    return out;
}

namespace {

// One-sided Jacobi for rows >= cols.
SvdResult svd_tall(const DenseMatrix& B) {
    const Index m = B.rows();
    const Index n = B.cols();
    DenseMatrix W = B;
    DenseMatrix V = DenseMatrix::identity(n);
    constexpr double eps = 1e-15;
    constexpr int max_sweeps = 80;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool rotated = false;
        for (Index p = 0; p < n - 1; ++p) {
            for (Index q = p + 1; q < n; ++q) {
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                auto wp = W.col(p);
                auto wq = W.col(q);
                for (Index i = 0; i < m; ++i) {
                    alpha += wp[i] * wp[i];
                    beta += wq[i] * wq[i];
                    gamma += wp[i] * wq[i];
                }
                if (alpha == 0.0 || beta == 0.0) continue;
                if (std::abs(gamma) <= eps * std::sqrt(alpha * beta)) continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (Index i = 0; i < m; ++i) {
                    const double a = wp[i], b = wq[i];
                    wp[i] = c * a - s * b;
                    wq[i] = s * a + c * b;
                }
                auto vp = V.col(p);
                auto vq = V.col(q);
                for (Index i = 0; i < n; ++i) {
                    const double a = vp[i], b = vq[i];
                    vp[i] = c * a - s * b;
                    vq[i] = s * a + c * b;
                }
            }
        }
        if (!rotated) break;
    }

    Vector sig(n);
    for (Index j = 0; j < n; ++j) {
        double s = 0.0;
        for (double v : W.col(j)) s += v * v;
        sig[j] = std::sqrt(s);
    }
    std::vector<Index> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return sig[a] > sig[b]; });

    SvdResult out;
    out.U = DenseMatrix(m, n);
    out.V = DenseMatrix(n, n);
    out.sigma.resize(n);
    const double smax = n > 0 ? sig[order[0]] : 0.0;
    for (Index j = 0; j < n; ++j) {
        const Index src = order[j];
        out.sigma[j] = sig[src];
        std::copy(V.col(src).begin(), V.col(src).end(), out.V.col(j).begin());
        if (sig[src] > 0.0 && sig[src] > 1e-300) {
            auto u = out.U.col(j);
            auto w = W.col(src);
            for (Index i = 0; i < m; ++i) u[i] = w[i] / sig[src];
        }
    }
    // Numerically null columns of U are completed to an orthonormal set.
    for (Index j = 0; j < n; ++j) {
        if (out.sigma[j] > kRankTol * smax && smax > 0.0) continue;
        auto u = out.U.col(j);
        for (Index e = 0; e < m; ++e) {
            std::fill(u.begin(), u.end(), 0.0);
            u[e] = 1.0;
            for (int pass = 0; pass < 2; ++pass) {
                for (Index k = 0; k < n; ++k) {
                    if (k == j) continue;
                    if (k > j && !(out.sigma[k] > kRankTol * smax && smax > 0.0)) continue;
                    auto uk = out.U.col(k);
                    double d = 0.0;
                    for (Index i = 0; i < m; ++i) d += uk[i] * u[i];
                    for (Index i = 0; i < m; ++i) u[i] -= d * uk[i];
                }
            }
            double nrm = 0.0;
            for (double v : u) nrm += v * v;
            nrm = std::sqrt(nrm);
            if (nrm > 0.5) {
                for (double& v : u) v /= nrm;
                break;
            }
        }
    }
    out.rank = 0;
    for (double s : out.sigma)
        if (smax > 0.0 && s > kRankTol * smax) ++out.rank;
    return out;
}

}  // namespace

SvdResult svd(const DenseMatrix& B) {
    for (double v : B.data())
        if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "svd: non-finite input");
    if (B.rows() >= B.cols()) return svd_tall(B);
    SvdResult t = svd_tall(B.transposed());
    SvdResult out;
    out.U = std::move(t.V);
    out.V = std::move(t.U);
    out.sigma = std::move(t.sigma);
    out.rank = t.rank;
    return out;
}

Vector solve_upper(const DenseMatrix& R, std::span<const double> b) {
    const Index n = R.cols();
    if (R.rows() < n || b.size() != static_cast<std::size_t>(n))
        throw Error(ErrorCode::DimensionMismatch, "solve_upper");
    Vector x(b.begin(), b.end());
    for (Index i = n - 1; i >= 0; --i) {
        double s = x[i];
        for (Index j = i + 1; j < n; ++j) s -= R(i, j) * x[j];
        x[i] = s / R(i, i);
    }
    return x;
}

Vector lstsq(const DenseMatrix& B, std::span<const double> b) {
    SvdResult s = svd(B);
    Vector utb = matvec_t(s.U, b);
    for (Index k = 0; k < static_cast<Index>(utb.size()); ++k) utb[k] = k < s.rank ? utb[k] / s.sigma[k] : 0.0;
    return matvec(s.V, utb);
}

Cholesky::Cholesky(DenseMatrix A) : U_(std::move(A)) {
    const Index n = U_.rows();
    if (U_.cols() != n) throw Error(ErrorCode::DimensionMismatch, "Cholesky of non-square matrix");
    for (Index j = 0; j < n; ++j) {
        const double* uj = &U_(0, j);
        for (Index i = 0; i < j; ++i) {
            const double* ui = U_.col(i).data();
            double s = U_(i, j);
            for (Index k = 0; k < i; ++k) s -= ui[k] * uj[k];
            U_(i, j) = s / U_(i, i);
        }
        double d = U_(j, j);
        for (Index k = 0; k < j; ++k) d -= uj[k] * uj[k];
        if (!(d > 0.0)) throw Error(ErrorCode::IndefiniteBreakdown, "Cholesky: matrix is not positive definite");
        U_(j, j) = std::sqrt(d);
        for (Index i = j + 1; i < n; ++i) U_(i, j) = 0.0;
    }
}

Vector Cholesky::solve(std::span<const double> b) const {
    const Index n = U_.rows();
    if (b.size() != static_cast<std::size_t>(n)) throw Error(ErrorCode::DimensionMismatch, "Cholesky::solve");
    Vector y(b.begin(), b.end());
    for (Index i = 0; i < n; ++i) {
        const double* ui = U_.col(i).data();
        double s = y[i];
        for (Index k = 0; k < i; ++k) s -= ui[k] * y[k];
        y[i] = s / ui[i];
    }
    for (Index i = n - 1; i >= 0; --i) {
        const double* ui = U_.col(i).data();
        y[i] /= ui[i];
        for (Index k = 0; k < i; ++k) y[k] -= ui[k] * y[i];
    }
    return y;
}

}  // namespace eamg
