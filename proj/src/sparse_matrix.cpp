#include "eamg/sparse_matrix.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>
#include <thread>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace eamg {

const char* to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::IndefiniteBreakdown: return "IndefiniteBreakdown";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::ZeroDiagonal: return "ZeroDiagonal";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

namespace {

std::atomic<int> g_threads{0};

constexpr std::size_t kReduceChunk = 4096;

template <class F>
double chunked_sum(std::size_t n, F&& term) {
    const std::size_t nchunks = (n + kReduceChunk - 1) / kReduceChunk;
    if (nchunks <= 1) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += term(i);
        return s;
    }
    std::vector<double> partial(nchunks, 0.0);
    parallel_for(static_cast<Index>(nchunks), [&](Index c) {
        const std::size_t b = static_cast<std::size_t>(c) * kReduceChunk;
        const std::size_t e = std::min(n, b + kReduceChunk);
        double s = 0.0;
        for (std::size_t i = b; i < e; ++i) s += term(i);
        partial[static_cast<std::size_t>(c)] = s;
    });
    double s = 0.0;
    for (double p : partial) s += p;
    return s;
}

}  // namespace

int num_threads() {
    int n = g_threads.load();
    if (n > 0) return n;
#if defined(_OPENMP)
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void set_num_threads(int n) { g_threads.store(n > 0 ? n : 0); }

double dot(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw Error(ErrorCode::DimensionMismatch, "dot: length mismatch");
    return chunked_sum(x.size(), [&](std::size_t i) { return x[i] * y[i]; });
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

void axpy(double a, std::span<const double> x, std::span<double> y) {
    if (x.size() != y.size()) throw Error(ErrorCode::DimensionMismatch, "axpy: length mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

bool all_finite(std::span<const double> x) {
    return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

SparseMatrix::SparseMatrix(Index rows, Index cols)
    : nrows(rows), ncols(cols), row_offsets(static_cast<std::size_t>(rows) + 1, 0) {}

Index SparseMatrix::find(Index i, Index j) const {
    auto cols = row_cols(i);
    auto it = std::lower_bound(cols.begin(), cols.end(), j);
    if (it == cols.end() || *it != j) return -1;
    return row_offsets[i] + static_cast<Index>(it - cols.begin());
}

double SparseMatrix::at(Index i, Index j) const {
    Index p = find(i, j);
    return p < 0 ? 0.0 : values[p];
}

void SparseMatrix::validate() const {
    if (nrows < 0 || ncols < 0) throw Error(ErrorCode::InvalidArgument, "negative dimension");
    if (row_offsets.size() != static_cast<std::size_t>(nrows) + 1)
        throw Error(ErrorCode::InvalidArgument, "row_offsets has wrong length");
    if (row_offsets.front() != 0) throw Error(ErrorCode::InvalidArgument, "row_offsets[0] != 0");
    if (static_cast<std::size_t>(row_offsets.back()) != values.size() ||
        values.size() != col_indices.size())
        throw Error(ErrorCode::InvalidArgument, "row_offsets[nrows] != nnz");
    for (Index i = 0; i < nrows; ++i) {
        if (row_offsets[i] > row_offsets[i + 1])
            throw Error(ErrorCode::InvalidArgument, "row_offsets decreasing at row " + std::to_string(i));
        for (Index p = row_offsets[i]; p < row_offsets[i + 1]; ++p) {
            Index c = col_indices[p];
            if (c < 0 || c >= ncols)
                throw Error(ErrorCode::InvalidArgument, "column index out of range in row " + std::to_string(i));
            if (p > row_offsets[i] && col_indices[p - 1] >= c)
                throw Error(ErrorCode::InvalidArgument, "columns not strictly increasing in row " + std::to_string(i));
        }
    }
}

SparseMatrix SparseMatrix::identity(Index n) {
    SparseMatrix I(n, n);
    I.col_indices.resize(n);
    I.values.assign(n, 1.0);
    for (Index i = 0; i < n; ++i) {
        I.row_offsets[i + 1] = i + 1;
        I.col_indices[i] = i;
    }
    return I;
}

SparseMatrix SparseMatrix::from_triplets(Index rows, Index cols, std::vector<Triplet> triplets) {
    for (const auto& t : triplets) {
        if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
            throw Error(ErrorCode::InvalidArgument, "triplet index out of range");
    }
    std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    SparseMatrix A(rows, cols);
    A.col_indices.reserve(triplets.size());
    A.values.reserve(triplets.size());
    for (std::size_t k = 0; k < triplets.size();) {
        const Index r = triplets[k].row;
        const Index c = triplets[k].col;
        double v = 0.0;
        for (; k < triplets.size() && triplets[k].row == r && triplets[k].col == c; ++k) v += triplets[k].value;
        A.col_indices.push_back(c);
        A.values.push_back(v);
        ++A.row_offsets[r + 1];
    }
    for (Index i = 0; i < rows; ++i) A.row_offsets[i + 1] += A.row_offsets[i];
    return A;
}

SparseMatrix transpose(const SparseMatrix& A) {
    SparseMatrix T(A.ncols, A.nrows);
    T.col_indices.resize(A.nnz());
    T.values.resize(A.nnz());
    for (Index c : A.col_indices) ++T.row_offsets[c + 1];
    for (Index i = 0; i < T.nrows; ++i) T.row_offsets[i + 1] += T.row_offsets[i];
    std::vector<Index> next(T.row_offsets.begin(), T.row_offsets.end() - 1);
    for (Index i = 0; i < A.nrows; ++i) {
        for (Index p = A.row_begin(i); p < A.row_end(i); ++p) {
            Index q = next[A.col_indices[p]]++;
            T.col_indices[q] = i;
            T.values[q] = A.values[p];
        }
    }
    return T;
}

SparseMatrix unit_pattern(const SparseMatrix& A) {
    SparseMatrix U = A;
    std::fill(U.values.begin(), U.values.end(), 1.0);
    return U;
}

SparseMatrix pattern_union(const SparseMatrix& A, const SparseMatrix& B) {
    if (A.nrows != B.nrows || A.ncols != B.ncols)
        throw Error(ErrorCode::DimensionMismatch, "pattern_union: shape mismatch");
    SparseMatrix C(A.nrows, A.ncols);
    for (Index i = 0; i < A.nrows; ++i) {
        auto a = A.row_cols(i);
        auto b = B.row_cols(i);
        std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(C.col_indices));
        C.row_offsets[i + 1] = static_cast<Index>(C.col_indices.size());
    }
    C.values.assign(C.col_indices.size(), 1.0);
    return C;
}

bool pattern_contains(const SparseMatrix& B, const SparseMatrix& A) {
    if (A.nrows != B.nrows || A.ncols != B.ncols) return false;
    for (Index i = 0; i < A.nrows; ++i) {
        auto a = A.row_cols(i);
        auto b = B.row_cols(i);
        if (!std::includes(b.begin(), b.end(), a.begin(), a.end())) return false;
    }
    return true;
}

Vector diagonal(const SparseMatrix& A) {
    const Index n = std::min(A.nrows, A.ncols);
    Vector d(n, 0.0);
    for (Index i = 0; i < n; ++i) d[i] = A.at(i, i);
    return d;
}

double max_abs(const SparseMatrix& A) {
    double m = 0.0;
    for (double v : A.values) m = std::max(m, std::abs(v));
    return m;
}

double symmetry_deviation(const SparseMatrix& A) {
    if (A.nrows != A.ncols) throw Error(ErrorCode::DimensionMismatch, "symmetry check on non-square matrix");
    double dev = 0.0;
    for (Index i = 0; i < A.nrows; ++i) {
        for (Index p = A.row_begin(i); p < A.row_end(i); ++p) {
            dev = std::max(dev, std::abs(A.values[p] - A.at(A.col_indices[p], i)));
        }
    }
    return dev;
}

void spmv(const SparseMatrix& A, std::span<const double> x, std::span<double> y) {
    if (static_cast<std::size_t>(A.ncols) != x.size() || static_cast<std::size_t>(A.nrows) != y.size())
        throw Error(ErrorCode::DimensionMismatch, "spmv: A is " + std::to_string(A.nrows) + "x" +
                                                      std::to_string(A.ncols) + ", x has " +
                                                      std::to_string(x.size()));
    parallel_for(A.nrows, [&](Index i) {
        double s = 0.0;
        for (Index p = A.row_offsets[i]; p < A.row_offsets[i + 1]; ++p) s += A.values[p] * x[A.col_indices[p]];
        y[i] = s;
    });
}

Vector spmv(const SparseMatrix& A, std::span<const double> x) {
    Vector y(A.nrows, 0.0);
    spmv(A, x, y);
    return y;
}

SparseMatrix spmm(const SparseMatrix& A, const SparseMatrix& B) {
    if (A.ncols != B.nrows) throw Error(ErrorCode::DimensionMismatch, "spmm: inner dimensions differ");
    SparseMatrix C(A.nrows, B.ncols);

    // Symbolic pass: row sizes.
    std::vector<Index> row_nnz(A.nrows, 0);
#if defined(_OPENMP)
#pragma omp parallel num_threads(num_threads())
#endif
    {
        std::vector<Index> marker(B.ncols, -1);
#if defined(_OPENMP)
#pragma omp for schedule(static)
#endif
        for (Index i = 0; i < A.nrows; ++i) {
            Index count = 0;
            for (Index k : A.row_cols(i)) {
                for (Index j : B.row_cols(k)) {
                    if (marker[j] != i) {
                        marker[j] = i;
                        ++count;
                    }
                }
            }
            row_nnz[i] = count;
        }
    }
    for (Index i = 0; i < A.nrows; ++i) C.row_offsets[i + 1] = C.row_offsets[i] + row_nnz[i];
    C.col_indices.resize(C.row_offsets.back());
    C.values.resize(C.row_offsets.back());

    // Numeric pass.
#if defined(_OPENMP)
#pragma omp parallel num_threads(num_threads())
#endif
    {
        std::vector<Index> marker(B.ncols, -1);
        std::vector<double> acc(B.ncols, 0.0);
#if defined(_OPENMP)
#pragma omp for schedule(static)
#endif
        for (Index i = 0; i < A.nrows; ++i) {
            Index* cols = C.col_indices.data() + C.row_offsets[i];
            Index count = 0;
            for (Index p = A.row_begin(i); p < A.row_end(i); ++p) {
                const double a = A.values[p];
                const Index k = A.col_indices[p];
                for (Index q = B.row_begin(k); q < B.row_end(k); ++q) {
                    const Index j = B.col_indices[q];
                    if (marker[j] != i) {
                        marker[j] = i;
                        acc[j] = 0.0;
                        cols[count++] = j;
                    }
                    acc[j] += a * B.values[q];
                }
            }
            std::sort(cols, cols + count);
            double* vals = C.values.data() + C.row_offsets[i];
            for (Index t = 0; t < count; ++t) vals[t] = acc[cols[t]];
        }
    }
    return C;
}

Vector masked_spmm(const SparseMatrix& A, const SparseMatrix& P, std::span<const Index> rows) {
    if (A.ncols != P.nrows) throw Error(ErrorCode::DimensionMismatch, "masked_spmm: ncols(A) != nrows(P)");
    if (A.nrows != P.nrows) throw Error(ErrorCode::DimensionMismatch, "masked_spmm: pattern rows do not match A");
    std::vector<Index> out_offsets(rows.size() + 1, 0);
    for (std::size_t t = 0; t < rows.size(); ++t) {
        const Index i = rows[t];
        if (i < 0 || i >= P.nrows) throw Error(ErrorCode::InvalidArgument, "masked_spmm: row out of range");
        out_offsets[t + 1] = out_offsets[t] + P.row_size(i);
    }
    Vector out(out_offsets.back(), 0.0);

#if defined(_OPENMP)
#pragma omp parallel num_threads(num_threads())
#endif
    {
        // slot[j] >= 0 marks column j as part of the current row's pattern.
        std::vector<Index> slot(P.ncols, -1);
        std::vector<double> acc(P.ncols, 0.0);
#if defined(_OPENMP)
#pragma omp for schedule(static)
#endif
        for (std::size_t t = 0; t < rows.size(); ++t) {
            const Index i = rows[t];
            for (Index q = P.row_begin(i); q < P.row_end(i); ++q) {
                slot[P.col_indices[q]] = q;
                acc[P.col_indices[q]] = 0.0;
            }
            for (Index p = A.row_begin(i); p < A.row_end(i); ++p) {
                const double a = A.values[p];
                const Index k = A.col_indices[p];
                for (Index q = P.row_begin(k); q < P.row_end(k); ++q) {
                    const Index j = P.col_indices[q];
                    if (slot[j] >= 0) acc[j] += a * P.values[q];
                }
            }
            double* o = out.data() + out_offsets[t];
            for (Index q = P.row_begin(i); q < P.row_end(i); ++q) {
                const Index j = P.col_indices[q];
                *o++ = acc[j];
                slot[j] = -1;
            }
        }
    }
    return out;
}

Vector masked_spmm(const SparseMatrix& A, const SparseMatrix& P) {
    std::vector<Index> rows(P.nrows);
    for (Index i = 0; i < P.nrows; ++i) rows[i] = i;
    return masked_spmm(A, P, rows);
}

Vector gather(const SparseMatrix& full, const SparseMatrix& pattern) {
    if (full.nrows != pattern.nrows || full.ncols != pattern.ncols)
        throw Error(ErrorCode::DimensionMismatch, "gather: shape mismatch");
    Vector out(pattern.nnz(), 0.0);
    for (Index i = 0; i < pattern.nrows; ++i) {
        for (Index q = pattern.row_begin(i); q < pattern.row_end(i); ++q) out[q] = full.at(i, pattern.col_indices[q]);
    }
    return out;
}

}  // namespace eamg
