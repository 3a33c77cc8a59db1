#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace eamg {

using Index = std::int32_t;
using Vector = std::vector<double>;

enum class ErrorCode {
    DimensionMismatch,
    InvalidArgument,
    RankDeficient,
    IndefiniteBreakdown,
    NonFinite,
    ZeroDiagonal,
    Parse,
    Io,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Shared relative rank tolerance for the QR and SVD rank decisions.
inline constexpr double kRankTol = 1e-10;

/// Number of worker threads used by the data-parallel kernels.
int num_threads();
void set_num_threads(int n);

/// Runs body(i) for i in [0, n); iterations must be independent.
template <class Body>
void parallel_for(Index n, Body&& body) {
#if defined(_OPENMP)
#pragma omp parallel for schedule(static) num_threads(num_threads())
    for (Index i = 0; i < n; ++i) body(i);
#else
    for (Index i = 0; i < n; ++i) body(i);
#endif
}

// Reductions are chunked with a fixed chunk size and the partial sums are
// combined in chunk order, so results do not depend on the thread count.
double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);

/// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);

bool all_finite(std::span<const double> x);

}  // namespace eamg
