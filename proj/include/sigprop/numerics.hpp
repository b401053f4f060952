#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sigprop {

// ---------------------------------------------------------------------------
// Dense row-major matrix. The only linear algebra this project needs is
// dense Cholesky, triangular multiply and an extreme-eigenvalue solve, so a
// flat buffer with an index helper is all we carry.
// ---------------------------------------------------------------------------
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    double* row(std::size_t i) { return data.data() + i * cols; }
    const double* row(std::size_t i) const { return data.data() + i * cols; }
};

// ---------------------------------------------------------------------------
// Standard normal and Student-t special functions.
//
// Upper tails are evaluated through erfc (never as 1 - Phi), so survival
// probabilities stay accurate far into the tail where ratio statistics
// divide by them.
// ---------------------------------------------------------------------------

/// Upper tail probability P(Z > t) of the standard normal.
double std_normal_sf(double t);

/// Lower tail P(Z <= t).
double std_normal_cdf(double t);

/// log P(Z > t), finite for any t (asymptotic continued fraction once the
/// probability itself underflows a double).
double std_normal_log_sf(double t);

/// Inverse of std_normal_cdf on (0,1). Wichura's PPND16 rational
/// approximations, |Phi(x) - u| within 1e-12 over the full range.
double std_normal_quantile(double u);

/// Student-t CDF with df >= 1 degrees of freedom via the regularized
/// incomplete beta function.
double student_t_cdf(double x, int df);

/// Student-t upper tail, evaluated on the small-tail side.
double student_t_sf(double x, int df);

// ---------------------------------------------------------------------------
// Counter-based random stream.
//
// Draws are a pure function of (seed, stream_id, counter): replicate-level
// parallelism cannot change any sampled value, and distinct stream ids give
// statistically independent sequences. Normal variates use the inverse CDF
// so one 64-bit counter tick maps to exactly one variate.
// ---------------------------------------------------------------------------
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t next_u64();

    /// Uniform on the open interval (0,1).
    double uniform01();

    /// Standard normal draw.
    double normal();

    /// Uniform integer in [0, n), rejection sampled (no modulo bias).
    std::uint64_t uniform_below(std::uint64_t n);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

  private:
    std::uint64_t seed_ = 0;
    std::uint64_t stream_id_ = 0;
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

/// Deterministically folds context tags into a stream id, so nested
/// experiment loops can hand every task its own stream.
std::uint64_t compose_stream_id(std::initializer_list<std::uint64_t> parts);

// ---------------------------------------------------------------------------
// Dense Cholesky and multivariate normal sampling.
// ---------------------------------------------------------------------------

struct NotPositiveDefinite : std::runtime_error {
    std::size_t pivot_index;
    explicit NotPositiveDefinite(std::size_t index);
};

struct CholeskyFactor {
    std::size_t dim = 0;
    Matrix lower;  // lower triangular, strictly positive diagonal
};

/// Cholesky factorization of a symmetric positive definite matrix.
/// Throws NotPositiveDefinite carrying the first failing pivot.
CholeskyFactor cholesky(const Matrix& m);

/// One draw of N(mean, L L^T): mean + L g with g iid standard normal from
/// the given stream.
std::vector<double> sample_mvn(const CholeskyFactor& factor,
                               std::span<const double> mean, RngStream& rng);

/// Smallest eigenvalue of a symmetric matrix by Lanczos iteration with full
/// reorthogonalization. `tol` is the Ritz residual target relative to the
/// spectrum scale.
double min_eigenvalue_symmetric(const Matrix& m, double tol = 1e-9);

// ---------------------------------------------------------------------------
// Shared small helpers.
// ---------------------------------------------------------------------------

/// Runs fn(i) for i in [0, n) over `threads` workers. Work is partitioned
/// by index so results must be written to per-index slots; output is then
/// identical for every worker count.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace sigprop
