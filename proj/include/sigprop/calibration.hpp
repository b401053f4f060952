#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sigprop/dependence.hpp"
#include "sigprop/numerics.hpp"

namespace sigprop {

// ---------------------------------------------------------------------------
// Joint-null replicates and bounding-sequence calibration.
//
// The deviation statistic is the maximum over a threshold grid of
//   |Wbar_p(t) - 2*sf(t)| / sf(t)^theta,
// where Wbar_p(t) is the fraction of the vector strictly exceeding t in
// absolute value. The observed grid evaluates at t = |w_j| (t > 0, strict
// counts); the integer grid uses t in {1, ..., floor(sqrt(5 log p))}.
// ---------------------------------------------------------------------------

enum class GridMode { observed, integer_grid };

std::string to_string(GridMode grid);
GridMode grid_mode_from_string(const std::string& s);

struct BoundingSpec {
    double theta = 0.5;       // bounding function exponent, in [0,1]
    double alpha = 0.1;       // control level, in (0,1)
    GridMode grid = GridMode::observed;
};

void validate(const BoundingSpec& spec);

struct ReplicateProvenance {
    enum class Kind { parametric, permutation, external };
    Kind kind = Kind::external;
    std::string label;        // structure label or file path
    std::uint64_t seed = 0;
    std::string to_string() const;
};

struct NullReplicates {
    std::size_t R = 0;
    std::size_t p = 0;
    std::vector<double> values;  // row-major R x p
    ReplicateProvenance provenance;

    std::span<const double> row(std::size_t r) const {
        return {values.data() + r * p, p};
    }
};

struct BoundingSequence {
    double c = 0.0;
    BoundingSpec spec;
    std::size_t replicates = 0;
    std::uint64_t seed = 0;
    std::string provenance;
};

/// Largest integer threshold of the discretized grid, floor(sqrt(5 log p)).
/// Zero means the grid is empty.
std::size_t integer_grid_max(std::size_t p);

/// The calibration statistic for one null vector. Throws on an empty vector,
/// non-finite entries, or an empty integer grid.
double v_statistic(std::span<const double> w, const BoundingSpec& spec);

/// R rows of N_p(0, Sigma) through one Cholesky factorization; row r draws
/// from its own counter-based stream, so results do not depend on the
/// worker count.
NullReplicates simulate_null_replicates_parametric(const CorrelationMatrix& sigma,
                                                   std::size_t R, std::uint64_t seed,
                                                   unsigned threads = 1);

/// Per-column simple-regression slope statistics mapped through the t CDF
/// and the normal quantile (smaller-tail evaluation; perfect fits clamp to
/// +-38).
std::vector<double> marginal_z_scores(const Matrix& x, std::span<const double> y);

/// Uniform random permutation of 0..n-1 (Fisher-Yates on the given stream).
std::vector<std::size_t> draw_permutation(std::size_t n, RngStream& rng);

/// Row r holds marginal_z_scores(X, y permuted by stream r).
NullReplicates permutation_null_replicates(const Matrix& x, std::span<const double> y,
                                           std::size_t R, std::uint64_t seed,
                                           unsigned threads = 1);

/// Order statistic of rank ceil((1-alpha) R) of the per-row statistics.
BoundingSequence bounding_sequence(const NullReplicates& reps, const BoundingSpec& spec,
                                   unsigned threads = 1);

/// Upper empirical quantile by the same rank convention.
double empirical_upper_quantile(std::vector<double> values, double alpha);

NullReplicates load_null_replicates(const std::string& path);
void save_null_replicates(const NullReplicates& reps, const std::string& path);

/// JSON round trip for calibrated bounding sequences
/// ({c, theta, alpha, grid, R, seed, provenance}).
std::string bounding_sequence_to_json(const BoundingSequence& seq);
BoundingSequence bounding_sequence_from_json(const std::string& text);
void save_bounding_sequence(const BoundingSequence& seq, const std::string& path);
BoundingSequence load_bounding_sequence(const std::string& path);

}  // namespace sigprop
