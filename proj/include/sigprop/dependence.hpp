#pragma once

#include <string>

#include "sigprop/numerics.hpp"

namespace sigprop {

// ---------------------------------------------------------------------------
// Correlation structures and the mean absolute correlation summary.
// ---------------------------------------------------------------------------

struct CorrelationMatrix {
    std::size_t p = 0;
    Matrix entries;     // p x p, symmetric, unit diagonal
    std::string label;  // e.g. "autoregressive(r=0.9)"
};

/// Mean of |entries| over all p^2 cells, diagonal included. Always >= 1/p;
/// equals 1 only when every entry has modulus 1.
struct MacLevel {
    double value = 0.0;
};

/// Sigma_ij = r^|i-j|.
CorrelationMatrix make_autoregressive(std::size_t p, double r);

/// Off-diagonal entries all equal to rho.
CorrelationMatrix make_equal(std::size_t p, double rho);

/// Square diagonal blocks with off-diagonal rho inside each block, zeros
/// outside. A trailing partial block is truncated when block does not
/// divide p.
CorrelationMatrix make_block(std::size_t p, std::size_t block, double rho);

/// Random sparse structure: unit diagonal, off-diagonal value*Bernoulli(prob)
/// mirrored across the diagonal, then shifted positive definite via
/// (S + dI)/(1+d) with d = |lambda_min(S)| + 0.05.
CorrelationMatrix make_sparse_random(std::size_t p, double prob, double value,
                                     RngStream& rng);

MacLevel mac(const CorrelationMatrix& m);

/// Validates symmetry (1e-8), unit diagonal (1e-8), |entry| <= 1 + 1e-8.
/// Throws std::invalid_argument naming the first offending index.
void validate_correlation(const CorrelationMatrix& m);

/// Reads a dense CSV matrix (optional header row auto-detected by a
/// non-numeric first token). Small asymmetry (<= 1e-6) is averaged out;
/// anything worse is rejected with the offending index.
CorrelationMatrix load_correlation(const std::string& path);

/// Writes the matrix as dense CSV with 17 significant digits, so a reload
/// reproduces every entry exactly.
void save_correlation(const CorrelationMatrix& m, const std::string& path);

/// Entrywise Pearson sample correlation of the columns of X (n x p, n >= 2).
/// Throws when a column has zero sample variance, naming the column.
CorrelationMatrix sample_correlation_from_data(const Matrix& x);

}  // namespace sigprop
