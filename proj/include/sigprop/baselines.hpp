#pragma once

#include "sigprop/estimators.hpp"

namespace sigprop {

// ---------------------------------------------------------------------------
// Comparison estimators. Both operate on two-sided p-values u_j = 2 sf(|z_j|).
// ---------------------------------------------------------------------------

/// ECDF lower-bound estimator with a DKW envelope eps = sqrt(log(2/alpha)/(2p)):
/// sup over observed u of (Fhat(u) - u - eps) / (1 - u), clamped into [0,1].
/// Grid points with u >= 1 - 1e-8 are excluded.
EstimateResult pi_hat_gw(const ZScores& z, double alpha = 0.05);

/// Empirical characteristic function estimator with the triangular kernel:
/// 1 - p^{-1} sum_j phi(t_p; z_j) with t_p = sqrt(2 gamma log p) and
///   phi(t; z) = int_{-1}^{1} (1 - |xi|) cos(t xi z) exp(t^2 xi^2 / 2) dxi,
/// integrated adaptively to absolute tolerance 1e-8, clamped into [0,1].
EstimateResult pi_hat_jc(const ZScores& z, double gamma = 0.5);

}  // namespace sigprop
