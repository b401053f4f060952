#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "sigprop/calibration.hpp"

namespace sigprop {

// ---------------------------------------------------------------------------
// The proportion estimator family and the adaptive estimator.
// ---------------------------------------------------------------------------

/// Known null distribution of the raw statistics, used by the inverse
/// normal transform.
struct NullDistribution {
    enum class Kind { identity, normal, student_t };
    Kind kind = Kind::identity;
    double mu = 0.0;
    double sigma = 1.0;
    int df = 1;

    static NullDistribution identity() { return {}; }
    static NullDistribution normal(double mu, double sigma);
    static NullDistribution student_t(int df);
    std::string to_string() const;
};

struct ZScores {
    std::vector<double> z;
    std::string transform = "identity";
    bool clamped = false;  // some entry hit the +-38 tail clamp

    std::size_t p() const { return z.size(); }
};

/// z_j = Phi^{-1}(F0(x_j)), evaluated on the smaller tail. Values whose
/// null CDF rounds to 0 or 1 clamp to +-38 and set the clamped flag.
ZScores inverse_normal_transform(std::span<const double> x, const NullDistribution& f0);

struct EstimateResult {
    double pi_hat = 0.0;
    double theta = 0.0;       // exponent used; for adaptive, the winning one
    bool adaptive = false;
    double c_used = 0.0;
    double argmax_t = 0.0;    // grid point attaining the maximum
    bool clamped = false;     // raw supremum fell outside [0,1]
};

/// Observed-grid estimator: maximum over t in {|z_j| : |z_j| > 1e-8} of
///   (Fbar_p(t) - 2 sf(t) - c sf(t)^theta) / (1 - 2 sf(t)),
/// clamped into [0,1]. Requires an observed-grid bounding sequence.
EstimateResult pi_hat_delta(const ZScores& z, const BoundingSequence& c);

/// Same objective on the integer grid {1, ..., floor(sqrt(5 log p))}.
EstimateResult pi_hat_delta_discrete(const ZScores& z, const BoundingSequence& c_star);

/// max of the theta = 0.5 and theta = 1 estimates. The two bounding
/// sequences must share grid mode and alpha.
EstimateResult pi_hat_adaptive(const ZScores& z, const BoundingSequence& c_half,
                               const BoundingSequence& c_one);

// ---------------------------------------------------------------------------
// End-to-end pipeline: calibrate both bounding sequences from supplied null
// replicates, then report the family, the adaptive estimate and baselines.
// ---------------------------------------------------------------------------

struct PipelineOptions {
    double gw_alpha = 0.05;
    double jc_gamma = 0.5;
    unsigned threads = 1;
};

struct EstimateReport {
    std::size_t p = 0;
    double alpha = 0.1;
    BoundingSequence c_half;
    BoundingSequence c_one;
    EstimateResult half;
    EstimateResult one;
    EstimateResult adaptive;
    EstimateResult gw;
    EstimateResult jc;
    std::map<std::string, long> counts;  // round(pi * p) per method
    std::uint64_t seed = 0;
    std::string provenance;
};

EstimateReport estimate_pipeline(const ZScores& z, const NullReplicates& reps,
                                 double alpha, const PipelineOptions& options = {});

std::string report_to_json(const EstimateReport& report);
EstimateReport report_from_json(const std::string& text);

}  // namespace sigprop
