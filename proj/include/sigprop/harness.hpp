#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sigprop/estimators.hpp"

namespace sigprop {

// ---------------------------------------------------------------------------
// Config-driven experiment runner. Every stochastic quantity is keyed by
// (seed, structure, cell, replicate), so results are byte-identical for any
// worker count.
// ---------------------------------------------------------------------------

/// Structure spec grammar: `ar:p=2000,r=0.9`, `equal:p=2000,rho=0.5`,
/// `block:p=2000,size=400,rho=0.5`, `sparse:p=2000,prob=0.1,value=0.9,seed=1`,
/// `file:PATH`. Malformed specs raise std::invalid_argument naming the token.
CorrelationMatrix build_structure(const std::string& spec);

struct SignalSpec {
    std::optional<double> pi;      // exactly one of pi / gamma is set
    std::optional<double> gamma;   // sparsity exponent, pi = p^-gamma

    double proportion(std::size_t p) const;
};

struct CalibrationSettings {
    std::size_t R = 1000;
    double alpha = 0.1;
    GridMode grid = GridMode::observed;
};

struct ExperimentConfig {
    std::vector<std::string> structures;
    std::vector<SignalSpec> signal_grid;     // pi (or gamma) values
    std::vector<double> mu_grid;             // signal mean values
    std::size_t replications = 100;
    CalibrationSettings calibration;
    std::vector<std::string> estimators;     // subset of half/one/adap/gw/jc
    std::uint64_t seed = 1;
    double gw_alpha = 0.05;
    double jc_gamma = 0.5;
};

ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& cfg);
void validate(const ExperimentConfig& cfg);

struct StructureSummary {
    std::string spec;
    std::string label;
    std::size_t p = 0;
    double mac = 0.0;
    double c_half = 0.0;
    double c_one = 0.0;
};

struct CellResult {
    std::size_t structure_index = 0;
    double pi = 0.0;
    double mu = 0.0;
    std::string estimator;
    double mean = 0.0;
    double sd = 0.0;
    std::vector<double> values;  // per-replicate estimates, replicate order
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<StructureSummary> structures;
    std::vector<CellResult> cells;
};

/// Tables 2/3-style experiment: calibrate once per structure, then for each
/// (pi, mu) cell draw signal positions, sample Z ~ N(mu 1_I, Sigma) and run
/// the requested estimators over `replications` replicates.
ExperimentResult run_table_experiment(const ExperimentConfig& cfg, unsigned threads = 1);

struct CoverageCell {
    std::size_t structure_index = 0;
    double pi = 0.0;
    double mu = 0.0;
    std::string estimator;
    double exceedance_rate = 0.0;  // fraction of replicates with pi_hat >= pi
    std::size_t n = 0;
};

struct CoverageResult {
    ExperimentConfig config;
    std::vector<StructureSummary> structures;
    std::vector<CoverageCell> cells;
};

CoverageResult run_coverage_experiment(const ExperimentConfig& cfg, unsigned threads = 1);

struct VarianceCell {
    std::string label;
    double mac = 0.0;
    double t = 0.0;
    double variance = 0.0;   // Monte-Carlo Var(Wbar_p(t))
    double reference = 0.0;  // mac * exp(-t^2/2)
    double ratio = 0.0;
};

/// Monte-Carlo variance of the null exceedance fraction against the
/// mac * exp(-t^2/2) reference scale.
std::vector<VarianceCell> run_variance_check(const std::vector<std::string>& structures,
                                             const std::vector<double>& t_grid,
                                             std::size_t R, std::uint64_t seed,
                                             unsigned threads = 1);

/// One row per structure: MAC level plus both calibrated bounding sequences.
std::vector<StructureSummary> run_mac_c_table(const std::vector<std::string>& structures,
                                              std::size_t R, double alpha,
                                              std::uint64_t seed, unsigned threads = 1);

/// Writes summary.csv (one row per cell), replicates.csv (long format) and
/// manifest.json (config + seed) into dir, creating it if needed.
void emit_results(const ExperimentResult& result, const std::string& dir);

}  // namespace sigprop
