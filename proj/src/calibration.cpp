#include "sigprop/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "sigprop/csv.hpp"

namespace sigprop {

std::string to_string(GridMode grid) {
    return grid == GridMode::observed ? "observed" : "integer";
}

GridMode grid_mode_from_string(const std::string& s) {
    if (s == "observed") return GridMode::observed;
    if (s == "integer") return GridMode::integer_grid;
    throw std::domain_error("unknown grid mode '" + s + "' (expected observed or integer)");
}

void validate(const BoundingSpec& spec) {
    if (!(spec.theta >= 0.0 && spec.theta <= 1.0)) {
        throw std::domain_error("bounding spec: theta must lie in [0,1]");
    }
    if (!(spec.alpha > 0.0 && spec.alpha < 1.0)) {
        throw std::domain_error("bounding spec: alpha must lie in (0,1)");
    }
}

std::string ReplicateProvenance::to_string() const {
    switch (kind) {
        case Kind::parametric:
            return "parametric(" + label + ",seed=" + std::to_string(seed) + ")";
        case Kind::permutation:
            return "permutation(seed=" + std::to_string(seed) + ")";
        case Kind::external:
            return "external(" + label + ")";
    }
    return "unknown";
}

std::size_t integer_grid_max(std::size_t p) {
    if (p < 2) return 0;
    return static_cast<std::size_t>(std::floor(std::sqrt(5.0 * std::log(static_cast<double>(p)))));
}

namespace {

// Threshold where sf(t) stops being a normalized double; beyond it the
// ratio is formed in log space.
constexpr double kLogSpaceSf = 1e-300;
// Observed grid points above this are dropped (sf underflows outright and
// both statistics are degenerate there).
constexpr double kMaxObservedT = 40.0;

double ratio_at(double count_frac, double t, double theta) {
    const double sf = std_normal_sf(t);
    const double dev = std::abs(count_frac - 2.0 * sf);
    if (sf >= kLogSpaceSf) {
        return dev / std::pow(sf, theta);
    }
    if (dev == 0.0) return 0.0;
    const double log_ratio = std::log(dev) - theta * std_normal_log_sf(t);
    return std::exp(log_ratio);
}

}  // namespace

double v_statistic(std::span<const double> w, const BoundingSpec& spec) {
    validate(spec);
    const std::size_t p = w.size();
    if (p == 0) throw std::domain_error("v_statistic: empty vector");
    std::vector<double> a;
    a.reserve(p);
    for (double x : w) {
        if (!std::isfinite(x)) throw std::domain_error("v_statistic: non-finite entry");
        a.push_back(std::abs(x));
    }
    std::sort(a.begin(), a.end());

    double best = 0.0;
    if (spec.grid == GridMode::observed) {
        std::size_t k = 0;
        while (k < p) {
            const double t = a[k];
            std::size_t k_end = k;
            while (k_end < p && a[k_end] == t) ++k_end;  // skip ties
            if (t > 0.0 && t <= kMaxObservedT) {
                const double count_frac =
                    static_cast<double>(p - k_end) / static_cast<double>(p);
                best = std::max(best, ratio_at(count_frac, t, spec.theta));
            }
            k = k_end;
        }
    } else {
        const std::size_t t_max = integer_grid_max(p);
        if (t_max == 0) {
            throw std::domain_error("v_statistic: integer grid is empty for p = " +
                                    std::to_string(p));
        }
        for (std::size_t t = 1; t <= t_max; ++t) {
            const double td = static_cast<double>(t);
            const auto above = a.end() - std::upper_bound(a.begin(), a.end(), td);
            const double count_frac =
                static_cast<double>(above) / static_cast<double>(p);
            best = std::max(best, ratio_at(count_frac, td, spec.theta));
        }
    }
    return best;
}

NullReplicates simulate_null_replicates_parametric(const CorrelationMatrix& sigma,
                                                   std::size_t R, std::uint64_t seed,
                                                   unsigned threads) {
    if (R < 1) throw std::domain_error("simulate_null_replicates_parametric: R must be >= 1");
    const auto factor = cholesky(sigma.entries);
    NullReplicates reps;
    reps.R = R;
    reps.p = sigma.p;
    reps.values.resize(R * sigma.p);
    reps.provenance = {ReplicateProvenance::Kind::parametric, sigma.label, seed};
    const std::vector<double> zero(sigma.p, 0.0);
    parallel_for(R, threads, [&](std::size_t r) {
        RngStream rng(seed, compose_stream_id({0x9A7A7ull, r}));
        const auto row = sample_mvn(factor, zero, rng);
        std::copy(row.begin(), row.end(), reps.values.begin() + r * sigma.p);
    });
    return reps;
}

std::vector<double> marginal_z_scores(const Matrix& x, std::span<const double> y) {
    const std::size_t n = x.rows;
    const std::size_t p = x.cols;
    if (n < 3) throw std::domain_error("marginal_z_scores: need n >= 3 observations");
    if (y.size() != n) {
        throw std::domain_error("marginal_z_scores: response length " +
                                std::to_string(y.size()) + " does not match n = " +
                                std::to_string(n));
    }
    double y_mean = 0.0;
    for (double v : y) y_mean += v;
    y_mean /= static_cast<double>(n);
    double syy = 0.0;
    for (double v : y) syy += (v - y_mean) * (v - y_mean);

    const int df = static_cast<int>(n) - 2;
    constexpr double kZClamp = 38.0;
    std::vector<double> z(p);
    for (std::size_t j = 0; j < p; ++j) {
        double x_mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) x_mean += x(i, j);
        x_mean /= static_cast<double>(n);
        double sxx = 0.0, sxy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = x(i, j) - x_mean;
            sxx += d * d;
            sxy += d * (y[i] - y_mean);
        }
        if (!(sxx > 0.0)) {
            throw std::domain_error("marginal_z_scores: column " + std::to_string(j) +
                                    " is constant");
        }
        const double slope = sxy / sxx;
        const double rss = std::max(0.0, syy - slope * sxy);
        const double se2 = rss / static_cast<double>(df) / sxx;
        if (!(se2 > 0.0)) {
            z[j] = slope >= 0.0 ? kZClamp : -kZClamp;  // perfect fit
            continue;
        }
        const double t = slope / std::sqrt(se2);
        const double tail = student_t_sf(std::abs(t), df);
        double mag;
        if (tail <= 0.0) {
            mag = kZClamp;
        } else if (tail >= 0.5) {
            mag = 0.0;
        } else {
            mag = std::min(kZClamp, -std_normal_quantile(tail));
        }
        z[j] = t >= 0.0 ? mag : -mag;
    }
    return z;
}

std::vector<std::size_t> draw_permutation(std::size_t n, RngStream& rng) {
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.uniform_below(i));
        std::swap(perm[i - 1], perm[j]);
    }
    return perm;
}

NullReplicates permutation_null_replicates(const Matrix& x, std::span<const double> y,
                                           std::size_t R, std::uint64_t seed,
                                           unsigned threads) {
    if (R < 1) throw std::domain_error("permutation_null_replicates: R must be >= 1");
    const std::size_t n = x.rows;
    NullReplicates reps;
    reps.R = R;
    reps.p = x.cols;
    reps.values.resize(R * x.cols);
    reps.provenance = {ReplicateProvenance::Kind::permutation, "", seed};
    parallel_for(R, threads, [&](std::size_t r) {
        RngStream rng(seed, compose_stream_id({0x9E2Dull, r}));
        const auto perm = draw_permutation(n, rng);
        std::vector<double> shuffled(n);
        for (std::size_t i = 0; i < n; ++i) shuffled[i] = y[perm[i]];
        const auto z = marginal_z_scores(x, shuffled);
        std::copy(z.begin(), z.end(), reps.values.begin() + r * x.cols);
    });
    return reps;
}

double empirical_upper_quantile(std::vector<double> values, double alpha) {
    if (values.empty()) throw std::domain_error("empirical_upper_quantile: no values");
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::domain_error("empirical_upper_quantile: alpha must lie in (0,1)");
    }
    const std::size_t R = values.size();
    const double raw = std::ceil((1.0 - alpha) * static_cast<double>(R));
    const std::size_t rank =
        std::min(R, static_cast<std::size_t>(std::max(1.0, raw)));
    std::nth_element(values.begin(), values.begin() + (rank - 1), values.end());
    return values[rank - 1];
}

BoundingSequence bounding_sequence(const NullReplicates& reps, const BoundingSpec& spec,
                                   unsigned threads) {
    validate(spec);
    if (reps.R < 1) throw std::domain_error("bounding_sequence: need at least one replicate");
    std::vector<double> vs(reps.R);
    parallel_for(reps.R, threads, [&](std::size_t r) {
        vs[r] = v_statistic(reps.row(r), spec);
    });
    BoundingSequence seq;
    seq.c = empirical_upper_quantile(std::move(vs), spec.alpha);
    seq.spec = spec;
    seq.replicates = reps.R;
    seq.seed = reps.provenance.seed;
    seq.provenance = reps.provenance.to_string();
    return seq;
}

NullReplicates load_null_replicates(const std::string& path) {
    const auto table = csv::read_numeric(path);
    if (table.rows.empty()) throw std::runtime_error(path + ": no replicate rows");
    NullReplicates reps;
    reps.R = table.rows.size();
    reps.p = table.rows.front().size();
    reps.values.reserve(reps.R * reps.p);
    for (const auto& row : table.rows) {
        reps.values.insert(reps.values.end(), row.begin(), row.end());
    }
    reps.provenance = {ReplicateProvenance::Kind::external, path, 0};
    return reps;
}

void save_null_replicates(const NullReplicates& reps, const std::string& path) {
    std::vector<std::vector<double>> rows(reps.R);
    for (std::size_t r = 0; r < reps.R; ++r) {
        const auto row = reps.row(r);
        rows[r].assign(row.begin(), row.end());
    }
    csv::write_numeric(path, {}, rows);
}

std::string bounding_sequence_to_json(const BoundingSequence& seq) {
    nlohmann::json j{{"c", seq.c},
                     {"theta", seq.spec.theta},
                     {"alpha", seq.spec.alpha},
                     {"grid", to_string(seq.spec.grid)},
                     {"R", seq.replicates},
                     {"seed", seq.seed},
                     {"provenance", seq.provenance}};
    return j.dump(2);
}

BoundingSequence bounding_sequence_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    BoundingSequence seq;
    seq.c = j.at("c").get<double>();
    seq.spec.theta = j.at("theta").get<double>();
    seq.spec.alpha = j.at("alpha").get<double>();
    seq.spec.grid = grid_mode_from_string(j.at("grid").get<std::string>());
    seq.replicates = j.at("R").get<std::size_t>();
    seq.seed = j.at("seed").get<std::uint64_t>();
    seq.provenance = j.value("provenance", "");
    return seq;
}

void save_bounding_sequence(const BoundingSequence& seq, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path);
    out << bounding_sequence_to_json(seq) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

BoundingSequence load_bounding_sequence(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return bounding_sequence_from_json(text);
}

}  // namespace sigprop
