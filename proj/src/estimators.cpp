#include "sigprop/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "sigprop/baselines.hpp"

namespace sigprop {

namespace {

constexpr double kZClamp = 38.0;
constexpr double kMinGridT = 1e-8;  // denominator 1 - 2*sf(t) vanishes at 0

}  // namespace

NullDistribution NullDistribution::normal(double mu, double sigma) {
    if (!(sigma > 0.0)) throw std::domain_error("null distribution: sigma must be > 0");
    NullDistribution d;
    d.kind = Kind::normal;
    d.mu = mu;
    d.sigma = sigma;
    return d;
}

NullDistribution NullDistribution::student_t(int df) {
    if (df < 1) throw std::domain_error("null distribution: df must be >= 1");
    NullDistribution d;
    d.kind = Kind::student_t;
    d.df = df;
    return d;
}

std::string NullDistribution::to_string() const {
    switch (kind) {
        case Kind::identity:
            return "identity";
        case Kind::normal:
            return "normal(mu=" + std::to_string(mu) + ",sigma=" + std::to_string(sigma) + ")";
        case Kind::student_t:
            return "student_t(df=" + std::to_string(df) + ")";
    }
    return "unknown";
}

ZScores inverse_normal_transform(std::span<const double> x, const NullDistribution& f0) {
    ZScores out;
    out.transform = f0.to_string();
    out.z.reserve(x.size());
    for (double v : x) {
        if (!std::isfinite(v)) {
            throw std::domain_error("inverse_normal_transform: non-finite input");
        }
        if (f0.kind == NullDistribution::Kind::identity) {
            out.z.push_back(v);
            continue;
        }
        // Small-tail evaluation: find the upper-tail probability of |.| under
        // F0 and map it back through the normal quantile with the sign.
        double tail;  // P(X > |standardized v|) under F0, symmetric null
        double sign;
        if (f0.kind == NullDistribution::Kind::normal) {
            const double s = (v - f0.mu) / f0.sigma;
            sign = s >= 0.0 ? 1.0 : -1.0;
            tail = std_normal_sf(std::abs(s));
        } else {
            sign = v >= 0.0 ? 1.0 : -1.0;
            tail = student_t_sf(std::abs(v), f0.df);
        }
        double mag;
        if (tail <= 0.0) {
            mag = kZClamp;
            out.clamped = true;
        } else if (tail >= 0.5) {
            mag = 0.0;
        } else {
            mag = -std_normal_quantile(tail);
            if (mag > kZClamp) {
                mag = kZClamp;
                out.clamped = true;
            }
        }
        out.z.push_back(sign * mag);
    }
    return out;
}

namespace {

struct GridMax {
    double value = -std::numeric_limits<double>::infinity();
    double argmax = 0.0;
    bool any = false;
};

// Shared objective: (Fbar - 2 sf - c sf^theta) / (1 - 2 sf) at threshold t,
// with Fbar the strict exceedance fraction.
double objective_at(double count_frac, double t, double c, double theta) {
    const double sf = std_normal_sf(t);
    const double denom = 1.0 - 2.0 * sf;
    const double penalty = sf > 0.0 ? c * std::pow(sf, theta)
                                    : (theta > 0.0 ? 0.0 : c);
    return (count_frac - 2.0 * sf - penalty) / denom;
}

EstimateResult clamp_result(GridMax m, double theta, double c) {
    EstimateResult res;
    res.theta = theta;
    res.c_used = c;
    res.argmax_t = m.argmax;
    if (!m.any) {
        res.pi_hat = 0.0;
        res.clamped = true;
        return res;
    }
    if (m.value < 0.0) {
        res.pi_hat = 0.0;
        res.clamped = true;
    } else if (m.value > 1.0) {
        res.pi_hat = 1.0;
        res.clamped = true;
    } else {
        res.pi_hat = m.value;
    }
    return res;
}

std::vector<double> sorted_abs_checked(const ZScores& z, const char* what) {
    if (z.p() == 0) throw std::domain_error(std::string(what) + ": empty input");
    std::vector<double> a;
    a.reserve(z.p());
    for (double v : z.z) {
        if (!std::isfinite(v)) {
            throw std::domain_error(std::string(what) + ": non-finite z value");
        }
        a.push_back(std::abs(v));
    }
    std::sort(a.begin(), a.end());
    return a;
}

}  // namespace

EstimateResult pi_hat_delta(const ZScores& z, const BoundingSequence& c) {
    validate(c.spec);
    if (c.spec.grid != GridMode::observed) {
        throw std::domain_error("pi_hat_delta: bounding sequence was calibrated on the " +
                                to_string(c.spec.grid) + " grid, expected observed");
    }
    const auto a = sorted_abs_checked(z, "pi_hat_delta");
    const std::size_t p = a.size();
    GridMax m;
    std::size_t k = 0;
    while (k < p) {
        const double t = a[k];
        std::size_t k_end = k;
        while (k_end < p && a[k_end] == t) ++k_end;
        if (t > kMinGridT) {
            const double frac = static_cast<double>(p - k_end) / static_cast<double>(p);
            const double obj = objective_at(frac, t, c.c, c.spec.theta);
            if (!m.any || obj > m.value) {
                m.value = obj;
                m.argmax = t;
            }
            m.any = true;
        }
        k = k_end;
    }
    return clamp_result(m, c.spec.theta, c.c);
}

EstimateResult pi_hat_delta_discrete(const ZScores& z, const BoundingSequence& c_star) {
    validate(c_star.spec);
    if (c_star.spec.grid != GridMode::integer_grid) {
        throw std::domain_error("pi_hat_delta_discrete: bounding sequence was calibrated on the " +
                                to_string(c_star.spec.grid) + " grid, expected integer");
    }
    const auto a = sorted_abs_checked(z, "pi_hat_delta_discrete");
    const std::size_t p = a.size();
    const std::size_t t_max = integer_grid_max(p);
    if (t_max == 0) {
        throw std::domain_error("pi_hat_delta_discrete: integer grid is empty for p = " +
                                std::to_string(p));
    }
    GridMax m;
    for (std::size_t t = 1; t <= t_max; ++t) {
        const double td = static_cast<double>(t);
        const auto above = a.end() - std::upper_bound(a.begin(), a.end(), td);
        const double frac = static_cast<double>(above) / static_cast<double>(p);
        const double obj = objective_at(frac, td, c_star.c, c_star.spec.theta);
        if (!m.any || obj > m.value) {
            m.value = obj;
            m.argmax = td;
        }
        m.any = true;
    }
    return clamp_result(m, c_star.spec.theta, c_star.c);
}

EstimateResult pi_hat_adaptive(const ZScores& z, const BoundingSequence& c_half,
                               const BoundingSequence& c_one) {
    if (c_half.spec.theta != 0.5 || c_one.spec.theta != 1.0) {
        throw std::domain_error("pi_hat_adaptive: expected theta = 0.5 and theta = 1 components");
    }
    if (c_half.spec.grid != c_one.spec.grid) {
        throw std::domain_error("pi_hat_adaptive: mismatched grid modes");
    }
    if (c_half.spec.alpha != c_one.spec.alpha) {
        throw std::domain_error("pi_hat_adaptive: mismatched alpha levels");
    }
    const bool discrete = c_half.spec.grid == GridMode::integer_grid;
    const EstimateResult half = discrete ? pi_hat_delta_discrete(z, c_half)
                                         : pi_hat_delta(z, c_half);
    const EstimateResult one = discrete ? pi_hat_delta_discrete(z, c_one)
                                        : pi_hat_delta(z, c_one);
    EstimateResult res = one.pi_hat >= half.pi_hat ? one : half;
    res.adaptive = true;
    return res;
}

EstimateReport estimate_pipeline(const ZScores& z, const NullReplicates& reps,
                                 double alpha, const PipelineOptions& options) {
    if (reps.p != z.p()) {
        throw std::domain_error("estimate_pipeline: z has dimension " +
                                std::to_string(z.p()) + " but replicates have p = " +
                                std::to_string(reps.p));
    }
    EstimateReport report;
    report.p = z.p();
    report.alpha = alpha;
    report.seed = reps.provenance.seed;
    report.provenance = reps.provenance.to_string();

    const BoundingSpec half_spec{0.5, alpha, GridMode::observed};
    const BoundingSpec one_spec{1.0, alpha, GridMode::observed};
    report.c_half = bounding_sequence(reps, half_spec, options.threads);
    report.c_one = bounding_sequence(reps, one_spec, options.threads);

    report.half = pi_hat_delta(z, report.c_half);
    report.one = pi_hat_delta(z, report.c_one);
    report.adaptive = pi_hat_adaptive(z, report.c_half, report.c_one);
    report.gw = pi_hat_gw(z, options.gw_alpha);
    report.jc = pi_hat_jc(z, options.jc_gamma);

    const auto count_of = [&](const EstimateResult& r) {
        return std::lround(r.pi_hat * static_cast<double>(report.p));
    };
    report.counts = {{"half", count_of(report.half)},
                     {"one", count_of(report.one)},
                     {"adap", count_of(report.adaptive)},
                     {"gw", count_of(report.gw)},
                     {"jc", count_of(report.jc)}};
    return report;
}

std::string report_to_json(const EstimateReport& report) {
    nlohmann::json j{
        {"p", report.p},
        {"alpha", report.alpha},
        {"c_half", report.c_half.c},
        {"c_one", report.c_one.c},
        {"pi_half", report.half.pi_hat},
        {"pi_one", report.one.pi_hat},
        {"pi_adap", report.adaptive.pi_hat},
        {"pi_gw", report.gw.pi_hat},
        {"pi_jc", report.jc.pi_hat},
        {"counts", report.counts},
        {"argmax",
         {{"half", report.half.argmax_t},
          {"one", report.one.argmax_t},
          {"adap", report.adaptive.argmax_t},
          {"gw", report.gw.argmax_t},
          {"jc", report.jc.argmax_t}}},
        {"seed", report.seed},
        {"provenance", report.provenance}};
    return j.dump(2);
}

EstimateReport report_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    EstimateReport report;
    report.p = j.at("p").get<std::size_t>();
    report.alpha = j.at("alpha").get<double>();
    report.c_half.c = j.at("c_half").get<double>();
    report.c_one.c = j.at("c_one").get<double>();
    report.half.pi_hat = j.at("pi_half").get<double>();
    report.one.pi_hat = j.at("pi_one").get<double>();
    report.adaptive.pi_hat = j.at("pi_adap").get<double>();
    report.gw.pi_hat = j.at("pi_gw").get<double>();
    report.jc.pi_hat = j.at("pi_jc").get<double>();
    report.counts = j.at("counts").get<std::map<std::string, long>>();
    const auto& argmax = j.at("argmax");
    report.half.argmax_t = argmax.at("half").get<double>();
    report.one.argmax_t = argmax.at("one").get<double>();
    report.adaptive.argmax_t = argmax.at("adap").get<double>();
    report.gw.argmax_t = argmax.at("gw").get<double>();
    report.jc.argmax_t = argmax.at("jc").get<double>();
    report.seed = j.at("seed").get<std::uint64_t>();
    report.provenance = j.value("provenance", "");
    return report;
}

}  // namespace sigprop
