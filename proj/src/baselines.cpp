#include "sigprop/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sigprop {

namespace {

struct Quadrature {
    double t = 0.0;
    double z = 0.0;
    int max_depth = 40;

    double f(double xi) const {
        return (1.0 - xi) * std::cos(t * xi * z) * std::exp(0.5 * t * t * xi * xi);
    }

    double simpson(double a, double b, double fa, double fm, double fb) const {
        return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    }

    double refine(double a, double b, double fa, double fm, double fb, double whole,
                  double eps, int depth) const {
        const double m = 0.5 * (a + b);
        const double lm = 0.5 * (a + m);
        const double rm = 0.5 * (m + b);
        const double flm = f(lm);
        const double frm = f(rm);
        const double left = simpson(a, m, fa, flm, fm);
        const double right = simpson(m, b, fm, frm, fb);
        const double delta = left + right - whole;
        if (std::abs(delta) <= 15.0 * eps) {
            return left + right + delta / 15.0;
        }
        if (depth >= max_depth) {
            throw std::runtime_error(
                "pi_hat_jc: quadrature failed to converge on [" + std::to_string(a) + "," +
                std::to_string(b) + "] at depth " + std::to_string(depth) + " (t=" +
                std::to_string(t) + ", z=" + std::to_string(z) + ")");
        }
        return refine(a, m, fa, flm, fm, left, 0.5 * eps, depth + 1) +
               refine(m, b, fm, frm, fb, right, 0.5 * eps, depth + 1);
    }

    // Integral of (1-|xi|) cos(t xi z) exp(t^2 xi^2/2) over [-1,1]; the
    // integrand is even, so integrate [0,1] and double.
    double characteristic_weight(double eps) const {
        const double fa = f(0.0);
        const double fb = f(1.0);
        const double fm = f(0.5);
        const double whole = simpson(0.0, 1.0, fa, fm, fb);
        return 2.0 * refine(0.0, 1.0, fa, fm, fb, whole, 0.5 * eps, 0);
    }
};

}  // namespace

EstimateResult pi_hat_gw(const ZScores& z, double alpha) {
    if (z.p() == 0) throw std::domain_error("pi_hat_gw: empty input");
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::domain_error("pi_hat_gw: alpha must lie in (0,1)");
    }
    const std::size_t p = z.p();
    std::vector<double> u;
    u.reserve(p);
    for (double v : z.z) {
        if (!std::isfinite(v)) throw std::domain_error("pi_hat_gw: non-finite z value");
        u.push_back(2.0 * std_normal_sf(std::abs(v)));
    }
    std::sort(u.begin(), u.end());
    const double eps = std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(p)));

    EstimateResult res;
    res.theta = std::numeric_limits<double>::quiet_NaN();
    res.c_used = eps;
    double best = -std::numeric_limits<double>::infinity();
    std::size_t k = 0;
    while (k < p) {
        const double uk = u[k];
        std::size_t k_end = k;
        while (k_end < p && u[k_end] == uk) ++k_end;  // Fhat includes ties
        if (uk < 1.0 - 1e-8) {
            const double fhat = static_cast<double>(k_end) / static_cast<double>(p);
            const double obj = (fhat - uk - eps) / (1.0 - uk);
            if (obj > best) {
                best = obj;
                res.argmax_t = uk;
            }
        }
        k = k_end;
    }
    if (best < 0.0) {
        res.pi_hat = 0.0;
        res.clamped = true;
    } else if (best > 1.0) {
        res.pi_hat = 1.0;
        res.clamped = true;
    } else {
        res.pi_hat = best;
    }
    return res;
}

EstimateResult pi_hat_jc(const ZScores& z, double gamma) {
    const std::size_t p = z.p();
    if (p < 2) throw std::domain_error("pi_hat_jc: need p >= 2");
    if (!(gamma > 0.0 && gamma <= 0.5)) {
        throw std::domain_error("pi_hat_jc: gamma must lie in (0, 0.5]");
    }
    const double t = std::sqrt(2.0 * gamma * std::log(static_cast<double>(p)));
    double sum = 0.0;
    for (double v : z.z) {
        if (!std::isfinite(v)) throw std::domain_error("pi_hat_jc: non-finite z value");
        Quadrature q{t, v};
        sum += q.characteristic_weight(1e-8);
    }
    const double raw = 1.0 - sum / static_cast<double>(p);

    EstimateResult res;
    res.theta = std::numeric_limits<double>::quiet_NaN();
    res.c_used = t;
    res.argmax_t = t;
    if (raw < 0.0) {
        res.pi_hat = 0.0;
        res.clamped = true;
    } else if (raw > 1.0) {
        res.pi_hat = 1.0;
        res.clamped = true;
    } else {
        res.pi_hat = raw;
    }
    return res;
}

}  // namespace sigprop
