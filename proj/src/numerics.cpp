#include "sigprop/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <thread>

namespace sigprop {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488016887242097;
constexpr double kLogSqrt2Pi = 0.91893853320467274178032973640562;

void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) {
        throw std::domain_error(std::string(what) + ": non-finite input");
    }
}

}  // namespace

double std_normal_sf(double t) {
    require_finite(t, "std_normal_sf");
    return 0.5 * std::erfc(t / kSqrt2);
}

double std_normal_cdf(double t) {
    require_finite(t, "std_normal_cdf");
    return 0.5 * std::erfc(-t / kSqrt2);
}

double std_normal_log_sf(double t) {
    require_finite(t, "std_normal_log_sf");
    if (t < 30.0) {
        // erfc is a normalized double here; its log is exact enough.
        return std::log(std_normal_sf(t));
    }
    // Mills ratio continued fraction: sf(t) = phi(t) / (t + 1/(t + 2/(t + ...)))
    double cf = 0.0;
    for (int k = 60; k >= 1; --k) {
        cf = static_cast<double>(k) / (t + cf);
    }
    return -0.5 * t * t - kLogSqrt2Pi - std::log(t + cf);
}

// Wichura (1988), algorithm AS 241, PPND16.
double std_normal_quantile(double u) {
    require_finite(u, "std_normal_quantile");
    if (!(u > 0.0 && u < 1.0)) {
        throw std::domain_error("std_normal_quantile: argument must lie in (0,1)");
    }
    const double q = u - 0.5;
    double r;
    if (std::abs(q) <= 0.425) {
        r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                     6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                   1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                 1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
               (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                     3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                   5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
                 4.2313330701600911252e1) * r + 1.0);
    }
    r = q < 0.0 ? u : 1.0 - u;
    r = std::sqrt(-std::log(r));
    double x;
    if (r <= 5.0) {
        r -= 1.6;
        x = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
              4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
              2.05319162663775882187e0) * r + 1.0);
    } else {
        r -= 5.0;
        x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
              5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
    }
    return q < 0.0 ? -x : x;
}

namespace {

// Continued fraction for the regularized incomplete beta (Lentz's method).
double beta_cf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16;
    constexpr double kTiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) return h;
    }
    throw std::runtime_error("incomplete beta continued fraction failed to converge");
}

double regularized_incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_cf(a, b, x) / a;
    }
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

}  // namespace

double student_t_sf(double x, int df) {
    require_finite(x, "student_t_sf");
    if (df < 1) throw std::domain_error("student_t_sf: df must be >= 1");
    if (x == 0.0) return 0.5;
    const double v = static_cast<double>(df);
    const double ib = regularized_incomplete_beta(v / 2.0, 0.5, v / (v + x * x));
    return x > 0.0 ? 0.5 * ib : 1.0 - 0.5 * ib;
}

double student_t_cdf(double x, int df) {
    require_finite(x, "student_t_cdf");
    if (df < 1) throw std::domain_error("student_t_cdf: df must be >= 1");
    return 1.0 - student_t_sf(x, df);
}

// ---------------------------------------------------------------------------
// RngStream
// ---------------------------------------------------------------------------

namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

// SplitMix64 finalizer (Stafford mix 13).
constexpr std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id),
      key_(mix64(mix64(seed + kGamma) ^ mix64(stream_id * kGamma + 1))) {}

std::uint64_t RngStream::next_u64() {
    counter_ += 1;
    return mix64(key_ + counter_ * kGamma);
}

double RngStream::uniform01() {
    // 53 random bits, offset to the open interval.
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() { return std_normal_quantile(uniform01()); }

std::uint64_t RngStream::uniform_below(std::uint64_t n) {
    if (n == 0) throw std::domain_error("uniform_below: n must be positive");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % n;
}

std::uint64_t compose_stream_id(std::initializer_list<std::uint64_t> parts) {
    std::uint64_t acc = 0x5CA1AB1E0DDBA11ULL;
    for (std::uint64_t p : parts) {
        acc = mix64(acc ^ (p + kGamma));
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Cholesky and sampling
// ---------------------------------------------------------------------------

NotPositiveDefinite::NotPositiveDefinite(std::size_t index)
    : std::runtime_error("matrix is not positive definite (pivot " +
                         std::to_string(index) + ")"),
      pivot_index(index) {}

CholeskyFactor cholesky(const Matrix& m) {
    if (m.rows != m.cols) {
        throw std::domain_error("cholesky: matrix must be square");
    }
    const std::size_t n = m.rows;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (std::abs(m(i, j) - m(j, i)) > 1e-10) {
                throw std::domain_error("cholesky: matrix is not symmetric at (" +
                                        std::to_string(i) + "," + std::to_string(j) + ")");
            }
        }
    }
    CholeskyFactor f;
    f.dim = n;
    f.lower = Matrix(n, n, 0.0);
    Matrix& L = f.lower;
    for (std::size_t j = 0; j < n; ++j) {
        const double* lj = L.row(j);
        double diag = m(j, j);
        for (std::size_t k = 0; k < j; ++k) diag -= lj[k] * lj[k];
        if (!(diag > 0.0)) throw NotPositiveDefinite(j);
        const double ljj = std::sqrt(diag);
        L(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            const double* li = L.row(i);
            double s = m(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= li[k] * lj[k];
            L(i, j) = s / ljj;
        }
    }
    return f;
}

std::vector<double> sample_mvn(const CholeskyFactor& factor,
                               std::span<const double> mean, RngStream& rng) {
    const std::size_t n = factor.dim;
    if (mean.size() != n) {
        throw std::domain_error("sample_mvn: mean dimension " + std::to_string(mean.size()) +
                                " does not match factor dimension " + std::to_string(n));
    }
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = rng.normal();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* li = factor.lower.row(i);
        double s = 0.0;
        for (std::size_t k = 0; k <= i; ++k) s += li[k] * g[k];
        out[i] = mean[i] + s;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Lanczos smallest eigenvalue
// ---------------------------------------------------------------------------

namespace {

// Eigenvalues of a symmetric tridiagonal matrix by bisection on the Sturm
// sequence count. Returns the k-th smallest (k = 0 for the minimum).
double tridiag_kth_eigenvalue(const std::vector<double>& alpha,
                              const std::vector<double>& beta, std::size_t k) {
    const std::size_t n = alpha.size();
    double lo = alpha[0], hi = alpha[0];
    for (std::size_t i = 0; i < n; ++i) {
        const double b1 = i > 0 ? std::abs(beta[i - 1]) : 0.0;
        const double b2 = i + 1 < n ? std::abs(beta[i]) : 0.0;
        lo = std::min(lo, alpha[i] - b1 - b2);
        hi = std::max(hi, alpha[i] + b1 + b2);
    }
    auto count_below = [&](double x) {
        // Number of eigenvalues strictly less than x.
        std::size_t count = 0;
        double q = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double b2 = i > 0 ? beta[i - 1] * beta[i - 1] : 0.0;
            q = alpha[i] - x - (q != 0.0 ? b2 / q : b2 / 1e-300);
            if (q < 0.0) ++count;
        }
        return count;
    };
    for (int iter = 0; iter < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(lo)); ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (count_below(mid) > k) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double min_eigenvalue_symmetric(const Matrix& m, double tol) {
    if (m.rows != m.cols || m.rows == 0) {
        throw std::domain_error("min_eigenvalue_symmetric: matrix must be square and non-empty");
    }
    const std::size_t n = m.rows;
    if (n == 1) return m(0, 0);

    const std::size_t max_steps = std::min<std::size_t>(n, 500);
    std::vector<std::vector<double>> basis;
    std::vector<double> alpha, beta;

    RngStream rng(0x1A2C05EE, 0);  // fixed internal stream: result is deterministic
    std::vector<double> v(n);
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = rng.normal();
        norm += v[i] * v[i];
    }
    norm = std::sqrt(norm);
    for (auto& x : v) x /= norm;

    // Spectrum scale for the convergence test.
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = 0.0;
        for (std::size_t j = 0; j < n; ++j) r += std::abs(m(i, j));
        scale = std::max(scale, r);
    }

    std::vector<double> w(n);
    double last = 0.0;
    for (std::size_t step = 0; step < max_steps; ++step) {
        basis.push_back(v);
        // w = M v
        for (std::size_t i = 0; i < n; ++i) {
            const double* row = m.row(i);
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += row[j] * v[j];
            w[i] = s;
        }
        double a = 0.0;
        for (std::size_t i = 0; i < n; ++i) a += w[i] * v[i];
        alpha.push_back(a);

        // Full reorthogonalization, applied twice.
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& q : basis) {
                double dot = 0.0;
                for (std::size_t i = 0; i < n; ++i) dot += w[i] * q[i];
                for (std::size_t i = 0; i < n; ++i) w[i] -= dot * q[i];
            }
        }
        double b = 0.0;
        for (std::size_t i = 0; i < n; ++i) b += w[i] * w[i];
        b = std::sqrt(b);

        const double ritz = tridiag_kth_eigenvalue(alpha, beta, 0);
        if (step >= 10 && (b < tol * scale || std::abs(ritz - last) < tol * scale)) {
            return ritz;
        }
        last = ritz;
        if (b < 1e-300) return ritz;  // invariant subspace
        beta.push_back(b);
        for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / b;
    }
    return tridiag_kth_eigenvalue(alpha, beta, 0);
}

// ---------------------------------------------------------------------------
// parallel_for
// ---------------------------------------------------------------------------

void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    if (threads <= 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const unsigned workers = static_cast<unsigned>(
        std::min<std::size_t>(threads, n));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::exception_ptr error;
    std::mutex error_mutex;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace sigprop
