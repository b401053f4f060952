#include "sigprop/dependence.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "sigprop/csv.hpp"

namespace sigprop {

namespace {

std::string fmt_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

CorrelationMatrix with_unit_diagonal(std::size_t p, const std::string& label) {
    CorrelationMatrix m;
    m.p = p;
    m.entries = Matrix(p, p, 0.0);
    m.label = label;
    for (std::size_t i = 0; i < p; ++i) m.entries(i, i) = 1.0;
    return m;
}

}  // namespace

CorrelationMatrix make_autoregressive(std::size_t p, double r) {
    if (p < 1) throw std::domain_error("make_autoregressive: p must be >= 1");
    if (!(std::abs(r) < 1.0)) {
        throw std::domain_error("make_autoregressive: |r| must be < 1");
    }
    auto m = with_unit_diagonal(p, "autoregressive(r=" + fmt_g(r) + ")");
    std::vector<double> powers(p, 1.0);
    for (std::size_t k = 1; k < p; ++k) powers[k] = powers[k - 1] * r;
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = i + 1; j < p; ++j) {
            const double v = powers[j - i];
            m.entries(i, j) = v;
            m.entries(j, i) = v;
        }
    }
    return m;
}

CorrelationMatrix make_equal(std::size_t p, double rho) {
    if (p < 1) throw std::domain_error("make_equal: p must be >= 1");
    if (!(rho >= 0.0 && rho < 1.0)) {
        throw std::domain_error("make_equal: rho must lie in [0,1)");
    }
    auto m = with_unit_diagonal(p, "equal(rho=" + fmt_g(rho) + ")");
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            if (i != j) m.entries(i, j) = rho;
        }
    }
    return m;
}

CorrelationMatrix make_block(std::size_t p, std::size_t block, double rho) {
    if (p < 1 || block < 1) {
        throw std::domain_error("make_block: p and block must be >= 1");
    }
    if (!(rho >= 0.0 && rho < 1.0)) {
        throw std::domain_error("make_block: rho must lie in [0,1)");
    }
    auto m = with_unit_diagonal(
        p, "block(size=" + std::to_string(block) + ";rho=" + fmt_g(rho) + ")");
    for (std::size_t start = 0; start < p; start += block) {
        const std::size_t end = std::min(p, start + block);
        for (std::size_t i = start; i < end; ++i) {
            for (std::size_t j = i + 1; j < end; ++j) {
                m.entries(i, j) = rho;
                m.entries(j, i) = rho;
            }
        }
    }
    return m;
}

CorrelationMatrix make_sparse_random(std::size_t p, double prob, double value,
                                     RngStream& rng) {
    if (p < 1) throw std::domain_error("make_sparse_random: p must be >= 1");
    if (!(prob > 0.0 && prob < 1.0)) {
        throw std::domain_error("make_sparse_random: prob must lie in (0,1)");
    }
    if (!(std::abs(value) < 1.0)) {
        throw std::domain_error("make_sparse_random: |value| must be < 1");
    }
    auto m = with_unit_diagonal(p, "sparse(prob=" + fmt_g(prob) +
                                       ";value=" + fmt_g(value) + ")");
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = i + 1; j < p; ++j) {
            if (rng.uniform01() < prob) {
                m.entries(i, j) = value;
                m.entries(j, i) = value;
            }
        }
    }
    const double lambda_min = min_eigenvalue_symmetric(m.entries);
    const double shift = std::abs(lambda_min) + 0.05;
    const double scale = 1.0 / (1.0 + shift);
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            m.entries(i, j) = i == j ? 1.0 : m.entries(i, j) * scale;
        }
    }
    return m;
}

MacLevel mac(const CorrelationMatrix& m) {
    double total = 0.0;
    for (double v : m.entries.data) total += std::abs(v);
    return MacLevel{total / (static_cast<double>(m.p) * static_cast<double>(m.p))};
}

void validate_correlation(const CorrelationMatrix& m) {
    if (m.entries.rows != m.p || m.entries.cols != m.p || m.p == 0) {
        throw std::invalid_argument("correlation matrix: dimensions are inconsistent");
    }
    for (std::size_t i = 0; i < m.p; ++i) {
        if (std::abs(m.entries(i, i) - 1.0) > 1e-8) {
            throw std::invalid_argument("correlation matrix: diagonal entry (" +
                                        std::to_string(i) + "," + std::to_string(i) +
                                        ") is not 1");
        }
        for (std::size_t j = 0; j < m.p; ++j) {
            if (std::abs(m.entries(i, j)) > 1.0 + 1e-8) {
                throw std::invalid_argument("correlation matrix: entry (" + std::to_string(i) +
                                            "," + std::to_string(j) + ") exceeds 1 in modulus");
            }
            if (j > i && std::abs(m.entries(i, j) - m.entries(j, i)) > 1e-8) {
                throw std::invalid_argument("correlation matrix: asymmetric at (" +
                                            std::to_string(i) + "," + std::to_string(j) + ")");
            }
        }
    }
}

CorrelationMatrix load_correlation(const std::string& path) {
    const auto table = csv::read_numeric(path);
    const std::size_t p = table.rows.size();
    if (p == 0) throw std::invalid_argument(path + ": empty matrix");
    CorrelationMatrix m;
    m.p = p;
    m.label = path;
    m.entries = Matrix(p, p, 0.0);
    for (std::size_t i = 0; i < p; ++i) {
        if (table.rows[i].size() != p) {
            throw std::invalid_argument(path + ": matrix is not square (row " +
                                        std::to_string(i + 1) + " has " +
                                        std::to_string(table.rows[i].size()) + " of " +
                                        std::to_string(p) + " columns)");
        }
        for (std::size_t j = 0; j < p; ++j) m.entries(i, j) = table.rows[i][j];
    }
    for (std::size_t i = 0; i < p; ++i) {
        if (std::abs(m.entries(i, i) - 1.0) > 1e-6) {
            throw std::invalid_argument(path + ": diagonal entry (" + std::to_string(i) + "," +
                                        std::to_string(i) + ") is " +
                                        csv::format_value(m.entries(i, i)) + ", expected 1");
        }
        for (std::size_t j = i + 1; j < p; ++j) {
            if (std::abs(m.entries(i, j) - m.entries(j, i)) > 1e-6) {
                throw std::invalid_argument(path + ": asymmetry beyond 1e-6 at (" +
                                            std::to_string(i) + "," + std::to_string(j) + ")");
            }
            const double avg = 0.5 * (m.entries(i, j) + m.entries(j, i));
            m.entries(i, j) = avg;
            m.entries(j, i) = avg;
            if (std::abs(avg) > 1.0 + 1e-6) {
                throw std::invalid_argument(path + ": entry (" + std::to_string(i) + "," +
                                            std::to_string(j) + ") exceeds 1 in modulus");
            }
        }
    }
    return m;
}

void save_correlation(const CorrelationMatrix& m, const std::string& path) {
    std::vector<std::vector<double>> rows(m.p);
    for (std::size_t i = 0; i < m.p; ++i) {
        rows[i].assign(m.entries.row(i), m.entries.row(i) + m.p);
    }
    csv::write_numeric(path, {}, rows);
}

CorrelationMatrix sample_correlation_from_data(const Matrix& x) {
    const std::size_t n = x.rows;
    const std::size_t p = x.cols;
    if (n < 2) throw std::domain_error("sample_correlation_from_data: need n >= 2 rows");
    std::vector<double> mean(p, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = x.row(i);
        for (std::size_t j = 0; j < p; ++j) mean[j] += row[j];
    }
    for (auto& v : mean) v /= static_cast<double>(n);
    std::vector<double> sd(p, 0.0);
    Matrix centered(n, p);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = x.row(i);
        double* crow = centered.row(i);
        for (std::size_t j = 0; j < p; ++j) {
            crow[j] = row[j] - mean[j];
            sd[j] += crow[j] * crow[j];
        }
    }
    for (std::size_t j = 0; j < p; ++j) {
        if (!(sd[j] > 0.0)) {
            throw std::domain_error("sample_correlation_from_data: column " +
                                    std::to_string(j) + " has zero sample variance");
        }
        sd[j] = std::sqrt(sd[j]);
    }
    CorrelationMatrix m;
    m.p = p;
    m.label = "sample correlation";
    m.entries = Matrix(p, p, 0.0);
    for (std::size_t j = 0; j < p; ++j) {
        m.entries(j, j) = 1.0;
        for (std::size_t k = j + 1; k < p; ++k) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += centered(i, j) * centered(i, k);
            const double r = s / (sd[j] * sd[k]);
            m.entries(j, k) = r;
            m.entries(k, j) = r;
        }
    }
    return m;
}

}  // namespace sigprop
