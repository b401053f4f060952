#include "sigprop/csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sigprop::csv {

namespace {

bool parse_double(const std::string& token, double& out) {
    const char* begin = token.c_str();
    char* end = nullptr;
    errno = 0;
    out = std::strtod(begin, &end);
    if (end == begin) return false;
    while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
    return *end == '\0';
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> tokens;
    std::string cur;
    std::stringstream ss(line);
    while (std::getline(ss, cur, ',')) {
        // trim surrounding whitespace
        const auto b = cur.find_first_not_of(" \t\r");
        const auto e = cur.find_last_not_of(" \t\r");
        tokens.push_back(b == std::string::npos ? std::string()
                                                : cur.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') tokens.emplace_back();
    return tokens;
}

}  // namespace

Table read_numeric(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    Table table;
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    bool first_data_row = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto tokens = split_line(line);
        double probe;
        if (first_data_row && table.header.empty() && !tokens.empty() &&
            !parse_double(tokens[0], probe)) {
            table.header = std::move(tokens);
            continue;
        }
        std::vector<double> row;
        row.reserve(tokens.size());
        for (std::size_t c = 0; c < tokens.size(); ++c) {
            double v;
            if (!parse_double(tokens[c], v)) {
                throw std::runtime_error(path + ": cannot parse cell at row " +
                                         std::to_string(line_no) + ", column " +
                                         std::to_string(c + 1) + ": '" + tokens[c] + "'");
            }
            row.push_back(v);
        }
        if (first_data_row) {
            width = row.size();
            first_data_row = false;
        } else if (row.size() != width) {
            throw std::runtime_error(path + ": ragged row " + std::to_string(line_no) +
                                     " (expected " + std::to_string(width) + " cells, got " +
                                     std::to_string(row.size()) + ")");
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::string format_value(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_numeric(const std::string& path,
                   const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path);
    if (!header.empty()) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (i) out << ',';
            out << header[i];
        }
        out << '\n';
    }
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << format_value(row[i]);
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace sigprop::csv
