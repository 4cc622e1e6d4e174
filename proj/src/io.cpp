#include "fockcis/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fockcis::io {

std::string format_double(double v) {
    std::array<char, 64> buf;
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc())
        throw std::runtime_error("format_double: conversion failed");
    return std::string(buf.data(), ptr);
}

namespace {

std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) {
        // trim spaces
        std::size_t b = field.find_first_not_of(" \t\r");
        std::size_t e = field.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos
                          ? std::string()
                          : field.substr(b, e - b + 1));
    }
    return out;
}

double parse_double(const std::string& s, const std::string& path, int line) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        std::ostringstream os;
        os << path << ":" << line << ": cannot parse number '" << s << "'";
        throw std::runtime_error(os.str());
    }
}

std::ifstream open_in(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open for reading: " + path);
    return f;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    return f;
}

}  // namespace

PointSequence read_sequence_csv(const std::string& path) {
    std::ifstream f = open_in(path);
    std::string line;
    int lineno = 0;
    std::vector<LogPoint> pts;
    bool header_seen = false;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        auto fields = split_csv_row(line);
        if (!header_seen) {
            header_seen = true;
            if (fields.size() >= 2 && fields[0] == "t" && fields[1] == "theta")
                continue;  // header row
            std::ostringstream os;
            os << path << ":" << lineno << ": expected header 't,theta'";
            throw std::runtime_error(os.str());
        }
        if (fields.size() != 2) {
            std::ostringstream os;
            os << path << ":" << lineno << ": expected 2 fields, got "
               << fields.size();
            throw std::runtime_error(os.str());
        }
        double t = parse_double(fields[0], path, lineno);
        double theta = parse_double(fields[1], path, lineno);
        pts.push_back(LogPoint::from_log(t, theta));
    }
    if (pts.empty())
        throw std::runtime_error(path + ": no points in sequence file");
    return PointSequence::from_points(std::move(pts));
}

void write_sequence_csv(const std::string& path, const PointSequence& g) {
    std::ofstream f = open_out(path);
    f << "t,theta\n";
    for (const auto& p : g.points)
        f << format_double(p.t) << "," << format_double(p.theta) << "\n";
}

void write_reference_csv(const std::string& path,
                         const ReferenceSequence& ref,
                         const std::vector<double>& log_sigma_norm) {
    std::ofstream f = open_out(path);
    f << "n,y,log_sigma_norm\n";
    for (std::size_t n = 0; n < ref.size(); ++n) {
        f << n << "," << format_double(ref.y[n]) << ",";
        f << (n < log_sigma_norm.size() ? format_double(log_sigma_norm[n])
                                        : std::string(""));
        f << "\n";
    }
}

void write_norm_table_csv(const std::string& path, const NormTable& quad,
                          const NormTable& asym) {
    std::ofstream f = open_out(path);
    f << "n,log_norm_quadrature,log_norm_asymptotic\n";
    std::size_t n = std::min(quad.log_monomial_norm.size(),
                             asym.log_monomial_norm.size());
    for (std::size_t i = 0; i < n; ++i)
        f << i << "," << format_double(quad.log_monomial_norm[i]) << ","
          << format_double(asym.log_monomial_norm[i]) << "\n";
}

CoefficientVector read_coefficients_csv(const std::string& path, double p) {
    std::ifstream f = open_in(path);
    CoefficientVector v;
    v.p = p;
    std::string line;
    int lineno = 0;
    bool header_seen = false;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        auto fields = split_csv_row(line);
        if (!header_seen) {
            header_seen = true;
            if (fields.size() >= 3 && fields[0] == "n") continue;
            std::ostringstream os;
            os << path << ":" << lineno << ": expected header 'n,re,im'";
            throw std::runtime_error(os.str());
        }
        if (fields.size() != 3) {
            std::ostringstream os;
            os << path << ":" << lineno << ": expected 3 fields, got "
               << fields.size();
            throw std::runtime_error(os.str());
        }
        long n = static_cast<long>(parse_double(fields[0], path, lineno));
        if (n < 0 || n > 1000000) {
            std::ostringstream os;
            os << path << ":" << lineno << ": index out of range";
            throw std::runtime_error(os.str());
        }
        double re = parse_double(fields[1], path, lineno);
        double im = parse_double(fields[2], path, lineno);
        if (static_cast<std::size_t>(n) >= v.values.size())
            v.values.resize(n + 1, {0.0, 0.0});
        v.values[n] = {re, im};
    }
    return v;
}

void write_values_csv(const std::string& path,
                      const std::vector<std::array<double, 2>>& values) {
    std::ofstream f = open_out(path);
    f << "n,re,im\n";
    for (std::size_t n = 0; n < values.size(); ++n)
        f << n << "," << format_double(values[n][0]) << ","
          << format_double(values[n][1]) << "\n";
}

void write_gram_csv(const std::string& path, const GramMatrix& gm) {
    std::ofstream f = open_out(path);
    for (int j = 0; j < gm.size; ++j) {
        for (int k = 0; k < gm.size; ++k) {
            if (k) f << ",";
            f << format_double(gm.at(j, k).real()) << ","
              << format_double(gm.at(j, k).imag());
        }
        f << "\n";
    }
}

ordered_json classification_json(const ClassificationReport& rep) {
    ordered_json j;
    j["verdict"] = rep.verdict;
    j["separation"] = rep.separation;
    j["sup_psi2_delta"] = rep.sup_psi2_delta;
    ordered_json table = ordered_json::object();
    for (const auto& [N, v] : rep.delta_N_table)
        table[std::to_string(N)] = v;
    j["delta_N_table"] = table;
    j["horizon"] = rep.horizon;
    if (!rep.annotation.empty()) j["annotation"] = rep.annotation;
    j["units"] = {{"separation", "d_log (dimensionless)"},
                  {"delta_N", "dimensionless; critical value 0.5"},
                  {"radial_coordinates", "natural log of |z|"}};
    return j;
}

ordered_json density_json(const DensityReport& rep) {
    ordered_json j;
    j["lower"] = rep.lower;
    j["upper"] = rep.upper;
    j["R_used"] = rep.R_used;
    j["r_grid"] = rep.r_grid;
    j["units"] = {{"densities", "points per unit of psi'; critical value 1/p"},
                  {"r_grid", "psi' coordinate"}};
    return j;
}

ordered_json riesz_json(const RieszReport& rep) {
    ordered_json j;
    j["sizes"] = rep.sizes;
    j["lower_bounds"] = rep.lower_bounds;
    j["upper_bounds"] = rep.upper_bounds;
    j["condition_trend"] = rep.condition_trend;
    j["units"] = {{"bounds", "eigenvalues of the normalized kernel Gram"}};
    return j;
}

ordered_json regularity_json(const RegularityReport& rep) {
    ordered_json j;
    j["verdict"] = rep.verdict;
    j["psi_prime_increasing_to_inf"] = rep.psi_prime_increasing_to_inf;
    j["psi_double_positive_nonincreasing"] =
        rep.psi_double_positive_nonincreasing;
    j["grid"] = rep.grid;
    j["third_derivative_ratio"] = rep.third_derivative_ratio;
    j["description"] = rep.description;
    j["units"] = {{"grid", "t = natural log of |z|"},
                  {"third_derivative_ratio", "|psi'''| / (psi'')^{5/3}"}};
    return j;
}

void write_json(const std::string& path, const ordered_json& j) {
    std::ofstream f = open_out(path);
    f << j.dump(2) << "\n";
}

}  // namespace fockcis::io
