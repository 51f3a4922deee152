#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gpsselect/common.hpp"
#include "gpsselect/rng.hpp"

namespace gps {

// Tabular data as loaded: predictors in file order plus the response.
struct RawDataset {
    Mat x;                                // N x p
    Vec y;                                // N
    std::vector<std::string> names;       // p predictor names
    std::string response_name;

    Eigen::Index n() const { return x.rows(); }
    Eigen::Index p() const { return x.cols(); }
};

// Centered response and centered, unit-sum-of-squares predictor columns,
// plus everything needed to map coefficients back to the raw scale.
struct StandardizedDesign {
    Mat x;          // N x p, each column: sum = 0, sum of squares = 1
    Vec y;          // N, sum = 0
    double y_mean = 0.0;
    Vec x_means;    // p
    Vec x_scales;   // p, root sum of squares of the centered raw columns
    std::vector<std::string> names;

    Eigen::Index n() const { return x.rows(); }
    Eigen::Index p() const { return x.cols(); }
};

enum class Correlation { Identity, AR1, Equi };

// Ground truth for simulation studies: y = X beta + eps, eps ~ N(0, sigma^2 I),
// predictors mean-zero Gaussian with the given correlation structure.
struct TrueModel {
    Vec beta;
    double sigma = 1.0;
    Correlation correlation = Correlation::Identity;
    double rho = 0.0;

    Eigen::Index p() const { return beta.size(); }
};

namespace detail {

inline double parse_cell(const std::string& cell, std::size_t row, const std::string& col) {
    const char* b = cell.data();
    const char* e = b + cell.size();
    while (b < e && (*b == ' ' || *b == '\t')) ++b;
    while (e > b && (e[-1] == ' ' || e[-1] == '\t' || e[-1] == '\r')) --e;
    double v = 0.0;
    auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc{} || res.ptr != e || !std::isfinite(v))
        throw input_error("non-numeric cell at data row " + std::to_string(row) +
                          ", column '" + col + "': '" + cell + "'");
    return v;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    if (!out.empty() && !out.back().empty() && out.back().back() == '\r') out.back().pop_back();
    return out;
}

}  // namespace detail

// Loads a comma-separated file with a header row; the named response column
// is extracted, all other columns become predictors in file order.
inline RawDataset load_csv(const std::string& path, const std::string& response) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw input_error("empty file: " + path);
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
        static_cast<unsigned char>(line[1]) == 0xBB && static_cast<unsigned char>(line[2]) == 0xBF)
        line.erase(0, 3);  // UTF-8 BOM

    auto header = detail::split_csv_line(line);
    Eigen::Index resp_col = -1;
    for (std::size_t j = 0; j < header.size(); ++j)
        if (header[j] == response) resp_col = static_cast<Eigen::Index>(j);
    if (resp_col < 0) throw input_error("response column '" + response + "' not found in " + path);
    if (header.size() < 2) throw input_error("need at least one predictor column in " + path);

    std::vector<std::vector<double>> rows;
    std::size_t rowno = 0;
    while (std::getline(in, line)) {
        ++rowno;
        if (line.empty() || line == "\r") continue;
        auto cells = detail::split_csv_line(line);
        if (cells.size() != header.size())
            throw input_error("data row " + std::to_string(rowno) + " has " +
                              std::to_string(cells.size()) + " cells, expected " +
                              std::to_string(header.size()));
        std::vector<double> vals(cells.size());
        for (std::size_t j = 0; j < cells.size(); ++j)
            vals[j] = detail::parse_cell(cells[j], rowno, header[j]);
        rows.push_back(std::move(vals));
    }
    if (rows.size() < 2)
        throw input_error("need at least 2 data rows, got " + std::to_string(rows.size()));

    RawDataset d;
    const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
    const Eigen::Index p = static_cast<Eigen::Index>(header.size()) - 1;
    d.x.resize(n, p);
    d.y.resize(n);
    d.response_name = response;
    for (std::size_t j = 0; j < header.size(); ++j)
        if (static_cast<Eigen::Index>(j) != resp_col) d.names.push_back(header[j]);
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Index jj = 0;
        for (std::size_t j = 0; j < header.size(); ++j) {
            if (static_cast<Eigen::Index>(j) == resp_col)
                d.y[i] = rows[i][j];
            else
                d.x(i, jj++) = rows[i][j];
        }
    }
    return d;
}

// Centers y and each predictor column, then scales each column to unit sum
// of squares. Constant columns are an error, never dropped.
inline StandardizedDesign standardize(const RawDataset& raw) {
    if (raw.n() < 2) throw input_error("standardize: need at least 2 rows");
    StandardizedDesign d;
    d.names = raw.names;
    d.y_mean = raw.y.mean();
    d.y = raw.y.array() - d.y_mean;
    d.x_means = raw.x.colwise().mean();
    d.x = raw.x.rowwise() - d.x_means.transpose();
    d.x_scales.resize(raw.p());
    for (Eigen::Index j = 0; j < raw.p(); ++j) {
        double ss = d.x.col(j).squaredNorm();
        if (!(ss > 0.0)) {
            std::string name = j < static_cast<Eigen::Index>(d.names.size())
                                   ? d.names[j]
                                   : ("#" + std::to_string(j));
            throw input_error("constant predictor column '" + name + "' (zero variance)");
        }
        d.x_scales[j] = std::sqrt(ss);
        d.x.col(j) /= d.x_scales[j];
    }
    return d;
}

// Maps standardized-scale coefficients to the raw scale. The returned pair
// predicts raw y from raw predictors: y_hat = intercept + x_raw . beta_orig.
inline std::pair<double, Vec> destandardize(const Vec& beta_std, const StandardizedDesign& design) {
    if (beta_std.size() != design.p())
        throw input_error("destandardize: coefficient length " + std::to_string(beta_std.size()) +
                          " does not match design p=" + std::to_string(design.p()));
    Vec beta_orig = beta_std.array() / design.x_scales.array();
    double intercept = design.y_mean - beta_orig.dot(design.x_means);
    return {intercept, beta_orig};
}

// Draws n rows from the model: X ~ N(0, C) via Cholesky of the correlation
// matrix, y = X beta + sigma * eps. Deterministic given the seed.
inline RawDataset generate_gaussian(const TrueModel& model, Eigen::Index n, std::uint64_t seed) {
    if (n < 2) throw input_error("generate_gaussian: need n >= 2");
    const Eigen::Index p = model.p();
    if (p < 1) throw input_error("generate_gaussian: empty beta");

    Mat corr = Mat::Identity(p, p);
    switch (model.correlation) {
        case Correlation::Identity:
            break;
        case Correlation::AR1:
            if (!(model.rho > -1.0 && model.rho < 1.0))
                throw input_error("AR1 correlation requires rho in (-1, 1)");
            for (Eigen::Index i = 0; i < p; ++i)
                for (Eigen::Index j = 0; j < p; ++j)
                    corr(i, j) = std::pow(model.rho, std::abs(static_cast<double>(i - j)));
            break;
        case Correlation::Equi:
            if (!(model.rho > -1.0 / static_cast<double>(p - 1) && model.rho < 1.0))
                throw input_error("equicorrelation requires rho in (-1/(p-1), 1)");
            for (Eigen::Index i = 0; i < p; ++i)
                for (Eigen::Index j = 0; j < p; ++j)
                    if (i != j) corr(i, j) = model.rho;
            break;
    }
    Eigen::LLT<Mat> llt(corr);
    if (llt.info() != Eigen::Success)
        throw input_error("correlation matrix is not positive definite");
    Mat chol = llt.matrixL();

    Rng rng(seed);
    RawDataset d;
    d.x.resize(n, p);
    d.y.resize(n);
    Vec z(p);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) z[j] = rng.normal();
        d.x.row(i) = (chol * z).transpose();
    }
    for (Eigen::Index i = 0; i < n; ++i)
        d.y[i] = d.x.row(i).dot(model.beta) + model.sigma * rng.normal();
    d.names.reserve(p);
    for (Eigen::Index j = 0; j < p; ++j) d.names.push_back("x" + std::to_string(j + 1));
    d.response_name = "y";
    return d;
}

}  // namespace gps
