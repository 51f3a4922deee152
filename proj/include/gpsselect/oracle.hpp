#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "gpsselect/common.hpp"
#include "gpsselect/dataset.hpp"
#include "gpsselect/dof.hpp"
#include "gpsselect/path.hpp"

namespace gps {

// Cyclic coordinate-descent lasso: min ||y - X b||^2 / n + lambda ||b||_1.
// Independent of the path engine; used to cross-check it.
inline Vec cd_lasso(const StandardizedDesign& design, double lambda, Vec beta = Vec(),
                    double tol = 1e-10, long max_sweeps = 100000) {
    const Eigen::Index n = design.n();
    const Eigen::Index p = design.p();
    if (beta.size() != p) beta = Vec::Zero(p);
    Vec resid = design.y - design.x * beta;
    const double thr = lambda * static_cast<double>(n) / 2.0;
    for (long sweep = 0; sweep < max_sweeps; ++sweep) {
        double max_change = 0.0;
        for (Eigen::Index j = 0; j < p; ++j) {
            auto xj = design.x.col(j);
            double u = xj.dot(resid) + beta[j];  // unit sum of squares per column
            double nb = std::abs(u) > thr ? std::copysign(std::abs(u) - thr, u) : 0.0;
            double d = nb - beta[j];
            if (d != 0.0) {
                beta[j] = nb;
                resid -= d * xj;
                max_change = std::max(max_change, std::abs(d));
            }
        }
        if (max_change < tol) return beta;
    }
    throw numerical_error("cd_lasso: no convergence after " + std::to_string(max_sweeps) +
                          " sweeps at lambda=" + std::to_string(lambda));
}

// Solutions along a decreasing lambda grid, warm-started.
inline std::vector<Vec> cd_lasso_grid(const StandardizedDesign& design,
                                      const std::vector<double>& lambdas) {
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        if (!(lambdas[i] > 0.0)) throw input_error("cd_lasso_grid: lambdas must be positive");
        if (i > 0 && lambdas[i] >= lambdas[i - 1])
            throw input_error("cd_lasso_grid: lambdas must decrease");
    }
    std::vector<Vec> out;
    out.reserve(lambdas.size());
    Vec warm = Vec::Zero(design.p());
    for (double l : lambdas) {
        warm = cd_lasso(design, l, warm);
        out.push_back(warm);
    }
    return out;
}

// Largest subgradient violation of the lasso optimality conditions.
inline double cd_lasso_kkt_gap(const StandardizedDesign& design, const Vec& beta, double lambda) {
    Vec g = 2.0 * (design.x.transpose() * (design.y - design.x * beta)) /
            static_cast<double>(design.n());
    double worst = 0.0;
    for (Eigen::Index j = 0; j < design.p(); ++j) {
        if (beta[j] == 0.0)
            worst = std::max(worst, std::abs(g[j]) - lambda);
        else
            worst = std::max(worst, std::abs(g[j] - lambda * (beta[j] > 0 ? 1.0 : -1.0)));
    }
    return worst;
}

// The lasso solution whose l1 norm matches a target, found by bisecting
// lambda (the l1 norm is monotone non-increasing in lambda).
inline Vec cd_lasso_at_l1(const StandardizedDesign& design, double target_l1,
                          double rel_tol = 1e-9) {
    double lam_hi =
        2.0 * (design.x.transpose() * design.y).cwiseAbs().maxCoeff() /
        static_cast<double>(design.n());
    if (target_l1 <= 0.0) return Vec::Zero(design.p());
    double lo = 0.0, hi = lam_hi * (1.0 + 1e-10);
    Vec warm = Vec::Zero(design.p());
    Vec best = warm;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        warm = cd_lasso(design, mid, warm);
        double l1 = warm.lpNorm<1>();
        best = warm;
        if (std::abs(l1 - target_l1) <= rel_tol * std::max(1.0, target_l1)) break;
        if (l1 > target_l1)
            lo = mid;  // too little penalty
        else
            hi = mid;
        if (hi - lo < 1e-15 * lam_hi) break;
    }
    return best;
}

// Direct evaluation of the covariance product: builds the n x n matrix
// product step by step and traces it. Test-scale n only.
inline DfSeries explicit_df_product(const SolutionPath& path, const StandardizedDesign& design) {
    const Eigen::Index n = design.n();
    DfSeries out;
    out.values.reserve(path.steps.size());
    out.values.push_back(0.0);
    Mat prod = Mat::Identity(n, n);
    for (std::size_t i = 1; i < path.steps.size(); ++i) {
        const auto& rec = path.steps[i];
        auto x = design.x.col(rec.k);
        Mat factor = Mat::Identity(n, n) - rec.alpha_t * (x * x.transpose());
        prod = factor * prod;
        out.values.push_back(static_cast<double>(n) - prod.trace());
    }
    return out;
}

struct OracleReport {
    std::string instance;
    std::string metric;
    double main_value = 0.0;
    double oracle_value = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

inline OracleReport make_report(std::string instance, std::string metric, double main_v,
                                double oracle_v, double tol) {
    OracleReport r;
    r.instance = std::move(instance);
    r.metric = std::move(metric);
    r.main_value = main_v;
    r.oracle_value = oracle_v;
    r.tolerance = tol;
    r.pass = std::abs(main_v - oracle_v) <= tol;
    return r;
}

// Cross-checks the main build against the independent references on one
// dataset; the CLI `verify` subcommand emits these as JSON lines.
inline std::vector<OracleReport> verify_dataset(const RawDataset& raw, const PathOptions& opts) {
    std::vector<OracleReport> out;
    StandardizedDesign design = standardize(raw);
    std::string tag = "n=" + std::to_string(design.n()) + ",p=" + std::to_string(design.p());

    double col_sum = 0.0, col_ss_gap = 0.0;
    for (Eigen::Index j = 0; j < design.p(); ++j) {
        col_sum = std::max(col_sum, std::abs(design.x.col(j).sum()));
        col_ss_gap = std::max(col_ss_gap, std::abs(design.x.col(j).squaredNorm() - 1.0));
    }
    out.push_back(make_report(tag, "standardize.column_sum", col_sum, 0.0,
                              1e-10 * static_cast<double>(design.n())));
    out.push_back(make_report(tag, "standardize.column_sumsq_minus_1", col_ss_gap, 0.0, 1e-10));

    SolutionPath path = fit(design, PenaltySpec::lasso(), opts);
    DfSeries dense = dense_df_series(path, design);
    DfSeries reduced = reduced_replay(path, design);
    double df_gap = 0.0;
    for (std::size_t i = 0; i < dense.size(); ++i)
        df_gap = std::max(df_gap, std::abs(dense[i] - reduced[i]));
    out.push_back(make_report(tag, "df.dense_vs_reduced", df_gap, 0.0, 1e-8));

    if (design.n() <= 200) {
        DfSeries prod = explicit_df_product(path, design);
        double gap = 0.0;
        for (std::size_t i = 0; i < dense.size(); ++i)
            gap = std::max(gap, std::abs(dense[i] - prod[i]));
        out.push_back(make_report(tag, "df.dense_vs_explicit_product", gap, 0.0, 1e-10));
    }

    if (design.n() > design.p()) {
        Vec bols = ols_fit(design);
        double ortho =
            (design.x.transpose() * (design.y - design.x * bols)).cwiseAbs().maxCoeff();
        out.push_back(make_report(tag, "ols.residual_orthogonality", ortho, 0.0, 1e-8));

        double cd_tol = std::max(1e-2 * bols.cwiseAbs().maxCoeff(), 2.0 * path.delta_t);
        for (double frac : {0.25, 0.5, 0.75, 1.0}) {
            std::size_t idx = step_at_l1_fraction(path, frac);
            Vec bg = path.beta_at(idx);
            Vec bc = cd_lasso_at_l1(design, bg.lpNorm<1>());
            double gap = (bg - bc).cwiseAbs().maxCoeff();
            out.push_back(make_report(tag, "lasso.match_l1_frac_" + std::to_string(frac), gap,
                                      0.0, cd_tol));
        }

        Vec mu_std = design.x * path.final_beta;
        auto [b0, braw] = destandardize(path.final_beta, design);
        double pred_gap = 0.0;
        for (Eigen::Index i = 0; i < raw.n(); ++i) {
            double pred_raw = b0 + raw.x.row(i).dot(braw);
            double pred_s = design.y_mean + mu_std[i];
            pred_gap = std::max(pred_gap, std::abs(pred_raw - pred_s));
        }
        out.push_back(make_report(tag, "destandardize.prediction_equality", pred_gap, 0.0, 1e-8));
    }
    return out;
}

}  // namespace gps
