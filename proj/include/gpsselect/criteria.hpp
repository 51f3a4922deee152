#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "gpsselect/common.hpp"
#include "gpsselect/dataset.hpp"
#include "gpsselect/dof.hpp"
#include "gpsselect/path.hpp"
#include "gpsselect/rng.hpp"

namespace gps {

enum class Criterion { Cp, Aic, Aicc, Bic, Gcv };

inline const char* criterion_name(Criterion c) {
    switch (c) {
        case Criterion::Cp: return "cp";
        case Criterion::Aic: return "aic";
        case Criterion::Aicc: return "aicc";
        case Criterion::Bic: return "bic";
        case Criterion::Gcv: return "gcv";
    }
    return "?";
}

inline Criterion criterion_from_string(const std::string& s) {
    if (s == "cp") return Criterion::Cp;
    if (s == "aic") return Criterion::Aic;
    if (s == "aicc") return Criterion::Aicc;
    if (s == "bic") return Criterion::Bic;
    if (s == "gcv") return Criterion::Gcv;
    throw input_error("unknown criterion '" + s + "'");
}

// The AICc complexity term is published in two sign conventions; the
// corrected (penalizing) form is the default, the literal form is kept
// behind this switch.
enum class AiccForm { PlusPenalty, Literal };

struct Tau2Estimate {
    double value = 0.0;
    bool degenerate = false;  // zero residual: Cp/AIC/BIC collapse to df ordering
};

// Residual variance of the most complex model: rss / (n - p - 1). The
// centered response already absorbed the intercept, hence the extra -1;
// this is the unbiased estimator for the p-predictors-plus-intercept fit.
inline Tau2Estimate estimate_tau2(const StandardizedDesign& design) {
    if (design.n() <= design.p() + 1)
        throw numerical_error(
            "estimate_tau2: requires n > p + 1 (n=" + std::to_string(design.n()) +
            ", p=" + std::to_string(design.p()) +
            "); AICc and GCV work without tau^2");
    Vec beta = ols_fit(design);
    double rss = (design.y - design.x * beta).squaredNorm();
    Tau2Estimate est;
    est.value = rss / static_cast<double>(design.n() - design.p() - 1);
    est.degenerate = rss <= 1e-12 * design.y.squaredNorm();
    return est;
}

// Criterion values per path step. Entries needing tau^2 are NaN when it is
// absent; AICc is +inf once df >= n-1 and GCV once df >= n.
struct CriterionTable {
    std::vector<double> rss;
    std::vector<double> df;
    std::vector<double> cp;
    std::vector<double> aic;
    std::vector<double> aicc;
    std::vector<double> bic;
    std::vector<double> gcv;
    std::optional<double> tau2;
    Eigen::Index n = 0;

    std::size_t size() const { return rss.size(); }

    const std::vector<double>& values(Criterion c) const {
        switch (c) {
            case Criterion::Cp: return cp;
            case Criterion::Aic: return aic;
            case Criterion::Aicc: return aicc;
            case Criterion::Bic: return bic;
            case Criterion::Gcv: return gcv;
        }
        throw internal_error("unknown criterion");
    }
};

inline CriterionTable evaluate(const SolutionPath& path, const DfSeries& dfs,
                               std::optional<double> tau2,
                               AiccForm aicc_form = AiccForm::PlusPenalty) {
    if (dfs.size() != path.steps.size())
        throw internal_error("evaluate: df series and path are misaligned");
    const double n = static_cast<double>(path.n);
    const double inf = std::numeric_limits<double>::infinity();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double two_pi = 6.283185307179586476925286766559;

    CriterionTable tab;
    tab.tau2 = tau2;
    tab.n = path.n;
    const std::size_t m = path.steps.size();
    tab.rss.resize(m);
    tab.df.resize(m);
    tab.cp.resize(m);
    tab.aic.resize(m);
    tab.aicc.resize(m);
    tab.bic.resize(m);
    tab.gcv.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double rss = path.steps[i].rss;
        const double df = dfs[i];
        tab.rss[i] = rss;
        tab.df[i] = df;
        if (tau2) {
            const double t2 = *tau2;
            tab.cp[i] = rss + 2.0 * t2 * df;
            tab.aic[i] = n * std::log(two_pi * t2) + rss / t2 + 2.0 * df;
            tab.bic[i] = n * std::log(two_pi * t2) + rss / t2 + std::log(n) * df;
        } else {
            tab.cp[i] = nan;
            tab.aic[i] = nan;
            tab.bic[i] = nan;
        }
        if (df < n - 1.0) {
            const double base = n * std::log(two_pi * rss / n) + n;
            const double pen = 2.0 * n * df / (n - df - 1.0);
            tab.aicc[i] = aicc_form == AiccForm::PlusPenalty ? base + pen : base - pen;
        } else {
            tab.aicc[i] = inf;
        }
        if (df < n) {
            const double d = 1.0 - df / n;
            tab.gcv[i] = rss / (n * d * d);
        } else {
            tab.gcv[i] = inf;
        }
    }
    return tab;
}

// Smallest step index minimizing the criterion; +inf and NaN entries are
// skipped, ties go to the earlier (sparser) step.
inline std::size_t argmin_step(const std::vector<double>& values) {
    std::size_t best = values.size();
    double best_v = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < values.size(); ++i) {
        double v = values[i];
        if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) continue;
        if (v < best_v) {
            best_v = v;
            best = i;
        }
    }
    if (best == values.size())
        throw numerical_error("criterion has no finite values along the path");
    return best;
}

struct SelectionResult {
    std::string criterion;
    std::size_t step = 0;
    double t = 0.0;
    double l1 = 0.0;
    double df = 0.0;
    double criterion_value = 0.0;
    Vec beta_std;             // coefficients on the standardized scale
    double intercept = 0.0;   // goes with beta_std: the response mean
    Vec beta_raw;             // coefficients on the raw predictor scale
    double intercept_raw = 0.0;
};

inline SelectionResult select(const SolutionPath& path, const CriterionTable& table, Criterion c,
                              const StandardizedDesign& design) {
    const auto& vals = table.values(c);
    std::size_t step = argmin_step(vals);
    SelectionResult sel;
    sel.criterion = criterion_name(c);
    sel.step = step;
    sel.t = path.steps[step].t;
    sel.l1 = path.steps[step].l1;
    sel.df = table.df[step];
    sel.criterion_value = vals[step];
    sel.beta_std = path.beta_at(step);
    sel.intercept = design.y_mean;
    auto [b0, braw] = destandardize(sel.beta_std, design);
    sel.intercept_raw = b0;
    sel.beta_raw = braw;
    return sel;
}

// ---------------------------------------------------------------------------
// Expected-error machinery (simulation only: true mean and variance known).

struct FittedValue {
    Vec mu;
    double df = 0.0;
    double rss = 0.0;
};

struct ErrEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
};

// Estimates Err = E_y E_ynew ||mu_hat - y_new||^2 around the true mean mu0.
// The inner expectation is analytic: ||mu_hat - mu0||^2 + n tau2.
inline ErrEstimate expected_error_oracle(const std::function<Vec(const Vec&)>& fitter,
                                         const Vec& mu0, double tau2, int replicates,
                                         std::uint64_t seed) {
    if (replicates < 2) throw input_error("expected_error_oracle: need replicates >= 2");
    const Eigen::Index n = mu0.size();
    const double sd = std::sqrt(tau2);
    Vec errs(replicates);
    parallel_for(static_cast<std::size_t>(replicates), [&](std::size_t b) {
        Rng rng = Rng::stream(seed, b);
        Vec y(n);
        for (Eigen::Index i = 0; i < n; ++i) y[i] = mu0[i] + sd * rng.normal();
        Vec mu = fitter(y);
        errs[static_cast<Eigen::Index>(b)] =
            (mu - mu0).squaredNorm() + static_cast<double>(n) * tau2;
    });
    ErrEstimate out;
    out.estimate = errs.mean();
    out.std_error = std::sqrt((errs.array() - out.estimate).square().sum() /
                              (static_cast<double>(replicates) - 1.0)) /
                    std::sqrt(static_cast<double>(replicates));
    return out;
}

struct CpErrComparison {
    double mean_cp = 0.0;
    double mean_err = 0.0;
    double mean_diff = 0.0;  // Cp - Err, paired per replicate
    double se_diff = 0.0;
};

// Paired comparison of Cp = rss + 2 tau2 df against the expected error,
// using the same response draws for both sides.
inline CpErrComparison compare_cp_to_err(const std::function<FittedValue(const Vec&)>& fitter,
                                         const Vec& mu0, double tau2, int replicates,
                                         std::uint64_t seed) {
    if (replicates < 2) throw input_error("compare_cp_to_err: need replicates >= 2");
    const Eigen::Index n = mu0.size();
    const double sd = std::sqrt(tau2);
    Vec cps(replicates), errs(replicates);
    parallel_for(static_cast<std::size_t>(replicates), [&](std::size_t b) {
        Rng rng = Rng::stream(seed, b);
        Vec y(n);
        for (Eigen::Index i = 0; i < n; ++i) y[i] = mu0[i] + sd * rng.normal();
        FittedValue fv = fitter(y);
        cps[static_cast<Eigen::Index>(b)] = fv.rss + 2.0 * tau2 * fv.df;
        errs[static_cast<Eigen::Index>(b)] =
            (fv.mu - mu0).squaredNorm() + static_cast<double>(n) * tau2;
    });
    CpErrComparison out;
    out.mean_cp = cps.mean();
    out.mean_err = errs.mean();
    Vec diff = cps - errs;
    out.mean_diff = diff.mean();
    out.se_diff = std::sqrt((diff.array() - out.mean_diff).square().sum() /
                            (static_cast<double>(replicates) - 1.0)) /
                  std::sqrt(static_cast<double>(replicates));
    return out;
}

// ---------------------------------------------------------------------------
// 10-fold cross validation comparator.

struct CvResult {
    std::vector<double> s_grid;      // normalized l1 fractions
    std::vector<double> mean_error;  // mean held-out squared error per grid point
    double chosen_s = 0.0;
    std::size_t chosen_step = 0;     // step of the full-data refit path
    SolutionPath path;               // full-data refit
    Vec beta_std;
    double intercept = 0.0;
    Vec beta_raw;
    double intercept_raw = 0.0;
};

namespace detail {

// Fold assignment is a function of row content, not storage order: rows are
// ranked lexicographically, that ranking is shuffled with the seed, and
// folds taken round-robin. Permuting the input rows changes nothing.
inline std::vector<int> fold_assignment(const RawDataset& raw, int folds, std::uint64_t seed) {
    const Eigen::Index n = raw.n();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        for (Eigen::Index j = 0; j < raw.p(); ++j) {
            if (raw.x(a, j) < raw.x(b, j)) return true;
            if (raw.x(a, j) > raw.x(b, j)) return false;
        }
        return raw.y[a] < raw.y[b];
    });
    Rng rng(seed);
    for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[static_cast<std::size_t>(rng.below(i))]);
    std::vector<int> fold_of(static_cast<std::size_t>(n));
    for (std::size_t pos = 0; pos < order.size(); ++pos)
        fold_of[static_cast<std::size_t>(order[pos])] = static_cast<int>(pos % folds);
    return fold_of;
}

}  // namespace detail

inline CvResult cross_validate(const RawDataset& raw, const PenaltySpec& penalty,
                               const PathOptions& opts, int folds, std::uint64_t seed) {
    if (folds < 2) throw input_error("cross_validate: need at least 2 folds");
    if (raw.n() < folds) throw input_error("cross_validate: fewer rows than folds");

    auto fold_of = detail::fold_assignment(raw, folds, seed);
    std::vector<double> grid(101);
    for (std::size_t gi = 0; gi < grid.size(); ++gi) grid[gi] = 0.01 * static_cast<double>(gi);

    std::vector<Vec> fold_err(static_cast<std::size_t>(folds));
    parallel_for(static_cast<std::size_t>(folds), [&](std::size_t f) {
        std::vector<Eigen::Index> tr, te;
        for (Eigen::Index i = 0; i < raw.n(); ++i)
            (fold_of[static_cast<std::size_t>(i)] == static_cast<int>(f) ? te : tr).push_back(i);

        RawDataset sub;
        sub.x.resize(static_cast<Eigen::Index>(tr.size()), raw.p());
        sub.y.resize(static_cast<Eigen::Index>(tr.size()));
        for (std::size_t i = 0; i < tr.size(); ++i) {
            sub.x.row(static_cast<Eigen::Index>(i)) = raw.x.row(tr[i]);
            sub.y[static_cast<Eigen::Index>(i)] = raw.y[tr[i]];
        }
        sub.names = raw.names;

        StandardizedDesign design;
        try {
            design = standardize(sub);
        } catch (const input_error& e) {
            throw numerical_error("cross_validate: fold " + std::to_string(f) +
                                  " is degenerate: " + e.what());
        }
        SolutionPath path = fit(design, penalty, opts);
        auto betas = betas_at_l1_fractions(path, grid);

        Vec err = Vec::Zero(static_cast<Eigen::Index>(grid.size()));
        for (std::size_t gi = 0; gi < grid.size(); ++gi) {
            auto [b0, braw] = destandardize(betas[gi], design);
            for (auto i : te) {
                double pred = b0 + raw.x.row(i).dot(braw);
                err[static_cast<Eigen::Index>(gi)] += (raw.y[i] - pred) * (raw.y[i] - pred);
            }
        }
        fold_err[f] = err;
    });

    CvResult out;
    out.s_grid = grid;
    out.mean_error.assign(grid.size(), 0.0);
    for (int f = 0; f < folds; ++f)
        for (std::size_t gi = 0; gi < grid.size(); ++gi)
            out.mean_error[gi] += fold_err[static_cast<std::size_t>(f)][static_cast<Eigen::Index>(gi)];
    for (auto& e : out.mean_error) e /= static_cast<double>(raw.n());

    std::size_t best = 0;
    for (std::size_t gi = 1; gi < grid.size(); ++gi)
        if (out.mean_error[gi] < out.mean_error[best]) best = gi;
    out.chosen_s = grid[best];

    StandardizedDesign full = standardize(raw);
    out.path = fit(full, penalty, opts);
    out.chosen_step = step_at_l1_fraction(out.path, out.chosen_s);
    out.beta_std = out.path.beta_at(out.chosen_step);
    out.intercept = full.y_mean;
    auto [b0, braw] = destandardize(out.beta_std, full);
    out.intercept_raw = b0;
    out.beta_raw = braw;
    return out;
}

}  // namespace gps
