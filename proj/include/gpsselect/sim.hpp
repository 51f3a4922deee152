#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gpsselect/common.hpp"
#include "gpsselect/criteria.hpp"
#include "gpsselect/dataset.hpp"
#include "gpsselect/dof.hpp"
#include "gpsselect/path.hpp"
#include "gpsselect/penalty.hpp"
#include "gpsselect/rng.hpp"

namespace gps {

enum class SimCriterion { Cp, Aic, Aicc, Bic, Gcv, Cv };

inline const char* sim_criterion_name(SimCriterion c) {
    switch (c) {
        case SimCriterion::Cp: return "cp";
        case SimCriterion::Aic: return "aic";
        case SimCriterion::Aicc: return "aicc";
        case SimCriterion::Bic: return "bic";
        case SimCriterion::Gcv: return "gcv";
        case SimCriterion::Cv: return "cv";
    }
    return "?";
}

inline SimCriterion sim_criterion_from_string(const std::string& s) {
    if (s == "cv") return SimCriterion::Cv;
    return static_cast<SimCriterion>(criterion_from_string(s));
}

inline Criterion to_criterion(SimCriterion c) {
    switch (c) {
        case SimCriterion::Cp: return Criterion::Cp;
        case SimCriterion::Aic: return Criterion::Aic;
        case SimCriterion::Aicc: return Criterion::Aicc;
        case SimCriterion::Bic: return Criterion::Bic;
        case SimCriterion::Gcv: return Criterion::Gcv;
        case SimCriterion::Cv: break;
    }
    throw internal_error("cv has no closed-form criterion column");
}

enum class Tau2Mode { True, Estimated };

struct SimConfig {
    int example = 1;                     // 1..4, or 0 with a custom model
    std::optional<TrueModel> custom_model;
    Eigen::Index custom_n = 0;
    int replicates = 200;
    std::uint64_t seed = 1;
    std::vector<PenaltySpec> penalties{PenaltySpec::lasso()};
    std::vector<SimCriterion> criteria{SimCriterion::Cp};
    Tau2Mode tau2_mode = Tau2Mode::Estimated;
    PathOptions path_options{};
    int cv_folds = 10;
};

// True models of the four benchmark configurations.
inline std::pair<TrueModel, Eigen::Index> example_model(int example) {
    TrueModel m;
    switch (example) {
        case 1: {
            m.beta = Vec(8);
            m.beta << 3, 1.5, 0, 0, 2, 0, 0, 0;
            m.sigma = 3.0;
            m.correlation = Correlation::AR1;
            m.rho = 0.5;
            return {m, 20};
        }
        case 2: {
            m.beta = Vec::Constant(8, 0.85);
            m.sigma = 3.0;
            m.correlation = Correlation::AR1;
            m.rho = 0.5;
            return {m, 20};
        }
        case 3: {
            m.beta = Vec::Zero(8);
            m.beta[0] = 5.0;
            m.sigma = 2.0;
            m.correlation = Correlation::AR1;
            m.rho = 0.5;
            return {m, 20};
        }
        case 4: {
            m.beta = Vec::Zero(40);
            for (int j = 10; j < 20; ++j) m.beta[j] = 2.0;
            for (int j = 30; j < 40; ++j) m.beta[j] = 2.0;
            m.sigma = 15.0;
            m.correlation = Correlation::Equi;
            m.rho = 0.5;
            return {m, 100};
        }
        default:
            throw input_error("example must be 1..4");
    }
}

inline std::pair<TrueModel, Eigen::Index> resolve_model(const SimConfig& cfg) {
    if (cfg.custom_model) {
        if (cfg.custom_n < 2) throw input_error("custom model needs n >= 2");
        return {*cfg.custom_model, cfg.custom_n};
    }
    return example_model(cfg.example);
}

// One (penalty, criterion) aggregate.
struct SimCell {
    std::string penalty;
    std::string criterion;
    double mse = 0.0;
    double sd = 0.0;
    double se_of_mse = 0.0;               // sd / sqrt(replicates)
    std::optional<double> zz;             // absent when the true beta has no zeros
    double nn = 0.0;
    long zz_num = 0, zz_den = 0;          // proportion audit
    long nn_num = 0, nn_den = 0;
    std::vector<double> se_values;        // per-replicate squared errors
};

struct SimResult {
    std::vector<SimCell> cells;

    const SimCell& cell(const std::string& penalty, const std::string& criterion) const {
        for (const auto& c : cells)
            if (c.penalty == penalty && c.criterion == criterion) return c;
        throw internal_error("no cell " + penalty + "/" + criterion);
    }
};

namespace detail {

struct ReplicateOutcome {
    double se = 0.0;
    long zz_num = 0, zz_den = 0;
    long nn_num = 0, nn_den = 0;
};

inline ReplicateOutcome score_model(const Vec& beta_std, const StandardizedDesign& design,
                                    const RawDataset& raw, const TrueModel& model) {
    ReplicateOutcome o;
    auto [b0, braw] = destandardize(beta_std, design);
    Vec mu_hat = (raw.x * braw).array() + b0;
    Vec mu_true = raw.x * model.beta;
    o.se = (mu_hat - mu_true).squaredNorm() / static_cast<double>(raw.n());
    for (Eigen::Index j = 0; j < model.p(); ++j) {
        if (model.beta[j] == 0.0) {
            ++o.zz_den;
            if (beta_std[j] == 0.0) ++o.zz_num;
        } else {
            ++o.nn_den;
            if (beta_std[j] != 0.0) ++o.nn_num;
        }
    }
    return o;
}

}  // namespace detail

// Generates `replicates` data sets, runs every penalty and selection rule on
// each, and aggregates squared errors and sparsity-recovery proportions.
// Replicate r uses the derived stream (seed, r); identical configs give
// bit-identical results regardless of thread count.
inline SimResult run_example(const SimConfig& cfg) {
    if (cfg.replicates < 2) throw input_error("run_example: need at least 2 replicates");
    auto [model, n] = resolve_model(cfg);
    for (const auto& pen : cfg.penalties) validate(pen);

    const std::size_t n_pen = cfg.penalties.size();
    const std::size_t n_crit = cfg.criteria.size();
    const std::size_t reps = static_cast<std::size_t>(cfg.replicates);
    std::vector<detail::ReplicateOutcome> outcomes(reps * n_pen * n_crit);

    parallel_for(reps, [&](std::size_t r) {
        RawDataset raw = generate_gaussian(model, n, splitmix_pair(cfg.seed, r));
        StandardizedDesign design = standardize(raw);
        std::optional<double> tau2;
        if (cfg.tau2_mode == Tau2Mode::True)
            tau2 = model.sigma * model.sigma;
        else
            tau2 = estimate_tau2(design).value;

        for (std::size_t pi = 0; pi < n_pen; ++pi) {
            bool need_path = false;
            for (auto c : cfg.criteria)
                if (c != SimCriterion::Cv) need_path = true;

            SolutionPath path;
            CriterionTable table;
            if (need_path) {
                path = fit(design, cfg.penalties[pi], cfg.path_options);
                DfSeries dfs = reduced_replay(path, design);
                table = evaluate(path, dfs, tau2);
            }
            for (std::size_t ci = 0; ci < n_crit; ++ci) {
                Vec beta_std;
                if (cfg.criteria[ci] == SimCriterion::Cv) {
                    CvResult cv = cross_validate(raw, cfg.penalties[pi], cfg.path_options,
                                                 cfg.cv_folds, splitmix_pair(cfg.seed ^ 0x5c5cull, r));
                    beta_std = cv.beta_std;
                } else {
                    std::size_t step = argmin_step(table.values(to_criterion(cfg.criteria[ci])));
                    beta_std = path.beta_at(step);
                }
                outcomes[(r * n_pen + pi) * n_crit + ci] =
                    detail::score_model(beta_std, design, raw, model);
            }
        }
    });

    SimResult result;
    for (std::size_t pi = 0; pi < n_pen; ++pi) {
        for (std::size_t ci = 0; ci < n_crit; ++ci) {
            SimCell cell;
            cell.penalty = penalty_name(cfg.penalties[pi]);
            cell.criterion = sim_criterion_name(cfg.criteria[ci]);
            cell.se_values.reserve(reps);
            for (std::size_t r = 0; r < reps; ++r) {
                const auto& o = outcomes[(r * n_pen + pi) * n_crit + ci];
                cell.se_values.push_back(o.se);
                cell.zz_num += o.zz_num;
                cell.zz_den += o.zz_den;
                cell.nn_num += o.nn_num;
                cell.nn_den += o.nn_den;
            }
            double mean = 0.0;
            for (double v : cell.se_values) mean += v;
            mean /= static_cast<double>(reps);
            double ss = 0.0;
            for (double v : cell.se_values) ss += (v - mean) * (v - mean);
            cell.mse = mean;
            cell.sd = std::sqrt(ss / static_cast<double>(reps - 1));
            cell.se_of_mse = cell.sd / std::sqrt(static_cast<double>(reps));
            if (cell.zz_den > 0)
                cell.zz = static_cast<double>(cell.zz_num) / static_cast<double>(cell.zz_den);
            cell.nn = cell.nn_den > 0
                          ? static_cast<double>(cell.nn_num) / static_cast<double>(cell.nn_den)
                          : 1.0;
            result.cells.push_back(std::move(cell));
        }
    }
    return result;
}

// Paired study of the tracker df against the nonzero-count df on identical
// data streams: both arms select by Cp (true tau^2) along the same lasso
// path; only the df series differs.
struct DfComparison {
    SimCell gps;
    SimCell zou;
    double mean_diff = 0.0;  // mean(SE_gps - SE_zou), paired
    double se_diff = 0.0;
};

inline DfComparison compare_df(const SimConfig& cfg) {
    if (cfg.replicates < 2) throw input_error("compare_df: need at least 2 replicates");
    auto [model, n] = resolve_model(cfg);
    const double tau2 = model.sigma * model.sigma;
    const std::size_t reps = static_cast<std::size_t>(cfg.replicates);

    std::vector<detail::ReplicateOutcome> out_gps(reps), out_zou(reps);
    parallel_for(reps, [&](std::size_t r) {
        RawDataset raw = generate_gaussian(model, n, splitmix_pair(cfg.seed, r));
        StandardizedDesign design = standardize(raw);
        SolutionPath path = fit(design, PenaltySpec::lasso(), cfg.path_options);
        DfSeries dfs = reduced_replay(path, design);
        auto zou = zou_df_series(path);

        std::vector<double> cp_gps(path.steps.size()), cp_zou(path.steps.size());
        for (std::size_t i = 0; i < path.steps.size(); ++i) {
            cp_gps[i] = path.steps[i].rss + 2.0 * tau2 * dfs[i];
            cp_zou[i] = path.steps[i].rss + 2.0 * tau2 * static_cast<double>(zou[i]);
        }
        Vec b_gps = path.beta_at(argmin_step(cp_gps));
        Vec b_zou = path.beta_at(argmin_step(cp_zou));
        out_gps[r] = detail::score_model(b_gps, design, raw, model);
        out_zou[r] = detail::score_model(b_zou, design, raw, model);
    });

    auto aggregate = [&](const std::vector<detail::ReplicateOutcome>& os, const char* name) {
        SimCell cell;
        cell.penalty = "lasso";
        cell.criterion = name;
        double mean = 0.0;
        for (const auto& o : os) {
            cell.se_values.push_back(o.se);
            mean += o.se;
            cell.zz_num += o.zz_num;
            cell.zz_den += o.zz_den;
            cell.nn_num += o.nn_num;
            cell.nn_den += o.nn_den;
        }
        mean /= static_cast<double>(os.size());
        double ss = 0.0;
        for (const auto& o : os) ss += (o.se - mean) * (o.se - mean);
        cell.mse = mean;
        cell.sd = std::sqrt(ss / static_cast<double>(os.size() - 1));
        cell.se_of_mse = cell.sd / std::sqrt(static_cast<double>(os.size()));
        if (cell.zz_den > 0)
            cell.zz = static_cast<double>(cell.zz_num) / static_cast<double>(cell.zz_den);
        cell.nn = static_cast<double>(cell.nn_num) / static_cast<double>(cell.nn_den);
        return cell;
    };

    DfComparison cmp;
    cmp.gps = aggregate(out_gps, "cp_df_gps");
    cmp.zou = aggregate(out_zou, "cp_df_zou");
    double mean = 0.0;
    for (std::size_t r = 0; r < reps; ++r) mean += out_gps[r].se - out_zou[r].se;
    mean /= static_cast<double>(reps);
    double ss = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
        double d = out_gps[r].se - out_zou[r].se - mean;
        ss += d * d;
    }
    cmp.mean_diff = mean;
    cmp.se_diff = std::sqrt(ss / static_cast<double>(reps - 1)) /
                  std::sqrt(static_cast<double>(reps));
    return cmp;
}

// Wall-clock comparison of the O(n^2)-per-step tracker against the
// QR-reduced replay, path included in both arms.
struct BenchRow {
    Eigen::Index n = 0;
    double dense_seconds = 0.0;
    double reduced_seconds = 0.0;
    double ratio = 0.0;
    std::size_t path_steps = 0;
};

inline std::vector<BenchRow> bench_timing(const std::vector<Eigen::Index>& n_list, int reps,
                                          const PathOptions& opts, std::uint64_t seed) {
    using clock = std::chrono::steady_clock;
    auto [model, n_ignored] = example_model(1);
    std::vector<BenchRow> rows;
    for (Eigen::Index n : n_list) {
        BenchRow row;
        row.n = n;
        for (int r = 0; r < reps; ++r) {
            RawDataset raw = generate_gaussian(model, n, splitmix_pair(seed, static_cast<std::uint64_t>(r)));
            StandardizedDesign design = standardize(raw);
            double tau2 = estimate_tau2(design).value;

            auto t0 = clock::now();
            SolutionPath path_a = fit(design, PenaltySpec::lasso(), opts);
            DfSeries dense = dense_df_series(path_a, design);
            CriterionTable tab_a = evaluate(path_a, dense, tau2);
            (void)argmin_step(tab_a.cp);
            auto t1 = clock::now();
            SolutionPath path_b = fit(design, PenaltySpec::lasso(), opts);
            DfSeries reduced = reduced_replay(path_b, design);
            CriterionTable tab_b = evaluate(path_b, reduced, tau2);
            (void)argmin_step(tab_b.cp);
            auto t2 = clock::now();

            row.dense_seconds += std::chrono::duration<double>(t1 - t0).count();
            row.reduced_seconds += std::chrono::duration<double>(t2 - t1).count();
            row.path_steps = path_b.n_updates();
        }
        row.dense_seconds /= reps;
        row.reduced_seconds /= reps;
        row.ratio = row.dense_seconds / row.reduced_seconds;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace gps
