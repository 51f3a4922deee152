#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "gpsselect/common.hpp"
#include "gpsselect/dataset.hpp"
#include "gpsselect/penalty.hpp"

namespace gps {

struct PathOptions {
    int step_budget = 20000;   // auto delta_t resolves the OLS l1 norm into this many steps
    int max_vars = 0;          // stop once this many distinct variables entered; 0 = unlimited
    long max_iterations = 0;   // 0 = 10 * step_budget
    double delta_t = 0.0;      // explicit step size; 0 = auto

    long effective_max_iterations() const {
        return max_iterations > 0 ? max_iterations : 10L * step_budget;
    }
};

// One logged update. Coefficients only ever move by +-delta_t, so the signed
// step count n_k reconstructs beta exactly (beta_k = n_k * delta_t).
struct StepRecord {
    int k = -1;           // selected column; -1 on the initial null record
    double g_k = 0.0;     // gradient at k before the update
    double alpha_t = 0.0; // alpha / |g_k|
    double m = 0.0;       // multiplicity absorbed into this update
    double t = 0.0;       // accumulated tuning value after the update
    double l1 = 0.0;      // l1 norm of beta after the update
    double rss = 0.0;     // ||y - mu_hat||^2 after the update
    long n_k = 0;         // signed step count of coordinate k after the update
};

struct SolutionPath {
    Eigen::Index n = 0;
    Eigen::Index p = 0;
    double delta_t = 0.0;
    double alpha = 0.0;                 // 2 * delta_t / n
    std::vector<StepRecord> steps;      // steps[0] is the null record
    std::vector<long> update_counts;    // times each coordinate was selected
    Vec multiplicity_sums;              // accumulated m per coordinate
    std::vector<int> selected_order;    // distinct coordinates, first-selection order
    Vec final_beta;
    Vec final_mu;
    std::vector<std::string> warnings;
    std::string stop_reason;

    Eigen::Index q() const { return static_cast<Eigen::Index>(selected_order.size()); }
    std::size_t n_updates() const { return steps.size() - 1; }

    // Signed step counts after steps[idx]; O(idx) replay.
    std::vector<long> counts_at(std::size_t idx) const {
        std::vector<long> n_of(static_cast<std::size_t>(p), 0);
        for (std::size_t i = 1; i <= idx && i < steps.size(); ++i)
            n_of[static_cast<std::size_t>(steps[i].k)] = steps[i].n_k;
        return n_of;
    }

    Vec beta_at(std::size_t idx) const {
        auto n_of = counts_at(idx);
        Vec b(p);
        for (Eigen::Index j = 0; j < p; ++j)
            b[j] = static_cast<double>(n_of[static_cast<std::size_t>(j)]) * delta_t;
        return b;
    }
};

// Least squares via column-pivoted QR; requires n > p and a condition
// number below 1e12.
inline Vec ols_fit(const StandardizedDesign& design) {
    if (design.n() <= design.p())
        throw numerical_error(
            "ols_fit: requires n > p (n=" + std::to_string(design.n()) +
            ", p=" + std::to_string(design.p()) + "); use a criterion that does not need tau^2");
    Eigen::ColPivHouseholderQR<Mat> qr(design.x);
    const auto& r = qr.matrixR();
    double dmax = 0.0, dmin = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < design.p(); ++j) {
        double d = std::abs(r(j, j));
        dmax = std::max(dmax, d);
        dmin = std::min(dmin, d);
    }
    if (!(dmin > 0.0) || dmax / dmin > 1e12)
        throw numerical_error("ols_fit: design is rank deficient or near-singular");
    return qr.solve(design.y);
}

// Minimum-norm least squares (SVD); the n <= p fallback for step sizing.
inline Vec min_norm_ls(const StandardizedDesign& design) {
    Eigen::BDCSVD<Mat> svd(design.x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return svd.solve(design.y);
}

// Step size rule: resolve the l1 norm of the (minimum-norm) least squares
// solution into step_budget steps, then clamp so that alpha = 2*dt/n stays
// below the q-th largest initial gradient magnitude.
inline double estimate_delta_t(const StandardizedDesign& design, const PathOptions& opts) {
    if (opts.delta_t != 0.0) {
        if (!(opts.delta_t > 0.0) || !std::isfinite(opts.delta_t))
            throw input_error("delta_t must be positive and finite");
        return opts.delta_t;
    }
    if (opts.step_budget < 1) throw input_error("step_budget must be positive");

    Vec beta_ref;
    if (design.n() > design.p()) {
        try {
            beta_ref = ols_fit(design);
        } catch (const numerical_error&) {
            beta_ref = min_norm_ls(design);
        }
    } else {
        beta_ref = min_norm_ls(design);
    }
    double l1 = beta_ref.lpNorm<1>();
    double dt = l1 / static_cast<double>(opts.step_budget);

    Vec g0 = 2.0 * (design.x.transpose() * design.y) / static_cast<double>(design.n());
    std::vector<double> mags;
    mags.reserve(static_cast<std::size_t>(g0.size()));
    for (Eigen::Index j = 0; j < g0.size(); ++j)
        if (std::abs(g0[j]) > 0.0) mags.push_back(std::abs(g0[j]));
    if (mags.empty() || !(l1 > 0.0))
        throw numerical_error("estimate_delta_t: degenerate data, all initial gradients vanish");
    std::sort(mags.begin(), mags.end(), std::greater<double>());
    std::size_t q = opts.max_vars > 0
                        ? std::min<std::size_t>(static_cast<std::size_t>(opts.max_vars), mags.size())
                        : mags.size();
    double alpha_cap = 0.999 * mags[q - 1];
    double dt_cap = alpha_cap * static_cast<double>(design.n()) / 2.0;
    return std::min(dt, dt_cap);
}

// The path engine. Starting from beta = 0, repeatedly bumps the single most
// incriminated coordinate by +-delta_t until every gradient falls to alpha:
//
//   g_j = 2 x_j'(y - mu)/n,     lambda_j = g_j / p_j,
//   candidates C = { j : |g_j| > alpha },
//   S = { j in C : lambda_j * beta_j < 0 }   (non-monotone priority set),
//   k = argmax |lambda_j| over S if nonempty, else over C,
//   m = log(1 - alpha/|g_k|) / log(1 - alpha),
//   beta_k += delta_t * sign(lambda_k),  mu += delta_t * sign(g_k) * x_k,
//   t += m * delta_t.
//
// Each update logs (k, g_k, alpha_t = alpha/|g_k|, m) -- all that degrees-of-
// freedom tracking needs.
inline SolutionPath fit(const StandardizedDesign& design, const PenaltySpec& penalty,
                        const PathOptions& opts) {
    validate(penalty);
    const Eigen::Index n = design.n();
    const Eigen::Index p = design.p();
    const double dn = static_cast<double>(n);

    SolutionPath path;
    path.n = n;
    path.p = p;
    path.update_counts.assign(static_cast<std::size_t>(p), 0);
    path.multiplicity_sums = Vec::Zero(p);

    Vec g = 2.0 * (design.x.transpose() * design.y) / dn;
    double g_max = g.cwiseAbs().maxCoeff();

    StepRecord null_step;
    null_step.rss = design.y.squaredNorm();
    path.steps.push_back(null_step);

    if (g_max == 0.0) {
        // No signal at all (y = 0 or y orthogonal to every column).
        path.delta_t = opts.delta_t > 0.0 ? opts.delta_t : 0.0;
        path.alpha = 2.0 * path.delta_t / dn;
        path.final_beta = Vec::Zero(p);
        path.final_mu = Vec::Zero(n);
        path.stop_reason = "no signal";
        return path;
    }

    const double dt = estimate_delta_t(design, opts);
    const double alpha = 2.0 * dt / dn;
    path.delta_t = dt;
    path.alpha = alpha;
    if (!(alpha < g_max))
        throw numerical_error("step size too large: alpha = " + std::to_string(alpha) +
                              " >= max initial |g| = " + std::to_string(g_max) +
                              "; decrease delta_t or increase the step budget");
    if (!(alpha < 1.0))
        throw numerical_error("step size too large: alpha = 2*delta_t/n must be below 1");

    // Gram columns give O(p) gradient updates; mu is kept for rss.
    Mat gram = design.x.transpose() * design.x;
    Vec mu = Vec::Zero(n);
    std::vector<long> n_of(static_cast<std::size_t>(p), 0);
    std::vector<int> last_sign(static_cast<std::size_t>(p), 0);
    std::vector<bool> seen(static_cast<std::size_t>(p), false);
    long l1_steps = 0;
    double t = 0.0;
    const long max_iter = opts.effective_max_iterations();
    const double log1m_alpha = std::log1p(-alpha);
    path.steps.reserve(static_cast<std::size_t>(std::min<long>(max_iter, 1 << 20)) + 1);

    long iter = 0;
    for (; iter < max_iter; ++iter) {
        // Selection: largest |lambda| among candidates, set S first.
        int k = -1;
        double best = -1.0;
        bool s_nonempty = false;
        for (Eigen::Index j = 0; j < p; ++j) {
            double gj = g[j];
            if (!(std::abs(gj) > alpha)) continue;
            double bj = static_cast<double>(n_of[static_cast<std::size_t>(j)]) * dt;
            double pj = std::max(gradient_abs(penalty, std::abs(bj)), kPenaltyGradientFloor);
            double lj = gj / pj;
            bool in_s = lj * bj < 0.0;
            if (in_s && !s_nonempty) {
                s_nonempty = true;
                best = -1.0;  // S preempts plain candidates
            }
            if (in_s == s_nonempty && std::abs(lj) > best) {
                best = std::abs(lj);
                k = static_cast<int>(j);
            }
        }
        if (k < 0) {
            path.stop_reason = "gradients exhausted";
            break;
        }

        const std::size_t ks = static_cast<std::size_t>(k);
        const double gk = g[k];
        if (!std::isfinite(gk))
            throw numerical_error("non-finite gradient at iteration " + std::to_string(iter));
        const double abs_gk = std::abs(gk);
        const double alpha_t = alpha / abs_gk;
        const double m = std::log1p(-alpha_t) / log1m_alpha;
        const double sgn = gk > 0.0 ? 1.0 : -1.0;  // sign(lambda_k) = sign(g_k)

        long prev_n = n_of[ks];
        long new_n = prev_n + (sgn > 0.0 ? 1 : -1);
        if (prev_n != 0 && new_n == 0) last_sign[ks] = prev_n > 0 ? 1 : -1;
        if (prev_n == 0 && last_sign[ks] != 0 && (new_n > 0 ? 1 : -1) != last_sign[ks]) {
            path.warnings.push_back("coefficient " + std::to_string(k) +
                                    " crossed zero with a sign change at update " +
                                    std::to_string(path.steps.size()) +
                                    "; path may be discontinuous there");
            last_sign[ks] = 0;
        }
        l1_steps += std::labs(new_n) - std::labs(prev_n);
        n_of[ks] = new_n;

        mu += (dt * sgn) * design.x.col(k);
        g -= (2.0 * dt * sgn / dn) * gram.col(k);
        t += m * dt;
        path.update_counts[ks] += 1;
        path.multiplicity_sums[k] += m;
        if (!seen[ks]) {
            seen[ks] = true;
            path.selected_order.push_back(k);
        }

        StepRecord rec;
        rec.k = k;
        rec.g_k = gk;
        rec.alpha_t = alpha_t;
        rec.m = m;
        rec.t = t;
        rec.l1 = static_cast<double>(l1_steps) * dt;
        rec.rss = (design.y - mu).squaredNorm();
        rec.n_k = new_n;
        path.steps.push_back(rec);

        if (opts.max_vars > 0 && path.q() >= opts.max_vars) {
            path.stop_reason = "variable limit reached";
            break;
        }
    }
    if (iter >= max_iter) {
        path.stop_reason = "iteration limit reached";
        path.warnings.push_back("stopped at max_iterations=" + std::to_string(max_iter) +
                                " before gradients were exhausted");
    }

    path.final_mu = mu;
    path.final_beta.resize(p);
    for (Eigen::Index j = 0; j < p; ++j)
        path.final_beta[j] = static_cast<double>(n_of[static_cast<std::size_t>(j)]) * dt;
    return path;
}

// Last step whose l1 norm is within the given fraction of the final l1 norm.
// A full scan: l1 is not monotone in the step index near sign flips.
inline std::size_t step_at_l1_fraction(const SolutionPath& path, double frac) {
    const double target = frac * path.steps.back().l1;
    std::size_t last = 0;
    for (std::size_t i = 1; i < path.steps.size(); ++i)
        if (path.steps[i].l1 <= target * (1.0 + 1e-12) + 1e-300) last = i;
    return last;
}

// Coefficient snapshots at several l1 fractions, in one replay pass.
inline std::vector<Vec> betas_at_l1_fractions(const SolutionPath& path,
                                              const std::vector<double>& fracs) {
    std::vector<std::size_t> step_of(fracs.size());
    std::size_t max_step = 0;
    for (std::size_t gi = 0; gi < fracs.size(); ++gi) {
        step_of[gi] = step_at_l1_fraction(path, fracs[gi]);
        max_step = std::max(max_step, step_of[gi]);
    }
    std::vector<long> n_of(static_cast<std::size_t>(path.p), 0);
    std::vector<std::vector<long>> snaps(fracs.size());
    for (std::size_t gi = 0; gi < fracs.size(); ++gi)
        if (step_of[gi] == 0) snaps[gi] = n_of;
    for (std::size_t i = 1; i <= max_step; ++i) {
        n_of[static_cast<std::size_t>(path.steps[i].k)] = path.steps[i].n_k;
        for (std::size_t gi = 0; gi < fracs.size(); ++gi)
            if (step_of[gi] == i) snaps[gi] = n_of;
    }
    std::vector<Vec> out(fracs.size(), Vec::Zero(path.p));
    for (std::size_t gi = 0; gi < fracs.size(); ++gi)
        for (Eigen::Index j = 0; j < path.p; ++j)
            out[gi][j] = static_cast<double>(snaps[gi][static_cast<std::size_t>(j)]) * path.delta_t;
    return out;
}

}  // namespace gps
