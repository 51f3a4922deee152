#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "gpsselect/common.hpp"
#include "gpsselect/dataset.hpp"
#include "gpsselect/path.hpp"
#include "gpsselect/rng.hpp"

namespace gps {

// Per-step df values aligned with SolutionPath::steps (values[0] = 0 for
// the null record).
struct DfSeries {
    std::vector<double> values;
    bool dense_fallback = false;  // reduced replay bailed out to the dense tracker
    std::string note;

    double back() const { return values.back(); }
    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
};

// O(n^2)-per-step tracker. Stores the complement I - M(t) so each update is
// a single rank-one left multiplication:
//   complement <- (I - alpha_t x_k x_k') complement,   df = n - tr(complement).
class DenseTracker {
public:
    explicit DenseTracker(Eigen::Index n)
        : complement_(Mat::Identity(n, n)), trace_(static_cast<double>(n)), n_(n) {}

    double update(const Eigen::Ref<const Vec>& x_k, double alpha_t) {
        if (!(alpha_t > 0.0) || alpha_t > 1.0)
            throw internal_error("DenseTracker: alpha_t must lie in (0,1], got " +
                                 std::to_string(alpha_t));
        row_buf_.noalias() = x_k.transpose() * complement_;
        trace_ -= alpha_t * row_buf_.dot(x_k);
        complement_.noalias() -= alpha_t * x_k * row_buf_;
        return df();
    }

    double df() const { return static_cast<double>(n_) - trace_; }
    const Mat& complement() const { return complement_; }

private:
    Mat complement_;
    Eigen::RowVectorXd row_buf_;
    double trace_;
    Eigen::Index n_;
};

// Runs the dense tracker over a full step log.
inline DfSeries dense_df_series(const SolutionPath& path, const StandardizedDesign& design) {
    DfSeries out;
    out.values.reserve(path.steps.size());
    out.values.push_back(0.0);
    DenseTracker tracker(design.n());
    for (std::size_t i = 1; i < path.steps.size(); ++i) {
        const auto& rec = path.steps[i];
        out.values.push_back(tracker.update(design.x.col(rec.k), rec.alpha_t));
    }
    return out;
}

// O(q^2)-per-step replay in the QR basis of the ever-selected columns:
// with x_k = Q r_k,  tr M = q - tr prod_s (I_q - alpha_s r_s r_s').
// Runs as a post-pass once the path (and therefore q) is known. Falls back
// to the dense tracker when the selected columns are numerically collinear.
inline DfSeries reduced_replay(const SolutionPath& path, const StandardizedDesign& design) {
    const Eigen::Index q = path.q();
    DfSeries out;
    out.values.reserve(path.steps.size());
    out.values.push_back(0.0);
    if (q == 0) return out;

    Mat xsel(design.n(), q);
    std::vector<Eigen::Index> pos_of(static_cast<std::size_t>(design.p()),
                                     static_cast<Eigen::Index>(-1));
    for (Eigen::Index c = 0; c < q; ++c) {
        int col = path.selected_order[static_cast<std::size_t>(c)];
        xsel.col(c) = design.x.col(col);
        pos_of[static_cast<std::size_t>(col)] = c;
    }

    Eigen::HouseholderQR<Mat> qr(xsel);
    Mat r_full = qr.matrixQR().topRows(q).triangularView<Eigen::Upper>();
    double dmax = 0.0, dmin = std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < q; ++c) {
        double d = std::abs(r_full(c, c));
        dmax = std::max(dmax, d);
        dmin = std::min(dmin, d);
    }
    if (!(dmin > 1e-10 * dmax)) {
        auto dense = dense_df_series(path, design);
        dense.dense_fallback = true;
        dense.note = "selected columns nearly collinear; used the dense tracker";
        return dense;
    }

    Mat product = Mat::Identity(q, q);
    Eigen::RowVectorXd row_buf(q);
    double trace = static_cast<double>(q);
    for (std::size_t i = 1; i < path.steps.size(); ++i) {
        const auto& rec = path.steps[i];
        Eigen::Index c = pos_of[static_cast<std::size_t>(rec.k)];
        if (c < 0) throw internal_error("reduced_replay: step references an unselected column");
        auto r_k = r_full.col(c).head(q);
        row_buf.noalias() = r_k.transpose() * product;
        trace -= rec.alpha_t * row_buf.dot(r_k);
        product.noalias() -= rec.alpha_t * r_k * row_buf;
        out.values.push_back(static_cast<double>(q) - trace);
    }
    return out;
}

// The comparator df: a count of nonzero coefficients. Exact zero testing is
// valid because the path only ever moves coefficients by whole +-delta_t.
inline int zou_df(const Vec& beta) {
    int nz = 0;
    for (Eigen::Index j = 0; j < beta.size(); ++j)
        if (beta[j] != 0.0) ++nz;
    return nz;
}

// Per-step nonzero counts along a path.
inline std::vector<int> zou_df_series(const SolutionPath& path) {
    std::vector<int> out;
    out.reserve(path.steps.size());
    out.push_back(0);
    std::vector<long> n_of(static_cast<std::size_t>(path.p), 0);
    int nz = 0;
    for (std::size_t i = 1; i < path.steps.size(); ++i) {
        const auto& rec = path.steps[i];
        long prev = n_of[static_cast<std::size_t>(rec.k)];
        if (prev == 0 && rec.n_k != 0) ++nz;
        if (prev != 0 && rec.n_k == 0) --nz;
        n_of[static_cast<std::size_t>(rec.k)] = rec.n_k;
        out.push_back(nz);
    }
    return out;
}

// The linear smoother the path induces for its realized selection sequence,
// truncated after `upto` updates: mu <- mu + alpha_s x_k (x_k'(y - mu)).
// Applying it to fresh responses is what the covariance-definition oracle
// below measures; its trace is what the trackers compute.
class FrozenSmoother {
public:
    FrozenSmoother(const SolutionPath& path, const StandardizedDesign& design, std::size_t upto)
        : path_(&path), design_(&design), upto_(std::min(upto, path.steps.size() - 1)) {}

    Vec apply(const Vec& y) const {
        Vec mu = Vec::Zero(design_->n());
        for (std::size_t i = 1; i <= upto_; ++i) {
            const auto& rec = path_->steps[i];
            auto x = design_->x.col(rec.k);
            mu += (rec.alpha_t * x.dot(y - mu)) * x;
        }
        return mu;
    }

    std::size_t upto() const { return upto_; }

private:
    const SolutionPath* path_;
    const StandardizedDesign* design_;
    std::size_t upto_;
};

struct MonteCarloDf {
    double estimate = 0.0;
    double std_error = 0.0;  // jackknife over replicates
    int replicates = 0;
};

// Estimates df = sum_i cov(mu_hat_i, y_i) / tau2 by simulation: draws
// y_b = mu0 + eps_b with eps_b ~ N(0, tau2 I), applies the fitter, and
// accumulates sample covariances. Standard error by leave-one-out jackknife.
inline MonteCarloDf monte_carlo_df(const std::function<Vec(const Vec&)>& fitter, const Vec& mu0,
                                   double tau2, int replicates, std::uint64_t seed) {
    if (replicates < 100) throw input_error("monte_carlo_df: need at least 100 replicates");
    if (!(tau2 > 0.0)) throw input_error("monte_carlo_df: tau2 must be positive");
    const Eigen::Index n = mu0.size();
    const std::size_t b_count = static_cast<std::size_t>(replicates);

    Mat ys(n, replicates), mus(n, replicates);
    const double sd = std::sqrt(tau2);
    parallel_for(b_count, [&](std::size_t b) {
        Rng rng = Rng::stream(seed, b);
        Vec y(n);
        for (Eigen::Index i = 0; i < n; ++i) y[i] = mu0[i] + sd * rng.normal();
        ys.col(static_cast<Eigen::Index>(b)) = y;
        mus.col(static_cast<Eigen::Index>(b)) = fitter(y);
    });

    const double bd = static_cast<double>(replicates);
    Vec s_y = ys.rowwise().sum();
    Vec s_m = mus.rowwise().sum();
    Vec s_my = (mus.array() * ys.array()).rowwise().sum();

    double est = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        est += (s_my[i] - s_m[i] * s_y[i] / bd) / (bd - 1.0);
    est /= tau2;

    // leave-one-out df values from the same sufficient statistics
    Vec loo(replicates);
    for (int b = 0; b < replicates; ++b) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            double a_m = s_m[i] - mus(i, b);
            double a_y = s_y[i] - ys(i, b);
            double a_my = s_my[i] - mus(i, b) * ys(i, b);
            acc += (a_my - a_m * a_y / (bd - 1.0)) / (bd - 2.0);
        }
        loo[b] = acc / tau2;
    }
    double loo_mean = loo.mean();
    double ss = (loo.array() - loo_mean).square().sum();
    MonteCarloDf out;
    out.estimate = est;
    out.std_error = std::sqrt((bd - 1.0) / bd * ss);
    out.replicates = replicates;
    return out;
}

}  // namespace gps
