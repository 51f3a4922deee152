#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "gpsselect/common.hpp"

namespace gps {

enum class PenaltyFamily { Lasso, ElasticNet, GeneralizedElasticNet };

// Gradient floor before dividing lambda_j = g_j / p_j; shipped families
// never reach it, user-supplied gradients might.
inline constexpr double kPenaltyGradientFloor = 1e-12;

// A penalty is used by the path engine only through the gradient of its
// value in |beta_j|, which must be strictly positive everywhere.
struct PenaltySpec {
    PenaltyFamily family = PenaltyFamily::Lasso;
    double alpha_mix = 0.0;

    // Optional user-supplied gradient-in-absolute-value; overrides family.
    std::function<double(double /*abs_beta*/)> custom;

    static PenaltySpec lasso() { return {PenaltyFamily::Lasso, 0.0, nullptr}; }
    static PenaltySpec elastic_net(double a) { return {PenaltyFamily::ElasticNet, a, nullptr}; }
    static PenaltySpec gen_elastic_net(double a) {
        return {PenaltyFamily::GeneralizedElasticNet, a, nullptr};
    }
};

inline void validate(const PenaltySpec& spec) {
    if (spec.custom) return;
    switch (spec.family) {
        case PenaltyFamily::Lasso:
            return;
        case PenaltyFamily::ElasticNet:
            if (std::isnan(spec.alpha_mix) || spec.alpha_mix < 0.0 || spec.alpha_mix > 1.0)
                throw input_error("elastic net requires 0 <= alpha <= 1, got " +
                                  std::to_string(spec.alpha_mix));
            return;
        case PenaltyFamily::GeneralizedElasticNet:
            if (std::isnan(spec.alpha_mix) || spec.alpha_mix <= 0.0 || spec.alpha_mix >= 1.0)
                throw input_error("generalized elastic net requires 0 < alpha < 1, got " +
                                  std::to_string(spec.alpha_mix));
            return;
    }
    throw internal_error("unknown penalty family");
}

// dP/d|beta_j| at one coordinate.
inline double gradient_abs(const PenaltySpec& spec, double abs_beta) {
    if (spec.custom) return spec.custom(abs_beta);
    switch (spec.family) {
        case PenaltyFamily::Lasso:
            return 1.0;
        case PenaltyFamily::ElasticNet:
            return spec.alpha_mix * abs_beta + (1.0 - spec.alpha_mix);
        case PenaltyFamily::GeneralizedElasticNet:
            return (1.0 - spec.alpha_mix) / (spec.alpha_mix + (1.0 - spec.alpha_mix) * abs_beta);
    }
    throw internal_error("unknown penalty family");
}

// dP/d|beta_j| for all coordinates.
inline Vec gradient_abs(const PenaltySpec& spec, const Vec& beta) {
    validate(spec);
    Vec out(beta.size());
    for (Eigen::Index j = 0; j < beta.size(); ++j) out[j] = gradient_abs(spec, std::abs(beta[j]));
    return out;
}

inline std::string penalty_name(const PenaltySpec& spec) {
    if (spec.custom) return "custom";
    switch (spec.family) {
        case PenaltyFamily::Lasso:
            return "lasso";
        case PenaltyFamily::ElasticNet:
            return "enet";
        case PenaltyFamily::GeneralizedElasticNet:
            return "genet";
    }
    return "?";
}

}  // namespace gps
