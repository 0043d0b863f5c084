#pragma once

#include <limits>
#include <vector>

#include "flocksim/types.hpp"

namespace flocksim {

enum class WeightKind { Regular, Constant, Table };

/// Communication weight psi(distance): non-negative and non-increasing.
/// Regular is psi(d) = K * (1 + d^2)^(-beta/2).
struct CommWeight {
    WeightKind kind = WeightKind::Constant;
    double beta = 0.0;
    double K = 1.0;
    double c = 0.0;
    std::vector<double> breakpoints;  // Table: strictly increasing distances
    std::vector<double> values;       // Table: non-increasing weights

    static CommWeight regular(double beta, double K = 1.0);
    static CommWeight constant(double c);
    static CommWeight table(std::vector<double> breakpoints, std::vector<double> values);

    void validate() const;
};

double eval_weight(const CommWeight& w, double distance);

/// Certified lower bound on psi_R along a trajectory (regular weight only):
/// [psi0_pair^(-1/beta) + integral]^(-beta), where integral accumulates
/// ||v_j - v_i||_2 over [0, t] for that pair.
double regular_weight_lower_bound(double psi0_pair, double vel_diff_integral, double beta);

/// Inputs for the closed-form min-pair weight integral bounds.
struct WeightBound {
    double psi0_min = 0.0;  // min over pairs of psi_R at t = 0
    double M = 0.0;         // uniform bound on ||v_j - v_i||_2
    double beta = 0.0;
};

enum class QRegime { q_ge_2, q_lt_2 };

constexpr double kInfiniteHorizon = std::numeric_limits<double>::infinity();

/// Closed-form lower bound on the integral of the min-pair regular weight over [0, t].
/// t may be kInfiniteHorizon: the bound is +inf for beta <= 1 and
/// psi0^((beta-1)/beta) / (M (beta-1)) for beta > 1.
/// The q regime does not change the bound; it is carried into condition reports.
double psi_min_integral_lower_bound(const WeightBound& bound, double t,
                                    QRegime regime = QRegime::q_ge_2);

}  // namespace flocksim
