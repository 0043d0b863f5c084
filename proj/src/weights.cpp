#include "flocksim/weights.hpp"

#include <cmath>

namespace flocksim {

CommWeight CommWeight::regular(double beta, double K) {
    CommWeight w;
    w.kind = WeightKind::Regular;
    w.beta = beta;
    w.K = K;
    w.validate();
    return w;
}

CommWeight CommWeight::constant(double c) {
    CommWeight w;
    w.kind = WeightKind::Constant;
    w.c = c;
    w.validate();
    return w;
}

CommWeight CommWeight::table(std::vector<double> breakpoints, std::vector<double> values) {
    CommWeight w;
    w.kind = WeightKind::Table;
    w.breakpoints = std::move(breakpoints);
    w.values = std::move(values);
    w.validate();
    return w;
}

void CommWeight::validate() const {
    switch (kind) {
        case WeightKind::Regular:
            if (!(beta > 0.0)) throw ValidationError("regular weight requires beta > 0");
            if (!(K > 0.0)) throw ValidationError("regular weight requires K > 0");
            break;
        case WeightKind::Constant:
            if (!(c >= 0.0)) throw ValidationError("constant weight requires c >= 0");
            break;
        case WeightKind::Table: {
            if (breakpoints.size() < 2 || breakpoints.size() != values.size())
                throw ValidationError("table weight needs matching breakpoints/values, >= 2 entries");
            for (std::size_t i = 0; i < breakpoints.size(); ++i) {
                if (values[i] < 0.0) throw ValidationError("table weight values must be >= 0");
                if (i > 0 && breakpoints[i] <= breakpoints[i - 1])
                    throw ValidationError("table breakpoints must be strictly increasing");
                if (i > 0 && values[i] > values[i - 1])
                    throw ValidationError("table weight must be non-increasing");
            }
            if (breakpoints.front() < 0.0)
                throw ValidationError("table breakpoints must be >= 0");
            break;
        }
    }
}

double eval_weight(const CommWeight& w, double distance) {
    switch (w.kind) {
        case WeightKind::Regular:
            return w.K * std::pow(1.0 + distance * distance, -w.beta / 2.0);
        case WeightKind::Constant:
            return w.c;
        case WeightKind::Table: {
            if (distance <= w.breakpoints.front()) return w.values.front();
            if (distance >= w.breakpoints.back()) return w.values.back();
            std::size_t hi = 1;
            while (w.breakpoints[hi] < distance) ++hi;
            const double t = (distance - w.breakpoints[hi - 1]) /
                             (w.breakpoints[hi] - w.breakpoints[hi - 1]);
            return w.values[hi - 1] + t * (w.values[hi] - w.values[hi - 1]);
        }
    }
    return 0.0;
}

double regular_weight_lower_bound(double psi0_pair, double vel_diff_integral, double beta) {
    if (!(psi0_pair > 0.0)) throw ValidationError("psi0_pair must be > 0");
    if (!(beta > 0.0)) throw ValidationError("beta must be > 0");
    if (vel_diff_integral < 0.0) throw ValidationError("velocity integral must be >= 0");
    return std::pow(std::pow(psi0_pair, -1.0 / beta) + vel_diff_integral, -beta);
}

double psi_min_integral_lower_bound(const WeightBound& bound, double t, QRegime) {
    if (!(bound.M > 0.0)) throw ValidationError("uniform velocity bound M must be > 0");
    if (!(bound.psi0_min > 0.0)) throw ValidationError("psi0_min must be > 0");
    if (!(bound.beta > 0.0)) throw ValidationError("beta must be > 0");

    const double M = bound.M;
    const double beta = bound.beta;
    const double u0 = std::pow(bound.psi0_min, -1.0 / beta);  // psi_min(0)^(-1/beta)

    if (std::isinf(t)) {
        if (beta <= 1.0) return kInfiniteHorizon;
        return std::pow(bound.psi0_min, (beta - 1.0) / beta) / (M * (beta - 1.0));
    }
    if (t <= 0.0) return 0.0;

    if (beta == 1.0) {
        // integrand (u0 + M s)^-1; the antiderivative carries the 1/M factor
        return (std::log(u0 + M * t) - std::log(u0)) / M;
    }
    return (std::pow(u0 + M * t, 1.0 - beta) - std::pow(u0, 1.0 - beta)) / (M * (1.0 - beta));
}

}  // namespace flocksim
