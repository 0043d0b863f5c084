#include "flocksim/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace flocksim {

void SimConfig::validate() const {
    if (!(t_end > 0.0)) throw ValidationError("t_end must be > 0");
    if (scheme == Scheme::RK4 && !(dt > 0.0)) throw ValidationError("dt must be > 0");
    if (scheme == Scheme::AdaptiveRK45) {
        if (!(rtol > 0.0) || !(atol > 0.0)) throw ValidationError("rtol and atol must be > 0");
        if (!(dt_min > 0.0) || !(dt_max >= dt_min))
            throw ValidationError("need 0 < dt_min <= dt_max");
    }
    if (output_times.empty() && output_stride < 1)
        throw ValidationError("output_stride must be >= 1");
    for (std::size_t i = 0; i < output_times.size(); ++i) {
        if (output_times[i] < 0.0 || output_times[i] > t_end)
            throw ValidationError("output times must lie in [0, t_end]");
        if (i > 0 && output_times[i] <= output_times[i - 1])
            throw ValidationError("output times must be strictly increasing");
    }
    if (!(consensus_eps > 0.0)) throw ValidationError("consensus_eps must be > 0");
}

std::size_t pair_index(Eigen::Index i, Eigen::Index j, Eigen::Index n) {
    if (i > j) std::swap(i, j);
    // offset of row i in the strictly-upper-triangular enumeration
    return static_cast<std::size_t>(i * (2 * n - i - 1) / 2 + (j - i - 1));
}

double velocity_diameter(const Matrix& v) {
    const Eigen::Index n = v.rows();
    double best = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            best = std::max(best, (v.row(j) - v.row(i)).norm());
    return best;
}

AgentEnsemble clamp_to_consensus(const AgentEnsemble& state, double eps) {
    if (velocity_diameter(state.velocities) >= eps)
        throw ValidationError("velocity diameter not below the consensus threshold");
    AgentEnsemble out = state;
    const Eigen::RowVectorXd mean = state.velocities.colwise().mean();
    out.velocities.rowwise() = mean;
    return out;
}

namespace {

struct Phase {
    Matrix x;
    Matrix v;
};

Phase eval(const AgentEnsemble& templ, const Phase& y, double t, const ModelParams& params,
           const CommWeight& weight) {
    AgentEnsemble s = templ;
    s.positions = y.x;
    s.velocities = y.v;
    s.time = t;
    const Derivative d = rhs(s, params, weight);
    return {d.dx, d.dv};
}

Phase axpy(const Phase& y, double h, const Phase& k) { return {y.x + h * k.x, y.v + h * k.v}; }

bool finite(const Phase& y) { return y.x.allFinite() && y.v.allFinite(); }

// Dormand-Prince 5(4) coefficients
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
                 A64 = 49.0 / 176, A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784,
                 B6 = 11.0 / 84;
// b5 - b4, for the embedded error estimate
constexpr double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920,
                 E5 = -17253.0 / 339200, E6 = 22.0 / 525, E7 = -1.0 / 40;

struct DopriStep {
    Phase y_new;
    Phase err;
    Phase k_last;  // FSAL stage, f(t+h, y_new)
};

DopriStep dopri_step(const AgentEnsemble& templ, const Phase& y, const Phase& k1, double t,
                     double h, const ModelParams& params, const CommWeight& weight) {
    const Phase k2 = eval(templ, axpy(y, h * A21, k1), t + h / 5, params, weight);
    const Phase k3 = eval(templ, {y.x + h * (A31 * k1.x + A32 * k2.x),
                                  y.v + h * (A31 * k1.v + A32 * k2.v)},
                          t + 3 * h / 10, params, weight);
    const Phase k4 = eval(templ, {y.x + h * (A41 * k1.x + A42 * k2.x + A43 * k3.x),
                                  y.v + h * (A41 * k1.v + A42 * k2.v + A43 * k3.v)},
                          t + 4 * h / 5, params, weight);
    const Phase k5 = eval(templ,
                          {y.x + h * (A51 * k1.x + A52 * k2.x + A53 * k3.x + A54 * k4.x),
                           y.v + h * (A51 * k1.v + A52 * k2.v + A53 * k3.v + A54 * k4.v)},
                          t + 8 * h / 9, params, weight);
    const Phase k6 = eval(
        templ,
        {y.x + h * (A61 * k1.x + A62 * k2.x + A63 * k3.x + A64 * k4.x + A65 * k5.x),
         y.v + h * (A61 * k1.v + A62 * k2.v + A63 * k3.v + A64 * k4.v + A65 * k5.v)},
        t + h, params, weight);

    Phase y_new{y.x + h * (B1 * k1.x + B3 * k3.x + B4 * k4.x + B5 * k5.x + B6 * k6.x),
                y.v + h * (B1 * k1.v + B3 * k3.v + B4 * k4.v + B5 * k5.v + B6 * k6.v)};
    const Phase k7 = eval(templ, y_new, t + h, params, weight);

    Phase err{h * (E1 * k1.x + E3 * k3.x + E4 * k4.x + E5 * k5.x + E6 * k6.x + E7 * k7.x),
              h * (E1 * k1.v + E3 * k3.v + E4 * k4.v + E5 * k5.v + E6 * k6.v + E7 * k7.v)};
    return {std::move(y_new), std::move(err), k7};
}

double error_ratio(const Phase& y_old, const Phase& y_new, const Phase& err, double atol,
                   double rtol) {
    double worst = 0.0;
    auto scan = [&](const Matrix& e, const Matrix& a, const Matrix& b) {
        for (Eigen::Index i = 0; i < e.rows(); ++i)
            for (Eigen::Index k = 0; k < e.cols(); ++k) {
                const double sc = atol + rtol * std::max(std::abs(a(i, k)), std::abs(b(i, k)));
                worst = std::max(worst, std::abs(e(i, k)) / sc);
            }
    };
    scan(err.x, y_old.x, y_new.x);
    scan(err.v, y_old.v, y_new.v);
    return worst;
}

Phase rk4_step(const AgentEnsemble& templ, const Phase& y, double t, double h,
               const ModelParams& params, const CommWeight& weight) {
    const Phase k1 = eval(templ, y, t, params, weight);
    const Phase k2 = eval(templ, axpy(y, h / 2, k1), t + h / 2, params, weight);
    const Phase k3 = eval(templ, axpy(y, h / 2, k2), t + h / 2, params, weight);
    const Phase k4 = eval(templ, axpy(y, h, k3), t + h, params, weight);
    return {y.x + h / 6 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x),
            y.v + h / 6 * (k1.v + 2 * k2.v + 2 * k3.v + k4.v)};
}

// Bisection on the linear interpolant between two accepted states:
// earliest tau in [t0, t1] with g(lerp(tau)) < 0, refined to `res`.
template <typename G>
double refine_event(double t0, double t1, double res, const G& g) {
    double lo = t0, hi = t1;
    while (hi - lo > res) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) < 0.0)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

class Recorder {
  public:
    Recorder(Trajectory& traj, const SimConfig& cfg, const AgentEnsemble& initial,
             std::size_t n_pairs)
        : traj_(traj), cfg_(cfg), integrals_(n_pairs, 0.0) {
        push(0.0, initial.positions, initial.velocities, integrals_);
        if (!cfg_.output_times.empty() && cfg_.output_times.front() == 0.0) ++next_time_;
    }

    std::vector<double>& integrals() { return integrals_; }

    void accepted_step(double t0, const Phase& y0, const std::vector<double>& I0, double t1,
                       const Phase& y1) {
        ++accepted_;
        if (!cfg_.output_times.empty()) {
            while (next_time_ < cfg_.output_times.size() &&
                   cfg_.output_times[next_time_] <= t1) {
                const double ts = cfg_.output_times[next_time_];
                const double w = (ts - t0) / (t1 - t0);
                std::vector<double> I(integrals_.size());
                for (std::size_t m = 0; m < I.size(); ++m)
                    I[m] = I0[m] + w * (integrals_[m] - I0[m]);
                push(ts, y0.x + w * (y1.x - y0.x), y0.v + w * (y1.v - y0.v), I);
                ++next_time_;
            }
        } else if (accepted_ % cfg_.output_stride == 0) {
            push(t1, y1.x, y1.v, integrals_);
        }
    }

    void finalize(double t, const Phase& y) {
        if (traj_.times.back() < t) push(t, y.x, y.v, integrals_);
    }

  private:
    void push(double t, Matrix x, Matrix v, const std::vector<double>& I) {
        AgentEnsemble s;
        s.positions = std::move(x);
        s.velocities = std::move(v);
        s.time = t;
        s.validate();
        traj_.times.push_back(t);
        traj_.samples.push_back(std::move(s));
        traj_.pair_vel_integrals.push_back(I);
    }

    Trajectory& traj_;
    const SimConfig& cfg_;
    std::vector<double> integrals_;
    std::size_t next_time_ = 0;
    long accepted_ = 0;
};

}  // namespace

Trajectory integrate(const AgentEnsemble& initial, const ModelParams& params,
                     const CommWeight& weight, const SimConfig& config) {
    initial.validate();
    params.validate(initial.dim());
    weight.validate();
    config.validate();

    const Eigen::Index n = initial.n_agents();
    const Eigen::Index d = initial.dim();
    const std::size_t n_pairs = static_cast<std::size_t>(n * (n - 1) / 2);

    Trajectory traj;
    Recorder rec(traj, config, initial, n_pairs);

    Phase y{initial.positions, initial.velocities};
    double t = 0.0;

    // coordinates that start sign-straddling, watched for the exit event
    std::vector<bool> straddling(d, false);
    for (Eigen::Index k = 0; k < d; ++k)
        straddling[k] = initial.velocities.col(k).minCoeff() < 0.0 &&
                        initial.velocities.col(k).maxCoeff() > 0.0;
    bool flocked = false;

    auto accumulate_pairs = [&](const Phase& y0, const Phase& y1, double h) {
        auto& I = rec.integrals();
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = i + 1; j < n; ++j)
                I[pair_index(i, j, n)] +=
                    0.5 * h *
                    ((y0.v.row(j) - y0.v.row(i)).norm() + (y1.v.row(j) - y1.v.row(i)).norm());
    };

    // returns true when the consensus clamp rewrote y1
    auto handle_events = [&](double t0, const Phase& y0, double t1, Phase& y1) -> bool {
        const double res = 1e-3 * (t1 - t0);
        auto lerp_v = [&](double tau) -> Matrix {
            const double w = (tau - t0) / (t1 - t0);
            return y0.v + w * (y1.v - y0.v);
        };
        bool clamped = false;
        if (!flocked && velocity_diameter(y1.v) < config.consensus_eps) {
            const double te = refine_event(t0, t1, res, [&](double tau) {
                return velocity_diameter(lerp_v(tau)) - config.consensus_eps;
            });
            traj.events.push_back({te, EventKind::FlockingDetected, -1});
            flocked = true;
            if (config.clamp_on_consensus) {
                const Eigen::RowVectorXd mean = y1.v.colwise().mean();
                y1.v.rowwise() = mean;
                traj.events.push_back({t1, EventKind::ClampApplied, -1});
                clamped = true;
            }
        }
        for (Eigen::Index k = 0; k < d; ++k) {
            if (!straddling[k]) continue;
            const bool still = y1.v.col(k).minCoeff() < 0.0 && y1.v.col(k).maxCoeff() > 0.0;
            if (still) continue;
            const double te = refine_event(t0, t1, res, [&](double tau) {
                const Matrix v = lerp_v(tau);
                return std::min(v.col(k).maxCoeff(), -v.col(k).minCoeff());
            });
            traj.events.push_back({te, EventKind::CoordinateSignExit, static_cast<int>(k)});
            straddling[k] = false;
        }
        return clamped;
    };

    if (config.scheme == Scheme::RK4) {
        while (t < config.t_end * (1.0 - 1e-14)) {
            const double h = std::min(config.dt, config.t_end - t);
            Phase y1 = rk4_step(initial, y, t, h, params, weight);
            if (!finite(y1))
                throw NonFiniteState("state became non-finite at t = " + std::to_string(t));
            const std::vector<double> I0 = rec.integrals();
            accumulate_pairs(y, y1, h);
            handle_events(t, y, t + h, y1);
            rec.accepted_step(t, y, I0, t + h, y1);
            y = std::move(y1);
            t += h;
        }
        rec.finalize(t, y);
        return traj;
    }

    // adaptive Dormand-Prince 5(4) with PI step control and FSAL reuse
    Phase k1 = eval(initial, y, t, params, weight);
    double h = std::min({config.dt_max, config.t_end / 10.0, 1e-2});
    double err_prev = 1.0;
    bool nonfinite_reject = false;

    while (t < config.t_end) {
        h = std::min(h, config.t_end - t);
        if (h < config.dt_min) {
            if (nonfinite_reject)
                throw NonFiniteState("divergence: step collapsed below dt_min at t = " +
                                     std::to_string(t));
            throw StepSizeUnderflow("adaptive step fell below dt_min at t = " +
                                    std::to_string(t));
        }

        DopriStep st = dopri_step(initial, y, k1, t, h, params, weight);
        double ratio;
        if (!finite(st.y_new) || !finite(st.err)) {
            ratio = std::numeric_limits<double>::infinity();
            nonfinite_reject = true;
        } else {
            ratio = error_ratio(y, st.y_new, st.err, config.atol, config.rtol);
            nonfinite_reject = false;
        }

        if (ratio <= 1.0) {
            const std::vector<double> I0 = rec.integrals();
            accumulate_pairs(y, st.y_new, h);
            const double t1 = t + h;
            const bool clamped = handle_events(t, y, t1, st.y_new);
            rec.accepted_step(t, y, I0, t1, st.y_new);
            y = std::move(st.y_new);
            t = t1;
            // FSAL stage is stale after the clamp rewrote the state
            k1 = clamped ? eval(initial, y, t, params, weight) : std::move(st.k_last);

            const double e = std::max(ratio, 1e-10);
            double fac = 0.9 * std::pow(e, -0.14) * std::pow(err_prev, 0.08);
            fac = std::clamp(fac, 0.2, 5.0);
            h = std::min(h * fac, config.dt_max);
            err_prev = e;
        } else {
            const double fac = std::isfinite(ratio)
                                   ? std::max(0.2, 0.9 * std::pow(ratio, -0.2))
                                   : 0.25;
            h *= fac;
        }
    }
    rec.finalize(t, y);
    return traj;
}

std::optional<double> detect_flocking_time(const Trajectory& traj, double eps) {
    if (traj.samples.empty()) throw ValidationError("empty trajectory");
    const std::size_t n = traj.samples.size();
    std::size_t first = n;  // earliest index of the all-below suffix
    for (std::size_t i = n; i-- > 0;) {
        if (velocity_diameter(traj.samples[i].velocities) < eps)
            first = i;
        else
            break;
    }
    if (first == n) return std::nullopt;
    return traj.times[first];
}

}  // namespace flocksim
