#pragma once

#include <optional>
#include <vector>

#include "flocksim/model.hpp"

namespace flocksim {

enum class Scheme { RK4, AdaptiveRK45 };

struct SimConfig {
    double t_end = 10.0;
    Scheme scheme = Scheme::AdaptiveRK45;

    double dt = 1e-3;  // fixed-step RK4

    // adaptive control
    double rtol = 1e-7;
    double atol = 1e-10;
    double dt_min = 1e-12;
    double dt_max = 0.5;

    // output at every output_stride-th accepted step, or at explicit times
    int output_stride = 1;
    std::vector<double> output_times;  // when non-empty, overrides the stride

    double consensus_eps = 1e-9;
    bool clamp_on_consensus = true;

    void validate() const;
};

enum class EventKind { FlockingDetected, CoordinateSignExit, ClampApplied };

struct Event {
    double time = 0.0;
    EventKind kind = EventKind::FlockingDetected;
    int coordinate = -1;  // CoordinateSignExit only
};

/// Time-stamped states plus per-pair accumulated velocity-difference integrals,
/// aligned with the samples. Pair order is (i,j), i < j, lexicographic.
struct Trajectory {
    std::vector<double> times;
    std::vector<AgentEnsemble> samples;
    std::vector<Event> events;
    std::vector<std::vector<double>> pair_vel_integrals;  // per sample, size N(N-1)/2

    Eigen::Index n_agents() const { return samples.empty() ? 0 : samples.front().n_agents(); }
    Eigen::Index dim() const { return samples.empty() ? 0 : samples.front().dim(); }
    const AgentEnsemble& back() const { return samples.back(); }
};

std::size_t pair_index(Eigen::Index i, Eigen::Index j, Eigen::Index n);

/// max over pairs of ||v_j - v_i||_2
double velocity_diameter(const Matrix& velocities);

/// Integrate either system over [0, t_end].
/// Throws StepSizeUnderflow when the adaptive step falls below dt_min and
/// NonFiniteState if a step produces NaN/Inf.
Trajectory integrate(const AgentEnsemble& initial, const ModelParams& params,
                     const CommWeight& weight, const SimConfig& config);

/// Earliest sample time with velocity diameter < eps that stays < eps afterwards.
std::optional<double> detect_flocking_time(const Trajectory& traj, double eps);

/// Replace all velocity rows by their mean; requires diameter < eps.
AgentEnsemble clamp_to_consensus(const AgentEnsemble& state, double eps);

}  // namespace flocksim
