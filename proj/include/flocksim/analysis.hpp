#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flocksim/integrator.hpp"

namespace flocksim {

/// Per-sample series derived from a trajectory.
struct DiagnosticSeries {
    std::vector<double> times;
    Matrix vM;              // samples x d, per-coordinate max over agents
    Matrix vm;              // samples x d, per-coordinate min
    Matrix speed_norms;     // samples x N, ||v_i||_2
    Vector vel_diameter_2;  // ||vM - vm||_2 (Euclidean norm of the extrema gap vector)
    Vector max_pair_vel;    // max over pairs of ||v_j - v_i||_2
    Vector pos_diameter;    // max over pairs of ||x_j - x_i||_2
    Vector psi_min;         // min over pairs of psi(||x_j - x_i||_2)
};

DiagnosticSeries compute_diagnostics(const Trajectory& traj, const CommWeight& weight);

enum class Relation { LessThan, GreaterThan };

/// Evaluation of one sufficient condition: satisfied iff "lhs relation rhs" holds.
struct ConditionReport {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    Relation relation = Relation::GreaterThan;
    bool satisfied = false;
    double horizon = 0.0;  // time the integrals cover; may be infinity
    std::string source;    // "trajectory-integral" or "analytic-bound"
    std::vector<std::string> notes;
    bool advisory = false;  // set when an unquantified smallness hypothesis applies
};

struct NormEquivalence {
    double C_M = 1.0;
    double C_m = 1.0;
};

/// C_M = max{1, (Nd)^(1/r - 1/s)}, C_m = min{1, (Nd)^(1/r - 1/s)}.
NormEquivalence norm_equivalence_constants(Eigen::Index n_agents, Eigen::Index dim,
                                           double r, double s);

struct PowerIneqConstants {
    double C1 = 0.0;  // max sampled ratio in the difference bound
    double C2 = 0.0;  // min sampled ratio in the monotonicity bound
};

/// Monte Carlo estimates of the constants in the two phi_gamma inequalities,
/// sampled over pairs in the unit ball. Estimates, not proven values.
/// Throws DegenerateSamples when every pair is skipped.
PowerIneqConstants power_inequality_constants(double gamma, int dim, double delta,
                                           int samples, std::uint64_t seed = 12345);

/// Finite-flocking-time condition for the norm-type system (1 < p < 2):
/// 4 C_m (1 - p/2) * integral of psi_min  >  ||vM(0) - vm(0)||_2^(2-p).
/// Uses the trajectory trapezoid integral when it already certifies the
/// inequality, otherwise the analytic regular-weight bound when available.
ConditionReport check_norm_type_flocking_condition(const Trajectory& traj,
                                                   const ModelParams& params,
                                                   const CommWeight& weight, double C_m);

/// Per-coordinate finite-extinction condition for the vector-type system,
/// branching on q >= 2 vs 1 < q < 2 (the latter corrected by a_k C1 B_k^(q-p)).
ConditionReport check_vector_type_fet_condition(const Trajectory& traj,
                                                const ModelParams& params,
                                                const CommWeight& weight, double C1_est,
                                                Eigen::Index k);

/// Condition for a sign-straddling coordinate to converge to +C_abk:
/// |vm_k(0)|^(2-p) < (2-p) * integral of psi_min (q >= 2 branch).
/// Requires vm_k(0) < 0 < vM_k(0).
ConditionReport check_positive_convergence_condition(const Trajectory& traj,
                                                     const ModelParams& params,
                                                     const CommWeight& weight,
                                                     Eigen::Index k);

/// Spread condition under which the regular weight with beta > 1 still certifies
/// finite extinction: 2(2-p)/(M(beta-1)) * psi_min(0)^((beta-1)/beta) must exceed
/// (vM_k(0) - vm_k(0))^(2-p). Evaluated from the initial state alone.
ConditionReport check_regular_weight_spread_condition(const AgentEnsemble& initial,
                                                      const ModelParams& params,
                                                      const CommWeight& weight,
                                                      Eigen::Index k);

enum class DecayKind { NormMax, NormMin, VecMax, VecMin };

struct DecayReport {
    DecayKind which = DecayKind::NormMax;
    Eigen::Index k = 0;     // coordinate (vector kinds only)
    double T = 0.0;         // start of the certified window
    double max_violation = 0.0;  // max over samples of observed deviation - bound
    double rate = 0.0;      // exponential rate used by the bound
};

/// Check one exponential decay estimate on [T, t_end]. The regime hypothesis
/// (e.g. vM_k(t) > C_abk throughout for VecMax) is verified on the samples
/// first; throws RegimeNotEntered when it fails.
DecayReport verify_decay_estimate(const Trajectory& traj, const ModelParams& params,
                                  Eigen::Index k, DecayKind which, double T);

enum class LimitClass { MinusCab, Zero, PlusCab, Unresolved };

/// Nearest admissible terminal value, per agent speed for the norm-type system
/// (Zero or PlusCab), per coordinate for the vector-type system.
struct TerminalClassification {
    std::vector<LimitClass> labels;   // size N (norm) or d (vector)
    std::vector<double> observed;     // terminal speed / common coordinate value
    bool settled = false;             // velocity field varied < tol over last 10%
};

TerminalClassification classify_terminal_behavior(const Trajectory& traj,
                                                  const ModelParams& params, double tol);

// --- runtime property checks (used by tests and the CLI `check` registry) ---

struct PropertyReport {
    std::string name;
    bool passed = false;
    double worst = 0.0;  // largest violation found (<= 0 when passed)
    std::string detail;
};

/// Uniform box B_mk <= v_ik(t) <= B_Mk (+tol) on every sample (vector type).
PropertyReport check_vector_bounds(const Trajectory& traj, const ModelParams& params,
                                   double tol = 1e-6);

/// |v_ik(t)| <= max{C_ab, max |v_ik(0)|} + tol (norm type).
PropertyReport check_norm_bounds(const Trajectory& traj, const ModelParams& params,
                                 double tol = 1e-6);

/// Eventually exactly one of the three positions relative to C_abk holds, per k.
PropertyReport check_trichotomy(const Trajectory& traj, const ModelParams& params,
                                double tol = 1e-6);

/// Non-negative non-zero initial coordinate stays > -tol for t > 0.
PropertyReport check_positivity_preservation(const Trajectory& traj,
                                             const ModelParams& params, double tol = 1e-6);

/// limsup vM_k <= C_abk + tol and liminf vm_k >= -C_abk - tol on the last 10%.
PropertyReport check_limit_bracketing(const Trajectory& traj, const ModelParams& params,
                                      double tol = 1e-6);

/// vM_k non-increasing between samples while above C_abk; vm_k symmetric below -C_abk.
PropertyReport check_monotone_exterior_decay(const Trajectory& traj,
                                             const ModelParams& params, double tol = 1e-6);

/// Norm-type invariant sets: once ||vM|| <= C_ab it stays <= C_ab + tol;
/// once ||vm|| >= C_ab it stays >= C_ab - tol (non-negative initial data).
PropertyReport check_norm_invariant_sets(const Trajectory& traj, const ModelParams& params,
                                         double tol = 1e-6);

/// Position diameter bounded: growth over the last half below 1% of its value.
PropertyReport check_asymptotic_flocking(const Trajectory& traj);

/// Certified lower bound <= directly computed weight for every pair and sample.
PropertyReport check_weight_lower_bound_validity(const Trajectory& traj,
                                                 const CommWeight& weight);

}  // namespace flocksim
