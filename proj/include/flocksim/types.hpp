#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace flocksim {

using Matrix = Eigen::MatrixXd;  // row i = agent, column k = coordinate
using Vector = Eigen::VectorXd;

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigSyntaxError : std::runtime_error {
    int line;
    ConfigSyntaxError(int line_, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line_) + ": " + msg), line(line_) {}
};

struct StepSizeUnderflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonFiniteState : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RegimeNotEntered : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateSamples : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Full dynamical state: N agents in d dimensions at a given time.
struct AgentEnsemble {
    Matrix positions;   // N x d
    Matrix velocities;  // N x d
    double time = 0.0;

    AgentEnsemble() = default;
    AgentEnsemble(Matrix x, Matrix v, double t = 0.0);

    Eigen::Index n_agents() const { return positions.rows(); }
    Eigen::Index dim() const { return positions.cols(); }

    // throws ValidationError on shape mismatch or non-finite entries
    void validate() const;
};

enum class Variant { NormType, VectorType };

/// Exponents and friction coefficients for either system.
/// a and b are per-coordinate for VectorType; length-1 (broadcast) for NormType.
struct ModelParams {
    Variant variant = Variant::NormType;
    double p = 2.0;
    double q = 2.0;
    double r = 4.0;
    Vector a;
    Vector b;
    double coupling_scale = 1.0;

    static ModelParams norm_type(double p, double q, double r, double a, double b,
                                 double coupling_scale = 1.0);
    static ModelParams vector_type(double p, double q, double r, Vector a, Vector b,
                                   double coupling_scale = 1.0);

    // throws ValidationError; dim checked when > 0
    void validate(Eigen::Index dim = 0) const;

    double a_at(Eigen::Index k) const { return a.size() == 1 ? a[0] : a[k]; }
    double b_at(Eigen::Index k) const { return b.size() == 1 ? b[0] : b[k]; }
};

/// Terminal speed (a_k/b_k)^(1/(r-q)); always derived from params, never stored.
struct VelocityLimit {
    double value = 0.0;
};

}  // namespace flocksim
