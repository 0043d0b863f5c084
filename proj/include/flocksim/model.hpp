#pragma once

#include "flocksim/types.hpp"
#include "flocksim/weights.hpp"

namespace flocksim {

/// phi_gamma(s) = |s|^(gamma-2) s, with phi_gamma(0) defined as 0 for every gamma > 1.
double signed_power(double s, double gamma);

/// Discrete p-Laplacian applied to the velocity field:
/// (Lap v)(i,k) = sum_j psi(||x_j - x_i||_2) |v_jk - v_ik|^(p-2) (v_jk - v_ik).
/// Row-parallel kernel; bit-identical to p_laplacian_serial for any thread count.
Matrix p_laplacian(const AgentEnsemble& state, const CommWeight& weight, double p);

/// Naive single-threaded evaluation of the defining sum, kept as the reference
/// the parallel kernel is tested and benchmarked against.
Matrix p_laplacian_serial(const AgentEnsemble& state, const CommWeight& weight, double p);

struct Derivative {
    Matrix dx;
    Matrix dv;
};

/// dv(i,k) = cs * Lap v(i,k) + a v_ik ||v_i||^(q-2) - b v_ik ||v_i||^(r-2); dx = v.
Derivative rhs_norm_type(const AgentEnsemble& state, const ModelParams& params,
                         const CommWeight& weight);

/// dv(i,k) = cs * Lap v(i,k) + a_k phi_q(v_ik) - b_k phi_r(v_ik); dx = v.
Derivative rhs_vector_type(const AgentEnsemble& state, const ModelParams& params,
                           const CommWeight& weight);

/// Dispatch on params.variant.
Derivative rhs(const AgentEnsemble& state, const ModelParams& params, const CommWeight& weight);

/// (a_k/b_k)^(1/(r-q)) for coordinate k.
VelocityLimit velocity_limit(const ModelParams& params, Eigen::Index k);

}  // namespace flocksim
