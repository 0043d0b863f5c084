#include "flocksim/model.hpp"

#include <cmath>

namespace flocksim {

AgentEnsemble::AgentEnsemble(Matrix x, Matrix v, double t)
    : positions(std::move(x)), velocities(std::move(v)), time(t) {
    validate();
}

void AgentEnsemble::validate() const {
    if (positions.rows() < 1 || positions.cols() < 1)
        throw ValidationError("ensemble needs at least one agent and one coordinate");
    if (positions.rows() != velocities.rows() || positions.cols() != velocities.cols())
        throw ValidationError("positions and velocities must have identical shape");
    if (!positions.allFinite() || !velocities.allFinite() || !std::isfinite(time))
        throw ValidationError("ensemble contains non-finite entries");
    if (time < 0.0) throw ValidationError("time must be >= 0");
}

ModelParams ModelParams::norm_type(double p, double q, double r, double a, double b,
                                   double coupling_scale) {
    ModelParams m;
    m.variant = Variant::NormType;
    m.p = p; m.q = q; m.r = r;
    m.a = Vector::Constant(1, a);
    m.b = Vector::Constant(1, b);
    m.coupling_scale = coupling_scale;
    m.validate();
    return m;
}

ModelParams ModelParams::vector_type(double p, double q, double r, Vector a, Vector b,
                                     double coupling_scale) {
    ModelParams m;
    m.variant = Variant::VectorType;
    m.p = p; m.q = q; m.r = r;
    m.a = std::move(a);
    m.b = std::move(b);
    m.coupling_scale = coupling_scale;
    m.validate();
    return m;
}

void ModelParams::validate(Eigen::Index dim) const {
    if (!(p > 1.0)) throw ValidationError("p must exceed 1");
    if (!(q > 1.0)) throw ValidationError("q must exceed 1");
    if (!(r > q)) throw ValidationError("r must exceed q");
    if (variant == Variant::NormType && !(q >= 2.0))
        throw ValidationError("norm type requires q >= 2");
    if (!(coupling_scale > 0.0)) throw ValidationError("coupling_scale must be > 0");
    if (a.size() == 0 || b.size() == 0) throw ValidationError("a and b must be non-empty");
    if (a.size() != b.size()) throw ValidationError("a and b must have equal length");
    // zero is admitted so the pure-coupling (friction off) dynamics stay expressible;
    // operations that need the terminal speed reject it separately
    if ((a.array() < 0.0).any()) throw ValidationError("every a_k must be >= 0");
    if ((b.array() < 0.0).any()) throw ValidationError("every b_k must be >= 0");
    if (variant == Variant::NormType && a.size() != 1)
        throw ValidationError("norm type takes scalar a, b");
    if (variant == Variant::VectorType && dim > 0 && a.size() != dim)
        throw ValidationError("vector type needs per-coordinate a, b of length dim");
}

double signed_power(double s, double gamma) {
    if (s == 0.0) return 0.0;  // the product form vanishes as s -> 0 for gamma > 1
    return std::pow(std::abs(s), gamma - 2.0) * s;
}

Matrix p_laplacian(const AgentEnsemble& state, const CommWeight& weight, double p) {
    if (!(p > 1.0)) throw ValidationError("p must exceed 1");
    const Eigen::Index n = state.n_agents();
    const Eigen::Index d = state.dim();
    const Matrix& x = state.positions;
    const Matrix& v = state.velocities;
    Matrix out = Matrix::Zero(n, d);

    // Each row is an independent serial sum over j (weight evaluated once per
    // pair and reused across coordinates), so the result is bit-identical to
    // the serial reference for any thread count.
#pragma omp parallel for schedule(static) if (n >= 32)
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == i) continue;
            const double w = eval_weight(weight, (x.row(j) - x.row(i)).norm());
            for (Eigen::Index k = 0; k < d; ++k)
                out(i, k) += w * signed_power(v(j, k) - v(i, k), p);
        }
    }
    return out;
}

Matrix p_laplacian_serial(const AgentEnsemble& state, const CommWeight& weight, double p) {
    if (!(p > 1.0)) throw ValidationError("p must exceed 1");
    const Eigen::Index n = state.n_agents();
    const Eigen::Index d = state.dim();
    const Matrix& x = state.positions;
    const Matrix& v = state.velocities;
    Matrix out(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = 0; k < d; ++k) {
            double acc = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                const double dist = (x.row(j) - x.row(i)).norm();
                acc += eval_weight(weight, dist) * signed_power(v(j, k) - v(i, k), p);
            }
            out(i, k) = acc;
        }
    }
    return out;
}

Derivative rhs_norm_type(const AgentEnsemble& state, const ModelParams& params,
                         const CommWeight& weight) {
    if (params.variant != Variant::NormType)
        throw ValidationError("rhs_norm_type requires NormType params");
    params.validate(state.dim());

    const Eigen::Index n = state.n_agents();
    const Eigen::Index d = state.dim();
    const double a = params.a[0];
    const double b = params.b[0];

    Derivative out;
    out.dx = state.velocities;
    out.dv = params.coupling_scale * p_laplacian(state, weight, params.p);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double speed = state.velocities.row(i).norm();
        if (speed == 0.0) continue;  // friction vanishes at rest (q >= 2)
        const double fq = a * std::pow(speed, params.q - 2.0);
        const double fr = b * std::pow(speed, params.r - 2.0);
        for (Eigen::Index k = 0; k < d; ++k)
            out.dv(i, k) += (fq - fr) * state.velocities(i, k);
    }
    return out;
}

Derivative rhs_vector_type(const AgentEnsemble& state, const ModelParams& params,
                           const CommWeight& weight) {
    if (params.variant != Variant::VectorType)
        throw ValidationError("rhs_vector_type requires VectorType params");
    params.validate(state.dim());

    const Eigen::Index n = state.n_agents();
    const Eigen::Index d = state.dim();

    Derivative out;
    out.dx = state.velocities;
    out.dv = params.coupling_scale * p_laplacian(state, weight, params.p);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = 0; k < d; ++k) {
            const double v = state.velocities(i, k);
            out.dv(i, k) += params.a_at(k) * signed_power(v, params.q) -
                            params.b_at(k) * signed_power(v, params.r);
        }
    }
    return out;
}

Derivative rhs(const AgentEnsemble& state, const ModelParams& params, const CommWeight& weight) {
    return params.variant == Variant::NormType ? rhs_norm_type(state, params, weight)
                                               : rhs_vector_type(state, params, weight);
}

VelocityLimit velocity_limit(const ModelParams& params, Eigen::Index k) {
    if (!(params.a_at(k) > 0.0) || !(params.b_at(k) > 0.0))
        throw ValidationError("terminal speed needs a_k > 0 and b_k > 0");
    return {std::pow(params.a_at(k) / params.b_at(k), 1.0 / (params.r - params.q))};
}

}  // namespace flocksim
