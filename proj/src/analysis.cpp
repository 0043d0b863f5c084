#include "flocksim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "flocksim/rng.hpp"

namespace flocksim {

namespace {

double min_pair_weight(const Matrix& x, const CommWeight& w) {
    const Eigen::Index n = x.rows();
    if (n < 2) return eval_weight(w, 0.0);
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            best = std::min(best, eval_weight(w, (x.row(j) - x.row(i)).norm()));
    return best;
}

double max_pair_distance(const Matrix& x) {
    const Eigen::Index n = x.rows();
    double best = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            best = std::max(best, (x.row(j) - x.row(i)).norm());
    return best;
}

// prefix trapezoid integrals of a sampled series; out[m] = integral over [t0, tm]
std::vector<double> trapezoid_prefix(const std::vector<double>& t, const Vector& f) {
    std::vector<double> out(t.size(), 0.0);
    for (std::size_t m = 1; m < t.size(); ++m)
        out[m] = out[m - 1] + 0.5 * (t[m] - t[m - 1]) * (f[m] + f[m - 1]);
    return out;
}

struct Box {
    Vector B_m;  // min{vm_k(0), -C_k}
    Vector B_M;  // max{vM_k(0), +C_k}
};

Box uniform_box(const AgentEnsemble& initial, const ModelParams& params) {
    const Eigen::Index d = initial.dim();
    Box box{Vector(d), Vector(d)};
    for (Eigen::Index k = 0; k < d; ++k) {
        const double C = velocity_limit(params, k).value;
        box.B_m[k] = std::min(initial.velocities.col(k).minCoeff(), -C);
        box.B_M[k] = std::max(initial.velocities.col(k).maxCoeff(), C);
    }
    return box;
}

// Uniform bound on ||v_j - v_i||_2 along the flow, per variant.
double uniform_pair_velocity_bound(const AgentEnsemble& initial, const ModelParams& params) {
    if (params.variant == Variant::VectorType) {
        const Box box = uniform_box(initial, params);
        double sum = 0.0;
        for (Eigen::Index k = 0; k < initial.dim(); ++k)
            sum += std::max(box.B_M[k], -box.B_m[k]);
        return 2.0 * sum;
    }
    const double C = velocity_limit(params, 0).value;
    const double vmax = initial.velocities.cwiseAbs().maxCoeff();
    return 2.0 * std::sqrt(static_cast<double>(initial.dim())) * std::max(C, vmax);
}

}  // namespace

DiagnosticSeries compute_diagnostics(const Trajectory& traj, const CommWeight& weight) {
    if (traj.samples.empty()) throw ValidationError("empty trajectory");
    const std::size_t m = traj.samples.size();
    const Eigen::Index n = traj.n_agents();
    const Eigen::Index d = traj.dim();

    DiagnosticSeries out;
    out.times = traj.times;
    out.vM.resize(m, d);
    out.vm.resize(m, d);
    out.speed_norms.resize(m, n);
    out.vel_diameter_2.resize(m);
    out.max_pair_vel.resize(m);
    out.pos_diameter.resize(m);
    out.psi_min.resize(m);

    for (std::size_t s = 0; s < m; ++s) {
        const Matrix& v = traj.samples[s].velocities;
        const Matrix& x = traj.samples[s].positions;
        out.vM.row(s) = v.colwise().maxCoeff();
        out.vm.row(s) = v.colwise().minCoeff();
        for (Eigen::Index i = 0; i < n; ++i) out.speed_norms(s, i) = v.row(i).norm();
        out.vel_diameter_2[s] = (out.vM.row(s) - out.vm.row(s)).norm();
        out.max_pair_vel[s] = velocity_diameter(v);
        out.pos_diameter[s] = max_pair_distance(x);
        out.psi_min[s] = min_pair_weight(x, weight);
    }
    return out;
}

NormEquivalence norm_equivalence_constants(Eigen::Index n_agents, Eigen::Index dim, double r,
                                           double s) {
    if (!(r > 1.0) || !(s > 1.0)) throw ValidationError("norm orders must exceed 1");
    if (n_agents < 1 || dim < 1) throw ValidationError("need positive n_agents and dim");
    const double f = std::pow(static_cast<double>(n_agents * dim), 1.0 / r - 1.0 / s);
    return {std::max(1.0, f), std::min(1.0, f)};
}

PowerIneqConstants power_inequality_constants(double gamma, int dim, double delta, int samples,
                                           std::uint64_t seed) {
    if (!(gamma > 1.0)) throw ValidationError("gamma must exceed 1");
    if (dim < 1 || samples < 1) throw ValidationError("need positive dim and samples");
    if (delta < 0.0) throw ValidationError("delta must be >= 0");

    U53Rng rng(seed);
    auto draw_ball = [&](Vector& z) {
        do {
            for (int k = 0; k < dim; ++k) z[k] = rng.uniform(-1.0, 1.0);
        } while (z.norm() > 1.0);
    };
    auto phi = [&](const Vector& z) -> Vector {
        const double nz = z.norm();
        if (nz == 0.0) return Vector::Zero(dim);
        return std::pow(nz, gamma - 2.0) * z;
    };

    double c1 = 0.0;
    double c2 = std::numeric_limits<double>::infinity();
    int used = 0;
    Vector x(dim), y(dim);
    for (int s = 0; s < samples; ++s) {
        draw_ball(x);
        draw_ball(y);
        const double dxy = (x - y).norm();
        const double sum = x.norm() + y.norm();
        if (dxy == 0.0 || sum == 0.0) continue;

        const double den1 = std::pow(dxy, 1.0 - delta) * std::pow(sum, gamma - 2.0 + delta);
        const double den2 = std::pow(dxy, 2.0 + delta) * std::pow(sum, gamma - 2.0 - delta);
        if (!(den1 > 0.0) || !(den2 > 0.0) || !std::isfinite(den1) || !std::isfinite(den2))
            continue;

        const Vector dphi = phi(x) - phi(y);
        const double r1 = dphi.norm() / den1;
        const double r2 = (x - y).dot(dphi) / den2;
        if (!std::isfinite(r1) || !std::isfinite(r2)) continue;
        c1 = std::max(c1, r1);
        c2 = std::min(c2, r2);
        ++used;
    }
    if (used == 0) throw DegenerateSamples("all sample pairs were skipped");
    return {c1, c2};
}

ConditionReport check_norm_type_flocking_condition(const Trajectory& traj,
                                                   const ModelParams& params,
                                                   const CommWeight& weight, double C_m) {
    if (params.variant != Variant::NormType)
        throw ValidationError("condition applies to the norm-type system");
    if (!(params.p < 2.0)) throw ValidationError("condition requires 1 < p < 2");

    const DiagnosticSeries diag = compute_diagnostics(traj, weight);
    const AgentEnsemble& init = traj.samples.front();
    const double p = params.p;
    const double spread0 = (diag.vM.row(0) - diag.vm.row(0)).norm();
    const double rhs = std::pow(spread0, 2.0 - p);
    const double factor = 4.0 * C_m * (1.0 - p / 2.0);

    const std::vector<double> I = trapezoid_prefix(diag.times, diag.psi_min);
    const double lhs_traj = factor * I.back();

    ConditionReport rep;
    rep.name = "norm_flocking_condition";
    rep.relation = Relation::GreaterThan;
    rep.rhs = rhs;
    rep.advisory = true;
    rep.notes.push_back("assumes sufficiently small a (no quantitative threshold available)");

    // weighted-integral variant, reported for reference only
    {
        const double M = std::sqrt(static_cast<double>(init.dim())) *
                         std::max(velocity_limit(params, 0).value,
                                  init.velocities.cwiseAbs().maxCoeff());
        const double decay = 2.0 * params.a[0] * (1.0 - p / 2.0) * std::pow(M, params.q - 2.0);
        Vector damped(diag.psi_min.size());
        for (Eigen::Index s = 0; s < damped.size(); ++s)
            damped[s] = diag.psi_min[s] * std::exp(-decay * diag.times[s]);
        const double weighted = factor * trapezoid_prefix(diag.times, damped).back();
        std::ostringstream os;
        os << "damped-integral variant lhs = " << weighted << " (M = " << M << ")";
        rep.notes.push_back(os.str());
    }

    if (lhs_traj > rhs) {
        rep.lhs = lhs_traj;
        rep.horizon = diag.times.back();
        rep.source = "trajectory-integral";
        rep.satisfied = true;
        return rep;
    }
    if (weight.kind == WeightKind::Regular) {
        WeightBound wb{min_pair_weight(init.positions, weight),
                       uniform_pair_velocity_bound(init, params), weight.beta};
        const double bound = psi_min_integral_lower_bound(wb, kInfiniteHorizon);
        rep.lhs = factor * bound;
        rep.horizon = kInfiniteHorizon;
        rep.source = "analytic-bound";
        rep.satisfied = rep.lhs > rhs;
        return rep;
    }
    rep.lhs = lhs_traj;
    rep.horizon = diag.times.back();
    rep.source = "trajectory-integral";
    rep.satisfied = false;
    rep.notes.push_back("finite-horizon integral did not certify the inequality");
    return rep;
}

ConditionReport check_vector_type_fet_condition(const Trajectory& traj,
                                                const ModelParams& params,
                                                const CommWeight& weight, double C1_est,
                                                Eigen::Index k) {
    if (params.variant != Variant::VectorType)
        throw ValidationError("condition applies to the vector-type system");
    if (!(params.p < 2.0)) throw ValidationError("condition requires 1 < p < 2");
    if (!(params.q > params.p)) throw ValidationError("condition requires p < q < r");

    const DiagnosticSeries diag = compute_diagnostics(traj, weight);
    const AgentEnsemble& init = traj.samples.front();
    const double p = params.p;
    const double spread0 = diag.vM(0, k) - diag.vm(0, k);
    const double lhs = std::pow(spread0, 2.0 - p);

    ConditionReport rep;
    rep.name = "vector_fet_condition_k" + std::to_string(k);
    rep.relation = Relation::LessThan;
    rep.lhs = lhs;
    rep.advisory = true;
    rep.notes.push_back("assumes sufficiently small a_k (no quantitative threshold available)");

    const std::vector<double> I = trapezoid_prefix(diag.times, diag.psi_min);

    if (params.q >= 2.0) {
        const double rhs_traj = 2.0 * (2.0 - p) * I.back();
        if (lhs < rhs_traj) {
            rep.rhs = rhs_traj;
            rep.horizon = diag.times.back();
            rep.source = "trajectory-integral";
            rep.satisfied = true;
            return rep;
        }
        if (weight.kind == WeightKind::Regular) {
            WeightBound wb{min_pair_weight(init.positions, weight),
                           uniform_pair_velocity_bound(init, params), weight.beta};
            rep.rhs = 2.0 * (2.0 - p) *
                      psi_min_integral_lower_bound(wb, kInfiniteHorizon, QRegime::q_ge_2);
            rep.horizon = kInfiniteHorizon;
            rep.source = "analytic-bound";
            rep.satisfied = lhs < rep.rhs;
            return rep;
        }
        rep.rhs = rhs_traj;
        rep.horizon = diag.times.back();
        rep.source = "trajectory-integral";
        rep.satisfied = false;
        return rep;
    }

    // 1 < q < 2: integrand 2 psi_min(t) - a_k C1 B_k^(q-p); best finite horizon wins.
    const Box box = uniform_box(init, params);
    const double B_k = box.B_M[k] - box.B_m[k];  // bounds |vM_k| + |vm_k|
    const double correction = params.a_at(k) * C1_est * std::pow(B_k, params.q - p);
    rep.notes.push_back("C1 is a Monte Carlo estimate");

    double best = -std::numeric_limits<double>::infinity();
    double best_t = 0.0;
    for (std::size_t s = 0; s < I.size(); ++s) {
        const double val = (2.0 - p) * (2.0 * I[s] - correction * diag.times[s]);
        if (val > best) {
            best = val;
            best_t = diag.times[s];
        }
    }
    rep.rhs = best;
    rep.horizon = best_t;
    rep.source = "trajectory-integral";
    rep.satisfied = lhs < best;
    if (!rep.satisfied && weight.kind == WeightKind::Regular) {
        WeightBound wb{min_pair_weight(init.positions, weight),
                       uniform_pair_velocity_bound(init, params), weight.beta};
        for (std::size_t s = 0; s < diag.times.size(); ++s) {
            const double t = diag.times[s];
            const double val =
                (2.0 - p) *
                (2.0 * psi_min_integral_lower_bound(wb, t, QRegime::q_lt_2) - correction * t);
            if (val > best) {
                best = val;
                best_t = t;
            }
        }
        if (lhs < best) {
            rep.rhs = best;
            rep.horizon = best_t;
            rep.source = "analytic-bound";
            rep.satisfied = true;
        }
    }
    return rep;
}

ConditionReport check_positive_convergence_condition(const Trajectory& traj,
                                                     const ModelParams& params,
                                                     const CommWeight& weight,
                                                     Eigen::Index k) {
    if (!(params.p < 2.0)) throw ValidationError("condition requires 1 < p < 2");
    const DiagnosticSeries diag = compute_diagnostics(traj, weight);
    const AgentEnsemble& init = traj.samples.front();
    if (!(diag.vm(0, k) < 0.0 && diag.vM(0, k) > 0.0))
        throw ValidationError("coordinate does not sign-straddle at t = 0");

    const double p = params.p;
    const double lhs = std::pow(-diag.vm(0, k), 2.0 - p);

    ConditionReport rep;
    rep.name = "positive_convergence_k" + std::to_string(k);
    rep.relation = Relation::LessThan;
    rep.lhs = lhs;
    rep.advisory = true;
    rep.notes.push_back(
        "guarantee additionally needs |vm_k(0)| and a_k small enough (unquantified)");

    const std::vector<double> I = trapezoid_prefix(diag.times, diag.psi_min);

    if (params.q >= 2.0) {
        rep.rhs = (2.0 - p) * I.back();
        rep.horizon = diag.times.back();
        rep.source = "trajectory-integral";
        rep.satisfied = lhs < rep.rhs;
        if (!rep.satisfied && weight.kind == WeightKind::Regular) {
            WeightBound wb{min_pair_weight(init.positions, weight),
                           uniform_pair_velocity_bound(init, params), weight.beta};
            rep.rhs = (2.0 - p) * psi_min_integral_lower_bound(wb, kInfiniteHorizon);
            rep.horizon = kInfiniteHorizon;
            rep.source = "analytic-bound";
            rep.satisfied = lhs < rep.rhs;
        }
        return rep;
    }

    const Box box = uniform_box(init, params);
    const double correction = params.a_at(k) * std::pow(-box.B_m[k], params.q - p);
    double best = -std::numeric_limits<double>::infinity();
    double best_t = 0.0;
    for (std::size_t s = 0; s < I.size(); ++s) {
        const double val = (2.0 - p) * (I[s] - correction * diag.times[s]);
        if (val > best) {
            best = val;
            best_t = diag.times[s];
        }
    }
    rep.rhs = best;
    rep.horizon = best_t;
    rep.source = "trajectory-integral";
    rep.satisfied = lhs < best;
    return rep;
}

ConditionReport check_regular_weight_spread_condition(const AgentEnsemble& initial,
                                                      const ModelParams& params,
                                                      const CommWeight& weight,
                                                      Eigen::Index k) {
    if (weight.kind != WeightKind::Regular || !(weight.beta > 1.0))
        throw ValidationError("condition applies to regular weights with beta > 1");
    if (!(params.p < 2.0)) throw ValidationError("condition requires 1 < p < 2");

    const double p = params.p;
    const double beta = weight.beta;
    const double M = uniform_pair_velocity_bound(initial, params);
    const double psi0 = min_pair_weight(initial.positions, weight);
    const double spread0 =
        initial.velocities.col(k).maxCoeff() - initial.velocities.col(k).minCoeff();

    ConditionReport rep;
    rep.name = "regular_weight_spread_k" + std::to_string(k);
    rep.relation = Relation::GreaterThan;
    rep.lhs = 2.0 * (2.0 - p) / (M * (beta - 1.0)) * std::pow(psi0, (beta - 1.0) / beta);
    rep.rhs = std::pow(spread0, 2.0 - p);
    rep.horizon = kInfiniteHorizon;
    rep.source = "analytic-bound";
    rep.satisfied = rep.lhs > rep.rhs;
    rep.advisory = true;
    rep.notes.push_back("assumes sufficiently small a_k (no quantitative threshold available)");
    return rep;
}

DecayReport verify_decay_estimate(const Trajectory& traj, const ModelParams& params,
                                  Eigen::Index k, DecayKind which, double T) {
    const DiagnosticSeries diag = compute_diagnostics(traj, CommWeight::constant(0.0));
    std::size_t iT = 0;
    while (iT < diag.times.size() && diag.times[iT] < T) ++iT;
    if (iT + 1 >= diag.times.size())
        throw ValidationError("window [T, t_end] contains fewer than two samples");

    const double rq = params.r - params.q;
    DecayReport rep;
    rep.which = which;
    rep.k = k;
    rep.T = diag.times[iT];
    rep.max_violation = -std::numeric_limits<double>::infinity();

    const bool norm_kind = (which == DecayKind::NormMax || which == DecayKind::NormMin);
    if (norm_kind && params.variant != Variant::NormType)
        throw ValidationError("norm decay estimates apply to the norm-type system");
    if (!norm_kind && params.variant != Variant::VectorType)
        throw ValidationError("vector decay estimates apply to the vector-type system");

    if (norm_kind) {
        const double C = velocity_limit(params, 0).value;
        const double C2 = C * C;
        const double a = params.a[0];
        const double b = params.b[0];
        // regime: per-coordinate extrema built from non-negative data
        if (traj.samples.front().velocities.minCoeff() < 0.0)
            throw RegimeNotEntered("estimate assumes non-negative initial velocities");

        const double nT = (which == DecayKind::NormMax) ? diag.vM.row(iT).norm()
                                                        : diag.vm.row(iT).norm();
        for (std::size_t s = iT; s < diag.times.size(); ++s) {
            const double nrm = (which == DecayKind::NormMax) ? diag.vM.row(s).norm()
                                                             : diag.vm.row(s).norm();
            if (which == DecayKind::NormMax && !(nrm >= C))
                throw RegimeNotEntered("||vM|| did not stay at or above the limit speed");
            if (which == DecayKind::NormMin && !(nrm <= C))
                throw RegimeNotEntered("||vm|| did not stay at or below the limit speed");
        }

        double xi0, rate;
        if (which == DecayKind::NormMax) {
            xi0 = (rq - 2.0 >= 0.0) ? std::pow(a / b, (rq - 2.0) / rq)
                                    : std::pow(nT, rq - 2.0);
            rate = b * xi0 * std::pow(C, params.q) * rq;
        } else {
            xi0 = (rq - 2.0 >= 0.0) ? std::pow(nT, rq - 2.0)
                                    : std::pow(a / b, (rq - 2.0) / rq);
            rate = b * xi0 * std::pow(nT, params.q) * rq;
        }
        rep.rate = rate;
        const double dev_T = (which == DecayKind::NormMax) ? nT * nT - C2 : C2 - nT * nT;
        for (std::size_t s = iT; s < diag.times.size(); ++s) {
            const double nrm = (which == DecayKind::NormMax) ? diag.vM.row(s).norm()
                                                             : diag.vm.row(s).norm();
            const double dev = (which == DecayKind::NormMax) ? nrm * nrm - C2 : C2 - nrm * nrm;
            const double bound = dev_T * std::exp(-rate * (diag.times[s] - rep.T));
            rep.max_violation = std::max(rep.max_violation, dev - bound);
        }
        return rep;
    }

    const double C = velocity_limit(params, k).value;
    const double ak = params.a_at(k);
    const double bk = params.b_at(k);
    const double vT = (which == DecayKind::VecMax) ? diag.vM(iT, k) : diag.vm(iT, k);
    for (std::size_t s = iT; s < diag.times.size(); ++s) {
        const double v = (which == DecayKind::VecMax) ? diag.vM(s, k) : diag.vm(s, k);
        if (which == DecayKind::VecMax && !(v >= C))
            throw RegimeNotEntered("vM_k did not stay at or above the limit value");
        if (which == DecayKind::VecMin && !(v > 0.0 && v <= C))
            throw RegimeNotEntered("vm_k did not stay inside (0, limit]");
    }

    double xi, rate;
    if (which == DecayKind::VecMax) {
        xi = (rq - 1.0 >= 0.0) ? std::pow(ak / bk, (rq - 1.0) / rq) : std::pow(vT, rq - 1.0);
        rate = bk * rq * std::pow(ak / bk, (params.q - 1.0) / rq) * xi;
    } else {
        xi = (rq - 1.0 >= 0.0) ? std::pow(vT, rq - 1.0) : std::pow(ak / bk, (rq - 1.0) / rq);
        rate = bk * rq * std::pow(vT, params.q - 1.0) * xi;
    }
    rep.rate = rate;
    const double dev_T = std::abs(vT - C);
    for (std::size_t s = iT; s < diag.times.size(); ++s) {
        const double v = (which == DecayKind::VecMax) ? diag.vM(s, k) : diag.vm(s, k);
        const double bound = dev_T * std::exp(-rate * (diag.times[s] - rep.T));
        rep.max_violation = std::max(rep.max_violation, std::abs(v - C) - bound);
    }
    return rep;
}

TerminalClassification classify_terminal_behavior(const Trajectory& traj,
                                                  const ModelParams& params, double tol) {
    if (traj.samples.size() < 2) throw ValidationError("trajectory too short to classify");
    const double t_end = traj.times.back();
    std::size_t i0 = 0;
    while (i0 < traj.times.size() && traj.times[i0] < 0.9 * t_end) ++i0;
    if (i0 == traj.times.size()) i0 = traj.times.size() - 1;

    const Matrix& v_final = traj.samples.back().velocities;
    double variation = 0.0;
    for (std::size_t s = i0; s < traj.samples.size(); ++s)
        variation = std::max(
            variation, (traj.samples[s].velocities - v_final).cwiseAbs().maxCoeff());

    TerminalClassification out;
    out.settled = variation < tol;

    if (params.variant == Variant::NormType) {
        const double C = velocity_limit(params, 0).value;
        for (Eigen::Index i = 0; i < v_final.rows(); ++i) {
            const double s = v_final.row(i).norm();
            out.observed.push_back(s);
            if (!out.settled)
                out.labels.push_back(LimitClass::Unresolved);
            else if (std::abs(s) <= tol)
                out.labels.push_back(LimitClass::Zero);
            else if (std::abs(s - C) <= tol)
                out.labels.push_back(LimitClass::PlusCab);
            else
                out.labels.push_back(LimitClass::Unresolved);
        }
        return out;
    }

    for (Eigen::Index k = 0; k < v_final.cols(); ++k) {
        const double C = velocity_limit(params, k).value;
        const double mean = v_final.col(k).mean();
        out.observed.push_back(mean);
        LimitClass label = LimitClass::Unresolved;
        if (out.settled) {
            double target = 0.0;
            if (std::abs(mean) <= tol) {
                label = LimitClass::Zero;
            } else if (std::abs(mean - C) <= tol) {
                label = LimitClass::PlusCab;
                target = C;
            } else if (std::abs(mean + C) <= tol) {
                label = LimitClass::MinusCab;
                target = -C;
            }
            if (label != LimitClass::Unresolved &&
                (v_final.col(k).array() - target).abs().maxCoeff() > tol)
                label = LimitClass::Unresolved;
        }
        out.labels.push_back(label);
    }
    return out;
}

// ---------------------------------------------------------------- properties

PropertyReport check_vector_bounds(const Trajectory& traj, const ModelParams& params,
                                   double tol) {
    const Box box = uniform_box(traj.samples.front(), params);
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& s : traj.samples)
        for (Eigen::Index k = 0; k < traj.dim(); ++k) {
            worst = std::max(worst, box.B_m[k] - s.velocities.col(k).minCoeff());
            worst = std::max(worst, s.velocities.col(k).maxCoeff() - box.B_M[k]);
        }
    return {"vector_bounds", worst <= tol, worst, "largest excursion outside the box"};
}

PropertyReport check_norm_bounds(const Trajectory& traj, const ModelParams& params,
                                 double tol) {
    const double bound = std::max(velocity_limit(params, 0).value,
                                  traj.samples.front().velocities.cwiseAbs().maxCoeff());
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& s : traj.samples)
        worst = std::max(worst, s.velocities.cwiseAbs().maxCoeff() - bound);
    return {"norm_bounds", worst <= tol, worst, "largest excess over the component bound"};
}

PropertyReport check_trichotomy(const Trajectory& traj, const ModelParams& params,
                                double tol) {
    const std::size_t m = traj.samples.size();
    std::ostringstream detail;
    bool ok = true;
    for (Eigen::Index k = 0; k < traj.dim(); ++k) {
        const double C = velocity_limit(params, k).value;
        // earliest suffix on which one alternative holds throughout
        bool below = true, above = true, straddle = true;
        std::size_t start = m;
        for (std::size_t s = m; s-- > 0;) {
            const double vM = traj.samples[s].velocities.col(k).maxCoeff();
            const double vm = traj.samples[s].velocities.col(k).minCoeff();
            below = below && vM <= C + tol;
            above = above && vm >= C - tol;
            straddle = straddle && vm < C && C < vM;
            if (below || above || straddle)
                start = s;
            else
                break;
        }
        if (start == m) ok = false;
        detail << "k=" << k << " suffix from t=" << (start < m ? traj.times[start] : -1.0)
               << "; ";
    }
    return {"trichotomy", ok, ok ? 0.0 : 1.0, detail.str()};
}

PropertyReport check_positivity_preservation(const Trajectory& traj,
                                             const ModelParams& params, double tol) {
    (void)params;
    double worst = -std::numeric_limits<double>::infinity();
    bool applicable = false;
    for (Eigen::Index k = 0; k < traj.dim(); ++k) {
        const auto col0 = traj.samples.front().velocities.col(k);
        if (col0.minCoeff() < 0.0 || col0.maxCoeff() == 0.0) continue;  // needs >= 0, not all 0
        applicable = true;
        for (std::size_t s = 1; s < traj.samples.size(); ++s)
            worst = std::max(worst, -traj.samples[s].velocities.col(k).minCoeff());
    }
    if (!applicable) return {"positivity", true, 0.0, "no coordinate qualifies"};
    return {"positivity", worst <= tol, worst, "largest negative excursion"};
}

PropertyReport check_limit_bracketing(const Trajectory& traj, const ModelParams& params,
                                      double tol) {
    const double t_end = traj.times.back();
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < traj.samples.size(); ++s) {
        if (traj.times[s] < 0.9 * t_end) continue;
        for (Eigen::Index k = 0; k < traj.dim(); ++k) {
            const double C = velocity_limit(params, k).value;
            worst = std::max(worst, traj.samples[s].velocities.col(k).maxCoeff() - C);
            worst = std::max(worst, -C - traj.samples[s].velocities.col(k).minCoeff());
        }
    }
    return {"limit_bracketing", worst <= tol, worst, "excess outside [-C_abk, C_abk]"};
}

PropertyReport check_monotone_exterior_decay(const Trajectory& traj,
                                             const ModelParams& params, double tol) {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s + 1 < traj.samples.size(); ++s)
        for (Eigen::Index k = 0; k < traj.dim(); ++k) {
            const double C = velocity_limit(params, k).value;
            const double vM0 = traj.samples[s].velocities.col(k).maxCoeff();
            const double vM1 = traj.samples[s + 1].velocities.col(k).maxCoeff();
            if (vM0 > C && vM1 > C) worst = std::max(worst, vM1 - vM0);
            const double vm0 = traj.samples[s].velocities.col(k).minCoeff();
            const double vm1 = traj.samples[s + 1].velocities.col(k).minCoeff();
            if (vm0 < -C && vm1 < -C) worst = std::max(worst, vm0 - vm1);
        }
    if (worst == -std::numeric_limits<double>::infinity())
        return {"monotone_exterior", true, 0.0, "no exterior segment"};
    return {"monotone_exterior", worst <= tol, worst, "largest move away from the limit"};
}

PropertyReport check_norm_invariant_sets(const Trajectory& traj, const ModelParams& params,
                                         double tol) {
    const double C = velocity_limit(params, 0).value;
    double worst = -std::numeric_limits<double>::infinity();
    bool inside_M = false, inside_m = false;
    for (const auto& s : traj.samples) {
        const double nM = s.velocities.colwise().maxCoeff().norm();
        const double nm = s.velocities.colwise().minCoeff().norm();
        if (inside_M) worst = std::max(worst, nM - C);
        if (inside_m) worst = std::max(worst, C - nm);
        if (nM <= C) inside_M = true;
        if (nm >= C) inside_m = true;
    }
    if (worst == -std::numeric_limits<double>::infinity())
        return {"norm_invariant_sets", true, 0.0, "never entered either set"};
    return {"norm_invariant_sets", worst <= tol, worst, "largest escape from the set"};
}

PropertyReport check_asymptotic_flocking(const Trajectory& traj) {
    const double t_end = traj.times.back();
    double first = -1.0, peak = 0.0;
    for (std::size_t s = 0; s < traj.samples.size(); ++s) {
        if (traj.times[s] < 0.5 * t_end) continue;
        const double D = max_pair_distance(traj.samples[s].positions);
        if (first < 0.0) first = D;
        peak = std::max(peak, D);
    }
    if (first <= 0.0) return {"asymptotic_flocking", true, 0.0, "degenerate geometry"};
    const double growth = peak / first - 1.0;
    return {"asymptotic_flocking", growth <= 0.01, growth - 0.01,
            "relative diameter growth over the last half"};
}

PropertyReport check_weight_lower_bound_validity(const Trajectory& traj,
                                                 const CommWeight& weight) {
    if (weight.kind != WeightKind::Regular)
        throw ValidationError("bound applies to regular weights");
    const Eigen::Index n = traj.n_agents();
    const std::size_t n_pairs = static_cast<std::size_t>(n * (n - 1) / 2);
    for (const auto& I : traj.pair_vel_integrals)
        if (I.size() != n_pairs)
            throw ValidationError("trajectory carries no pair velocity integrals");
    const Matrix& x0 = traj.samples.front().positions;
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < traj.samples.size(); ++s) {
        const Matrix& x = traj.samples[s].positions;
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = i + 1; j < n; ++j) {
                const double psi0 = eval_weight(weight, (x0.row(j) - x0.row(i)).norm());
                const double I = traj.pair_vel_integrals[s][pair_index(i, j, n)];
                const double bound = regular_weight_lower_bound(psi0, I, weight.beta);
                const double actual = eval_weight(weight, (x.row(j) - x.row(i)).norm());
                worst = std::max(worst, bound - actual);
            }
    }
    return {"weight_lower_bound", worst <= 1e-12, worst,
            "largest amount the certified bound exceeded the actual weight"};
}

}  // namespace flocksim
