#include <doctest.h>

#include <cmath>

#include "flocksim/model.hpp"
#include "flocksim/rng.hpp"

using namespace flocksim;

namespace {

AgentEnsemble random_state(Eigen::Index n, Eigen::Index d, std::uint64_t seed,
                           double scale = 5.0) {
    U53Rng rng(seed);
    Matrix x(n, d), v(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = 0; k < d; ++k) {
            x(i, k) = rng.uniform(-scale, scale);
            v(i, k) = rng.uniform(-scale, scale);
        }
    return AgentEnsemble(std::move(x), std::move(v));
}

// independent dense graph-Laplacian product, valid for p = 2
Matrix graph_laplacian_oracle(const AgentEnsemble& st, const CommWeight& w) {
    const Eigen::Index n = st.n_agents();
    Matrix L = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            const double wij =
                eval_weight(w, (st.positions.row(j) - st.positions.row(i)).norm());
            L(i, j) = wij;
            L(i, i) -= wij;
        }
    return L * st.velocities;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("signed_power defining values") {
    CHECK(signed_power(0.0, 1.5) == 0.0);
    CHECK(signed_power(-4.0, 2.5) == doctest::Approx(-8.0).epsilon(1e-14));
    for (double gamma : {1.1, 1.5, 2.0, 2.5, 3.5, 4.0})
        CHECK(signed_power(1.0, gamma) == doctest::Approx(1.0).epsilon(1e-15));
    // odd in s, bit-exact
    for (double s : {0.3, 1.7, 9.0})
        for (double gamma : {1.2, 2.0, 3.1})
            CHECK(signed_power(-s, gamma) == -signed_power(s, gamma));
}

TEST_CASE("p_laplacian two-agent hand value") {
    Matrix x(2, 1), v(2, 1);
    x << 0.0, 1.0;
    v << 0.0, 1.0;
    const AgentEnsemble st(x, v);
    const Matrix lap = p_laplacian(st, CommWeight::constant(1.0), 1.5);
    CHECK(lap(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(lap(1, 0) == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("p_laplacian vanishes on consensus") {
    AgentEnsemble st = random_state(5, 3, 7);
    st.velocities.rowwise() = Eigen::RowVector3d(1.0, -2.0, 0.5);
    const Matrix lap = p_laplacian(st, CommWeight::regular(0.5), 1.5);
    CHECK(lap.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("p_laplacian at p = 2 matches the dense graph-Laplacian oracle") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const AgentEnsemble st = random_state(3, 2, 100 + seed);
        const CommWeight w = CommWeight::regular(0.5);
        const Matrix lap = p_laplacian(st, w, 2.0);
        const Matrix oracle = graph_laplacian_oracle(st, w);
        CHECK((lap - oracle).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("parallel kernel is bit-identical to the serial reference") {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const AgentEnsemble st = random_state(37, 3, 500 + seed);
        for (double p : {1.2, 1.5, 2.0, 3.0}) {
            const Matrix a = p_laplacian(st, CommWeight::regular(0.7, 2.0), p);
            const Matrix b = p_laplacian_serial(st, CommWeight::regular(0.7, 2.0), p);
            CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
        }
    }
}

TEST_CASE("p_laplacian column sums cancel") {
    const AgentEnsemble st = random_state(6, 3, 42);
    const Matrix lap = p_laplacian(st, CommWeight::regular(0.5), 1.5);
    for (Eigen::Index k = 0; k < 3; ++k) {
        const double scale = lap.col(k).cwiseAbs().sum();
        CHECK(std::abs(lap.col(k).sum()) <= 1e-12 * std::max(1.0, scale));
    }
}

TEST_CASE("norm-type rhs scalar hand value") {
    Matrix x(1, 1), v(1, 1);
    x << 0.0;
    v << 3.0;
    const AgentEnsemble st(x, v);
    const ModelParams params = ModelParams::norm_type(1.5, 2.5, 3.5, 0.1, 0.05);
    const Derivative d = rhs_norm_type(st, params, CommWeight::regular(0.5));
    // 0.1 * 3^1.5 - 0.05 * 3^2.5
    const double expect = 0.1 * std::pow(3.0, 1.5) - 0.05 * std::pow(3.0, 2.5);
    CHECK(d.dv(0, 0) == doctest::Approx(expect).epsilon(1e-14));
    CHECK(d.dv(0, 0) == doctest::Approx(-0.25981).epsilon(1e-4));
    CHECK(d.dx(0, 0) == 3.0);
}

TEST_CASE("norm-type rhs: zero velocity is an equilibrium") {
    AgentEnsemble st = random_state(4, 2, 3);
    st.velocities.setZero();
    const ModelParams params = ModelParams::norm_type(1.5, 2.0, 3.5, 0.1, 0.05);
    const Derivative d = rhs_norm_type(st, params, CommWeight::regular(0.5));
    CHECK(d.dv.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("norm-type rhs: friction cancels at the limit speed") {
    const ModelParams params = ModelParams::norm_type(1.5, 2.5, 3.5, 0.1, 0.05);
    const double C = velocity_limit(params, 0).value;
    Matrix x(1, 2), v(1, 2);
    x << 0.0, 0.0;
    v << C / std::sqrt(2.0), C / std::sqrt(2.0);
    const AgentEnsemble st(x, v);
    const Derivative d = rhs_norm_type(st, params, CommWeight::regular(0.5));
    CHECK(d.dv.cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("vector-type rhs: +-limit are fixed points, zero is an equilibrium") {
    Vector a(1), b(1);
    a << 0.1;
    b << 0.05;
    const ModelParams params = ModelParams::vector_type(1.5, 2.5, 3.5, a, b);
    const double C = velocity_limit(params, 0).value;
    CHECK(C == doctest::Approx(2.0).epsilon(1e-14));

    Matrix x(1, 1), v(1, 1);
    x << 0.0;
    for (double val : {2.0, -2.0, 0.0}) {
        v(0, 0) = val;
        const Derivative d =
            rhs_vector_type(AgentEnsemble(x, v), params, CommWeight::regular(0.5));
        CHECK(std::abs(d.dv(0, 0)) < 1e-14);
    }
}

TEST_CASE("rhs variants reject mismatched params") {
    const AgentEnsemble st = random_state(3, 2, 11);
    Vector a(2), b(2);
    a << 0.1, 0.1;
    b << 0.05, 0.05;
    const ModelParams vec = ModelParams::vector_type(1.5, 2.5, 3.5, a, b);
    const ModelParams nrm = ModelParams::norm_type(1.5, 2.5, 3.5, 0.1, 0.05);
    CHECK_THROWS_AS((void)rhs_norm_type(st, vec, CommWeight::constant(1.0)), ValidationError);
    CHECK_THROWS_AS((void)rhs_vector_type(st, nrm, CommWeight::constant(1.0)),
                    ValidationError);
}

TEST_CASE("velocity limit values") {
    CHECK(velocity_limit(ModelParams::norm_type(1.5, 2.5, 3.5, 0.1, 0.05), 0).value ==
          doctest::Approx(2.0).epsilon(1e-14));
    Vector a(2), b(2);
    a << 0.1, 0.01;
    b << 0.05, 0.1;
    const ModelParams vec = ModelParams::vector_type(1.5, 2.5, 3.5, a, b);
    CHECK(velocity_limit(vec, 1).value == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(velocity_limit(ModelParams::norm_type(1.5, 2.0, 5.0, 0.3, 0.3), 0).value ==
          doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("rhs permutation equivariance") {
    const AgentEnsemble st = random_state(5, 2, 21);
    const ModelParams params = ModelParams::norm_type(1.5, 2.5, 3.5, 0.1, 0.05);
    const CommWeight w = CommWeight::regular(0.5);
    const Derivative d0 = rhs(st, params, w);

    const std::vector<Eigen::Index> perm = {3, 0, 4, 1, 2};
    AgentEnsemble ps = st;
    for (Eigen::Index i = 0; i < 5; ++i) {
        ps.positions.row(i) = st.positions.row(perm[i]);
        ps.velocities.row(i) = st.velocities.row(perm[i]);
    }
    const Derivative d1 = rhs(ps, params, w);
    for (Eigen::Index i = 0; i < 5; ++i)
        CHECK((d1.dv.row(i) - d0.dv.row(perm[i])).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("rhs translation invariance") {
    const AgentEnsemble st = random_state(5, 3, 23);
    const ModelParams params = ModelParams::norm_type(1.5, 2.5, 3.5, 0.1, 0.05);
    const CommWeight w = CommWeight::regular(0.5);
    const Derivative d0 = rhs(st, params, w);
    AgentEnsemble shifted = st;
    shifted.positions.rowwise() += Eigen::RowVector3d(17.0, -4.0, 0.25);
    const Derivative d1 = rhs(shifted, params, w);
    CHECK((d1.dv - d0.dv).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("rhs odd symmetry for both variants") {
    const AgentEnsemble st = random_state(4, 2, 29);
    AgentEnsemble neg = st;
    neg.positions = -st.positions;
    neg.velocities = -st.velocities;
    const CommWeight w = CommWeight::regular(0.5);

    const ModelParams nrm = ModelParams::norm_type(1.5, 2.5, 3.5, 0.1, 0.05);
    const Derivative a0 = rhs(st, nrm, w);
    const Derivative a1 = rhs(neg, nrm, w);
    CHECK((a1.dv + a0.dv).cwiseAbs().maxCoeff() < 1e-13);

    Vector av(2), bv(2);
    av << 0.1, 0.01;
    bv << 0.05, 0.1;
    const ModelParams vec = ModelParams::vector_type(1.5, 2.5, 3.5, av, bv);
    const Derivative b0 = rhs(st, vec, w);
    const Derivative b1 = rhs(neg, vec, w);
    CHECK((b1.dv + b0.dv).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("p=2, q=2, r=4, a=b with 1/N coupling reproduces the quadratic-friction model") {
    const Eigen::Index n = 6;
    const AgentEnsemble st = random_state(n, 2, 31);
    const double lambda = 1.7, delta = 0.8;
    const CommWeight w = CommWeight::regular(0.5);
    const ModelParams params =
        ModelParams::norm_type(2.0, 2.0, 4.0, delta, delta, lambda / double(n));
    const Derivative got = rhs_norm_type(st, params, w);

    // hand-coded oracle: (lambda/N) sum_j w_ij (v_j - v_i) + delta v_i (1 - ||v_i||^2)
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::RowVector2d acc = Eigen::RowVector2d::Zero();
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == i) continue;
            const double wij =
                eval_weight(w, (st.positions.row(j) - st.positions.row(i)).norm());
            acc += wij * (st.velocities.row(j) - st.velocities.row(i));
        }
        const Eigen::RowVector2d vi = st.velocities.row(i);
        const Eigen::RowVector2d expect =
            (lambda / double(n)) * acc + delta * vi * (1.0 - vi.squaredNorm());
        CHECK((got.dv.row(i) - expect).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_WITH_AS((void)ModelParams::norm_type(1.5, 2.5, 2.0, 0.1, 0.05),
                         "r must exceed q", ValidationError);
    CHECK_THROWS_AS((void)ModelParams::norm_type(0.9, 2.5, 3.5, 0.1, 0.05), ValidationError);
    CHECK_THROWS_AS((void)ModelParams::norm_type(1.5, 1.5, 3.5, 0.1, 0.05), ValidationError);

    Vector a(1), b(1);
    a << 0.1;
    b << 0.05;
    // vector type admits 1 < q < 2
    CHECK_NOTHROW((void)ModelParams::vector_type(1.2, 1.5, 3.5, a, b));

    CHECK_THROWS_AS(AgentEnsemble(Matrix::Zero(2, 2), Matrix::Zero(2, 1)), ValidationError);
    Matrix bad = Matrix::Zero(2, 2);
    bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(AgentEnsemble(Matrix::Zero(2, 2), bad), ValidationError);
}

}  // TEST_SUITE
