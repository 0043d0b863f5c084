#include <doctest.h>

#include "flocksim/scenarios.hpp"

using namespace flocksim;

TEST_SUITE("scenarios") {

TEST_CASE("preset catalogue") {
    const auto& names = scenario_names();
    CHECK(names.size() == 8);
    for (const auto& name : names) CHECK_NOTHROW((void)build_scenario(name, 1));
    CHECK_THROWS_AS((void)build_scenario("no_such_preset", 1), ValidationError);
}

TEST_CASE("petal configuration holds the exact published coordinates") {
    const Scenario sc = build_scenario("ex61_symmetric4", 0);
    REQUIRE(sc.initial.n_agents() == 4);
    Matrix x(4, 2), v(4, 2);
    x << 1, 0, 0, 1, -1, 0, 0, -1;
    v << -1, 0, 0, -1, 1, 0, 0, 1;
    CHECK((sc.initial.positions - x).cwiseAbs().maxCoeff() == 0.0);
    CHECK((sc.initial.velocities - v).cwiseAbs().maxCoeff() == 0.0);
    CHECK(sc.params.variant == Variant::NormType);
    CHECK(sc.params.p == 1.5);
    CHECK(sc.params.q == 2.5);
    CHECK(sc.params.r == 3.5);
    CHECK(sc.params.a[0] == 0.1);
    CHECK(sc.params.b[0] == 0.05);
    CHECK(sc.weight.kind == WeightKind::Regular);
    CHECK(sc.weight.beta == 0.5);
}

TEST_CASE("petal set is invariant under central reflection") {
    const Scenario sc = build_scenario("ex61_symmetric4", 0);
    // (x, v) -> (-x, -v) maps agents {0,1,2,3} onto {2,3,0,1}
    for (Eigen::Index i = 0; i < 4; ++i) {
        const Eigen::Index j = (i + 2) % 4;
        CHECK((sc.initial.positions.row(i) + sc.initial.positions.row(j)).norm() == 0.0);
        CHECK((sc.initial.velocities.row(i) + sc.initial.velocities.row(j)).norm() == 0.0);
    }
}

TEST_CASE("modified petal changes only the fourth velocity") {
    const Scenario base = build_scenario("ex61_symmetric4", 0);
    const Scenario mod = build_scenario("ex61_modified4", 0);
    CHECK((mod.initial.positions - base.initial.positions).cwiseAbs().maxCoeff() == 0.0);
    CHECK((mod.initial.velocities.topRows(3) - base.initial.velocities.topRows(3))
              .cwiseAbs()
              .maxCoeff() == 0.0);
    CHECK(mod.initial.velocities(3, 0) == 0.0);
    CHECK(mod.initial.velocities(3, 1) == -0.1);
}

TEST_CASE("capped preset clips the second velocity coordinate") {
    const Scenario raw = build_scenario("ex62_random20", 9);
    const Scenario cap = build_scenario("ex62_capped", 9);
    CHECK((cap.initial.positions - raw.initial.positions).cwiseAbs().maxCoeff() == 0.0);
    for (Eigen::Index i = 0; i < 20; ++i) {
        CHECK(cap.initial.velocities(i, 0) == raw.initial.velocities(i, 0));
        CHECK(cap.initial.velocities(i, 1) ==
              std::min(raw.initial.velocities(i, 1), 0.5));
    }
}

TEST_CASE("same seed reproduces bit-identical initial states") {
    for (const char* name : {"ex61_random20", "ex62_random20", "consensus_start"}) {
        const Scenario a = build_scenario(name, 1234);
        const Scenario b = build_scenario(name, 1234);
        CHECK((a.initial.positions - b.initial.positions).cwiseAbs().maxCoeff() == 0.0);
        CHECK((a.initial.velocities - b.initial.velocities).cwiseAbs().maxCoeff() == 0.0);
        const Scenario c = build_scenario(name, 1235);
        CHECK((a.initial.velocities - c.initial.velocities).cwiseAbs().maxCoeff() > 0.0);
    }
}

TEST_CASE("random presets match the published ensemble description") {
    const Scenario sc = build_scenario("ex61_random20", 7);
    CHECK(sc.initial.n_agents() == 20);
    CHECK(sc.initial.dim() == 2);
    CHECK(sc.initial.positions.minCoeff() >= -10.0);
    CHECK(sc.initial.positions.maxCoeff() <= 10.0);
    CHECK(sc.initial.velocities.minCoeff() >= -10.0);
    CHECK(sc.initial.velocities.maxCoeff() <= 10.0);
    CHECK(sc.rng == "mt19937_64/u53");

    const Scenario vec = build_scenario("ex62_random20", 7);
    CHECK(vec.params.variant == Variant::VectorType);
    CHECK(vec.params.a[0] == 0.1);
    CHECK(vec.params.a[1] == 0.01);
    CHECK(vec.params.b[0] == 0.05);
    CHECK(vec.params.b[1] == 0.1);
    // identical ensemble as the norm-type example for the same seed
    CHECK((vec.initial.positions - sc.initial.positions).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("single agent preset") {
    const Scenario sc = build_scenario("single_agent", 0);
    CHECK(sc.initial.n_agents() == 1);
    CHECK(sc.initial.velocities(0, 0) == 3.0);
}

TEST_CASE("consensus preset starts aligned") {
    const Scenario sc = build_scenario("consensus_start", 42);
    CHECK(velocity_diameter(sc.initial.velocities) == 0.0);
}

}  // TEST_SUITE
