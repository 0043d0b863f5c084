#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "flocksim/config.hpp"
#include "flocksim/export.hpp"

using namespace flocksim;
namespace fs = std::filesystem;

namespace {

const char* kInlineDoc = R"(# reproduction of the 20-agent planar experiment
[run]
seed = 7
formats = csv, json

[model]
variant = norm
p = 1.5
q = 2.5
r = 3.5
a = 0.1
b = 0.05

[weight]
kind = regular
beta = 0.5
K = 1.0

[initial]
kind = uniform
n_agents = 20
dim = 2
low = -10
high = 10

[sim]
scheme = rk45
t_end = 10
rtol = 1e-7
atol = 1e-10
output_points = 201
consensus_eps = 1e-6
clamp_on_consensus = true

[checks]
run = norm_flocking_condition, weight_lower_bound
)";

fs::path temp_dir() {
    const fs::path dir = fs::temp_directory_path() / "flocksim_io_test";
    fs::create_directories(dir);
    return dir;
}

Trajectory tiny_trajectory() {
    Scenario sc = build_scenario("ex61_symmetric4", 0);
    sc.sim.t_end = 1.0;
    sc.sim.output_times.clear();
    sc.sim.output_stride = 20;
    return integrate(sc.initial, sc.params, sc.weight, sc.sim);
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("config document round-trips the experiment parameters") {
    const RunConfig rc = parse_config(kInlineDoc);
    REQUIRE(rc.params.has_value());
    CHECK(rc.params->p == 1.5);
    CHECK(rc.params->q == 2.5);
    CHECK(rc.params->r == 3.5);
    CHECK(rc.params->a[0] == 0.1);
    CHECK(rc.params->b[0] == 0.05);
    REQUIRE(rc.weight.has_value());
    CHECK(rc.weight->beta == 0.5);
    CHECK(rc.seed == 7);
    CHECK(rc.formats.size() == 2);
    CHECK(rc.checks.size() == 2);
    REQUIRE(rc.initial.has_value());
    CHECK(rc.initial->n_agents() == 20);
    CHECK(rc.sim.t_end == 10.0);
    CHECK(rc.sim.output_times.size() == 201);

    const Scenario sc = rc.resolve();
    CHECK(sc.name == "inline");
    CHECK(sc.initial.n_agents() == 20);
}

TEST_CASE("config validation failures carry useful messages") {
    std::string bad = kInlineDoc;
    bad.replace(bad.find("q = 2.5"), 7, "q = 0.5");
    CHECK_THROWS_WITH_AS((void)parse_config(bad), "q must exceed 1", ValidationError);

    CHECK_THROWS_AS((void)parse_config(""), ValidationError);

    try {
        (void)parse_config("[model]\nvariant norm\n");
        FAIL("expected a syntax error");
    } catch (const ConfigSyntaxError& e) {
        CHECK(e.line == 2);
    }

    CHECK_THROWS_AS((void)parse_config("[model]\nbogus_key = 1\n"), ConfigSyntaxError);
    CHECK_THROWS_AS((void)parse_config("[nonsense]\nx = 1\n"), ConfigSyntaxError);
    CHECK_THROWS_AS((void)parse_config("[checks]\nrun = not_a_check\n[run]\nscenario = single_agent\n"),
                    ValidationError);
}

TEST_CASE("unknown scenario name is rejected") {
    CHECK_THROWS_AS((void)parse_config("[run]\nscenario = bogus\n"), ValidationError);
}

TEST_CASE("states CSV layout and exact round-trip") {
    const fs::path dir = temp_dir();
    const Trajectory traj = tiny_trajectory();
    write_states_csv(traj, dir / "states.csv");

    std::ifstream in(dir / "states.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,agent,x1,x2,v1,v2");

    const Trajectory back = read_states_csv(dir / "states.csv");
    REQUIRE(back.samples.size() == traj.samples.size());
    for (std::size_t s = 0; s < back.samples.size(); ++s) {
        CHECK(back.times[s] == traj.times[s]);
        CHECK((back.samples[s].positions - traj.samples[s].positions)
                  .cwiseAbs()
                  .maxCoeff() == 0.0);
        CHECK((back.samples[s].velocities - traj.samples[s].velocities)
                  .cwiseAbs()
                  .maxCoeff() == 0.0);
    }
}

TEST_CASE("single sample, single agent states file has exactly two lines") {
    Matrix x(1, 1), v(1, 1);
    x << 0.25;
    v << -1.5;
    Trajectory traj;
    traj.times = {0.0};
    traj.samples = {AgentEnsemble(x, v)};
    traj.pair_vel_integrals = {{}};
    const fs::path file = temp_dir() / "one.csv";
    write_states_csv(traj, file);
    std::ifstream in(file);
    std::string line;
    int lines = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++lines;
    CHECK(lines == 2);
}

TEST_CASE("diagnostics CSV header matches the contract") {
    const fs::path dir = temp_dir();
    const Trajectory traj = tiny_trajectory();
    const Scenario sc = build_scenario("ex61_symmetric4", 0);
    const DiagnosticSeries diag = compute_diagnostics(traj, sc.weight);
    write_diagnostics_csv(traj, diag, dir / "diag.csv");
    std::ifstream in(dir / "diag.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header ==
          "t,vel_diameter_2,pos_diameter,psi_min,vM_1,vM_2,vm_1,vm_2,"
          "speed_1,speed_2,speed_3,speed_4");
}

TEST_CASE("identical run produces byte-identical CSV output") {
    const fs::path dir = temp_dir();
    for (int round = 0; round < 2; ++round) {
        Scenario sc = build_scenario("ex61_random20", 11);
        sc.sim.t_end = 1.0;
        sc.sim.output_times.clear();
        sc.sim.output_stride = 10;
        const Trajectory traj = integrate(sc.initial, sc.params, sc.weight, sc.sim);
        write_states_csv(traj, dir / ("det" + std::to_string(round) + ".csv"));
    }
    std::ifstream a(dir / "det0.csv"), b(dir / "det1.csv");
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    CHECK(sa.str() == sb.str());
    CHECK(!sa.str().empty());
}

TEST_CASE("trajectory JSON carries a schema version") {
    const fs::path dir = temp_dir();
    const Trajectory traj = tiny_trajectory();
    const Scenario sc = build_scenario("ex61_symmetric4", 0);
    write_trajectory_json(traj, compute_diagnostics(traj, sc.weight), dir / "t.json");
    std::ifstream in(dir / "t.json");
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str().find("\"schema_version\"") != std::string::npos);
}

TEST_CASE("report rendering includes both sides and the verdict") {
    ConditionReport c;
    c.name = "demo_condition";
    c.lhs = 2.5;
    c.rhs = 1.25;
    c.relation = Relation::GreaterThan;
    c.satisfied = true;
    c.horizon = 10.0;
    c.source = "trajectory-integral";
    c.notes = {"illustrative"};
    PropertyReport p{"demo_property", false, 0.25, "worst violation"};
    const std::string text = render_reports_text({c}, {p});
    CHECK(text.find("demo_condition") != std::string::npos);
    CHECK(text.find("2.5") != std::string::npos);
    CHECK(text.find("[ ok ]") != std::string::npos);
    CHECK(text.find("[FAIL]") != std::string::npos);

    const fs::path file = temp_dir() / "report.json";
    write_reports_json({c}, {p}, file);
    std::ifstream in(file);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str().find("demo_property") != std::string::npos);
}

TEST_CASE("long-horizon export ends with speed columns at the limit") {
    Scenario sc = build_scenario("ex61_random20", 2);
    sc.sim.t_end = 150.0;
    sc.sim.dt_max = 1.0;
    sc.sim.output_times.clear();
    sc.sim.output_stride = 100;
    const Trajectory traj = integrate(sc.initial, sc.params, sc.weight, sc.sim);
    const fs::path file = temp_dir() / "long_diag.csv";
    write_diagnostics_csv(traj, compute_diagnostics(traj, sc.weight), file);

    std::ifstream in(file);
    std::string line, last;
    std::getline(in, line);  // header
    while (std::getline(in, line))
        if (!line.empty()) last = line;
    // speed columns are the final 20 fields
    std::vector<double> fields;
    std::stringstream ss(last);
    std::string tok;
    while (std::getline(ss, tok, ',')) fields.push_back(std::stod(tok));
    REQUIRE(fields.size() == 4 + 2 + 2 + 20);
    for (std::size_t i = fields.size() - 20; i < fields.size(); ++i)
        CHECK(fields[i] == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("format_double emits shortest round-trip decimals") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(2.0) == "2");
    const double v = 0.1234567890123456789;
    CHECK(std::stod(format_double(v)) == v);
}

}  // TEST_SUITE
