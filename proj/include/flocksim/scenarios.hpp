#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flocksim/analysis.hpp"
#include "flocksim/rng.hpp"

namespace flocksim {

struct ExpectedCheck {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
};

struct Scenario {
    std::string name;
    ModelParams params;
    CommWeight weight;
    AgentEnsemble initial;
    SimConfig sim;
    std::vector<ExpectedCheck> expected;
    std::uint64_t seed = 0;
    std::string rng = "mt19937_64/u53";  // recorded so runs replay across platforms
};

const std::vector<std::string>& scenario_names();

/// Build a preset by name; throws ValidationError for unknown names.
/// The same (name, seed) always reproduces a bit-identical initial state.
Scenario build_scenario(const std::string& name, std::uint64_t seed);

/// n x d matrix of uniform draws in [lo, hi), filled row by row.
Matrix uniform_matrix(U53Rng& rng, Eigen::Index n, Eigen::Index d, double lo, double hi);

/// Evaluate the scenario's expected-check list against a finished trajectory.
std::vector<PropertyReport> evaluate_expected(const Scenario& sc, const Trajectory& traj);

}  // namespace flocksim
