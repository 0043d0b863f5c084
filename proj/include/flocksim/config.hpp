#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "flocksim/scenarios.hpp"

namespace flocksim {

enum class OutputFormat { Csv, Json };

/// A fully resolved run: either a named preset or an inline specification.
struct RunConfig {
    std::optional<std::string> scenario;  // preset name
    std::optional<ModelParams> params;    // inline [model]
    std::optional<CommWeight> weight;     // inline [weight]
    std::optional<AgentEnsemble> initial; // inline [initial] (explicit or generated)
    SimConfig sim;
    bool sim_given = false;

    std::filesystem::path out_dir;
    std::vector<OutputFormat> formats{OutputFormat::Csv};
    std::vector<std::string> checks;
    std::uint64_t seed = 0;

    /// Resolve into a concrete Scenario (preset or inline), applying overrides.
    Scenario resolve() const;
};

/// Parse the sectioned key-value config document ([run], [model], [weight],
/// [initial], [sim], [checks]). Throws ConfigSyntaxError with the offending
/// line number, or ValidationError naming the violated invariant.
RunConfig parse_config(const std::string& text);

RunConfig load_config_file(const std::filesystem::path& path);

const std::vector<std::string>& known_check_names();

struct CheckResults {
    std::vector<ConditionReport> conditions;
    std::vector<PropertyReport> properties;
    bool all_passed() const;
};

/// Run the named checks (or every applicable one for "all") on a finished run.
CheckResults run_checks(const Scenario& sc, const Trajectory& traj,
                        const std::vector<std::string>& names);

}  // namespace flocksim
