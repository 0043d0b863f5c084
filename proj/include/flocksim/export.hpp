#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "flocksim/analysis.hpp"

namespace flocksim {

/// Shortest round-trip decimal representation of a double.
std::string format_double(double v);

/// states CSV: header "t,agent,x1..xd,v1..vd", one row per agent per sample,
/// time-major then agent index.
void write_states_csv(const Trajectory& traj, const std::filesystem::path& path);

/// diagnostics CSV: header
/// "t,vel_diameter_2,pos_diameter,psi_min,vM_1..vM_d,vm_1..vm_d,speed_1..speed_N".
void write_diagnostics_csv(const Trajectory& traj, const DiagnosticSeries& diag,
                           const std::filesystem::path& path);

/// One JSON document mirroring both CSVs plus events; carries schema_version.
void write_trajectory_json(const Trajectory& traj, const DiagnosticSeries& diag,
                           const std::filesystem::path& path);

/// Reports as JSON and as a readable text table.
void write_reports_json(const std::vector<ConditionReport>& conditions,
                        const std::vector<PropertyReport>& properties,
                        const std::filesystem::path& path);
std::string render_reports_text(const std::vector<ConditionReport>& conditions,
                                const std::vector<PropertyReport>& properties);

/// Inverse of write_states_csv; throws ValidationError on malformed input.
Trajectory read_states_csv(const std::filesystem::path& path);

}  // namespace flocksim
