#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "json.hpp"

#include "hedra/ik.hpp"
#include "hedra/statics.hpp"
#include "hedra/structure.hpp"
#include "hedra/trace.hpp"

namespace hedra {

inline constexpr const char* kModelSchema = "hedra_model_v1";
inline constexpr const char* kSolutionSchema = "hedra_solution_v1";
inline constexpr const char* kConfigurationSchema = "hedra_configuration_v1";

/// Shortest decimal string that reads back to the same double.
std::string format_double(double value);

nlohmann::json model_to_json(const TensegrityModel& model);
TensegrityModel model_from_json(const nlohmann::json& doc);

nlohmann::json solution_to_json(const IkSolution& solution);

/// The parts of a solution file needed to re-run or validate it.
struct StoredSolution {
  Configuration configuration;
  Eigen::VectorXd q;
  Eigen::VectorXd rest_lengths;
  Eigen::VectorXd active_lengths;
  LoadVector loads;
};

StoredSolution solution_from_json(const nlohmann::json& doc);

nlohmann::json positions_to_json(const Configuration& config);
Configuration positions_from_json(const nlohmann::json& doc);

/// `step,x,y,z,bend_deg,twist_deg,cable1_m,...`, plus `relax_err_m` when
/// any record carries a relaxation error.
void write_trace_csv(std::ostream& out, const Trace& trace);

/// `step,route_id,length_m`, one row per step and route (route ids from 1).
void write_schedule_csv(std::ostream& out, const Trace& trace);

/// Wavefront OBJ: one vertex per node, one line element per member, with
/// cables and bars in separate groups.
void write_obj(std::ostream& out, const TensegrityModel& model, const Configuration& config);

nlohmann::json read_json_file(const std::filesystem::path& path);
/// Writes `doc` pretty-printed with a trailing newline; throws IoError.
void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace hedra
