#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "hedra/errors.hpp"
#include "hedra/ik.hpp"
#include "hedra/io.hpp"
#include "hedra/relaxation.hpp"
#include "hedra/statics.hpp"
#include "hedra/structure.hpp"
#include "hedra/trace.hpp"
#include "hedra/trajectory.hpp"

namespace hedra::cli {

using nlohmann::json;

namespace {

constexpr double kRad = std::numbers::pi / 180.0;

enum class Level { Error = 0, Info = 1, Debug = 2 };

Level level_from_env() {
  const char* env = std::getenv("HEDRA_LOG");
  if (env == nullptr) return Level::Error;
  const std::string v(env);
  if (v == "debug") return Level::Debug;
  if (v == "info") return Level::Info;
  return Level::Error;
}

class Log {
 public:
  explicit Log(std::ostream& err) : err_(err), level_(level_from_env()) {}
  void info(const std::string& msg) const { emit(Level::Info, "info", msg); }
  void debug(const std::string& msg) const { emit(Level::Debug, "debug", msg); }

 private:
  void emit(Level at, const char* tag, const std::string& msg) const {
    if (static_cast<int>(at) <= static_cast<int>(level_)) err_ << "hedra [" << tag << "] " << msg << '\n';
  }
  std::ostream& err_;
  Level level_;
};

/// Fixed by SOURCE_DATE_EPOCH when set so that repeated runs are byte-identical.
std::string timestamp() {
  std::time_t t;
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  } else {
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json manifest(const std::string& command, json inputs, json parameters, json outputs) {
  return {{"command", command},
          {"inputs", std::move(inputs)},
          {"parameters", std::move(parameters)},
          {"outputs", std::move(outputs)},
          {"timestamp", timestamp()},
          {"version", kVersion},
          {"seed", 0}};
}

void write_sidecar(const std::string& path, const json& man) {
  write_json_file(path + ".manifest.json", json{{"manifest", man}});
}

struct LoadFlags {
  bool no_gravity = false;
  double mass_per_length = kDefaultMassPerLength;
  double payload_mass = 0.0;
  int payload_node = 0;  // 0: apex of the top module

  void add_to(CLI::App& app) {
    app.add_flag("--no-gravity", no_gravity, "Solve without self-weight or payload");
    app.add_option("--mass-per-length", mass_per_length, "Member mass per length, kg/m")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    app.add_option("--payload-mass", payload_mass, "End-effector payload mass, kg")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    app.add_option("--payload-node", payload_node,
                   "Node carrying the payload (default: apex of the top module)");
  }

  LoadVector loads(const TensegrityModel& model) const {
    const std::vector<int> free = free_nodes(model);
    if (no_gravity) return LoadVector::Zero(3 * static_cast<Eigen::Index>(free.size()));
    std::optional<Payload> payload;
    if (payload_mass > 0.0) {
      int node = payload_node;
      if (node == 0) node = model.module_count() > 0 ? model.module_nodes(model.module_count() - 1)[0]
                                                     : model.node_count();
      payload = Payload{node, Vec3(0.0, 0.0, -kGravity * payload_mass)};
    }
    return gravity_loads(model, model.positions(), mass_per_length, {}, payload);
  }

  json describe() const {
    return {{"gravity", !no_gravity},
            {"mass_per_length", mass_per_length},
            {"payload_mass", payload_mass},
            {"payload_node", payload_node}};
  }
};

struct IkFlags {
  double q_min = kDefaultMinForceDensity;
  std::optional<double> q_min_saddle;
  std::optional<double> q_min_axial;
  double tol = kDefaultTolerance;

  void add_to(CLI::App& app) {
    app.add_option("--qmin", q_min, "Minimum cable force density, N/m")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    app.add_option("--qmin-saddle", q_min_saddle, "Override --qmin for saddle cables, N/m")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--qmin-axial", q_min_axial, "Override --qmin for axial cables, N/m")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--tol", tol, "Equilibrium residual tolerance, N")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
  }

  IkOptions options() const {
    IkOptions o;
    o.q_min = q_min;
    o.tol = tol;
    if (q_min_saddle) o.q_min_by_class[CableClass::Saddle] = *q_min_saddle;
    if (q_min_axial) o.q_min_by_class[CableClass::Axial] = *q_min_axial;
    return o;
  }

  json describe() const {
    json j = {{"qmin", q_min}, {"tol", tol}};
    if (q_min_saddle) j["qmin_saddle"] = *q_min_saddle;
    if (q_min_axial) j["qmin_axial"] = *q_min_axial;
    return j;
  }
};

struct MotionFlags {
  std::string mode = "none";
  double angle_deg = 0.0;
  std::optional<double> azimuth_deg;
  double ratio = 1.0;

  void add_to(CLI::App& app, bool allow_none) {
    std::vector<std::string> modes{"bend", "twist", "contract"};
    if (allow_none) modes.insert(modes.begin(), "none");
    app.add_option("--mode", mode, "Motion to command")
        ->check(CLI::IsMember(modes))
        ->capture_default_str();
    app.add_option("--angle", angle_deg, "Total bend or twist angle, degrees")->capture_default_str();
    app.add_option("--azimuth", azimuth_deg,
                   "Bend direction, degrees from +x (default: toward active cable 1)");
    app.add_option("--ratio", ratio, "Contraction ratio of the module spacing, in (0, 1]")
        ->capture_default_str();
  }

  TrajectorySpec spec(const TensegrityModel& model, int steps) const {
    TrajectorySpec s;
    s.steps = steps;
    if (mode == "contract") {
      s.mode = TrajectoryMode::Contract;
      s.magnitude = ratio;
    } else {
      s.mode = mode == "twist" ? TrajectoryMode::Twist : TrajectoryMode::Bend;
      s.magnitude = angle_deg * kRad;
    }
    if (azimuth_deg) {
      s.azimuth = *azimuth_deg * kRad;
    } else if (!model.active_routes().empty()) {
      s.azimuth = route_azimuth(model, model.positions(), 0);
    }
    return s;
  }

  json describe(const TrajectorySpec& s) const {
    return {{"mode", mode}, {"angle_deg", angle_deg}, {"azimuth_rad", s.azimuth}, {"ratio", ratio}};
  }
};

struct RelaxFlags {
  RelaxationParams params;
  std::string damping = "kinetic";

  void add_to(CLI::App& app) {
    app.add_option("--node-mass", params.node_mass, "Fictitious node mass, kg")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app.add_option("--time-step", params.time_step, "Integration step, s (0: automatic)")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    app.add_option("--max-iterations", params.max_iterations, "Relaxation iteration cap")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app.add_option("--force-tol", params.force_tolerance, "Peak residual force tolerance, N")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app.add_option("--kinetic-tol", params.kinetic_tolerance, "Kinetic energy tolerance, J")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app.add_option("--damping", damping, "Damping scheme")
        ->check(CLI::IsMember({"kinetic", "viscous"}))
        ->capture_default_str();
    app.add_option("--viscous", params.viscous_coefficient, "Viscous coefficient, N s/m")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
  }

  RelaxationParams resolved() const {
    RelaxationParams p = params;
    p.damping = damping == "viscous" ? Damping::Viscous : Damping::Kinetic;
    return p;
  }

  json describe() const {
    return {{"node_mass", params.node_mass},
            {"time_step", params.time_step},
            {"max_iterations", params.max_iterations},
            {"force_tol", params.force_tolerance},
            {"kinetic_tol", params.kinetic_tolerance},
            {"damping", damping},
            {"viscous", params.viscous_coefficient}};
  }
};

json diagnostics_to_json(const RelaxationDiagnostics& d) {
  return {{"iterations", d.iterations},
          {"resets", d.resets},
          {"time_step", d.time_step},
          {"peak_force", d.peak_force},
          {"kinetic_energy", d.kinetic_energy},
          {"potential_energy", d.potential_energy},
          {"min_cable_force", d.min_cable_force},
          {"slack_cables", d.slack_cables}};
}

std::vector<ModulePose> single_pose(const MotionFlags& motion, const TensegrityModel& model) {
  if (motion.mode == "none") return std::vector<ModulePose>(std::max(0, model.module_count() - 1));
  const TrajectorySpec spec = motion.spec(model, 1);
  spec.validate();
  return chain_poses(spec, model, 1.0);
}

TensegrityModel load_model(const std::string& path) { return model_from_json(read_json_file(path)); }

void require_modules(const TensegrityModel& model) {
  if (model.module_count() < 1) {
    throw InvalidParameter("model file has no module metadata; pose commands need a built stack");
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const Log log(err);
  CLI::App app{"Stacked tetrahedral tensegrity manipulator toolkit", "hedra"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  // build
  HedraOptions build_opts;
  std::string build_out = "hedra_model.json";
  CLI::App* build = app.add_subcommand("build", "Write a stacked tetrahedral model file");
  build->add_option("--modules", build_opts.modules, "Number of tetrahedral modules")->capture_default_str();
  build->add_option("--radius", build_opts.tetra.radius, "Triangle circumradius, m")->capture_default_str();
  build->add_option("--height", build_opts.tetra.height, "Tetrahedron height, m")->capture_default_str();
  build->add_option("--gap", build_opts.joint_gap, "Depth of each upper apex below the lower triangle, m")
      ->capture_default_str();
  build->add_option("--cables", build_opts.active_cables, "Active cable count (3 or 6)")->capture_default_str();
  build->add_option("--stiffness", build_opts.cable_stiffness, "Cable stiffness, N/m")->capture_default_str();
  build->add_option("--bar-stiffness", build_opts.bar_stiffness, "Bar stiffness for relaxation, N/m")
      ->capture_default_str();
  build->add_option("-o,--output", build_out, "Model file to write")->capture_default_str();

  // ik
  std::string ik_model, ik_out = "hedra_solution.json";
  LoadFlags ik_loads;
  IkFlags ik_flags;
  MotionFlags ik_motion;
  CLI::App* ik = app.add_subcommand("ik", "Solve force densities and rest lengths for one pose");
  ik->add_option("--model", ik_model, "Model file")->required();
  ik_motion.add_to(*ik, true);
  ik_loads.add_to(*ik);
  ik_flags.add_to(*ik);
  ik->add_option("-o,--output", ik_out, "Solution file to write")->capture_default_str();

  // traj
  std::string traj_model, trace_out = "hedra_trace.csv", schedule_out = "hedra_schedule.csv";
  int traj_steps = 10;
  bool traj_validate = false;
  LoadFlags traj_loads;
  IkFlags traj_flags;
  MotionFlags traj_motion;
  RelaxFlags traj_relax;
  traj_motion.mode = "bend";
  CLI::App* traj = app.add_subcommand("traj", "Solve a bend/twist/contract trajectory step by step");
  traj->add_option("--model", traj_model, "Model file")->required();
  traj_motion.add_to(*traj, false);
  traj->add_option("--steps", traj_steps, "Number of trajectory steps")->capture_default_str()->check(CLI::PositiveNumber);
  traj->add_flag("--validate", traj_validate, "Relax every step from the as-built stack and report the error");
  traj_loads.add_to(*traj);
  traj_flags.add_to(*traj);
  traj_relax.add_to(*traj);
  traj->add_option("--trace", trace_out, "Trace CSV to write")->capture_default_str();
  traj->add_option("--schedule", schedule_out, "Actuation schedule CSV to write")->capture_default_str();

  // relax
  std::string relax_model, relax_solution, relax_from = "built", relax_out = "hedra_relaxed.json";
  RelaxFlags relax_flags;
  CLI::App* relax_cmd = app.add_subcommand("relax", "Relax the model under a solution's rest lengths");
  relax_cmd->add_option("--model", relax_model, "Model file")->required();
  relax_cmd->add_option("--solution", relax_solution, "Solution file from `ik`")->required();
  relax_cmd->add_option("--from", relax_from, "Start from the as-built or the target configuration")
      ->check(CLI::IsMember({"built", "target"}))
      ->capture_default_str();
  relax_flags.add_to(*relax_cmd);
  relax_cmd->add_option("-o,--output", relax_out, "Relaxed configuration file to write")->capture_default_str();

  // export
  std::string export_model, export_config, export_out = "hedra.obj";
  CLI::App* exp = app.add_subcommand("export", "Write OBJ geometry for a model or solved configuration");
  exp->add_option("--model", export_model, "Model file")->required();
  exp->add_option("--configuration", export_config, "Solution or relaxed file whose configuration to draw");
  exp->add_option("-o,--output", export_out, "OBJ file to write")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kInvalidArguments;
  }

  try {
    if (build->parsed()) {
      const TensegrityModel model = build_hedra(build_opts);
      json doc = model_to_json(model);
      doc["manifest"] = manifest("build", json::object(),
                                 {{"modules", build_opts.modules},
                                  {"radius", build_opts.tetra.radius},
                                  {"height", build_opts.tetra.height},
                                  {"gap", build_opts.joint_gap},
                                  {"cables", build_opts.active_cables},
                                  {"stiffness", build_opts.cable_stiffness},
                                  {"bar_stiffness", build_opts.bar_stiffness}},
                                 {build_out});
      write_json_file(build_out, doc);
      out << "wrote " << build_out << ": " << model.node_count() << " nodes, " << model.cable_count()
          << " cables, " << model.bar_count() << " bars\n";
      return kOk;
    }

    if (ik->parsed()) {
      const TensegrityModel model = load_model(ik_model);
      if (ik_motion.mode != "none") require_modules(model);
      const std::vector<ModulePose> poses = single_pose(ik_motion, model);
      const LoadVector loads = ik_loads.loads(model);
      log.info("solving " + ik_motion.mode + " pose with " + std::to_string(model.member_count()) + " members");
      const IkSolution sol = solve_pose(model, poses, loads, ik_flags.options());
      json doc = solution_to_json(sol);
      std::vector<double> load_values(loads.data(), loads.data() + loads.size());
      doc["loads"] = load_values;
      json params = ik_flags.describe();
      params.update(ik_loads.describe());
      params["motion"] = ik_motion.describe(ik_motion.mode == "none" ? TrajectorySpec{} : ik_motion.spec(model, 1));
      doc["manifest"] = manifest("ik", {{"model", ik_model}}, params, {ik_out});
      write_json_file(ik_out, doc);
      out << "residual " << format_double(sol.residual) << " N\n";
      out << "objective " << format_double(sol.objective) << " J\n";
      out << "min cable q " << format_double(model.cable_count() > 0 ? sol.q.head(model.cable_count()).minCoeff() : 0.0)
          << " N/m\n";
      return kOk;
    }

    if (traj->parsed()) {
      const TensegrityModel model = load_model(traj_model);
      require_modules(model);
      const TrajectorySpec spec = traj_motion.spec(model, traj_steps);
      const auto sequence = pose_sequence(spec, model);
      const LoadVector loads = traj_loads.loads(model);
      const RelaxationParams rparams = traj_relax.resolved();
      const double height = stack_height(model);

      Trace records;
      for (std::size_t s = 0; s < sequence.size(); ++s) {
        IkSolution sol;
        try {
          sol = solve_pose(model, sequence[s], loads, traj_flags.options());
        } catch (const NotStaticallyFeasible& e) {
          throw NotStaticallyFeasible(std::string(e.what()) + " (step " + std::to_string(s + 1) + ")");
        }
        TraceRecord rec = trace_configuration(model, sol.configuration, static_cast<int>(s) + 1);
        if (traj_validate) {
          const RelaxationResult relaxed = relax(model, model.positions(),
                                                 relaxation_rest_lengths(model, sol.rest_lengths), loads, rparams);
          rec.relax_error = (relaxed.configuration - sol.configuration).rowwise().norm().maxCoeff();
          log.debug("step " + std::to_string(s + 1) + ": relaxed in " +
                    std::to_string(relaxed.diagnostics.iterations) + " iterations, error " +
                    format_double(*rec.relax_error / height) + " of stack height");
        }
        log.debug("step " + std::to_string(s + 1) + ": residual " + format_double(sol.residual));
        records.push_back(std::move(rec));
      }

      json params = traj_flags.describe();
      params.update(traj_loads.describe());
      params["motion"] = traj_motion.describe(spec);
      params["steps"] = traj_steps;
      params["validate"] = traj_validate;
      if (traj_validate) params["relaxation"] = traj_relax.describe();
      const json man = manifest("traj", {{"model", traj_model}}, params, {trace_out, schedule_out});

      std::ofstream trace_file(trace_out);
      std::ofstream schedule_file(schedule_out);
      if (!trace_file || !schedule_file) throw IoError("cannot write trajectory outputs");
      write_trace_csv(trace_file, records);
      write_schedule_csv(schedule_file, records);
      if (!trace_file || !schedule_file) throw IoError("error while writing trajectory outputs");
      write_sidecar(trace_out, man);
      write_sidecar(schedule_out, man);

      const TraceRecord& last = records.back();
      out << "steps " << records.size() << ", final bend " << format_double(last.bend_deg) << " deg, twist "
          << format_double(last.twist_deg) << " deg\n";
      return kOk;
    }

    if (relax_cmd->parsed()) {
      const TensegrityModel model = load_model(relax_model);
      const StoredSolution sol = solution_from_json(read_json_file(relax_solution));
      if (sol.loads.size() == 0) throw IoError("solution file carries no loads");
      const Configuration start = relax_from == "target" ? sol.configuration : model.positions();
      const RelaxationResult res =
          relax(model, start, relaxation_rest_lengths(model, sol.rest_lengths), sol.loads, relax_flags.resolved());
      const double error = (res.configuration - sol.configuration).rowwise().norm().maxCoeff();
      json doc;
      doc["schema"] = kConfigurationSchema;
      doc["configuration"] = positions_to_json(res.configuration);
      std::vector<double> forces(res.forces.data(), res.forces.data() + res.forces.size());
      doc["forces"] = forces;
      doc["diagnostics"] = diagnostics_to_json(res.diagnostics);
      doc["target_error"] = error;
      json params = relax_flags.describe();
      params["from"] = relax_from;
      doc["manifest"] = manifest("relax", {{"model", relax_model}, {"solution", relax_solution}}, params, {relax_out});
      write_json_file(relax_out, doc);
      out << "converged in " << res.diagnostics.iterations << " iterations, max deviation from target "
          << format_double(error) << " m\n";
      return kOk;
    }

    if (exp->parsed()) {
      const TensegrityModel model = load_model(export_model);
      Configuration config = model.positions();
      if (!export_config.empty()) config = positions_from_json(read_json_file(export_config).at("configuration"));
      std::ostringstream body;
      write_obj(body, model, config);
      std::ofstream file(export_out);
      if (!file) throw IoError("cannot write " + export_out);
      const json man = manifest("export", {{"model", export_model}, {"configuration", export_config}},
                                json::object(), {export_out});
      file << "# manifest " << man.dump() << '\n' << body.str();
      if (!file) throw IoError("error while writing " + export_out);
      out << "wrote " << export_out << ": " << model.node_count() << " vertices, " << model.member_count()
          << " lines\n";
      return kOk;
    }
  } catch (const NotStaticallyFeasible& e) {
    err << e.what() << '\n';
    return kInfeasible;
  } catch (const InfeasibleLoad& e) {
    err << "pose not statically feasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const SlackImpossible& e) {
    err << "pose not statically feasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const RelaxationDiverged& e) {
    err << "relaxation did not converge: " << e.what() << '\n';
    return kNotConverged;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const nlohmann::json::exception& e) {
    err << "i/o error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidArguments;
  }
  return kInvalidArguments;
}

}  // namespace hedra::cli
