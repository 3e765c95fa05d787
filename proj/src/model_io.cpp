#include "hedra/io.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <string_view>

#include "hedra/errors.hpp"

namespace hedra {

using nlohmann::json;

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

namespace {

std::string_view kind_name(MemberKind kind) { return kind == MemberKind::Cable ? "cable" : "bar"; }

MemberKind parse_kind(const std::string& s) {
  if (s == "cable") return MemberKind::Cable;
  if (s == "bar") return MemberKind::Bar;
  throw IoError("unknown member kind '" + s + "'");
}

std::string_view class_name(CableClass c) {
  switch (c) {
    case CableClass::Saddle: return "saddle";
    case CableClass::Axial: return "axial";
    case CableClass::ActiveSegment: return "active_segment";
    case CableClass::None: return "none";
  }
  return "none";
}

CableClass parse_class(const std::string& s) {
  if (s == "saddle") return CableClass::Saddle;
  if (s == "axial") return CableClass::Axial;
  if (s == "active_segment") return CableClass::ActiveSegment;
  if (s == "none") return CableClass::None;
  throw IoError("unknown cable class '" + s + "'");
}

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Eigen::VectorXd vector_from_json(const json& arr) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  return v;
}

void require_schema(const json& doc, const char* schema) {
  if (!doc.is_object() || !doc.contains("schema") || doc["schema"] != schema) {
    throw IoError(std::string("document is not a ") + schema + " file");
  }
}

}  // namespace

json model_to_json(const TensegrityModel& model) {
  json doc;
  doc["schema"] = kModelSchema;
  doc["units"] = {{"length", "m"}, {"force", "N"}, {"stiffness", "N/m"}};
  if (const auto& meta = model.meta()) {
    doc["meta"] = {{"k", meta->modules},
                   {"radius", meta->radius},
                   {"height", meta->height},
                   {"gap", meta->gap},
                   {"active_cables", meta->active_cables}};
  }
  json nodes = json::array();
  for (const Node& n : model.nodes()) {
    nodes.push_back({{"id", n.id}, {"xyz", {n.position.x(), n.position.y(), n.position.z()}}});
  }
  doc["nodes"] = std::move(nodes);
  json members = json::array();
  for (const Member& m : model.members()) {
    json entry = {{"id", m.id},
                  {"kind", kind_name(m.kind)},
                  {"k", m.k},
                  {"j", m.j},
                  {"stiffness", m.stiffness},
                  {"class", class_name(m.cable_class)}};
    if (m.rest_length) entry["rest_length"] = *m.rest_length;
    members.push_back(std::move(entry));
  }
  doc["members"] = std::move(members);
  doc["fixed_nodes"] = model.fixed_nodes();
  doc["active_routes"] = model.active_routes();
  return doc;
}

TensegrityModel model_from_json(const json& doc) {
  require_schema(doc, kModelSchema);
  try {
    std::vector<Node> nodes;
    for (const json& n : doc.at("nodes")) {
      const auto& xyz = n.at("xyz");
      nodes.push_back({n.at("id").get<int>(),
                       Vec3(xyz.at(0).get<double>(), xyz.at(1).get<double>(), xyz.at(2).get<double>())});
    }
    std::vector<Member> members;
    for (const json& m : doc.at("members")) {
      Member member;
      member.id = m.at("id").get<int>();
      member.kind = parse_kind(m.at("kind").get<std::string>());
      member.k = m.at("k").get<int>();
      member.j = m.at("j").get<int>();
      member.stiffness = m.at("stiffness").get<double>();
      member.cable_class = parse_class(m.value("class", std::string("none")));
      if (m.contains("rest_length")) member.rest_length = m["rest_length"].get<double>();
      members.push_back(member);
    }
    std::optional<BuildMeta> meta;
    if (doc.contains("meta")) {
      const json& j = doc["meta"];
      meta = BuildMeta{j.at("k").get<int>(), j.at("radius").get<double>(),
                       j.at("height").get<double>(), j.at("gap").get<double>(),
                       j.value("active_cables", 3)};
    }
    return TensegrityModel(std::move(nodes), std::move(members),
                           doc.at("fixed_nodes").get<std::set<int>>(),
                           doc.value("active_routes", std::vector<std::vector<int>>{}), meta);
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed model file: ") + e.what());
  }
}

json positions_to_json(const Configuration& config) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < config.rows(); ++i) {
    rows.push_back({config(i, 0), config(i, 1), config(i, 2)});
  }
  return rows;
}

Configuration positions_from_json(const json& rows) {
  Configuration config(static_cast<Eigen::Index>(rows.size()), 3);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int axis = 0; axis < 3; ++axis) {
      config(static_cast<Eigen::Index>(i), axis) = rows.at(i).at(axis).get<double>();
    }
  }
  return config;
}

json solution_to_json(const IkSolution& s) {
  json doc;
  doc["schema"] = kSolutionSchema;
  doc["q"] = vector_to_json(s.q);
  doc["f"] = vector_to_json(s.f);
  doc["lengths"] = vector_to_json(s.lengths);
  doc["rest_lengths"] = vector_to_json(s.rest_lengths);
  doc["active_lengths"] = vector_to_json(s.active_lengths);
  doc["residual"] = s.residual;
  doc["objective"] = s.objective;
  doc["configuration"] = positions_to_json(s.configuration);
  doc["solver"] = {{"method", "svd-nullspace + dual active-set QP"},
                   {"iterations", s.iterations},
                   {"tolerance", s.tolerance},
                   {"rank", s.rank},
                   {"nullspace_dim", s.nullspace_dim}};
  return doc;
}

StoredSolution solution_from_json(const json& doc) {
  require_schema(doc, kSolutionSchema);
  try {
    StoredSolution s;
    s.configuration = positions_from_json(doc.at("configuration"));
    s.q = vector_from_json(doc.at("q"));
    s.rest_lengths = vector_from_json(doc.at("rest_lengths"));
    s.active_lengths = vector_from_json(doc.at("active_lengths"));
    if (doc.contains("loads")) s.loads = vector_from_json(doc["loads"]);
    return s;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed solution file: ") + e.what());
  }
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
  std::size_t cables = 0;
  bool with_error = false;
  for (const TraceRecord& r : trace) {
    cables = std::max(cables, static_cast<std::size_t>(r.cable_lengths.size()));
    with_error = with_error || r.relax_error.has_value();
  }
  out << "step,x,y,z,bend_deg,twist_deg";
  for (std::size_t c = 1; c <= cables; ++c) out << ",cable" << c << "_m";
  if (with_error) out << ",relax_err_m";
  out << '\n';
  for (const TraceRecord& r : trace) {
    out << r.step << ',' << format_double(r.centroid.x()) << ',' << format_double(r.centroid.y())
        << ',' << format_double(r.centroid.z()) << ',' << format_double(r.bend_deg) << ','
        << format_double(r.twist_deg);
    for (Eigen::Index c = 0; c < r.cable_lengths.size(); ++c) {
      out << ',' << format_double(r.cable_lengths[c]);
    }
    if (with_error) out << ',' << (r.relax_error ? format_double(*r.relax_error) : "");
    out << '\n';
  }
}

void write_schedule_csv(std::ostream& out, const Trace& trace) {
  out << "step,route_id,length_m\n";
  for (const TraceRecord& r : trace) {
    for (Eigen::Index c = 0; c < r.cable_lengths.size(); ++c) {
      out << r.step << ',' << (c + 1) << ',' << format_double(r.cable_lengths[c]) << '\n';
    }
  }
}

void write_obj(std::ostream& out, const TensegrityModel& model, const Configuration& config) {
  if (config.rows() != model.node_count()) {
    throw DimensionMismatch("configuration does not match the model's node count");
  }
  for (Eigen::Index i = 0; i < config.rows(); ++i) {
    out << "v " << format_double(config(i, 0)) << ' ' << format_double(config(i, 1)) << ' '
        << format_double(config(i, 2)) << '\n';
  }
  for (const MemberKind kind : {MemberKind::Cable, MemberKind::Bar}) {
    out << "g " << (kind == MemberKind::Cable ? "cables" : "bars") << '\n';
    for (const Member& m : model.members()) {
      if (m.kind == kind) out << "l " << m.k << ' ' << m.j << '\n';
    }
  }
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw IoError("cannot parse " + path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("error while writing " + path.string());
}

}  // namespace hedra
