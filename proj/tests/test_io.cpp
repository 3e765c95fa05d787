#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hedra/errors.hpp"
#include "hedra/io.hpp"
#include "hedra/trajectory.hpp"

using namespace hedra;

namespace {

TensegrityModel stack(int k, int cables = 3) {
  HedraOptions o;
  o.modules = k;
  o.active_cables = cables;
  return build_hedra(o);
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(-2.0), "-2");
  const double x = 0.1 + 0.2;
  EXPECT_EQ(std::stod(format_double(x)), x);
}

TEST(ModelJson, RoundTripKeepsConnectivity) {
  const TensegrityModel m = stack(4, 6);
  const TensegrityModel back = model_from_json(nlohmann::json::parse(model_to_json(m).dump()));
  EXPECT_EQ(connectivity(back).entries, connectivity(m).entries);
  EXPECT_EQ(back.positions(), m.positions());
  EXPECT_EQ(back.fixed_nodes(), m.fixed_nodes());
  EXPECT_EQ(back.active_routes(), m.active_routes());
  ASSERT_TRUE(back.meta().has_value());
  EXPECT_EQ(back.meta()->modules, 4);
  EXPECT_EQ(back.meta()->active_cables, 6);
  for (int i = 0; i < m.member_count(); ++i) {
    EXPECT_EQ(back.members()[i].cable_class, m.members()[i].cable_class);
    EXPECT_EQ(back.members()[i].stiffness, m.members()[i].stiffness);
  }
}

TEST(ModelJson, RejectsWrongSchemaAndMalformedMembers) {
  nlohmann::json doc = model_to_json(stack(2));
  doc["schema"] = "something_else";
  EXPECT_THROW(model_from_json(doc), IoError);
  doc = model_to_json(stack(2));
  doc["members"][0]["kind"] = "rope";
  EXPECT_THROW(model_from_json(doc), IoError);
  doc = model_to_json(stack(2));
  doc["members"][0].erase("k");
  EXPECT_THROW(model_from_json(doc), IoError);
}

TEST(SolutionJson, RoundTrip) {
  const TensegrityModel m = stack(3);
  const LoadVector p = gravity_loads(m, m.positions(), kDefaultMassPerLength);
  const IkSolution sol = solve_pose(m, chain_poses({TrajectoryMode::Bend, 0.3, 0.0, 1}, m, 1.0), p);
  nlohmann::json doc = solution_to_json(sol);
  EXPECT_EQ(doc["schema"], kSolutionSchema);
  EXPECT_EQ(doc["solver"]["rank"], sol.rank);
  const StoredSolution back = solution_from_json(nlohmann::json::parse(doc.dump()));
  EXPECT_EQ(back.configuration, sol.configuration);
  EXPECT_EQ(back.q, sol.q);
  EXPECT_EQ(back.rest_lengths, sol.rest_lengths);
  EXPECT_EQ(back.active_lengths, sol.active_lengths);
  EXPECT_EQ(back.loads.size(), 0);
}

TEST(PositionsJson, RoundTrip) {
  const TensegrityModel m = stack(2);
  EXPECT_EQ(positions_from_json(positions_to_json(m.positions())), m.positions());
}

TEST(TraceCsv, HeaderAndRows) {
  const TensegrityModel m = stack(3);
  Trace t = trace(m, {m.positions(), m.positions()});
  std::ostringstream out;
  write_trace_csv(out, t);
  const auto rows = lines_of(out.str());
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], "step,x,y,z,bend_deg,twist_deg,cable1_m,cable2_m,cable3_m");
  EXPECT_EQ(rows[1].substr(0, 2), "1,");

  t[1].relax_error = 0.001;
  std::ostringstream with_error;
  write_trace_csv(with_error, t);
  EXPECT_EQ(lines_of(with_error.str())[0],
            "step,x,y,z,bend_deg,twist_deg,cable1_m,cable2_m,cable3_m,relax_err_m");
}

TEST(TraceCsv, SixRoutes) {
  const TensegrityModel m = stack(2, 6);
  std::ostringstream out;
  write_trace_csv(out, trace(m, {m.positions()}));
  EXPECT_EQ(lines_of(out.str())[0],
            "step,x,y,z,bend_deg,twist_deg,cable1_m,cable2_m,cable3_m,cable4_m,cable5_m,cable6_m");
}

TEST(ScheduleCsv, OneRowPerStepAndRoute) {
  const TensegrityModel m = stack(3);
  std::ostringstream out;
  write_schedule_csv(out, trace(m, {m.positions(), m.positions()}));
  const auto rows = lines_of(out.str());
  ASSERT_EQ(rows.size(), 1u + 2u * 3u);
  EXPECT_EQ(rows[0], "step,route_id,length_m");
  EXPECT_EQ(rows[1].substr(0, 4), "1,1,");
  EXPECT_EQ(rows[6].substr(0, 4), "2,3,");
}

TEST(Obj, CountsAndLengthsSurviveExport) {
  const TensegrityModel m = stack(2);
  const Configuration c = posed_configuration(m, chain_poses({TrajectoryMode::Bend, 0.4, 0.0, 1}, m, 1.0));
  std::ostringstream out;
  write_obj(out, m, c);

  // Minimal independent OBJ reader.
  std::vector<Vec3> vertices;
  std::vector<std::pair<int, int>> lines;
  std::istringstream in(out.str());
  for (std::string line; std::getline(in, line);) {
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      Vec3 v;
      ls >> v.x() >> v.y() >> v.z();
      vertices.push_back(v);
    } else if (tag == "l") {
      int a, b;
      ls >> a >> b;
      lines.emplace_back(a, b);
    }
  }
  ASSERT_EQ(vertices.size(), 8u);
  ASSERT_EQ(lines.size(), 21u);
  const Eigen::VectorXd expected = member_lengths(m, c);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const double l = (vertices[lines[i].first - 1] - vertices[lines[i].second - 1]).norm();
    EXPECT_NEAR(l, expected[static_cast<Eigen::Index>(i)], 1e-9);
  }
}

TEST(JsonFiles, ReadWriteAndErrors) {
  const auto dir = std::filesystem::temp_directory_path() / "hedra_test_io";
  std::filesystem::create_directories(dir);
  const auto path = dir / "doc.json";
  write_json_file(path, {{"a", 1}});
  EXPECT_EQ(read_json_file(path)["a"], 1);
  EXPECT_THROW(read_json_file(dir / "missing.json"), IoError);
  EXPECT_THROW(write_json_file(dir / "no" / "such" / "dir.json", {}), IoError);
  std::ofstream(dir / "bad.json") << "{not json";
  EXPECT_THROW(read_json_file(dir / "bad.json"), IoError);
  std::filesystem::remove_all(dir);
}
