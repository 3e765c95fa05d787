#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <functional>
#include <numbers>
#include <random>

#include "hedra/errors.hpp"
#include "hedra/ik.hpp"
#include "hedra/relaxation.hpp"
#include "hedra/trace.hpp"
#include "hedra/trajectory.hpp"
#include "oracles.hpp"

using namespace hedra;

namespace {

TensegrityModel stack(int k) {
  HedraOptions o;
  o.modules = k;
  return build_hedra(o);
}

TensegrityModel hanging_cable() {
  return TensegrityModel({{1, Vec3::Zero()}, {2, Vec3(0.0, 0.0, -0.95)}},
                         {{1, MemberKind::Cable, 1, 2, 1e4, {}, CableClass::Axial}}, {1}, {});
}

struct Posed {
  TensegrityModel model;
  LoadVector loads;
  IkSolution ik;
  Eigen::VectorXd rest;
};

Posed bent_pair(double degrees) {
  Posed p{stack(2), {}, {}, {}};
  p.loads = gravity_loads(p.model, p.model.positions(), kDefaultMassPerLength);
  p.ik = solve_pose(p.model,
                    chain_poses({TrajectoryMode::Bend, degrees * std::numbers::pi / 180.0, 0.0, 1},
                                p.model, 1.0),
                    p.loads);
  p.rest = relaxation_rest_lengths(p.model, p.ik.rest_lengths);
  return p;
}

void expect_unilateral(const TensegrityModel& m, const RelaxationResult& r) {
  const int s = m.cable_count();
  EXPECT_GE(r.forces.head(s).minCoeff(), 0.0);
  EXPECT_GE(r.diagnostics.min_cable_force, 0.0);
}

}  // namespace

TEST(Relax, HangingMassStretchesCable) {
  const TensegrityModel m = hanging_cable();
  const RelaxationResult r =
      relax(m, m.positions(), Eigen::VectorXd::Constant(1, 0.95), Eigen::Vector3d(0, 0, -9.81));
  EXPECT_NEAR(r.configuration(1, 2), -0.950981, 1e-9);
  EXPECT_NEAR(r.forces[0], 9.81, 1e-5);
  expect_unilateral(m, r);
}

TEST(Relax, UnloadedAtRestLengthsIsAlreadyInEquilibrium) {
  const TensegrityModel m = stack(3);
  const RelaxationResult r =
      relax(m, m.positions(), member_lengths(m, m.positions()), Eigen::VectorXd::Zero(24));
  EXPECT_EQ(r.diagnostics.iterations, 0);
  EXPECT_EQ(r.configuration, m.positions());
  EXPECT_LE(r.forces.cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Relax, StartingInEquilibriumStopsImmediately) {
  const Posed p = bent_pair(20.0);
  RelaxationParams params;
  params.force_tolerance = 1e-3;
  const RelaxationResult r = relax(p.model, p.ik.configuration, p.rest, p.loads, params);
  EXPECT_LE(r.diagnostics.iterations, 1000);
  // Only the finite bar stiffness moves the nodes.
  EXPECT_LE((r.configuration - p.ik.configuration).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(Relax, ReproducesIkTargetFromAsBuilt) {
  const Posed p = bent_pair(30.0);
  const RelaxationResult r = relax(p.model, p.model.positions(), p.rest, p.loads);
  const double err = (r.configuration - p.ik.configuration).rowwise().norm().maxCoeff();
  EXPECT_LE(err, 0.02 * stack_height(p.model));
  expect_unilateral(p.model, r);
}

TEST(Relax, ViscousDampingReachesSameState) {
  const Posed p = bent_pair(15.0);
  const RelaxationResult kinetic = relax(p.model, p.model.positions(), p.rest, p.loads);
  RelaxationParams params;
  params.damping = Damping::Viscous;
  params.viscous_coefficient = 2.0 * std::sqrt(params.node_mass * 1e4);
  const RelaxationResult viscous = relax(p.model, p.model.positions(), p.rest, p.loads, params);
  EXPECT_LE((kinetic.configuration - viscous.configuration).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Relax, NodalForcesAreNegativeEnergyGradient) {
  const TensegrityModel m = stack(3);
  std::mt19937 rng(23);
  std::normal_distribution<double> noise(0.0, 2e-3);
  std::uniform_real_distribution<double> shrink(0.9, 1.05), load(-2.0, 2.0);
  const Eigen::VectorXd built = member_lengths(m, m.positions());
  for (int trial = 0; trial < 20; ++trial) {
    Configuration c = m.positions();
    for (Eigen::Index i = 0; i < c.size(); ++i) c.data()[i] += noise(rng);
    Eigen::VectorXd rest = built;
    for (int i = 0; i < m.member_count(); ++i) rest[i] *= shrink(rng);
    LoadVector p(3 * 8);
    for (Eigen::Index i = 0; i < p.size(); ++i) p[i] = load(rng);

    const std::function<double(const Positions&)> energy = [&](const Positions& x) {
      return total_potential(m, x, rest, p);
    };
    Positions numeric = oracle::central_gradient(energy, c, 1e-7);
    for (int id : m.fixed_nodes()) numeric.row(id - 1).setZero();
    const Positions analytic = nodal_forces(m, c, rest, p);
    EXPECT_LE((analytic + numeric).norm(), 1e-4 * analytic.norm()) << "trial " << trial;
  }
}

TEST(MemberForces, CablesNeverPush) {
  const TensegrityModel m = hanging_cable();
  const Eigen::VectorXd slack = member_forces(m, m.positions(), Eigen::VectorXd::Constant(1, 1.2));
  EXPECT_EQ(slack[0], 0.0);
  const Eigen::VectorXd taut = member_forces(m, m.positions(), Eigen::VectorXd::Constant(1, 0.85));
  EXPECT_NEAR(taut[0], 1000.0, 1e-9);
}

TEST(MemberForces, BarsPushBack) {
  const TensegrityModel m({{1, Vec3::Zero()}, {2, Vec3(1.0, 0.0, 0.0)}},
                          {{1, MemberKind::Bar, 1, 2, 1e6, {}, CableClass::None}}, {1}, {});
  EXPECT_NEAR(member_forces(m, m.positions(), Eigen::VectorXd::Constant(1, 1.001))[0], -1000.0, 1e-6);
}

TEST(Relax, SlackCableCarriesNothing) {
  // The cable is longer than the gap, so the mass just falls onto the bar.
  const TensegrityModel m({{1, Vec3::Zero()}, {2, Vec3(0.0, 0.0, 1.0)}, {3, Vec3(0.0, 0.0, 2.0)}},
                          {{1, MemberKind::Cable, 2, 3, 1e4, {}, CableClass::Axial},
                           {2, MemberKind::Bar, 1, 2, 1e6, {}, CableClass::None}},
                          {1, 3}, {});
  const RelaxationResult r = relax(m, m.positions(), Eigen::Vector2d(1.5, 1.0), Eigen::Vector3d(0, 0, -10.0));
  EXPECT_EQ(r.forces[0], 0.0);
  EXPECT_EQ(r.diagnostics.slack_cables, 1);
  EXPECT_NEAR(r.forces[1], -10.0, 1e-5);
  EXPECT_GE(r.diagnostics.min_cable_force, 0.0);
}

TEST(Relax, ReportsNonConvergence) {
  const Posed p = bent_pair(30.0);
  RelaxationParams params;
  params.max_iterations = 10;
  try {
    relax(p.model, p.model.positions(), p.rest, p.loads, params);
    FAIL() << "expected RelaxationDiverged";
  } catch (const RelaxationDiverged& e) {
    EXPECT_EQ(e.diagnostics().iterations, 10);
    EXPECT_EQ(e.last_state().rows(), 8);
  }
}

TEST(Relax, RejectsBadInput) {
  const TensegrityModel m = hanging_cable();
  RelaxationParams params;
  params.node_mass = 0.0;
  EXPECT_THROW(relax(m, m.positions(), Eigen::VectorXd::Constant(1, 0.9), Eigen::Vector3d::Zero(), params),
               InvalidParameter);
  EXPECT_THROW(relax(m, m.positions(), Eigen::VectorXd::Constant(2, 0.9), Eigen::Vector3d::Zero()),
               DimensionMismatch);
  EXPECT_THROW(relax(m, m.positions(), Eigen::VectorXd::Constant(1, -0.9), Eigen::Vector3d::Zero()),
               InvalidParameter);
  EXPECT_THROW(relaxation_rest_lengths(m, Eigen::VectorXd::Zero(3)), DimensionMismatch);
}

TEST(Relax, IsBitwiseDeterministic) {
  const Posed p = bent_pair(25.0);
  const RelaxationResult a = relax(p.model, p.model.positions(), p.rest, p.loads);
  const RelaxationResult b = relax(p.model, p.model.positions(), p.rest, p.loads);
  EXPECT_EQ(std::memcmp(a.configuration.data(), b.configuration.data(), sizeof(double) * a.configuration.size()),
            0);
  EXPECT_EQ(a.diagnostics.iterations, b.diagnostics.iterations);
}

TEST(Relax, RelaxedBendGrowsWithCommand) {
  double previous = 0.0;
  for (double deg : {10.0, 20.0, 30.0, 40.0}) {
    const Posed p = bent_pair(deg);
    const RelaxationResult r = relax(p.model, p.model.positions(), p.rest, p.loads);
    const double bend = trace_configuration(p.model, r.configuration, 1).bend_deg;
    EXPECT_GT(bend, previous) << deg;
    EXPECT_NEAR(bend, deg, 1.0) << deg;
    previous = bend;
    expect_unilateral(p.model, r);
  }
}
