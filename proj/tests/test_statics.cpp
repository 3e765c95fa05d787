#include <gtest/gtest.h>

#include <random>

#include "hedra/errors.hpp"
#include "hedra/statics.hpp"
#include "hedra/structure.hpp"

using namespace hedra;

namespace {

TensegrityModel single_member() {
  return TensegrityModel({{1, Vec3::Zero()}, {2, Vec3(2.0, 0.0, 0.0)}},
                         {{1, MemberKind::Cable, 1, 2, 1e4, {}, CableClass::Axial}}, {1}, {});
}

TensegrityModel default_stack(int k) {
  HedraOptions o;
  o.modules = k;
  return build_hedra(o);
}

}  // namespace

TEST(Assemble, SingleMemberHandEvaluation) {
  const TensegrityModel m = single_member();
  const EquilibriumSystem sys = assemble(connectivity(m), m.positions(), m.fixed_nodes());
  ASSERT_EQ(sys.A.rows(), 3);
  ASSERT_EQ(sys.A.cols(), 1);
  EXPECT_EQ(sys.A(0, 0), 2.0);
  EXPECT_EQ(sys.A(1, 0), 0.0);
  EXPECT_EQ(sys.A(2, 0), 0.0);
  EXPECT_EQ(sys.free_nodes, std::vector<int>{2});
}

TEST(Assemble, TwoModuleDimensions) {
  const TensegrityModel m = default_stack(2);
  const EquilibriumSystem sys = assemble(connectivity(m), m.positions(), m.fixed_nodes());
  EXPECT_EQ(sys.A.rows(), 12);
  EXPECT_EQ(sys.A.cols(), 21);
  EXPECT_EQ(sys.cable_count, 9);
}

TEST(Assemble, RejectsEmptySystems) {
  const TensegrityModel no_members({{1, Vec3::Zero()}, {2, Vec3::UnitX()}}, {}, {1}, {});
  EXPECT_THROW(assemble(connectivity(no_members), no_members.positions(), no_members.fixed_nodes()),
               EmptySystem);
  const TensegrityModel m = single_member();
  EXPECT_THROW(assemble(connectivity(m), m.positions(), {1, 2}), EmptySystem);
  EXPECT_THROW(assemble(connectivity(m), Positions::Zero(3, 3), {1}), DimensionMismatch);
}

TEST(Assemble, InternalForcesSelfEquilibrate) {
  // With no fixed nodes every block of A sums to zero over the nodes.
  const TensegrityModel m = default_stack(3);
  const EquilibriumSystem sys = assemble(connectivity(m), m.positions(), {});
  std::mt19937 rng(5);
  std::normal_distribution<double> dist;
  const int n = m.node_count();
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd q(sys.A.cols());
    for (Eigen::Index i = 0; i < q.size(); ++i) q[i] = dist(rng);
    const Eigen::VectorXd nodal = sys.A * q;
    for (int axis = 0; axis < 3; ++axis) {
      EXPECT_NEAR(nodal.segment(axis * n, n).sum(), 0.0, 1e-12);
    }
  }
}

TEST(Assemble, LinearInCoordinates) {
  const TensegrityModel m = default_stack(3);
  const ConnectivityMatrix c = connectivity(m);
  const EquilibriumSystem one = assemble(c, m.positions(), m.fixed_nodes());
  const EquilibriumSystem two = assemble(c, 2.0 * m.positions(), m.fixed_nodes());
  EXPECT_TRUE(two.A.isApprox(2.0 * one.A, 1e-15));
}

TEST(Residual, ZeroCase) {
  const TensegrityModel m = default_stack(2);
  const EquilibriumSystem sys = assemble(connectivity(m), m.positions(), m.fixed_nodes());
  EXPECT_EQ(residual(sys, Eigen::VectorXd::Zero(21), Eigen::VectorXd::Zero(12)), 0.0);
}

TEST(Residual, SingleMemberBalancesHandLoad) {
  const TensegrityModel m = single_member();
  const EquilibriumSystem sys = assemble(connectivity(m), m.positions(), m.fixed_nodes());
  Eigen::VectorXd p = Eigen::VectorXd::Zero(3);
  p[0] = 10.0;
  EXPECT_EQ(residual(sys, Eigen::VectorXd::Constant(1, 5.0), p), 0.0);
}

TEST(Residual, VanishesOnOwnImage) {
  const TensegrityModel m = default_stack(4);
  const EquilibriumSystem sys = assemble(connectivity(m), m.positions(), m.fixed_nodes());
  std::mt19937 rng(9);
  std::normal_distribution<double> dist(0.0, 100.0);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd q(sys.A.cols());
    for (Eigen::Index i = 0; i < q.size(); ++i) q[i] = dist(rng);
    EXPECT_LE(residual(sys, q, sys.A * q), 1e-12 * (sys.A * q).norm());
  }
}

TEST(Residual, DimensionMismatch) {
  const TensegrityModel m = single_member();
  const EquilibriumSystem sys = assemble(connectivity(m), m.positions(), m.fixed_nodes());
  EXPECT_THROW(residual(sys, Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(3)), DimensionMismatch);
  EXPECT_THROW(residual(sys, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(4)), DimensionMismatch);
}

TEST(ForcesFromDensities, Examples) {
  EXPECT_EQ(forces_from_densities(Eigen::VectorXd::Constant(1, 5.0), Eigen::VectorXd::Constant(1, 2.0))[0], 10.0);
  EXPECT_EQ(forces_from_densities(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Constant(1, 2.0))[0], 0.0);
  EXPECT_NEAR(forces_from_densities(Eigen::VectorXd::Constant(1, 500.0), Eigen::VectorXd::Constant(1, 0.15))[0],
              75.0, 1e-12);
  EXPECT_THROW(forces_from_densities(Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(3)), DimensionMismatch);
}

TEST(ForcesFromDensities, InvertsDivisionByLength) {
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> len(0.01, 2.0), force(-100.0, 100.0);
  Eigen::VectorXd l(50), f(50);
  for (int i = 0; i < 50; ++i) {
    l[i] = len(rng);
    f[i] = force(rng);
  }
  const Eigen::VectorXd q = f.cwiseQuotient(l);
  EXPECT_TRUE(forces_from_densities(q, l).isApprox(f, 1e-14));
}

TEST(GravityLoads, ZeroMassesGiveZeroLoads) {
  const TensegrityModel m = default_stack(3);
  const LoadVector p = gravity_loads(m, m.positions(), 0.0);
  EXPECT_EQ(p.size(), 3 * 8);
  EXPECT_TRUE(p.isZero());
}

TEST(GravityLoads, PointMassWeighsMG) {
  const TensegrityModel m = single_member();
  const LoadVector p = gravity_loads(m, m.positions(), 0.0, {{2, 1.0}});
  EXPECT_EQ(p[0], 0.0);
  EXPECT_EQ(p[1], 0.0);
  EXPECT_DOUBLE_EQ(p[2], -9.81);
}

TEST(GravityLoads, SoftBallPayload) {
  const TensegrityModel m = default_stack(2);
  const LoadVector base = gravity_loads(m, m.positions(), 0.05);
  const LoadVector with_ball =
      gravity_loads(m, m.positions(), 0.05, {}, Payload{5, Vec3(0.0, 0.0, -0.024 * kGravity)});
  const LoadVector extra = with_ball - base;
  EXPECT_NEAR(extra[2 * 4 + 0], -0.23544, 1e-12);  // node 5 is the first free node
  EXPECT_NEAR(extra.norm(), 0.23544, 1e-12);
}

TEST(GravityLoads, MemberMassSplitsBetweenEndpoints) {
  const TensegrityModel m = single_member();  // length 2 m
  const LoadVector p = gravity_loads(m, m.positions(), 0.5);
  EXPECT_DOUBLE_EQ(p[2], -0.5 * 0.5 * 2.0 * kGravity);
}

TEST(GravityLoads, Errors) {
  const TensegrityModel m = single_member();
  EXPECT_THROW(gravity_loads(m, m.positions(), 0.0, {}, Payload{7, Vec3::Zero()}), UnknownNode);
  EXPECT_THROW(gravity_loads(m, m.positions(), -1.0), InvalidParameter);
  EXPECT_THROW(gravity_loads(m, m.positions(), 0.0, {{2, -1.0}}), InvalidParameter);
}

TEST(StackLoads, ScattersPerAxisBlocks) {
  const TensegrityModel m = default_stack(2);
  const EquilibriumSystem sys = assemble(connectivity(m), m.positions(), m.fixed_nodes());
  const LoadVector p = stack_loads(sys, {{6, Vec3(1.0, 2.0, 3.0)}});
  EXPECT_EQ(p[1], 1.0);
  EXPECT_EQ(p[4 + 1], 2.0);
  EXPECT_EQ(p[8 + 1], 3.0);
  EXPECT_THROW(stack_loads(sys, {{1, Vec3::Zero()}}), UnknownNode);
}
