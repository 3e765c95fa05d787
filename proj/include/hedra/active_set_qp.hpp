#pragma once

#include <vector>

#include <Eigen/Dense>

namespace hedra {

/// Strictly convex inequality-constrained quadratic program
///
///   minimize  1/2 x^T G x + g^T x   subject to  C^T x >= d
///
/// with G symmetric positive definite. Each column of C is one constraint.
struct QuadraticProgram {
  Eigen::MatrixXd G;
  Eigen::VectorXd g;
  Eigen::MatrixXd C;
  Eigen::VectorXd d;
};

struct QpResult {
  enum class Status { Optimal, Infeasible, IterationLimit };

  Status status = Status::Optimal;
  Eigen::VectorXd x;
  Eigen::VectorXd multipliers;  // one per constraint, zero when inactive
  std::vector<int> active;
  int iterations = 0;
};

/// Dual active-set method (Goldfarb-Idnani). Starts from the unconstrained
/// minimizer and adds violated constraints one at a time while keeping the
/// multipliers dual feasible; an empty ratio test proves infeasibility.
QpResult solve_qp(const QuadraticProgram& qp, double feasibility_tol = 1e-12);

}  // namespace hedra
