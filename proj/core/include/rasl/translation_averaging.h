#pragma once

#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "rasl/geometry.h"

namespace rasl {

// Unit baseline direction from camera i to camera j, expressed in frame i.
struct DirectionEdge {
  int i = 0;
  int j = 0;
  Eigen::Vector3d direction = Eigen::Vector3d::UnitX();
};

// Depths of camera k along the rays from cameras i and j when |c_j - c_i| = 1.
struct ScalePair {
  double s_i = 0.0;
  double s_j = 0.0;
};

// Camera pair (i, j) observing camera centre k as a virtual point:
//   (A_j - A_i)(c_i - c_j) + c_i + c_j - 2 c_k = 0.
// With world rays u_ik, u_jk, u_ij and depths (s_i, s_j) from SolvePairScales,
// A_i = s_i u_ik u_ij^T and A_j = -s_j u_jk u_ij^T; the baseline length is
// linearized as u_ij^T (c_j - c_i), so the block is linear in the centres.
struct PairConstraint {
  int i = 0;
  int j = 0;
  int k = 0;
  Eigen::Matrix3d a_i = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d a_j = Eigen::Matrix3d::Zero();
};

// Closest-approach depths of the rays ray_i (frame i) and ray_j (frame j)
// towards a common point, with camera j one unit from camera i along dir_ij
// (frame i). Throws kParallelDirections when the two world rays are parallel
// (|u x v| < 1e-10) and kDegenerateConfiguration for a negative depth.
ScalePair SolvePairScales(const Rotation& r_i, const Rotation& r_j,
                          const Eigen::Vector3d& dir_ij,
                          const Eigen::Vector3d& ray_i,
                          const Eigen::Vector3d& ray_j);

// |s_i u - u_ij - s_j v|: gap between the two rays at the returned depths.
double PairScaleResidual(const Rotation& r_i, const Rotation& r_j,
                         const Eigen::Vector3d& dir_ij,
                         const Eigen::Vector3d& ray_i,
                         const Eigen::Vector3d& ray_j, const ScalePair& s);

struct ConstraintBuildStats {
  int triangles = 0;
  int skipped_blocks = 0;  // degenerate base pairs (parallel rays etc.)
};

// Three constraints per triangle of the view graph (one per base pair).
// `rotations` is indexed by vertex; edge endpoints are vertex indices.
std::vector<PairConstraint> BuildPairConstraints(
    const std::vector<Rotation>& rotations,
    const std::vector<DirectionEdge>& edges,
    ConstraintBuildStats* stats = nullptr);

// Stacks one 3-row block per constraint over 3 * num_cameras columns. Throws
// kInsufficientConstraints when the rank is below 3 m - 4.
Eigen::SparseMatrix<double> BuildConstraintMatrix(
    const std::vector<PairConstraint>& constraints, int num_cameras);

// Numerical rank (column-pivoted QR, relative threshold 1e-10).
int NumericalRank(const Eigen::SparseMatrix<double>& a);

// Orthonormal basis of the stacked 3-vectors with zero mean (columns span the
// complement of the uniform shifts).
Eigen::MatrixXd ZeroMeanBasis(int num_cameras);

struct AdmmOptions {
  double beta = 3.0;
  double primal_tol = 1e-8;
  double dual_tol = 1e-8;
  int max_iters = 2000;
  // Snap to the vertex defined by the settled zero rows of e (see AdmmSolve).
  bool polish = true;
  // Divide beta by the mean |A x_0| row residual (no-op for exact data).
  bool relative_beta = true;
};

// A, the iterate x (|x| = 1), slack e and multiplier lambda.
struct TranslationSystem {
  Eigen::SparseMatrix<double> a;
  Eigen::VectorXd x;
  Eigen::VectorXd e;
  Eigen::VectorXd lambda;
  double beta = 3.0;
};

struct AdmmResult {
  int iterations = 0;
  bool converged = false;
  double primal_residual = 0.0;  // |Ax - e|_inf
  double dual_residual = 0.0;    // |x_k+1 - x_k|_inf
  double initial_objective = 0.0;  // |A x_0|_1
  double final_objective = 0.0;    // |A x|_1
  double max_norm_deviation = 0.0;  // max over iterates of ||x| - 1|
  int polish_steps = 0;
};

// min |Ax|_1 subject to |x| = 1 and x in span(basis), by ADMM on the split
// Ax = e. The x-step solves its sphere-constrained quadratic exactly. The
// iterate starts at the smallest right singular direction of A*basis unless
// system.x already holds a unit vector of the right size. On non-convergence
// the lowest-objective iterate is left in system.
AdmmResult AdmmSolve(TranslationSystem& system, const Eigen::MatrixXd& basis,
                     const AdmmOptions& options);

// Unrestricted variant (basis = identity).
AdmmResult AdmmSolve(TranslationSystem& system, const AdmmOptions& options);

// min |Ax - b|_1 for a full-column-rank A (least absolute deviations) by
// ADMM on the split Ax - b = e, started from the least-squares solution.
// The same options apply; `beta` is relative to the mean initial residual.
// Throws kInsufficientConstraints when A^T A is singular.
AdmmResult L1Solve(const Eigen::SparseMatrix<double>& a,
                   const Eigen::VectorXd& b, Eigen::VectorXd* x,
                   const AdmmOptions& options);

struct TranslationAveragingResult {
  std::vector<Eigen::Vector3d> positions;  // zero mean, |stack| = 1
  AdmmResult admm;
  ConstraintBuildStats stats;
  int rows = 0;
};

// Camera centres from fixed rotations and unit directions, defined up to a
// similarity. Sign chosen so that the baselines agree with the directions on
// average. Propagates kInsufficientConstraints.
TranslationAveragingResult TranslationAveraging(
    const std::vector<Rotation>& rotations,
    const std::vector<DirectionEdge>& edges, const AdmmOptions& options);

}  // namespace rasl
