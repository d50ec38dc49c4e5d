#pragma once

#include <vector>

#include "rasl/geometry.h"

namespace rasl {

enum class EdgeStatus { kActive, kReplaced };

// Relative rotation measurement between vertex indices i and j (not frame
// ids): measurement ~ R_j * R_i^T.
struct RotEdge {
  int i = 0;
  int j = 0;
  Rotation measurement;
  EdgeStatus status = EdgeStatus::kActive;
};

struct RotGraph {
  std::vector<int> ids;             // frame id of each vertex
  std::vector<Rotation> rotations;  // current estimates, one per vertex
  std::vector<RotEdge> edges;
  int gauge = 0;  // vertex index whose rotation the solvers never modify

  int num_vertices() const { return static_cast<int>(ids.size()); }
  int num_active_edges() const;

  // Sizes agree, edge endpoints valid and distinct, gauge in range.
  void Validate() const;
};

struct ReplacedEdge {
  int i = 0;
  int j = 0;
  double alpha = 0.0;  // residual angle before replacement (rad)
};

struct PruneReport {
  int iteration = 0;
  std::vector<ReplacedEdge> replaced_edges;
  double alpha_max = 0.0;  // effective threshold used for this round
};

struct RotationAveragingOptions {
  int l1_max_iters = 5;
  double irls_tol = 1e-6;
  int irls_max_iters = 100;
  double weight_floor = 1e-5;
  double alpha_cap = DegToRad(45.0);
  int max_prune_rounds = 3;
  bool pruning = true;
};

// Residual angle of an edge: angle(R_j^T * measurement * R_i).
double EdgeResidualAngle(const RotEdge& edge,
                         const std::vector<Rotation>& rotations);

// Sum over active edges of |R_j R_i^T - measurement|_F.
double ChordalObjective(const RotGraph& graph,
                        const std::vector<Rotation>& rotations);

// Second-smallest eigenvalue of the unweighted Laplacian of the active edges
// (parallel edges collapse to one). Throws kDisconnectedGraph below 1e-12 and
// kInvalidArgument for fewer than two vertices.
double FiedlerValue(const RotGraph& graph);

// Same quantity without the connectivity check (0 for disconnected graphs).
double LaplacianLambda2(const RotGraph& graph);

// 2 asin(sqrt(1/4 + lambda2 / (2 d_max)) - 1/2).
double AlphaMaxFromSpectrum(double lambda2, int max_degree);

// Uncapped bound on the active subgraph; propagates kDisconnectedGraph.
double AlphaMax(const RotGraph& graph);

// min(AlphaMax, cap), or the cap alone when the active graph is disconnected.
double EffectiveAlphaMax(const RotGraph& graph, double cap);

// Chains the measurements along a BFS spanning tree from the gauge, then runs
// up to options.l1_max_iters Gauss-Seidel sweeps in which each vertex moves to
// the Weiszfeld l1 mean of the rotations its neighbours predict for it (only
// when that lowers the local chordal cost).
std::vector<Rotation> L1raInit(const RotGraph& graph,
                               const RotationAveragingOptions& options);

struct IrlsResult {
  std::vector<Rotation> rotations;
  int iterations = 0;
  double final_update = 0.0;  // largest per-vertex step of the last iteration
  bool converged = true;      // false: cap hit with update > 1e-3 rad
  // Smoothed l1 objective before the first and after every iteration.
  std::vector<double> objectives;
};

// L1-IRLS on the tangent space with right perturbations R <- R exp(w).
IrlsResult IrlsSolve(const RotGraph& graph, std::vector<Rotation> init,
                     const RotationAveragingOptions& options);

// Replaces every active edge whose residual exceeds `threshold` by the
// relative rotation implied by `rotations`.
PruneReport PruneEdges(RotGraph& graph, const std::vector<Rotation>& rotations,
                       double threshold, int iteration);

struct RotationAveragingResult {
  std::vector<Rotation> rotations;
  std::vector<PruneReport> reports;  // only rounds that replaced something
  int prune_rounds = 0;
  int irls_iterations = 0;
  double final_update = 0.0;
  bool converged = true;
};

// l1 init, then up to max_prune_rounds of (IRLS, prune); stops after a round
// that replaces nothing. Writes the final rotations back into graph.rotations.
RotationAveragingResult RotationAveraging(
    RotGraph& graph, const RotationAveragingOptions& options);

struct OptimalityCertificate {
  bool optimal = false;
  double max_alpha = 0.0;
  double alpha_max = 0.0;  // uncapped bound of the active graph
  bool all_constraints_removed = false;
  double final_update = 0.0;
};

OptimalityCertificate CertifyGlobalOptimality(
    const RotGraph& graph, const std::vector<Rotation>& rotations,
    double final_update = 0.0);

}  // namespace rasl
