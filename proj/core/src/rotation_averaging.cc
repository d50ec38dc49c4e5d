#include "rasl/rotation_averaging.h"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <string>
#include <utility>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "rasl/error.h"

namespace rasl {
namespace {

bool IsActive(const RotEdge& e) { return e.status == EdgeStatus::kActive; }

// Undirected simple-graph adjacency over the selected edges.
std::vector<std::set<int>> Adjacency(const RotGraph& graph, bool active_only) {
  std::vector<std::set<int>> adj(graph.num_vertices());
  for (const RotEdge& e : graph.edges) {
    if (active_only && !IsActive(e)) continue;
    adj[e.i].insert(e.j);
    adj[e.j].insert(e.i);
  }
  return adj;
}

int MaxDegree(const std::vector<std::set<int>>& adj) {
  std::size_t d = 0;
  for (const auto& nbrs : adj) d = std::max(d, nbrs.size());
  return static_cast<int>(d);
}

std::vector<int> BfsOrder(const std::vector<std::set<int>>& adj, int root) {
  std::vector<int> order;
  std::vector<bool> seen(adj.size(), false);
  std::queue<int> queue;
  queue.push(root);
  seen[root] = true;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop();
    order.push_back(v);
    for (int w : adj[v]) {
      if (!seen[w]) {
        seen[w] = true;
        queue.push(w);
      }
    }
  }
  return order;
}

void RequireConnected(const RotGraph& graph) {
  const auto adj = Adjacency(graph, /*active_only=*/false);
  if (static_cast<int>(BfsOrder(adj, graph.gauge).size()) !=
      graph.num_vertices()) {
    throw Error(ErrorCode::kDisconnectedGraph,
                "rotation graph is not connected");
  }
}

// Rotation that edge e predicts for vertex v given the other endpoint.
Eigen::Matrix3d Predict(const RotEdge& e, int v,
                        const std::vector<Rotation>& rotations) {
  if (e.j == v) {
    return e.measurement.matrix() * rotations[e.i].matrix();
  }
  return e.measurement.matrix().transpose() * rotations[e.j].matrix();
}

double SmoothedL1(double r, double delta) {
  return r >= delta ? r : 0.5 * (r * r / delta + delta);
}

double SmoothedObjective(const RotGraph& graph,
                         const std::vector<Rotation>& rotations, double delta) {
  double sum = 0.0;
  for (const RotEdge& e : graph.edges) {
    if (IsActive(e)) sum += SmoothedL1(EdgeResidualAngle(e, rotations), delta);
  }
  return sum;
}

double LocalCost(const Eigen::Matrix3d& r,
                 const std::vector<Eigen::Matrix3d>& candidates) {
  double cost = 0.0;
  for (const auto& c : candidates) cost += (r - c).norm();
  return cost;
}

}  // namespace

int RotGraph::num_active_edges() const {
  return static_cast<int>(std::count_if(edges.begin(), edges.end(), IsActive));
}

void RotGraph::Validate() const {
  if (rotations.size() != ids.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "rotation graph: one rotation per vertex required");
  }
  if (gauge < 0 || gauge >= num_vertices()) {
    throw Error(ErrorCode::kInvalidArgument, "rotation graph: bad gauge");
  }
  for (const RotEdge& e : edges) {
    if (e.i < 0 || e.j < 0 || e.i >= num_vertices() || e.j >= num_vertices() ||
        e.i == e.j) {
      throw Error(ErrorCode::kInvalidArgument,
                  "rotation graph: bad edge (" + std::to_string(e.i) + "," +
                      std::to_string(e.j) + ")");
    }
  }
}

double EdgeResidualAngle(const RotEdge& edge,
                         const std::vector<Rotation>& rotations) {
  return RotationAngle(rotations[edge.j].matrix().transpose() *
                       edge.measurement.matrix() *
                       rotations[edge.i].matrix());
}

double ChordalObjective(const RotGraph& graph,
                        const std::vector<Rotation>& rotations) {
  double sum = 0.0;
  for (const RotEdge& e : graph.edges) {
    if (!IsActive(e)) continue;
    sum += ChordalDistance(RelativeRotation(rotations[e.i], rotations[e.j]),
                           e.measurement);
  }
  return sum;
}

double LaplacianLambda2(const RotGraph& graph) {
  const int n = graph.num_vertices();
  if (n < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "Fiedler value needs at least two vertices");
  }
  const auto adj = Adjacency(graph, /*active_only=*/true);
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  for (int v = 0; v < n; ++v) {
    lap(v, v) = static_cast<double>(adj[v].size());
    for (int w : adj[v]) lap(v, w) = -1.0;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(lap,
                                                     Eigen::EigenvaluesOnly);
  return std::max(0.0, eig.eigenvalues()(1));
}

double FiedlerValue(const RotGraph& graph) {
  const double lambda2 = LaplacianLambda2(graph);
  if (lambda2 < 1e-12) {
    throw Error(ErrorCode::kDisconnectedGraph,
                "active edges do not connect the graph");
  }
  return lambda2;
}

double AlphaMaxFromSpectrum(double lambda2, int max_degree) {
  if (max_degree <= 0) return 0.0;
  const double s = std::sqrt(0.25 + lambda2 / (2.0 * max_degree)) - 0.5;
  return 2.0 * std::asin(std::clamp(s, 0.0, 1.0));
}

double AlphaMax(const RotGraph& graph) {
  const double lambda2 = FiedlerValue(graph);
  return AlphaMaxFromSpectrum(lambda2,
                              MaxDegree(Adjacency(graph, /*active_only=*/true)));
}

double EffectiveAlphaMax(const RotGraph& graph, double cap) {
  try {
    return std::min(AlphaMax(graph), cap);
  } catch (const Error& err) {
    if (err.code() != ErrorCode::kDisconnectedGraph) throw;
    return cap;
  }
}

std::vector<Rotation> L1raInit(const RotGraph& graph,
                               const RotationAveragingOptions& options) {
  graph.Validate();
  const int n = graph.num_vertices();
  std::vector<std::vector<int>> incident(n);
  for (int k = 0; k < static_cast<int>(graph.edges.size()); ++k) {
    incident[graph.edges[k].i].push_back(k);
    incident[graph.edges[k].j].push_back(k);
  }

  // Spanning-tree chaining from the gauge.
  std::vector<Rotation> rot(n);
  std::vector<bool> seen(n, false);
  std::vector<int> order;
  std::queue<int> queue;
  rot[graph.gauge] = graph.rotations[graph.gauge];
  seen[graph.gauge] = true;
  queue.push(graph.gauge);
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop();
    order.push_back(v);
    for (int k : incident[v]) {
      const RotEdge& e = graph.edges[k];
      const int w = e.i == v ? e.j : e.i;
      if (seen[w]) continue;
      seen[w] = true;
      rot[w] = ProjectToRotation(Predict(e, w, rot));
      queue.push(w);
    }
  }
  if (static_cast<int>(order.size()) != n) {
    throw Error(ErrorCode::kDisconnectedGraph,
                "rotation graph is not connected");
  }

  std::vector<Eigen::Matrix3d> candidates;
  for (int sweep = 0; sweep < options.l1_max_iters; ++sweep) {
    bool moved = false;
    for (int v : order) {
      if (v == graph.gauge) continue;
      candidates.clear();
      for (int k : incident[v]) {
        if (IsActive(graph.edges[k])) {
          candidates.push_back(Predict(graph.edges[k], v, rot));
        }
      }
      if (candidates.empty()) continue;
      const double current = LocalCost(rot[v].matrix(), candidates);
      try {
        Eigen::Matrix3d mean = Eigen::Matrix3d::Zero();
        for (const auto& c : candidates) mean += c;
        Eigen::Matrix3d m = ProjectToRotation(mean).matrix();
        for (int it = 0; it < 20; ++it) {
          Eigen::Matrix3d acc = Eigen::Matrix3d::Zero();
          double wsum = 0.0;
          for (const auto& c : candidates) {
            const double w = 1.0 / std::max((m - c).norm(), 1e-12);
            acc += w * c;
            wsum += w;
          }
          const Eigen::Matrix3d next = ProjectToRotation(acc / wsum).matrix();
          const double step = (next - m).norm();
          m = next;
          if (step < 1e-12) break;
        }
        if (LocalCost(m, candidates) < current - 1e-15) {
          rot[v] = Rotation::FromMatrixUnchecked(m);
          moved = true;
        }
      } catch (const Error&) {
        // Antipodal candidates: keep the current estimate.
      }
    }
    if (!moved) break;
  }
  return rot;
}

IrlsResult IrlsSolve(const RotGraph& graph, std::vector<Rotation> init,
                     const RotationAveragingOptions& options) {
  graph.Validate();
  const int n = graph.num_vertices();
  if (static_cast<int>(init.size()) != n) {
    throw Error(ErrorCode::kInvalidArgument, "IRLS: init size mismatch");
  }
  const double delta = options.weight_floor;

  // Unknowns: one tangent vector per non-gauge vertex.
  std::vector<int> var(n, -1);
  int num_vars = 0;
  for (int v = 0; v < n; ++v) {
    if (v != graph.gauge) var[v] = num_vars++;
  }

  IrlsResult result;
  result.rotations = std::move(init);
  result.rotations[graph.gauge] = graph.rotations[graph.gauge];
  double objective = SmoothedObjective(graph, result.rotations, delta);
  result.objectives.push_back(objective);
  if (num_vars == 0) return result;

  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
  for (int iter = 0; iter < options.irls_max_iters; ++iter) {
    triplets.clear();
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(num_vars, 3);
    for (const RotEdge& e : graph.edges) {
      if (!IsActive(e)) continue;
      const Eigen::Vector3d r = So3LogUnchecked(
          result.rotations[e.j].matrix().transpose() * e.measurement.matrix() *
          result.rotations[e.i].matrix());
      const double w = 1.0 / std::max(r.norm(), delta);
      // Linearized: w_j - w_i = r.
      const int a = var[e.i];
      const int b = var[e.j];
      if (a >= 0) {
        triplets.emplace_back(a, a, w);
        rhs.row(a) -= w * r.transpose();
      }
      if (b >= 0) {
        triplets.emplace_back(b, b, w);
        rhs.row(b) += w * r.transpose();
      }
      if (a >= 0 && b >= 0) {
        triplets.emplace_back(a, b, -w);
        triplets.emplace_back(b, a, -w);
      }
    }
    Eigen::SparseMatrix<double> lhs(num_vars, num_vars);
    lhs.setFromTriplets(triplets.begin(), triplets.end());
    solver.compute(lhs);
    // Vertices cut off from the gauge by replaced edges leave the system
    // singular; damp only then so the regular case keeps exact steps.
    if (solver.info() != Eigen::Success ||
        solver.vectorD().minCoeff() <= 1e-12 * solver.vectorD().maxCoeff()) {
      Eigen::SparseMatrix<double> eye(num_vars, num_vars);
      eye.setIdentity();
      lhs += 1e-9 * eye;
      solver.compute(lhs);
    }
    if (solver.info() != Eigen::Success) {
      throw Error(ErrorCode::kDegenerateMatrix, "IRLS normal equations");
    }
    const Eigen::MatrixXd step = solver.solve(rhs);

    // Backtrack until the smoothed objective does not increase.
    double scale = 1.0;
    std::vector<Rotation> trial(result.rotations);
    double trial_objective = objective;
    bool accepted = false;
    for (int attempt = 0; attempt < 30; ++attempt) {
      for (int v = 0; v < n; ++v) {
        if (var[v] < 0) continue;
        trial[v] = ProjectToRotation(
            result.rotations[v].matrix() *
            So3Exp(scale * step.row(var[v]).transpose()).matrix());
      }
      trial_objective = SmoothedObjective(graph, trial, delta);
      if (trial_objective <= objective) {
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    ++result.iterations;
    if (!accepted) {
      result.final_update = 0.0;
      result.objectives.push_back(objective);
      break;
    }
    double update = 0.0;
    for (int v = 0; v < num_vars; ++v) {
      update = std::max(update, scale * step.row(v).norm());
    }
    result.rotations.swap(trial);
    objective = trial_objective;
    result.objectives.push_back(objective);
    result.final_update = update;
    if (update < options.irls_tol) break;
    // Every active edge satisfied: already at the global minimum.
    double worst = 0.0;
    for (const RotEdge& e : graph.edges) {
      if (IsActive(e)) worst = std::max(worst, EdgeResidualAngle(e, result.rotations));
    }
    if (worst < 1e-12) break;
  }
  result.converged = !(result.iterations >= options.irls_max_iters &&
                       result.final_update > 1e-3);
  return result;
}

PruneReport PruneEdges(RotGraph& graph, const std::vector<Rotation>& rotations,
                       double threshold, int iteration) {
  PruneReport report;
  report.iteration = iteration;
  report.alpha_max = threshold;
  for (RotEdge& e : graph.edges) {
    if (!IsActive(e)) continue;
    const double alpha = EdgeResidualAngle(e, rotations);
    if (alpha > threshold) {
      e.measurement = RelativeRotation(rotations[e.i], rotations[e.j]);
      e.status = EdgeStatus::kReplaced;
      report.replaced_edges.push_back({e.i, e.j, alpha});
    }
  }
  return report;
}

RotationAveragingResult RotationAveraging(
    RotGraph& graph, const RotationAveragingOptions& options) {
  graph.Validate();
  if (graph.num_vertices() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "rotation averaging needs at least two vertices");
  }
  RequireConnected(graph);

  RotationAveragingResult result;
  result.rotations = L1raInit(graph, options);
  const int rounds = options.pruning ? std::max(1, options.max_prune_rounds) : 1;
  for (int round = 1; round <= rounds; ++round) {
    IrlsResult irls = IrlsSolve(graph, result.rotations, options);
    result.rotations = std::move(irls.rotations);
    result.irls_iterations += irls.iterations;
    result.final_update = irls.final_update;
    result.converged = result.converged && irls.converged;
    if (!options.pruning) break;

    const double threshold = EffectiveAlphaMax(graph, options.alpha_cap);
    PruneReport report = PruneEdges(graph, result.rotations, threshold, round);
    result.prune_rounds = round;
    if (report.replaced_edges.empty()) break;
    result.reports.push_back(std::move(report));
  }
  graph.rotations = result.rotations;
  return result;
}

OptimalityCertificate CertifyGlobalOptimality(
    const RotGraph& graph, const std::vector<Rotation>& rotations,
    double final_update) {
  OptimalityCertificate cert;
  cert.final_update = final_update;
  if (graph.num_active_edges() == 0) {
    cert.optimal = true;
    cert.all_constraints_removed = true;
    return cert;
  }
  const auto adj = Adjacency(graph, /*active_only=*/true);
  cert.alpha_max =
      AlphaMaxFromSpectrum(LaplacianLambda2(graph), MaxDegree(adj));
  for (const RotEdge& e : graph.edges) {
    if (IsActive(e)) {
      cert.max_alpha = std::max(cert.max_alpha, EdgeResidualAngle(e, rotations));
    }
  }
  cert.optimal = cert.max_alpha <= cert.alpha_max;
  return cert;
}

}  // namespace rasl
