#pragma once

// Scene builders and brute-force oracles shared by the unit tests, the
// acceptance runner and the benchmarks.

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "rasl/geometry.h"
#include "rasl/relative_pose.h"
#include "rasl/rotation_averaging.h"
#include "rasl/translation_averaging.h"

namespace rasl::testing {

inline Rotation RandomRotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  return Rotation::FromQuaternion(q.normalized());
}

inline Eigen::Vector3d RandomUnit(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return Eigen::Vector3d(n(rng), n(rng), n(rng)).normalized();
}

// Rotation by exactly `angle` about a random axis.
inline Rotation Perturbation(std::mt19937_64& rng, double angle) {
  return Rotation::FromAngleAxis(angle, RandomUnit(rng));
}

// Symmetric eigenvalues by cyclic Jacobi sweeps, ascending.
inline std::vector<double> JacobiEigenvalues(Eigen::MatrixXd a) {
  const int n = static_cast<int>(a.rows());
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> eig(n);
  for (int k = 0; k < n; ++k) eig[k] = a(k, k);
  std::sort(eig.begin(), eig.end());
  return eig;
}

using EdgeList = std::vector<std::pair<int, int>>;

// Graph Laplacian of an undirected edge list.
inline Eigen::MatrixXd Laplacian(int n, const EdgeList& edges) {
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  for (auto [i, j] : edges) {
    lap(i, i) += 1.0;
    lap(j, j) += 1.0;
    lap(i, j) -= 1.0;
    lap(j, i) -= 1.0;
  }
  return lap;
}

// alpha_max evaluated from scratch: Jacobi spectrum and degree count.
inline double AlphaMaxOracle(int n, const EdgeList& edges) {
  const auto eig = JacobiEigenvalues(Laplacian(n, edges));
  std::vector<int> degree(n, 0);
  for (auto [i, j] : edges) {
    ++degree[i];
    ++degree[j];
  }
  const double d = *std::max_element(degree.begin(), degree.end());
  const double s = std::sqrt(0.25 + eig[1] / (2.0 * d)) - 0.5;
  return 2.0 * std::asin(s);
}

// Random spanning tree plus chords with probability p.
inline EdgeList RandomConnectedGraph(std::mt19937_64& rng, int n, double p) {
  EdgeList edges;
  std::vector<std::vector<bool>> used(n, std::vector<bool>(n, false));
  for (int v = 1; v < n; ++v) {
    std::uniform_int_distribution<int> parent(0, v - 1);
    const int u = parent(rng);
    edges.emplace_back(u, v);
    used[u][v] = used[v][u] = true;
  }
  std::bernoulli_distribution coin(p);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (!used[i][j] && coin(rng)) edges.emplace_back(i, j);
  return edges;
}

// Hamiltonian chain plus chords with probability p.
inline EdgeList DenseChainGraph(std::mt19937_64& rng, int n, double p) {
  EdgeList edges;
  std::bernoulli_distribution coin(p);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (j == i + 1 || coin(rng)) edges.emplace_back(i, j);
  return edges;
}

// Graph with measurements R_j R_i^T, identity initial estimates, gauge 0.
inline RotGraph MakeRotGraph(const std::vector<Rotation>& truth,
                             const EdgeList& edges) {
  RotGraph graph;
  const int n = static_cast<int>(truth.size());
  for (int v = 0; v < n; ++v) graph.ids.push_back(v);
  graph.rotations.assign(n, Rotation::Identity());
  for (auto [i, j] : edges)
    graph.edges.push_back({i, j, RelativeRotation(truth[i], truth[j])});
  return graph;
}

// Largest angular error after removing the global rotation through vertex 0.
inline double GaugeAlignedMaxError(const std::vector<Rotation>& estimate,
                                   const std::vector<Rotation>& truth) {
  const Rotation g = estimate[0].Inverse() * truth[0];
  double worst = 0.0;
  for (std::size_t v = 0; v < truth.size(); ++v)
    worst = std::max(worst, AngularDistance(estimate[v] * g, truth[v]));
  return worst;
}

inline double GaugeAlignedMeanError(const std::vector<Rotation>& estimate,
                                    const std::vector<Rotation>& truth) {
  // Best common gauge: chordal mean of R_est^T R_true.
  Eigen::Matrix3d sum = Eigen::Matrix3d::Zero();
  for (std::size_t v = 0; v < truth.size(); ++v)
    sum += estimate[v].matrix().transpose() * truth[v].matrix();
  const Rotation g = ProjectToRotation(sum);
  double total = 0.0;
  for (std::size_t v = 0; v < truth.size(); ++v)
    total += AngularDistance(estimate[v] * g, truth[v]);
  return total / static_cast<double>(truth.size());
}

// World-to-camera rotations and centres of cameras on a horizontal ring,
// looking at the ring centre, with a vertical wobble.
struct RingScene {
  std::vector<Rotation> rotations;
  std::vector<Eigen::Vector3d> centres;
  std::vector<DirectionEdge> edges;
};

inline Rotation LookAt(const Eigen::Vector3d& from, const Eigen::Vector3d& to) {
  const Eigen::Vector3d forward = (to - from).normalized();
  Eigen::Vector3d right = Eigen::Vector3d::UnitY().cross(forward);
  if (right.norm() < 1e-9) right = Eigen::Vector3d::UnitX();
  right.normalize();
  const Eigen::Vector3d down = forward.cross(right);
  Eigen::Matrix3d m;
  m.row(0) = right;
  m.row(1) = down;
  m.row(2) = forward;
  return Rotation::FromMatrix(m);
}

// Direction of j seen from i, in frame i.
inline Eigen::Vector3d ExactDirection(const Rotation& r_i,
                                      const Eigen::Vector3d& c_i,
                                      const Eigen::Vector3d& c_j) {
  return (r_i * (c_j - c_i)).normalized();
}

inline RingScene MakeRing(int n, int span, double wobble = 0.3) {
  RingScene scene;
  const double kTwoPi = 2.0 * 3.14159265358979323846;
  for (int k = 0; k < n; ++k) {
    const double a = kTwoPi * k / n;
    const Eigen::Vector3d c(4.0 * std::cos(a), wobble * std::sin(3.0 * a),
                            4.0 * std::sin(a));
    scene.centres.push_back(c);
    scene.rotations.push_back(LookAt(c, Eigen::Vector3d(0.0, 2.0, 0.0)));
  }
  for (int i = 0; i < n; ++i) {
    for (int d = 1; d <= span; ++d) {
      const int j = (i + d) % n;
      scene.edges.push_back(
          {i, j, ExactDirection(scene.rotations[i], scene.centres[i],
                                scene.centres[j])});
    }
  }
  return scene;
}

// Six grid-spread matches between consecutive frames: rotation `angle` about a
// random axis, baseline `baseline` in a random direction, depth 4-8, pixel
// noise `noise_px` at fx = 500.
struct RelrotTrial {
  Rotation rotation;
  Eigen::Vector3d translation;
  std::vector<BearingPair> pairs;
};

inline RelrotTrial MakeRelrotTrial(std::mt19937_64& rng, double angle,
                                   double baseline, double noise_px) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const CameraIntrinsics camera;
  RelrotTrial trial;
  trial.rotation = Perturbation(rng, angle);
  trial.translation = RandomUnit(rng) * baseline;
  for (int k = 0; k < 6; ++k) {
    const double u = (k % 3 + u01(rng)) * 640.0 / 3.0;
    const double v = (k / 3 + u01(rng)) * 480.0 / 2.0;
    const double depth = 4.0 + 4.0 * u01(rng);
    const Eigen::Vector3d x((u - camera.cx) / camera.fx * depth,
                            (v - camera.cy) / camera.fy * depth, depth);
    const Eigen::Vector3d xj = trial.rotation * x + trial.translation;
    Eigen::Vector2d pi(u, v);
    Eigen::Vector2d pj(camera.fx * xj.x() / xj.z() + camera.cx,
                       camera.fy * xj.y() / xj.z() + camera.cy);
    pi += Eigen::Vector2d(n(rng), n(rng)) * noise_px;
    pj += Eigen::Vector2d(n(rng), n(rng)) * noise_px;
    trial.pairs.push_back(
        {BearingFromPixel(pi, camera), BearingFromPixel(pj, camera)});
  }
  return trial;
}

}  // namespace rasl::testing
