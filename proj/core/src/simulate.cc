#include "rasl/simulate.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "rasl/error.h"

namespace rasl {
namespace {

void Require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kInvalidSpec, what);
}

// Rows [right; down; forward] with world y pointing down.
Rotation LookAlong(const Eigen::Vector3d& forward) {
  const Eigen::Vector3d f = forward.normalized();
  const Eigen::Vector3d down = Eigen::Vector3d::UnitY();
  const Eigen::Vector3d right = down.cross(f).normalized();
  Eigen::Matrix3d r;
  r.row(0) = right.transpose();
  r.row(1) = f.cross(right).transpose();
  r.row(2) = f.transpose();
  return Rotation::FromMatrix(r);
}

Eigen::Vector3d Horizontal(double x, double z) { return {x, 0.0, z}; }

// Unit vector moved off u by a 2D isotropic Gaussian in its tangent plane.
Eigen::Vector3d Perturb(const Eigen::Vector3d& u, double sigma,
                        std::mt19937_64& rng) {
  if (sigma <= 0.0) return u;
  std::normal_distribution<double> n(0.0, sigma);
  const Eigen::Vector3d helper = std::abs(u.x()) < 0.9
                                     ? Eigen::Vector3d::UnitX()
                                     : Eigen::Vector3d::UnitY();
  const Eigen::Vector3d b1 = u.cross(helper).normalized();
  const Eigen::Vector3d b2 = u.cross(b1);
  const double a = n(rng);
  const double b = n(rng);
  return (u + a * b1 + b * b2).normalized();
}

Eigen::Vector3d RandomAxis(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Vector3d a;
  do {
    a = Eigen::Vector3d(n(rng), n(rng), n(rng));
  } while (a.norm() < 1e-6);
  return a.normalized();
}

}  // namespace

TrajectoryShape ParseTrajectoryShape(const std::string& name) {
  if (name == "line") return TrajectoryShape::kLine;
  if (name == "circle") return TrajectoryShape::kCircle;
  if (name == "square-loop") return TrajectoryShape::kSquareLoop;
  if (name == "random-walk") return TrajectoryShape::kRandomWalk;
  throw Error(ErrorCode::kInvalidSpec, "unknown trajectory shape '" + name +
                                           "' (line|circle|square-loop|"
                                           "random-walk)");
}

std::string TrajectoryShapeName(TrajectoryShape shape) {
  switch (shape) {
    case TrajectoryShape::kLine: return "line";
    case TrajectoryShape::kCircle: return "circle";
    case TrajectoryShape::kSquareLoop: return "square-loop";
    case TrajectoryShape::kRandomWalk: return "random-walk";
  }
  return "line";
}

void SimulationSpec::Validate() const {
  Require(num_frames >= 2, "num_frames must be >= 2");
  Require(std::isfinite(step) && step >= 0.0, "step must be >= 0");
  Require(laps >= 1, "laps must be >= 1");
  Require(std::isfinite(bob) && bob >= 0.0, "bob must be >= 0");
  Require(bob_period >= 1, "bob_period must be >= 1");
  Require(edge_span >= 1, "edge_span must be >= 1");
  Require(std::isfinite(loop_radius) && loop_radius >= 0.0,
          "loop_radius must be >= 0");
  for (double v : {rotation_noise, direction_noise, bearing_noise}) {
    Require(std::isfinite(v) && v >= 0.0 && v < kPi / 2,
            "noise angles must be in [0, pi/2)");
  }
  Require(outlier_fraction >= 0.0 && outlier_fraction <= 1.0,
          "outlier_fraction must be in [0, 1]");
  Require(points_per_pair >= 0, "points_per_pair must be >= 0");
  Require(min_depth > 0.0 && max_depth >= min_depth,
          "depths must satisfy 0 < min_depth <= max_depth");
  Require(camera.fx > 0.0 && camera.fy > 0.0, "focal lengths must be > 0");
  Require(image_width > 0.0 && image_height > 0.0, "image size must be > 0");
  Require(fps > 0.0, "fps must be > 0");
}

Trajectory SimulateTrajectory(const SimulationSpec& spec) {
  spec.Validate();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> turn(0.0, 0.1);
  const int n = spec.num_frames;
  const double lap = n * spec.step / spec.laps;

  Trajectory trajectory(n);
  double heading = 0.0;  // random walk yaw
  Eigen::Vector3d walk = Eigen::Vector3d::Zero();
  for (int k = 0; k < n; ++k) {
    const double s = k * spec.step;
    Eigen::Vector3d c = Eigen::Vector3d::Zero();
    Eigen::Vector3d forward = Eigen::Vector3d::UnitZ();
    switch (spec.shape) {
      case TrajectoryShape::kLine:
        c = Horizontal(0.0, s);
        break;
      case TrajectoryShape::kCircle: {
        const double radius = lap / (2.0 * kPi);
        const double theta = radius > 0.0 ? s / radius : 0.0;
        c = Horizontal(radius - radius * std::cos(theta),
                       radius * std::sin(theta));
        const Eigen::Vector3d centre = Horizontal(radius, 0.0);
        forward = radius > 0.0 ? Eigen::Vector3d(centre - c)
                               : Eigen::Vector3d::UnitX();
        break;
      }
      case TrajectoryShape::kSquareLoop: {
        const double side = lap / 4.0;
        double u = side > 0.0 ? std::fmod(s, lap) : 0.0;
        if (u < side) {
          c = Horizontal(0.0, u);
        } else if (u < 2 * side) {
          c = Horizontal(u - side, side);
        } else if (u < 3 * side) {
          c = Horizontal(side, 3 * side - u);
        } else {
          c = Horizontal(4 * side - u, 0.0);
        }
        const Eigen::Vector3d centre = Horizontal(side / 2, side / 2);
        forward = side > 0.0 ? Eigen::Vector3d(centre - c)
                             : Eigen::Vector3d::UnitX();
        break;
      }
      case TrajectoryShape::kRandomWalk:
        if (k > 0) {
          heading += turn(rng);
          walk += spec.step * Horizontal(std::sin(heading), std::cos(heading));
        }
        c = walk;
        forward = Horizontal(std::sin(heading), std::cos(heading));
        break;
    }
    c.y() = spec.bob * spec.step *
            std::sin(2.0 * kPi * k / static_cast<double>(spec.bob_period));
    trajectory[k].timestamp = k / spec.fps;
    trajectory[k].pose.translation = c;
    trajectory[k].pose.rotation = LookAlong(forward);
  }
  return trajectory;
}

SyntheticScene SimulateScene(const SimulationSpec& spec) {
  SyntheticScene scene;
  scene.spec = spec;
  scene.ground_truth = SimulateTrajectory(spec);
  const Trajectory& gt = scene.ground_truth;
  const int n = spec.num_frames;

  // Mean-angle parameters to per-axis Gaussian scales.
  const double bearing_sigma = spec.bearing_noise * std::sqrt(2.0 / kPi);
  const double direction_sigma = spec.direction_noise * std::sqrt(2.0 / kPi);
  const double rotation_sigma = spec.rotation_noise * std::sqrt(kPi / 8.0);

  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (j - i <= spec.edge_span) {
        pairs.emplace_back(i, j);
      } else if (spec.loop_radius > 0.0 &&
                 (gt[j].pose.translation - gt[i].pose.translation).norm() <
                     spec.loop_radius) {
        pairs.emplace_back(i, j);
      }
    }
  }

  std::mt19937_64 rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const auto& [i, j] : pairs) {
    const Pose& pi = gt[i].pose;
    const Pose& pj = gt[j].pose;
    RelativeMeasurement m;
    m.i = i;
    m.j = j;
    const Rotation r_ij = RelativeRotation(pi.rotation, pj.rotation);
    const Eigen::Vector3d w(normal(rng), normal(rng), normal(rng));
    m.rotation = rotation_sigma > 0.0 ? So3Exp(rotation_sigma * w) * r_ij : r_ij;
    const Eigen::Vector3d baseline =
        pi.rotation * Eigen::Vector3d(pj.translation - pi.translation);
    if (baseline.norm() < 1e-12) {
      m.direction = Eigen::Vector3d::UnitZ();
      m.direction_reliable = false;
    } else {
      m.direction = Perturb(baseline.normalized(), direction_sigma, rng);
    }

    CorrespondenceSet corrs;
    corrs.frame_i = i;
    corrs.frame_j = j;
    corrs.image_width = spec.image_width;
    corrs.image_height = spec.image_height;
    const CameraIntrinsics& cam = spec.camera;
    for (int p = 0; p < spec.points_per_pair; ++p) {
      for (int attempt = 0; attempt < 100; ++attempt) {
        const double u = unit(rng) * spec.image_width;
        const double v = unit(rng) * spec.image_height;
        const double depth =
            spec.min_depth + unit(rng) * (spec.max_depth - spec.min_depth);
        const Eigen::Vector3d x_i =
            depth * Eigen::Vector3d((u - cam.cx) / cam.fx,
                                    (v - cam.cy) / cam.fy, 1.0);
        const Eigen::Vector3d world =
            pi.rotation.matrix().transpose() * x_i + pi.translation;
        const Eigen::Vector3d x_j = pj.rotation * Eigen::Vector3d(world - pj.translation);
        if (x_j.z() < 0.1) continue;
        const double uj = cam.fx * x_j.x() / x_j.z() + cam.cx;
        const double vj = cam.fy * x_j.y() / x_j.z() + cam.cy;
        if (uj < 0.0 || uj > spec.image_width || vj < 0.0 ||
            vj > spec.image_height) {
          continue;
        }
        const Eigen::Vector3d f_i = Perturb(x_i.normalized(), bearing_sigma, rng);
        const Eigen::Vector3d f_j = Perturb(x_j.normalized(), bearing_sigma, rng);
        Correspondence c;
        c.p_i = Eigen::Vector2d(
            std::clamp(cam.fx * f_i.x() / f_i.z() + cam.cx, 0.0, spec.image_width),
            std::clamp(cam.fy * f_i.y() / f_i.z() + cam.cy, 0.0, spec.image_height));
        c.p_j = Eigen::Vector2d(
            std::clamp(cam.fx * f_j.x() / f_j.z() + cam.cx, 0.0, spec.image_width),
            std::clamp(cam.fy * f_j.y() / f_j.z() + cam.cy, 0.0, spec.image_height));
        c.confidence = 0.5 + 0.5 * unit(rng);
        corrs.matches.push_back(c);
        scene.points.push_back(world);
        break;
      }
    }
    m.inliers = static_cast<int>(corrs.matches.size());
    scene.measurements.push_back(m);
    scene.correspondences.push_back(std::move(corrs));
  }

  // Outliers: an exact count of edges, chosen by a partial Fisher-Yates pass.
  const int num_edges = static_cast<int>(scene.measurements.size());
  const int num_outliers =
      static_cast<int>(std::lround(spec.outlier_fraction * num_edges));
  std::mt19937_64 outlier_rng(spec.seed + 1);
  std::vector<int> order(num_edges);
  for (int e = 0; e < num_edges; ++e) order[e] = e;
  for (int k = 0; k < num_outliers; ++k) {
    std::uniform_int_distribution<int> pick(k, num_edges - 1);
    std::swap(order[k], order[pick(outlier_rng)]);
  }
  scene.outlier_edges.assign(order.begin(), order.begin() + num_outliers);
  std::sort(scene.outlier_edges.begin(), scene.outlier_edges.end());
  for (int e : scene.outlier_edges) {
    RelativeMeasurement& m = scene.measurements[e];
    m.rotation = So3Exp(0.5 * kPi * RandomAxis(outlier_rng)) * m.rotation;
  }
  return scene;
}

PoseGraph SyntheticScene::ToPoseGraph() const {
  PoseGraph graph;
  for (std::size_t k = 0; k < ground_truth.size(); ++k) {
    graph.ids.push_back(static_cast<int>(k));
    graph.poses.push_back(ground_truth[k].pose);
  }
  graph.edges = measurements;
  return graph;
}

}  // namespace rasl
