#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rasl/correspond.h"
#include "rasl/geometry.h"
#include "rasl/pose_graph.h"
#include "rasl/trajectory.h"

namespace rasl {

enum class TrajectoryShape { kLine, kCircle, kSquareLoop, kRandomWalk };

TrajectoryShape ParseTrajectoryShape(const std::string& name);
std::string TrajectoryShapeName(TrajectoryShape shape);

struct SimulationSpec {
  TrajectoryShape shape = TrajectoryShape::kCircle;
  int num_frames = 100;
  double step = 0.1;   // path length between consecutive frames
  int laps = 1;        // circle and square-loop: path closes after each lap
  double bob = 0.5;    // vertical oscillation amplitude, in steps
  int bob_period = 5;  // frames
  std::uint64_t seed = 1;
  int edge_span = 3;   // measurements between frames with |i - j| <= span
  // Extra measurements between frames further apart than edge_span whose true
  // distance is below this radius (0 disables).
  double loop_radius = 0.0;
  double rotation_noise = 0.0;   // mean angle of the rotation error (rad)
  double direction_noise = 0.0;  // mean angle of the direction error (rad)
  double outlier_fraction = 0.0;  // share of edges rotated by 90 deg
  // Correspondences per measured pair (0: relative measurements only).
  int points_per_pair = 0;
  double bearing_noise = 0.0;  // mean angle of the bearing error (rad)
  double min_depth = 4.0;
  double max_depth = 8.0;
  CameraIntrinsics camera;
  double image_width = 640.0;
  double image_height = 480.0;
  double fps = 10.0;

  // Throws kInvalidSpec.
  void Validate() const;
};

struct SyntheticScene {
  SimulationSpec spec;
  Trajectory ground_truth;
  std::vector<Eigen::Vector3d> points;  // world points behind the matches
  std::vector<RelativeMeasurement> measurements;
  std::vector<int> outlier_edges;  // indices into measurements, ascending
  std::vector<CorrespondenceSet> correspondences;  // parallel to measurements

  PoseGraph ToPoseGraph() const;
};

// Deterministic in the spec (seeded std::mt19937_64).
SyntheticScene SimulateScene(const SimulationSpec& spec);

// Ground-truth poses along the path, without any measurements.
Trajectory SimulateTrajectory(const SimulationSpec& spec);

}  // namespace rasl
