#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rasl/geometry.h"

namespace rasl {

struct StampedPose {
  double timestamp = 0.0;  // seconds
  Pose pose;
};

using Trajectory = std::vector<StampedPose>;

enum class TrajectoryFormat { kTum, kKitti };

// TUM: "timestamp tx ty tz qx qy qz qw" with the camera centre and the
// camera-to-world quaternion. KITTI: the row-major 3x4 camera-to-world matrix.
void WriteTrajectory(std::ostream& out, const Trajectory& trajectory,
                     TrajectoryFormat format);
void WriteTrajectoryFile(const std::string& path, const Trajectory& trajectory,
                         TrajectoryFormat format);

// KITTI files carry no timestamps; pose k gets k / fps.
Trajectory ReadTrajectory(std::istream& in, TrajectoryFormat format,
                          const std::string& name = "<stream>",
                          double fps = 10.0);
Trajectory ReadTrajectoryFile(const std::string& path, TrajectoryFormat format,
                              double fps = 10.0);

struct RmseResult {
  double rmse = 0.0;
  double scale = 1.0;
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  int matched = 0;
  // Estimated positions mapped into the ground-truth frame (matched only).
  Trajectory aligned;
};

// Nearest-timestamp association within max_dt, Sim(3) Umeyama alignment of the
// estimate onto the ground truth, RMS of the position residuals. Throws
// kNoOverlap with fewer than two associated pairs.
RmseResult EvaluateRmse(const Trajectory& estimated,
                        const Trajectory& ground_truth, double max_dt = 0.02);

}  // namespace rasl
