#pragma once

#include <vector>

#include <Eigen/Core>

#include "rasl/geometry.h"

namespace rasl {

// Relative measurement between frames i and j (frame ids): rotation ~ R_j R_i^T
// and the unit baseline direction from camera i to camera j in frame i.
struct RelativeMeasurement {
  int i = 0;
  int j = 0;
  Rotation rotation;
  Eigen::Vector3d direction = Eigen::Vector3d::UnitZ();
  bool direction_reliable = true;
  int inliers = 0;  // supporting correspondences (0 when unknown)
};

struct PoseGraph {
  std::vector<int> ids;     // vertex frame ids
  std::vector<Pose> poses;  // one per vertex (initial guesses or ground truth)
  std::vector<RelativeMeasurement> edges;
};

}  // namespace rasl
