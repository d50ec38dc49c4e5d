#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "expect_error.h"
#include "rasl/relative_pose.h"
#include "rasl/simulate.h"

namespace rasl {
namespace {

TEST(Simulate, ExactMeasurementsAreConsistent) {
  SimulationSpec spec;
  spec.num_frames = 40;
  spec.points_per_pair = 10;
  for (auto shape : {TrajectoryShape::kLine, TrajectoryShape::kCircle,
                     TrajectoryShape::kSquareLoop, TrajectoryShape::kRandomWalk}) {
    spec.shape = shape;
    const SyntheticScene scene = SimulateScene(spec);
    ASSERT_EQ(scene.measurements.size(), scene.correspondences.size());
    for (const auto& m : scene.measurements) {
      const Pose& pi = scene.ground_truth[m.i].pose;
      const Pose& pj = scene.ground_truth[m.j].pose;
      EXPECT_LT(AngularDistance(m.rotation, RelativeRotation(pi.rotation, pj.rotation)), 1e-12);
      const Eigen::Vector3d d = (pi.rotation * Eigen::Vector3d(pj.translation - pi.translation)).normalized();
      EXPECT_LT((m.direction - d).norm(), 1e-12);
      EXPECT_EQ(m.j - m.i <= spec.edge_span, true);
    }
    std::size_t point = 0;
    for (const auto& corrs : scene.correspondences) {
      const Pose& pi = scene.ground_truth[corrs.frame_i].pose;
      for (const auto& c : corrs.matches) {
        const Eigen::Vector3d x = pi.rotation * Eigen::Vector3d(scene.points[point++] - pi.translation);
        const Eigen::Vector3d f = BearingFromPixel(c.p_i, spec.camera);
        EXPECT_LT((f - x.normalized()).norm(), 1e-9);
        EXPECT_GE(c.confidence, 0.5);
        EXPECT_LE(c.confidence, 1.0);
      }
    }
    EXPECT_EQ(point, scene.points.size());
  }
}

TEST(Simulate, OutlierCountIsExactAndReproducible) {
  SimulationSpec spec;
  spec.num_frames = 101;
  spec.edge_span = 1;
  spec.outlier_fraction = 0.2;
  spec.seed = 42;
  const SyntheticScene a = SimulateScene(spec);
  ASSERT_EQ(a.measurements.size(), 100u);
  EXPECT_EQ(a.outlier_edges.size(), 20u);
  EXPECT_EQ(SimulateScene(spec).outlier_edges, a.outlier_edges);
  for (std::size_t e = 0; e < a.measurements.size(); ++e) {
    const auto& m = a.measurements[e];
    const double err = AngularDistance(
        m.rotation, RelativeRotation(a.ground_truth[m.i].pose.rotation,
                                     a.ground_truth[m.j].pose.rotation));
    const bool outlier = std::binary_search(a.outlier_edges.begin(), a.outlier_edges.end(),
                                            static_cast<int>(e));
    EXPECT_NEAR(err, outlier ? kPi / 2.0 : 0.0, 1e-9);
  }
}

TEST(Simulate, BearingNoiseMeanMatchesNominal) {
  SimulationSpec spec;
  spec.num_frames = 40;
  spec.points_per_pair = 100;
  spec.bearing_noise = DegToRad(0.1);
  const SyntheticScene scene = SimulateScene(spec);
  double sum = 0.0;
  int count = 0;
  std::size_t point = 0;
  for (const auto& corrs : scene.correspondences) {
    const Pose& pi = scene.ground_truth[corrs.frame_i].pose;
    for (const auto& c : corrs.matches) {
      const Eigen::Vector3d x = pi.rotation * Eigen::Vector3d(scene.points[point++] - pi.translation);
      const Eigen::Vector3d f = BearingFromPixel(c.p_i, spec.camera);
      sum += std::atan2(f.cross(x).norm(), f.dot(x));
      ++count;
    }
  }
  ASSERT_GE(count, 10000);
  EXPECT_NEAR(sum / count, spec.bearing_noise, 0.1 * spec.bearing_noise);
}

TEST(Simulate, LoopRadiusAddsRevisitEdges) {
  SimulationSpec spec;
  spec.shape = TrajectoryShape::kCircle;
  spec.num_frames = 60;
  spec.loop_radius = 0.25;
  const SyntheticScene scene = SimulateScene(spec);
  bool loop = false;
  for (const auto& m : scene.measurements) loop |= m.j - m.i > spec.edge_span;
  EXPECT_TRUE(loop);
}

TEST(Simulate, TimestampsAndValidation) {
  SimulationSpec spec;
  spec.num_frames = 5;
  spec.fps = 20.0;
  const Trajectory t = SimulateTrajectory(spec);
  EXPECT_DOUBLE_EQ(t[4].timestamp, 0.2);
  spec.num_frames = 0;
  EXPECT_RASL_ERROR(SimulateTrajectory(spec), ErrorCode::kInvalidSpec);
  spec.num_frames = 5;
  spec.outlier_fraction = 1.5;
  EXPECT_RASL_ERROR(SimulateScene(spec), ErrorCode::kInvalidSpec);
  EXPECT_RASL_ERROR(ParseTrajectoryShape("spiral"), ErrorCode::kInvalidSpec);
  EXPECT_EQ(TrajectoryShapeName(ParseTrajectoryShape("square-loop")), "square-loop");
}

}  // namespace
}  // namespace rasl
