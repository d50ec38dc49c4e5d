#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rasl/correspond.h"
#include "rasl/geometry.h"
#include "rasl/pose_graph.h"
#include "rasl/relative_pose.h"
#include "rasl/rotation_averaging.h"
#include "rasl/trajectory.h"
#include "rasl/translation_averaging.h"

namespace rasl {

struct LoopOptions {
  bool enabled = true;
  double distance_fraction = 0.01;  // of the trajectory extent
  int inlier_threshold = 50;
  int exclusion_intervals = 3;  // keyframe intervals too recent to match
  double edge_weight = 10.0;
  bool refine_rotations = false;
  int edge_inliers = 100;  // inlier count credited to pose-graph loop edges
};

struct BackendOptions {
  int keyframe_interval = 30;
  int window_edge_span = 3;
  // Already-published frames before the keyframe that each window re-solves
  // to fix its scale.
  int window_overlap = 2;
  LoopOptions loop;
  RotationAveragingOptions rotavg;
  AdmmOptions admm;
};

// Frames indexed 0..n-1; measurements reference those indices.
struct BackendInput {
  std::vector<double> timestamps;  // strictly increasing
  std::vector<RelativeMeasurement> measurements;

  int num_frames() const { return static_cast<int>(timestamps.size()); }
  void Validate() const;
};

// Frame ids sorted ascending become indices; timestamps are id / fps. Edges
// spanning more than window_edge_span frames without an inlier count get
// loop.edge_inliers.
BackendInput InputFromPoseGraph(const PoseGraph& graph, double fps,
                                const BackendOptions& options);

// Relative motion per frame pair: the six-point rotation, then the direction
// re-estimated from every match given that rotation. Pairs that cannot be
// solved are skipped and described in `warnings`.
BackendInput InputFromCorrespondences(
    const std::vector<CorrespondenceSet>& sets, const CameraIntrinsics& camera,
    const RelativeRotationOptions& relrot, double fps,
    std::vector<std::string>* warnings = nullptr);

// Frames 0, interval, 2 interval, ... and the last frame.
std::vector<int> MarkKeyframes(int num_frames, int interval);

enum class WindowStatus { kSolved, kZeroMotion, kExtrapolated };
std::string WindowStatusName(WindowStatus status);

struct WindowInput {
  int first = 0;      // first vertex (k_a - overlap, clamped at 0)
  int keyframe = 0;   // k_a: gauge and anchor
  int last = 0;       // k_b
  // Published poses of frames first..keyframe (ignored for frame 0 windows).
  std::vector<Pose> anchor_poses;
  std::vector<RelativeMeasurement> measurements;  // window edges only
  double scale_hint = 1.0;  // used when the overlap cannot fix the scale
};

struct WindowResult {
  std::vector<Pose> poses;  // frames first..last
  WindowStatus status = WindowStatus::kSolved;
  std::string failure;      // reason for extrapolation
  double scale = 1.0;
  int edges = 0;
  RotationAveragingResult rotavg;
  OptimalityCertificate certificate;
  bool translation_solved = false;
  AdmmResult admm;
  ConstraintBuildStats constraints;
  int constraint_rows = 0;
};

// Rotation averaging with the gauge at `keyframe`, translation averaging,
// then the similarity that puts `keyframe` on its published pose and best
// matches the other overlap frames. Failures degrade to constant-velocity
// extrapolation instead of throwing.
WindowResult ProcessWindow(const WindowInput& input,
                           const BackendOptions& options);

struct LoopCandidate {
  int s = 0;  // current frame
  int t = 0;  // earlier frame
  double distance = 0.0;
  int inlier_count = 0;
};

// Frame s against frames t <= s - exclusion: the nearest t closer than
// dist_thresh whose measurement with s has at least inlier_thresh inliers.
// `positions` holds frames 0..s; `inliers(t, s)` returns the match count.
template <typename InlierFn>
std::optional<LoopCandidate> DetectLoop(
    int s, const std::vector<Eigen::Vector3d>& positions, int exclusion,
    double dist_thresh, int inlier_thresh, InlierFn inliers) {
  std::optional<LoopCandidate> best;
  for (int t = 0; t <= s - exclusion; ++t) {
    const double d = (positions[s] - positions[t]).norm();
    if (d >= dist_thresh) continue;
    if (best && d >= best->distance) continue;
    const int count = inliers(t, s);
    if (count < inlier_thresh) continue;
    best = LoopCandidate{s, t, d, count};
  }
  return best;
}

// Keyframe positions after closing the loop between keyframe indices
// `loop_a` and `loop_b`, with rotations and scale held fixed: l1 fit of the
// current keyframe displacements plus weighted coincidence rows for the loop
// pair, keyframe 0 held in place. Throws kNonConvergence when the solver
// stops early, so the caller can reject the closure.
std::vector<Eigen::Vector3d> CloseLoop(
    const std::vector<Eigen::Vector3d>& keyframe_positions, int loop_a,
    int loop_b, double edge_weight, const AdmmOptions& options,
    AdmmResult* admm = nullptr);

// Moves every frame in [keyframes.front(), last_frame] with its owning
// keyframe (the latest keyframe at or before it), keeping the frame's pose
// relative to that keyframe. `poses` holds the old poses of all frames.
void PropagateToFrames(const std::vector<int>& keyframes,
                       const std::vector<Pose>& new_keyframe_poses,
                       int last_frame, std::vector<Pose>* poses);

struct WindowReport {
  int index = 0;
  int first = 0;
  int keyframe = 0;
  int last = 0;
  double seconds = 0.0;
  WindowResult result;
};

struct LoopReport {
  LoopCandidate candidate;
  bool accepted = false;
  std::string message;
  int keyframes = 0;
  double seconds = 0.0;
  AdmmResult admm;
};

struct RunReport {
  std::vector<WindowReport> windows;
  std::vector<LoopReport> loops;
  std::vector<int> keyframes;  // regular and spliced, ascending
  std::vector<std::string> warnings;
  bool nonconvergence = false;
  double seconds = 0.0;
};

struct RunOutput {
  Trajectory trajectory;
  std::vector<bool> low_confidence;
  RunReport report;
};

// Windowed back-end over the whole input.
RunOutput RunPipeline(const BackendInput& input, const BackendOptions& options);

// Plain-text report: per-window timing and solver statistics, prune reports,
// certificates and loop closures.
void WriteRunReport(std::ostream& out, const RunReport& report);

}  // namespace rasl
