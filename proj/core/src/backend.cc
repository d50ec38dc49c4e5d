#include "rasl/backend.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>

#include <Eigen/SparseCore>

#include "rasl/error.h"

namespace rasl {
namespace {

// Epipolar (or derotated, without a direction) residual accepted as inlier.
constexpr double kInlierTol = 5e-3;

// Same measurement seen from the other end: R_ji = R_ij^T and the direction
// j -> i in frame j is -R_ij d.
RelativeMeasurement Reversed(const RelativeMeasurement& m) {
  RelativeMeasurement r = m;
  r.i = m.j;
  r.j = m.i;
  r.rotation = m.rotation.Inverse();
  r.direction = -(m.rotation * m.direction);
  return r;
}

RelativeMeasurement Oriented(const RelativeMeasurement& m) {
  return m.i < m.j ? m : Reversed(m);
}

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since)
      .count();
}

const char* YesNo(bool b) { return b ? "yes" : "no"; }

// Constant-velocity continuation of frames keyframe+1..last.
void Extrapolate(const WindowInput& input, bool keep_rotations,
                 std::vector<Pose>* poses) {
  const int g = input.keyframe - input.first;
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
  Rotation step;
  if (g >= 1) {
    const Pose& a = input.anchor_poses[g - 1];
    const Pose& b = input.anchor_poses[g];
    velocity = b.translation - a.translation;
    step = RelativeRotation(a.rotation, b.rotation);
  }
  for (int v = g + 1; v < static_cast<int>(poses->size()); ++v) {
    Pose& p = (*poses)[v];
    const Pose& prev = (*poses)[v - 1];
    p.translation = prev.translation + velocity;
    if (!keep_rotations) p.rotation = step * prev.rotation;
  }
}

}  // namespace

void BackendInput::Validate() const {
  if (timestamps.empty()) throw Error(ErrorCode::kEmptyInput, "no frames");
  for (std::size_t k = 1; k < timestamps.size(); ++k) {
    if (!(timestamps[k] > timestamps[k - 1])) {
      throw Error(ErrorCode::kInvalidArgument,
                  "timestamps must be strictly increasing");
    }
  }
  for (const auto& m : measurements) {
    if (m.i < 0 || m.j < 0 || m.i >= num_frames() || m.j >= num_frames() ||
        m.i == m.j) {
      throw Error(ErrorCode::kInvalidArgument,
                  "measurement " + std::to_string(m.i) + "-" +
                      std::to_string(m.j) + " has bad frame indices");
    }
  }
}

BackendInput InputFromPoseGraph(const PoseGraph& graph, double fps,
                                const BackendOptions& options) {
  std::vector<int> ids = graph.ids;
  std::sort(ids.begin(), ids.end());
  std::map<int, int> index;
  for (std::size_t k = 0; k < ids.size(); ++k) index[ids[k]] = static_cast<int>(k);
  BackendInput input;
  for (int id : ids) input.timestamps.push_back(id / fps);
  for (const RelativeMeasurement& e : graph.edges) {
    RelativeMeasurement m = e;
    m.i = index.at(e.i);
    m.j = index.at(e.j);
    if (std::abs(m.i - m.j) > options.window_edge_span && m.inliers == 0) {
      m.inliers = options.loop.edge_inliers;
    }
    input.measurements.push_back(m);
  }
  return input;
}

BackendInput InputFromCorrespondences(
    const std::vector<CorrespondenceSet>& sets, const CameraIntrinsics& camera,
    const RelativeRotationOptions& relrot, double fps,
    std::vector<std::string>* warnings) {
  std::set<int> id_set;
  for (const auto& s : sets) {
    id_set.insert(s.frame_i);
    id_set.insert(s.frame_j);
  }
  std::map<int, int> index;
  BackendInput input;
  for (int id : id_set) {
    index[id] = static_cast<int>(input.timestamps.size());
    input.timestamps.push_back(id / fps);
  }
  for (const CorrespondenceSet& set : sets) {
    RelativeMotion motion;
    try {
      motion = EstimateRelativeMotion(set, camera, relrot);
    } catch (const Error& e) {
      if (warnings) {
        warnings->push_back("pair " + std::to_string(set.frame_i) + "-" +
                            std::to_string(set.frame_j) + " skipped: " +
                            e.what());
      }
      continue;
    }
    const auto all = BearingsFromPixels(set.matches, camera);
    if (TranslationParallax(all, motion.rotation) > relrot.independence_tol) {
      // Seeded refinement over every match of the pair.
      const RelativeMotion refined = RefineRelativeMotion(all, motion.rotation);
      if (AngularDistance(refined.rotation, motion.rotation) < kPi / 4) {
        motion.rotation = refined.rotation;
      }
    }
    const Eigen::Matrix3d& r = motion.rotation.matrix();
    RelativeMeasurement m;
    m.i = index.at(set.frame_i);
    m.j = index.at(set.frame_j);
    m.rotation = motion.rotation;
    m.direction_reliable = TranslationParallax(all, motion.rotation) >
                           relrot.independence_tol;
    Eigen::Vector3d t = Eigen::Vector3d::Zero();
    if (m.direction_reliable) {
      t = EstimateDirectionGivenRotation(all, motion.rotation);
      motion.direction = t;
      m.direction = BaselineDirection(motion);
    } else {
      m.direction = Eigen::Vector3d::UnitZ();
    }
    for (const BearingPair& p : all) {
      const Eigen::Vector3d n = (r * p.f_i).cross(p.f_j);
      const double res = m.direction_reliable ? std::abs(t.dot(n)) : n.norm();
      if (res < kInlierTol) ++m.inliers;
    }
    input.measurements.push_back(m);
  }
  return input;
}

std::vector<int> MarkKeyframes(int num_frames, int interval) {
  if (num_frames < 1) throw Error(ErrorCode::kEmptyInput, "no frames");
  if (interval < 1) {
    throw Error(ErrorCode::kInvalidArgument, "keyframe interval must be >= 1");
  }
  std::vector<int> keyframes;
  for (int k = 0; k < num_frames; k += interval) keyframes.push_back(k);
  if (keyframes.back() != num_frames - 1) keyframes.push_back(num_frames - 1);
  return keyframes;
}

std::string WindowStatusName(WindowStatus status) {
  switch (status) {
    case WindowStatus::kSolved: return "solved";
    case WindowStatus::kZeroMotion: return "zero-motion";
    case WindowStatus::kExtrapolated: return "extrapolated";
  }
  return "solved";
}

WindowResult ProcessWindow(const WindowInput& input,
                           const BackendOptions& options) {
  const int n = input.last - input.first + 1;
  const int g = input.keyframe - input.first;
  if (input.first < 0 || g < 0 || input.keyframe > input.last ||
      static_cast<int>(input.anchor_poses.size()) != g + 1) {
    throw Error(ErrorCode::kInvalidArgument, "inconsistent window bounds");
  }

  WindowResult result;
  result.scale = input.scale_hint;
  result.poses.assign(n, input.anchor_poses[g]);
  for (int v = 0; v <= g; ++v) result.poses[v] = input.anchor_poses[v];
  if (n == g + 1) return result;

  RotGraph graph;
  for (int v = 0; v < n; ++v) graph.ids.push_back(input.first + v);
  graph.rotations.assign(n, Rotation::Identity());
  graph.rotations[g] = input.anchor_poses[g].rotation;
  graph.gauge = g;
  std::vector<DirectionEdge> directions;
  for (const RelativeMeasurement& raw : input.measurements) {
    const RelativeMeasurement m = Oriented(raw);
    if (m.i < input.first || m.j > input.last) continue;
    graph.edges.push_back(
        {m.i - input.first, m.j - input.first, m.rotation, EdgeStatus::kActive});
    if (m.direction_reliable) {
      directions.push_back({m.i - input.first, m.j - input.first, m.direction});
    }
  }
  result.edges = static_cast<int>(graph.edges.size());

  try {
    result.rotavg = RotationAveraging(graph, options.rotavg);
  } catch (const Error& e) {
    result.status = WindowStatus::kExtrapolated;
    result.failure = std::string("rotation averaging: ") + e.what();
    Extrapolate(input, false, &result.poses);
    return result;
  }
  const std::vector<Rotation>& rotations = result.rotavg.rotations;
  result.certificate =
      CertifyGlobalOptimality(graph, rotations, result.rotavg.final_update);
  for (int v = g + 1; v < n; ++v) result.poses[v].rotation = rotations[v];

  const Eigen::Vector3d& anchor = input.anchor_poses[g].translation;
  if (directions.empty()) {
    result.status = WindowStatus::kZeroMotion;
    for (int v = g + 1; v < n; ++v) result.poses[v].translation = anchor;
    return result;
  }

  TranslationAveragingResult ta;
  try {
    ta = TranslationAveraging(rotations, directions, options.admm);
  } catch (const Error& e) {
    result.status = WindowStatus::kExtrapolated;
    result.failure = std::string("translation averaging: ") + e.what();
    Extrapolate(input, true, &result.poses);
    return result;
  }
  result.translation_solved = true;
  result.admm = ta.admm;
  result.constraints = ta.stats;
  result.constraint_rows = ta.rows;
  const std::vector<Eigen::Vector3d>& p = ta.positions;

  // Similarity onto the published overlap: shift pins the keyframe, scale is
  // the least-squares fit of the remaining overlap frames.
  double scale = input.scale_hint;
  if (g == 0 && input.first == 0) {
    const double d = (p[1] - p[0]).norm();
    if (d > 1e-12) scale = 1.0 / d;
  } else {
    double num = 0.0;
    double den = 0.0;
    for (int v = 0; v < g; ++v) {
      const Eigen::Vector3d dp = p[v] - p[g];
      num += dp.dot(input.anchor_poses[v].translation - anchor);
      den += dp.squaredNorm();
    }
    if (den > 1e-24 && num > 1e-12 * std::sqrt(den)) scale = num / den;
  }
  result.scale = scale;
  for (int v = g + 1; v < n; ++v) {
    result.poses[v].translation = anchor + scale * (p[v] - p[g]);
  }
  return result;
}

std::vector<Eigen::Vector3d> CloseLoop(
    const std::vector<Eigen::Vector3d>& keyframe_positions, int loop_a,
    int loop_b, double edge_weight, const AdmmOptions& options,
    AdmmResult* admm) {
  const int m = static_cast<int>(keyframe_positions.size());
  if (m < 2 || loop_a < 0 || loop_b < 0 || loop_a >= m || loop_b >= m ||
      loop_a == loop_b) {
    throw Error(ErrorCode::kInvalidArgument, "bad loop keyframes");
  }
  // Unknowns: keyframes 1..m-1; keyframe 0 is held at its position.
  const Eigen::Vector3d& c0 = keyframe_positions[0];
  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(3 * m);
  auto add = [&](int row, int k, double v) {
    if (k == 0) {
      b.segment<3>(row) -= v * c0;
    } else {
      for (int r = 0; r < 3; ++r) triplets.emplace_back(row + r, 3 * (k - 1) + r, v);
    }
  };
  int row = 0;
  for (int k = 0; k + 1 < m; ++k, row += 3) {
    b.segment<3>(row) += keyframe_positions[k + 1] - keyframe_positions[k];
    add(row, k + 1, 1.0);
    add(row, k, -1.0);
  }
  add(row, loop_b, edge_weight);
  add(row, loop_a, -edge_weight);

  Eigen::SparseMatrix<double> a(3 * m, 3 * (m - 1));
  a.setFromTriplets(triplets.begin(), triplets.end());
  Eigen::VectorXd x;
  const AdmmResult result = L1Solve(a, b, &x, options);
  if (admm) *admm = result;
  if (!result.converged) {
    throw Error(ErrorCode::kNonConvergence, "loop closure ADMM did not converge");
  }
  std::vector<Eigen::Vector3d> out(m);
  out[0] = c0;
  for (int k = 1; k < m; ++k) out[k] = x.segment<3>(3 * (k - 1));
  return out;
}

void PropagateToFrames(const std::vector<int>& keyframes,
                       const std::vector<Pose>& new_keyframe_poses,
                       int last_frame, std::vector<Pose>* poses) {
  if (keyframes.empty()) return;
  if (keyframes.size() != new_keyframe_poses.size()) {
    throw Error(ErrorCode::kInvalidArgument, "keyframe/pose count mismatch");
  }
  std::vector<Pose> old;
  old.reserve(keyframes.size());
  for (int k : keyframes) old.push_back((*poses)[k]);
  std::size_t owner = 0;
  for (int f = keyframes.front(); f <= last_frame; ++f) {
    while (owner + 1 < keyframes.size() && keyframes[owner + 1] <= f) ++owner;
    const Pose& from = old[owner];
    const Pose& to = new_keyframe_poses[owner];
    Pose& p = (*poses)[f];
    if (to.rotation.matrix() == from.rotation.matrix()) {
      // Rotation untouched: pure translation, rotations stay bitwise equal.
      p.translation += to.translation - from.translation;
    } else {
      const Eigen::Vector3d offset =
          from.rotation * Eigen::Vector3d(p.translation - from.translation);
      const Rotation rel = RelativeRotation(from.rotation, p.rotation);
      p.rotation = rel * to.rotation;
      p.translation = to.translation + to.rotation.matrix().transpose() * offset;
    }
  }
}

RunOutput RunPipeline(const BackendInput& input, const BackendOptions& options) {
  const auto run_start = std::chrono::steady_clock::now();
  input.Validate();
  const int n = input.num_frames();
  const int span = options.window_edge_span;
  const LoopOptions& loop = options.loop;

  // Window edges indexed by their lower frame; loop edges by ordered pair.
  std::vector<std::vector<RelativeMeasurement>> by_first(n);
  std::map<std::pair<int, int>, RelativeMeasurement> pairs;
  for (const RelativeMeasurement& raw : input.measurements) {
    const RelativeMeasurement m = Oriented(raw);
    if (m.j - m.i <= span) by_first[m.i].push_back(m);
    pairs.try_emplace({m.i, m.j}, m);
  }
  auto inliers = [&](int a, int b) {
    auto it = pairs.find({std::min(a, b), std::max(a, b)});
    return it == pairs.end() ? -1 : it->second.inliers;
  };

  RunOutput out;
  RunReport& report = out.report;
  std::vector<Pose> poses(n);
  out.low_confidence.assign(n, false);
  const std::vector<int> regular = MarkKeyframes(n, options.keyframe_interval);
  std::set<int> keyframes(regular.begin(), regular.end());

  double scale_hint = 1.0;
  Eigen::Vector3d box_min = Eigen::Vector3d::Zero();
  Eigen::Vector3d box_max = Eigen::Vector3d::Zero();
  for (std::size_t w = 0; w + 1 < regular.size(); ++w) {
    WindowInput win;
    win.keyframe = regular[w];
    win.last = regular[w + 1];
    win.first = std::max(0, win.keyframe - options.window_overlap);
    win.anchor_poses.assign(poses.begin() + win.first,
                            poses.begin() + win.keyframe + 1);
    win.scale_hint = scale_hint;
    for (int f = win.first; f < win.last; ++f) {
      for (const RelativeMeasurement& m : by_first[f]) {
        if (m.j <= win.last) win.measurements.push_back(m);
      }
    }

    const auto start = std::chrono::steady_clock::now();
    WindowReport wr;
    wr.index = static_cast<int>(w);
    wr.first = win.first;
    wr.keyframe = win.keyframe;
    wr.last = win.last;
    wr.result = ProcessWindow(win, options);
    wr.seconds = Seconds(start);
    const WindowResult& res = wr.result;
    if (!res.rotavg.converged ||
        (res.translation_solved && !res.admm.converged)) {
      report.nonconvergence = true;
    }
    scale_hint = res.scale;
    for (int f = win.keyframe + 1; f <= win.last; ++f) {
      poses[f] = res.poses[f - win.first];
      out.low_confidence[f] = res.status == WindowStatus::kExtrapolated;
      box_min = box_min.cwiseMin(poses[f].translation);
      box_max = box_max.cwiseMax(poses[f].translation);
    }
    report.windows.push_back(std::move(wr));

    if (!loop.enabled) continue;
    std::vector<Eigen::Vector3d> positions(win.last + 1);
    for (int f = 0; f <= win.last; ++f) positions[f] = poses[f].translation;
    const double threshold = loop.distance_fraction * (box_max - box_min).norm();
    const int exclusion = loop.exclusion_intervals * options.keyframe_interval;
    for (int s = win.keyframe + 1; s <= win.last; ++s) {
      const auto candidate = DetectLoop(s, positions, exclusion, threshold,
                                        loop.inlier_threshold, inliers);
      if (!candidate) continue;

      const auto loop_start = std::chrono::steady_clock::now();
      LoopReport lr;
      lr.candidate = *candidate;
      keyframes.insert(candidate->t);
      keyframes.insert(candidate->s);
      std::vector<int> range(keyframes.lower_bound(candidate->t),
                             keyframes.upper_bound(win.last));
      lr.keyframes = static_cast<int>(range.size());
      std::vector<Pose> updated;
      std::vector<Eigen::Vector3d> kf_positions;
      for (int k : range) {
        updated.push_back(poses[k]);
        kf_positions.push_back(poses[k].translation);
      }
      const int loop_b = static_cast<int>(
          std::find(range.begin(), range.end(), candidate->s) - range.begin());
      try {
        if (loop.refine_rotations) {
          RotGraph graph;
          graph.ids = range;
          for (const Pose& p : updated) graph.rotations.push_back(p.rotation);
          for (std::size_t k = 0; k + 1 < range.size(); ++k) {
            graph.edges.push_back(
                {static_cast<int>(k), static_cast<int>(k + 1),
                 RelativeRotation(updated[k].rotation, updated[k + 1].rotation),
                 EdgeStatus::kActive});
          }
          graph.edges.push_back({0, loop_b,
                                 pairs.at({candidate->t, candidate->s}).rotation,
                                 EdgeStatus::kActive});
          const auto ra = RotationAveraging(graph, options.rotavg);
          for (std::size_t k = 0; k < range.size(); ++k) {
            updated[k].rotation = ra.rotations[k];
          }
        }
        const auto closed = CloseLoop(kf_positions, 0, loop_b,
                                      loop.edge_weight, options.admm, &lr.admm);
        for (std::size_t k = 0; k < range.size(); ++k) {
          updated[k].translation = closed[k];
        }
        PropagateToFrames(range, updated, win.last, &poses);
        lr.accepted = true;
        lr.message = "closed";
      } catch (const Error& e) {
        lr.accepted = false;
        lr.message = std::string("rejected: ") + e.what();
      }
      lr.seconds = Seconds(loop_start);
      report.loops.push_back(std::move(lr));
      break;  // one closure per window
    }
  }

  report.keyframes.assign(keyframes.begin(), keyframes.end());
  out.trajectory.resize(n);
  for (int f = 0; f < n; ++f) {
    out.trajectory[f].timestamp = input.timestamps[f];
    out.trajectory[f].pose = poses[f];
  }
  report.seconds = Seconds(run_start);
  return out;
}

void WriteRunReport(std::ostream& out, const RunReport& report) {
  char buf[512];
  out << "# rasl run report\n";
  std::snprintf(buf, sizeof(buf), "windows %zu loops %zu keyframes %zu\n",
                report.windows.size(), report.loops.size(),
                report.keyframes.size());
  out << buf;
  for (const std::string& w : report.warnings) out << "warning " << w << '\n';
  for (const WindowReport& wr : report.windows) {
    const WindowResult& r = wr.result;
    std::snprintf(buf, sizeof(buf),
                  "window %d frames %d-%d keyframe %d edges %d status %s "
                  "time_ms %.3f\n",
                  wr.index, wr.first, wr.last, wr.keyframe, r.edges,
                  WindowStatusName(r.status).c_str(), wr.seconds * 1e3);
    out << buf;
    if (!r.failure.empty()) out << "  failure " << r.failure << '\n';
    std::snprintf(buf, sizeof(buf),
                  "  rotavg irls_iterations %d prune_rounds %d converged %s "
                  "final_update %.3e\n",
                  r.rotavg.irls_iterations, r.rotavg.prune_rounds,
                  YesNo(r.rotavg.converged), r.rotavg.final_update);
    out << buf;
    for (const PruneReport& pr : r.rotavg.reports) {
      std::snprintf(buf, sizeof(buf), "  prune round %d threshold %.6f replaced",
                    pr.iteration, pr.alpha_max);
      out << buf;
      for (const ReplacedEdge& e : pr.replaced_edges) {
        std::snprintf(buf, sizeof(buf), " %d-%d:%.6f", e.i + wr.first,
                      e.j + wr.first, e.alpha);
        out << buf;
      }
      out << '\n';
    }
    std::snprintf(buf, sizeof(buf),
                  "  certificate optimal %s max_alpha %.6f alpha_max %.6f "
                  "all_constraints_removed %s\n",
                  YesNo(r.certificate.optimal), r.certificate.max_alpha,
                  r.certificate.alpha_max,
                  YesNo(r.certificate.all_constraints_removed));
    out << buf;
    if (r.translation_solved) {
      std::snprintf(buf, sizeof(buf),
                    "  transavg rows %d iterations %d converged %s "
                    "primal %.3e objective %.6e scale %.6f\n",
                    r.constraint_rows,
                    r.admm.iterations, YesNo(r.admm.converged),
                    r.admm.primal_residual, r.admm.final_objective, r.scale);
      out << buf;
    }
  }
  for (const LoopReport& lr : report.loops) {
    std::snprintf(buf, sizeof(buf),
                  "loop s %d t %d distance %.6f inliers %d keyframes %d "
                  "time_ms %.3f %s\n",
                  lr.candidate.s, lr.candidate.t, lr.candidate.distance,
                  lr.candidate.inlier_count, lr.keyframes, lr.seconds * 1e3,
                  lr.message.c_str());
    out << buf;
  }
  std::snprintf(buf, sizeof(buf), "nonconvergence %s\ntotal_ms %.3f\n",
                YesNo(report.nonconvergence), report.seconds * 1e3);
  out << buf;
}

}  // namespace rasl
