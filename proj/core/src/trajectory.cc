#include "rasl/trajectory.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <Eigen/Geometry>

#include "rasl/error.h"

namespace rasl {
namespace {

std::string FormatPose(const StampedPose& p, TrajectoryFormat format) {
  const Eigen::Matrix3d r_wc = p.pose.rotation.matrix().transpose();
  const Eigen::Vector3d& c = p.pose.translation;
  char buf[512];
  if (format == TrajectoryFormat::kTum) {
    Eigen::Quaterniond q(r_wc);
    q.normalize();
    if (q.w() < 0.0) q.coeffs() = -q.coeffs();  // canonical sign
    std::snprintf(buf, sizeof(buf), "%.9f %.9f %.9f %.9f %.9f %.9f %.9f %.9f",
                  p.timestamp, c.x(), c.y(), c.z(), q.x(), q.y(), q.z(),
                  q.w());
  } else {
    std::snprintf(buf, sizeof(buf),
                  "%.9e %.9e %.9e %.9e %.9e %.9e %.9e %.9e %.9e %.9e %.9e %.9e",
                  r_wc(0, 0), r_wc(0, 1), r_wc(0, 2), c.x(), r_wc(1, 0),
                  r_wc(1, 1), r_wc(1, 2), c.y(), r_wc(2, 0), r_wc(2, 1),
                  r_wc(2, 2), c.z());
  }
  return buf;
}

}  // namespace

void WriteTrajectory(std::ostream& out, const Trajectory& trajectory,
                     TrajectoryFormat format) {
  for (const StampedPose& p : trajectory) out << FormatPose(p, format) << '\n';
}

void WriteTrajectoryFile(const std::string& path, const Trajectory& trajectory,
                         TrajectoryFormat format) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path);
  WriteTrajectory(out, trajectory, format);
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path);
}

Trajectory ReadTrajectory(std::istream& in, TrajectoryFormat format,
                          const std::string& name, double fps) {
  Trajectory trajectory;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<double> v;
    double x;
    while (ls >> x) v.push_back(x);
    if (!ls.eof()) {
      throw Error(ErrorCode::kParseError,
                  name + ":" + std::to_string(line_no) + ": not a number");
    }
    if (v.empty()) continue;
    const std::size_t want = format == TrajectoryFormat::kTum ? 8 : 12;
    if (v.size() != want) {
      throw Error(ErrorCode::kParseError,
                  name + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(want) + " values, got " +
                      std::to_string(v.size()));
    }
    StampedPose p;
    Eigen::Matrix3d r_wc;
    if (format == TrajectoryFormat::kTum) {
      p.timestamp = v[0];
      p.pose.translation = Eigen::Vector3d(v[1], v[2], v[3]);
      Eigen::Quaterniond q(v[7], v[4], v[5], v[6]);
      if (q.norm() < 1e-12) {
        throw Error(ErrorCode::kParseError,
                    name + ":" + std::to_string(line_no) + ": zero quaternion");
      }
      r_wc = q.normalized().toRotationMatrix();
    } else {
      p.timestamp = static_cast<double>(trajectory.size()) / fps;
      r_wc << v[0], v[1], v[2], v[4], v[5], v[6], v[8], v[9], v[10];
      p.pose.translation = Eigen::Vector3d(v[3], v[7], v[11]);
    }
    try {
      p.pose.rotation = Rotation::FromMatrix(r_wc.transpose());
    } catch (const Error&) {
      throw Error(ErrorCode::kParseError,
                  name + ":" + std::to_string(line_no) + ": not a rotation");
    }
    trajectory.push_back(p);
  }
  return trajectory;
}

Trajectory ReadTrajectoryFile(const std::string& path, TrajectoryFormat format,
                              double fps) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path);
  return ReadTrajectory(in, format, path, fps);
}

RmseResult EvaluateRmse(const Trajectory& estimated,
                        const Trajectory& ground_truth, double max_dt) {
  // Ground truth sorted by time for the nearest-neighbour lookup.
  std::vector<std::size_t> order(ground_truth.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return ground_truth[a].timestamp < ground_truth[b].timestamp;
  });

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t e = 0; e < estimated.size(); ++e) {
    const double t = estimated[e].timestamp;
    auto it = std::lower_bound(order.begin(), order.end(), t,
                               [&](std::size_t g, double value) {
                                 return ground_truth[g].timestamp < value;
                               });
    std::size_t best_g = ground_truth.size();
    double best = max_dt;
    for (auto c : {it - (it == order.begin() ? 0 : 1), it}) {
      if (c == order.end()) continue;
      const double dt = std::abs(ground_truth[*c].timestamp - t);
      if (dt <= best && (best_g == ground_truth.size() || dt < best)) {
        best = dt;
        best_g = *c;
      }
    }
    if (best_g != ground_truth.size()) pairs.emplace_back(e, best_g);
  }
  if (pairs.size() < 2) {
    throw Error(ErrorCode::kNoOverlap,
                std::to_string(pairs.size()) + " associated poses");
  }

  const int n = static_cast<int>(pairs.size());
  Eigen::Matrix3Xd src(3, n), dst(3, n);
  for (int k = 0; k < n; ++k) {
    src.col(k) = estimated[pairs[k].first].pose.translation;
    dst.col(k) = ground_truth[pairs[k].second].pose.translation;
  }

  RmseResult result;
  result.matched = n;
  const bool degenerate = (src.colwise() - src.rowwise().mean()).norm() < 1e-12;
  Eigen::Matrix4d t = Eigen::Matrix4d::Identity();
  if (degenerate) {
    // A single repeated point: translation only.
    t.block<3, 1>(0, 3) = dst.rowwise().mean() - src.rowwise().mean();
  } else {
    t = Eigen::umeyama(src, dst, true);
  }
  const Eigen::Matrix3d sr = t.block<3, 3>(0, 0);
  result.scale = std::cbrt(sr.determinant());
  result.rotation = sr / result.scale;
  result.translation = t.block<3, 1>(0, 3);

  double sum = 0.0;
  result.aligned.reserve(n);
  for (int k = 0; k < n; ++k) {
    const Eigen::Vector3d p = sr * src.col(k) + result.translation;
    sum += (p - dst.col(k)).squaredNorm();
    StampedPose a = estimated[pairs[k].first];
    a.pose.translation = p;
    // Camera-to-world rotation maps as R_wc -> S R_wc.
    a.pose.rotation = ProjectToRotation(
        a.pose.rotation.matrix() * result.rotation.transpose());
    result.aligned.push_back(a);
  }
  result.rmse = std::sqrt(sum / n);
  return result;
}

}  // namespace rasl
