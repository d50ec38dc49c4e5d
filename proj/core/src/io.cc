#include "rasl/io.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <Eigen/Geometry>

#include "rasl/error.h"

namespace rasl {
namespace {

[[noreturn]] void Fail(const std::string& name, int line,
                       const std::string& what) {
  throw Error(ErrorCode::kParseError,
              name + ":" + std::to_string(line) + ": " + what);
}

std::string StripComment(std::string line) {
  const auto hash = line.find('#');
  if (hash != std::string::npos) line.erase(hash);
  return line;
}

// The rest of the line as numbers; the count must lie in [min, max].
std::vector<double> ReadNumbers(std::istringstream& ls, std::size_t min_count,
                                std::size_t max_count, const std::string& name,
                                int line) {
  std::vector<double> v;
  std::string token;
  while (ls >> token) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(token, &used);
    } catch (const std::exception&) {
      Fail(name, line, "not a number: '" + token + "'");
    }
    if (used != token.size() || !std::isfinite(x)) {
      Fail(name, line, "not a number: '" + token + "'");
    }
    v.push_back(x);
  }
  if (v.size() < min_count || v.size() > max_count) {
    Fail(name, line, "wrong field count (" + std::to_string(v.size()) + ")");
  }
  return v;
}

int ToId(double v, const std::string& name, int line) {
  if (v != std::floor(v) || v < 0 || v > 2e9) {
    Fail(name, line, "frame id must be a nonnegative integer");
  }
  return static_cast<int>(v);
}

std::ifstream OpenInput(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path);
  return in;
}

std::ofstream OpenOutput(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path);
  return out;
}

Eigen::Quaterniond CanonicalQuaternion(const Eigen::Matrix3d& r) {
  Eigen::Quaterniond q(r);
  q.normalize();
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  return q;
}

}  // namespace

CorrespondenceFile ReadCorrespondences(std::istream& in,
                                       const std::string& name) {
  CorrespondenceFile file;
  std::map<std::pair<int, int>, std::size_t> slot;
  bool have_header = false;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::istringstream ls(StripComment(raw));
    std::string tag;
    if (!(ls >> tag)) continue;
    if (!have_header) {
      std::string version;
      if (tag != "CORRS" || !(ls >> version) || version != "v1") {
        Fail(name, line, "expected header 'CORRS v1 <width> <height>'");
      }
      const auto v = ReadNumbers(ls, 2, 2, name, line);
      if (v[0] <= 0.0 || v[1] <= 0.0) Fail(name, line, "bad image size");
      file.image_width = v[0];
      file.image_height = v[1];
      have_header = true;
      continue;
    }
    if (tag != "MATCH") Fail(name, line, "unknown record '" + tag + "'");
    const auto v = ReadNumbers(ls, 7, 7, name, line);
    const int i = ToId(v[0], name, line);
    const int j = ToId(v[1], name, line);
    if (i == j) Fail(name, line, "match between a frame and itself");
    Correspondence c;
    c.p_i = Eigen::Vector2d(v[2], v[3]);
    c.p_j = Eigen::Vector2d(v[4], v[5]);
    c.confidence = v[6];
    for (const Eigen::Vector2d& p : {c.p_i, c.p_j}) {
      if (p.x() < 0.0 || p.x() > file.image_width || p.y() < 0.0 ||
          p.y() > file.image_height) {
        Fail(name, line, "pixel outside the image");
      }
    }
    if (c.confidence < 0.0 || c.confidence > 1.0) {
      Fail(name, line, "confidence outside [0, 1]");
    }
    auto [it, inserted] = slot.try_emplace({i, j}, file.sets.size());
    if (inserted) {
      CorrespondenceSet set;
      set.frame_i = i;
      set.frame_j = j;
      set.image_width = file.image_width;
      set.image_height = file.image_height;
      file.sets.push_back(std::move(set));
    }
    file.sets[it->second].matches.push_back(c);
  }
  if (!have_header) Fail(name, line, "missing 'CORRS v1' header");
  return file;
}

CorrespondenceFile ReadCorrespondenceFile(const std::string& path) {
  auto in = OpenInput(path);
  return ReadCorrespondences(in, path);
}

void WriteCorrespondences(std::ostream& out, const CorrespondenceFile& file) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "CORRS v1 %.17g %.17g\n", file.image_width,
                file.image_height);
  out << buf;
  for (const CorrespondenceSet& set : file.sets) {
    for (const Correspondence& c : set.matches) {
      std::snprintf(buf, sizeof(buf),
                    "MATCH %d %d %.17g %.17g %.17g %.17g %.17g\n", set.frame_i,
                    set.frame_j, c.p_i.x(), c.p_i.y(), c.p_j.x(), c.p_j.y(),
                    c.confidence);
      out << buf;
    }
  }
}

void WriteCorrespondenceFile(const std::string& path,
                             const CorrespondenceFile& file) {
  auto out = OpenOutput(path);
  WriteCorrespondences(out, file);
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path);
}

bool LooksLikeCorrespondenceFile(const std::string& path) {
  auto in = OpenInput(path);
  std::string raw;
  while (std::getline(in, raw)) {
    std::istringstream ls(StripComment(raw));
    std::string tag;
    if (ls >> tag) return tag == "CORRS";
  }
  return false;
}

PoseGraph ReadPoseGraph(std::istream& in, const std::string& name) {
  PoseGraph graph;
  std::map<int, std::size_t> seen;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::istringstream ls(StripComment(raw));
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "VERTEX_SE3:QUAT") {
      const auto v = ReadNumbers(ls, 8, 8, name, line);
      const int id = ToId(v[0], name, line);
      if (!seen.emplace(id, graph.ids.size()).second) {
        Fail(name, line, "duplicate vertex " + std::to_string(id));
      }
      const Eigen::Quaterniond q(v[7], v[4], v[5], v[6]);
      if (q.norm() < 1e-12) Fail(name, line, "zero quaternion");
      Pose pose;
      pose.translation = Eigen::Vector3d(v[1], v[2], v[3]);
      pose.rotation = Rotation::FromMatrixUnchecked(
          q.normalized().toRotationMatrix().transpose());
      graph.ids.push_back(id);
      graph.poses.push_back(pose);
    } else if (tag == "EDGE_SE3:QUAT") {
      const auto v = ReadNumbers(ls, 9, 30, name, line);
      if (v.size() != 9 && v.size() != 30) {
        Fail(name, line, "expected 0 or 21 information values");
      }
      RelativeMeasurement m;
      m.i = ToId(v[0], name, line);
      m.j = ToId(v[1], name, line);
      if (m.i == m.j) Fail(name, line, "self edge");
      const Eigen::Vector3d t(v[2], v[3], v[4]);
      const Eigen::Quaterniond q(v[8], v[5], v[6], v[7]);
      if (q.norm() < 1e-12) Fail(name, line, "zero quaternion");
      m.rotation = Rotation::FromMatrixUnchecked(
          q.normalized().toRotationMatrix().transpose());
      if (t.norm() < 1e-12) {
        m.direction = Eigen::Vector3d::UnitZ();
        m.direction_reliable = false;
      } else {
        m.direction = t.normalized();
      }
      graph.edges.push_back(m);
    } else {
      Fail(name, line, "unknown record '" + tag + "'");
    }
  }
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    const auto& m = graph.edges[e];
    if (!seen.count(m.i) || !seen.count(m.j)) {
      throw Error(ErrorCode::kParseError,
                  name + ": edge " + std::to_string(m.i) + "-" +
                      std::to_string(m.j) + " references a missing vertex");
    }
  }
  return graph;
}

PoseGraph ReadPoseGraphFile(const std::string& path) {
  auto in = OpenInput(path);
  return ReadPoseGraph(in, path);
}

void WritePoseGraph(std::ostream& out, const PoseGraph& graph) {
  char buf[512];
  for (std::size_t k = 0; k < graph.ids.size(); ++k) {
    const Pose& p = graph.poses[k];
    const Eigen::Quaterniond q =
        CanonicalQuaternion(p.rotation.matrix().transpose());
    std::snprintf(buf, sizeof(buf),
                  "VERTEX_SE3:QUAT %d %.17g %.17g %.17g %.17g %.17g %.17g %.17g\n",
                  graph.ids[k], p.translation.x(), p.translation.y(),
                  p.translation.z(), q.x(), q.y(), q.z(), q.w());
    out << buf;
  }
  for (const RelativeMeasurement& m : graph.edges) {
    const Eigen::Quaterniond q =
        CanonicalQuaternion(m.rotation.matrix().transpose());
    const Eigen::Vector3d t =
        m.direction_reliable ? m.direction : Eigen::Vector3d::Zero();
    std::snprintf(buf, sizeof(buf),
                  "EDGE_SE3:QUAT %d %d %.17g %.17g %.17g %.17g %.17g %.17g %.17g",
                  m.i, m.j, t.x(), t.y(), t.z(), q.x(), q.y(), q.z(), q.w());
    out << buf;
    // Identity information matrix, upper triangle.
    for (int r = 0; r < 6; ++r) {
      for (int c = r; c < 6; ++c) out << (r == c ? " 1" : " 0");
    }
    out << '\n';
  }
}

void WritePoseGraphFile(const std::string& path, const PoseGraph& graph) {
  auto out = OpenOutput(path);
  WritePoseGraph(out, graph);
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path);
}

void WriteRotations(std::ostream& out, const std::vector<int>& ids,
                    const std::vector<Rotation>& rotations) {
  char buf[256];
  for (std::size_t k = 0; k < ids.size(); ++k) {
    const Eigen::Quaterniond q =
        CanonicalQuaternion(rotations[k].matrix().transpose());
    std::snprintf(buf, sizeof(buf), "%d %.17g %.17g %.17g %.17g\n", ids[k],
                  q.x(), q.y(), q.z(), q.w());
    out << buf;
  }
}

}  // namespace rasl
