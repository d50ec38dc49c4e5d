#include "rasl/config.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "rasl/error.h"

namespace rasl {
namespace {

[[noreturn]] void Invalid(const std::string& key, const std::string& what) {
  throw Error(ErrorCode::kInvalidConfig, key + ": " + what);
}

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string FormatDouble(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

double ParseDouble(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto r = std::from_chars(text.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end || !std::isfinite(v)) {
    Invalid(key, "expected a number, got '" + text + "'");
  }
  return v;
}

long long ParseInt(const std::string& key, const std::string& text) {
  long long v = 0;
  const char* end = text.data() + text.size();
  const auto r = std::from_chars(text.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end) {
    Invalid(key, "expected an integer, got '" + text + "'");
  }
  return v;
}

bool ParseBool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  Invalid(key, "expected true or false, got '" + text + "'");
}

using DoubleRef = std::function<double&(RunConfig&)>;
using IntRef = std::function<int&(RunConfig&)>;
using BoolRef = std::function<bool&(RunConfig&)>;

// Closed range [lo, hi]; open_lo excludes lo.
ConfigKey Real(std::string key, std::string help, double lo, double hi,
               bool open_lo, DoubleRef ref, double unit = 1.0) {
  ConfigKey k;
  k.key = key;
  k.help = std::move(help);
  k.get = [ref, unit](const RunConfig& c) {
    RunConfig copy = c;
    return FormatDouble(ref(copy) / unit);
  };
  k.set = [key, lo, hi, open_lo, ref, unit](RunConfig& c,
                                            const std::string& text) {
    const double v = ParseDouble(key, text);
    if (v > hi || v < lo || (open_lo && v == lo)) {
      Invalid(key, "value " + text + " outside " + (open_lo ? "(" : "[") +
                       FormatDouble(lo) + ", " + FormatDouble(hi) + "]");
    }
    ref(c) = v * unit;
  };
  return k;
}

ConfigKey Integer(std::string key, std::string help, long long lo,
                  long long hi, IntRef ref) {
  ConfigKey k;
  k.key = key;
  k.help = std::move(help);
  k.get = [ref](const RunConfig& c) {
    RunConfig copy = c;
    return std::to_string(ref(copy));
  };
  k.set = [key, lo, hi, ref](RunConfig& c, const std::string& text) {
    const long long v = ParseInt(key, text);
    if (v < lo || v > hi) {
      Invalid(key, "value " + text + " outside [" + std::to_string(lo) + ", " +
                       std::to_string(hi) + "]");
    }
    ref(c) = static_cast<int>(v);
  };
  return k;
}

ConfigKey Boolean(std::string key, std::string help, BoolRef ref) {
  ConfigKey k;
  k.key = key;
  k.help = std::move(help);
  k.get = [ref](const RunConfig& c) {
    RunConfig copy = c;
    return std::string(ref(copy) ? "true" : "false");
  };
  k.set = [key, ref](RunConfig& c, const std::string& text) {
    ref(c) = ParseBool(key, text);
  };
  return k;
}

std::vector<ConfigKey> BuildKeys() {
  constexpr double kBig = 1e9;
  const double deg = kPi / 180.0;
  std::vector<ConfigKey> keys;
  keys.push_back(Real("relrot.independence_tol",
                      "parallax gate for rotation-only hypotheses", 0, 1, false,
                      [](RunConfig& c) -> double& { return c.relrot.independence_tol; }));
  keys.push_back(Integer("correspond.grid_rows", "grid rows for region scoring", 1, 1000,
                         [](RunConfig& c) -> int& { return c.relrot.grid.rows; }));
  keys.push_back(Integer("correspond.grid_cols", "grid columns for region scoring", 1, 1000,
                         [](RunConfig& c) -> int& { return c.relrot.grid.cols; }));
  keys.push_back(Real("camera.fx", "focal length x (pixels)", 0, kBig, true,
                      [](RunConfig& c) -> double& { return c.camera.fx; }));
  keys.push_back(Real("camera.fy", "focal length y (pixels)", 0, kBig, true,
                      [](RunConfig& c) -> double& { return c.camera.fy; }));
  keys.push_back(Real("camera.cx", "principal point x (pixels)", -kBig, kBig, false,
                      [](RunConfig& c) -> double& { return c.camera.cx; }));
  keys.push_back(Real("camera.cy", "principal point y (pixels)", -kBig, kBig, false,
                      [](RunConfig& c) -> double& { return c.camera.cy; }));
  keys.push_back(Real("camera.fps", "frame rate; timestamp = frame id / fps", 0, kBig, true,
                      [](RunConfig& c) -> double& { return c.fps; }));
  keys.push_back(Integer("rotavg.l1_max_iters", "l1 initialization sweeps", 0, 1000000,
                         [](RunConfig& c) -> int& { return c.backend.rotavg.l1_max_iters; }));
  keys.push_back(Real("rotavg.irls_tol", "IRLS stop when the update (rad) is below", 0, 1, true,
                      [](RunConfig& c) -> double& { return c.backend.rotavg.irls_tol; }));
  keys.push_back(Integer("rotavg.irls_max_iters", "IRLS iteration cap", 1, 100000000,
                         [](RunConfig& c) -> int& { return c.backend.rotavg.irls_max_iters; }));
  keys.push_back(Real("rotavg.weight_floor", "IRLS residual floor (rad)", 0, 1, true,
                      [](RunConfig& c) -> double& { return c.backend.rotavg.weight_floor; }));
  keys.push_back(Real("rotavg.alpha_cap_deg", "cap on the pruning threshold (deg)", 0, 180, true,
                      [](RunConfig& c) -> double& { return c.backend.rotavg.alpha_cap; }, deg));
  keys.push_back(Integer("rotavg.max_prune_rounds", "prune rounds", 0, 1000,
                         [](RunConfig& c) -> int& { return c.backend.rotavg.max_prune_rounds; }));
  keys.push_back(Boolean("rotavg.pruning", "replace edges above the threshold",
                         [](RunConfig& c) -> bool& { return c.backend.rotavg.pruning; }));
  keys.push_back(Real("transavg.beta", "ADMM penalty, relative to the initial residual", 0, kBig, true,
                      [](RunConfig& c) -> double& { return c.backend.admm.beta; }));
  keys.push_back(Real("transavg.primal_tol", "ADMM primal tolerance", 0, 1, true,
                      [](RunConfig& c) -> double& { return c.backend.admm.primal_tol; }));
  keys.push_back(Real("transavg.dual_tol", "ADMM dual tolerance", 0, 1, true,
                      [](RunConfig& c) -> double& { return c.backend.admm.dual_tol; }));
  keys.push_back(Integer("transavg.max_iters", "ADMM iteration cap", 1, 100000000,
                         [](RunConfig& c) -> int& { return c.backend.admm.max_iters; }));
  keys.push_back(Boolean("transavg.polish", "vertex polishing of the ADMM iterate",
                         [](RunConfig& c) -> bool& { return c.backend.admm.polish; }));
  keys.push_back(Integer("backend.keyframe_interval", "frames between keyframes", 1, 100000000,
                         [](RunConfig& c) -> int& { return c.backend.keyframe_interval; }));
  keys.push_back(Integer("backend.window_edge_span", "largest |i - j| used inside a window", 1, 1000,
                         [](RunConfig& c) -> int& { return c.backend.window_edge_span; }));
  keys.push_back(Integer("backend.window_overlap", "published frames re-solved before each keyframe", 0, 1000,
                         [](RunConfig& c) -> int& { return c.backend.window_overlap; }));
  {
    ConfigKey k;
    k.key = "backend.output_format";
    k.help = "trajectory format: tum or kitti";
    k.get = [](const RunConfig& c) {
      return std::string(c.output_format == TrajectoryFormat::kTum ? "tum" : "kitti");
    };
    k.set = [](RunConfig& c, const std::string& text) {
      if (text == "tum") {
        c.output_format = TrajectoryFormat::kTum;
      } else if (text == "kitti") {
        c.output_format = TrajectoryFormat::kKitti;
      } else {
        Invalid("backend.output_format", "expected tum or kitti, got '" + text + "'");
      }
    };
    keys.push_back(k);
  }
  keys.push_back(Boolean("loop.enabled", "loop detection and closure",
                         [](RunConfig& c) -> bool& { return c.backend.loop.enabled; }));
  keys.push_back(Real("loop.distance_fraction", "loop distance threshold, share of the trajectory extent", 0, 1, false,
                      [](RunConfig& c) -> double& { return c.backend.loop.distance_fraction; }));
  keys.push_back(Integer("loop.inlier_threshold", "minimum correspondence inliers for a loop", 0, 1000000000,
                         [](RunConfig& c) -> int& { return c.backend.loop.inlier_threshold; }));
  keys.push_back(Integer("loop.exclusion_intervals", "recent keyframe intervals excluded from loop search", 1, 1000000,
                         [](RunConfig& c) -> int& { return c.backend.loop.exclusion_intervals; }));
  keys.push_back(Real("loop.edge_weight", "weight of the loop rows in the closure", 0, kBig, true,
                      [](RunConfig& c) -> double& { return c.backend.loop.edge_weight; }));
  keys.push_back(Boolean("loop.refine_rotations", "rotation averaging over the loop keyframes",
                         [](RunConfig& c) -> bool& { return c.backend.loop.refine_rotations; }));
  keys.push_back(Integer("loop.edge_inliers", "inliers credited to pose-graph loop edges", 0, 1000000000,
                         [](RunConfig& c) -> int& { return c.backend.loop.edge_inliers; }));
  {
    ConfigKey k;
    k.key = "simulate.shape";
    k.help = "line, circle, square-loop or random-walk";
    k.get = [](const RunConfig& c) { return TrajectoryShapeName(c.simulate.shape); };
    k.set = [](RunConfig& c, const std::string& text) {
      try {
        c.simulate.shape = ParseTrajectoryShape(text);
      } catch (const Error&) {
        Invalid("simulate.shape", "unknown shape '" + text + "'");
      }
    };
    keys.push_back(k);
  }
  keys.push_back(Integer("simulate.frames", "number of frames", 2, 100000000,
                         [](RunConfig& c) -> int& { return c.simulate.num_frames; }));
  keys.push_back(Real("simulate.step", "path length per frame", 0, kBig, false,
                      [](RunConfig& c) -> double& { return c.simulate.step; }));
  keys.push_back(Integer("simulate.laps", "laps of circle and square-loop paths", 1, 1000000,
                         [](RunConfig& c) -> int& { return c.simulate.laps; }));
  keys.push_back(Real("simulate.bob", "vertical oscillation, in steps", 0, kBig, false,
                      [](RunConfig& c) -> double& { return c.simulate.bob; }));
  keys.push_back(Integer("simulate.bob_period", "vertical oscillation period (frames)", 1, 100000000,
                         [](RunConfig& c) -> int& { return c.simulate.bob_period; }));
  {
    ConfigKey k;
    k.key = "simulate.seed";
    k.help = "random seed";
    k.get = [](const RunConfig& c) { return std::to_string(c.simulate.seed); };
    k.set = [](RunConfig& c, const std::string& text) {
      std::uint64_t v = 0;
      const char* end = text.data() + text.size();
      const auto r = std::from_chars(text.data(), end, v);
      if (r.ec != std::errc() || r.ptr != end) {
        Invalid("simulate.seed", "expected a nonnegative integer, got '" + text + "'");
      }
      c.simulate.seed = v;
    };
    keys.push_back(k);
  }
  keys.push_back(Integer("simulate.edge_span", "measure pairs with |i - j| up to this", 1, 1000,
                         [](RunConfig& c) -> int& { return c.simulate.edge_span; }));
  keys.push_back(Real("simulate.loop_radius", "also measure distant pairs closer than this (0: off)", 0, kBig, false,
                      [](RunConfig& c) -> double& { return c.simulate.loop_radius; }));
  keys.push_back(Real("simulate.rotation_noise_deg", "mean rotation error (deg)", 0, 89, false,
                      [](RunConfig& c) -> double& { return c.simulate.rotation_noise; }, deg));
  keys.push_back(Real("simulate.direction_noise_deg", "mean direction error (deg)", 0, 89, false,
                      [](RunConfig& c) -> double& { return c.simulate.direction_noise; }, deg));
  keys.push_back(Real("simulate.bearing_noise_deg", "mean bearing error (deg)", 0, 89, false,
                      [](RunConfig& c) -> double& { return c.simulate.bearing_noise; }, deg));
  keys.push_back(Real("simulate.outlier_fraction", "share of edges rotated by 90 deg", 0, 1, false,
                      [](RunConfig& c) -> double& { return c.simulate.outlier_fraction; }));
  keys.push_back(Integer("simulate.points_per_pair", "correspondences per measured pair", 0, 100000000,
                         [](RunConfig& c) -> int& { return c.simulate.points_per_pair; }));
  keys.push_back(Real("simulate.min_depth", "nearest point depth", 0, kBig, true,
                      [](RunConfig& c) -> double& { return c.simulate.min_depth; }));
  keys.push_back(Real("simulate.max_depth", "farthest point depth", 0, kBig, true,
                      [](RunConfig& c) -> double& { return c.simulate.max_depth; }));
  keys.push_back(Real("simulate.image_width", "image width (pixels)", 0, kBig, true,
                      [](RunConfig& c) -> double& { return c.simulate.image_width; }));
  keys.push_back(Real("simulate.image_height", "image height (pixels)", 0, kBig, true,
                      [](RunConfig& c) -> double& { return c.simulate.image_height; }));
  return keys;
}

}  // namespace

SimulationSpec RunConfig::SimulationSettings() const {
  SimulationSpec spec = simulate;
  spec.camera = camera;
  spec.fps = fps;
  return spec;
}

void RunConfig::Validate() const {
  if (relrot.grid.rows * relrot.grid.cols < 6) {
    Invalid("correspond.grid_rows", "grid must have at least 6 cells");
  }
  if (simulate.max_depth < simulate.min_depth) {
    Invalid("simulate.max_depth", "must be >= simulate.min_depth");
  }
}

const std::vector<ConfigKey>& ConfigKeys() {
  static const std::vector<ConfigKey> keys = BuildKeys();
  return keys;
}

void SetConfigValue(RunConfig& config, const std::string& key,
                    const std::string& value) {
  for (const ConfigKey& k : ConfigKeys()) {
    if (k.key == key) {
      k.set(config, value);
      return;
    }
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown key '" + key + "'");
}

void ApplyConfigOverride(RunConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw Error(ErrorCode::kInvalidConfig,
                "expected key=value, got '" + assignment + "'");
  }
  SetConfigValue(config, Trim(assignment.substr(0, eq)),
                 Trim(assignment.substr(eq + 1)));
}

void LoadConfig(RunConfig& config, std::istream& in, const std::string& name) {
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    if (Trim(raw).empty()) continue;
    try {
      ApplyConfigOverride(config, raw);
    } catch (const Error& e) {
      std::string message = e.what();
      const std::string prefix = std::string(ErrorCodeName(e.code())) + ": ";
      if (message.starts_with(prefix)) message.erase(0, prefix.size());
      throw Error(ErrorCode::kInvalidConfig,
                  name + ":" + std::to_string(line) + ": " + message);
    }
  }
}

void LoadConfigFile(RunConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path);
  LoadConfig(config, in, path);
}

void PrintConfig(std::ostream& out, const RunConfig& config) {
  for (const ConfigKey& k : ConfigKeys()) {
    out << k.key << " = " << k.get(config) << '\n';
  }
}

std::string ConfigHelp() {
  const RunConfig defaults;
  std::ostringstream out;
  out << "Configuration keys (config file 'key = value' or --set key=value):\n";
  for (const ConfigKey& k : ConfigKeys()) {
    out << "  " << k.key << " = " << k.get(defaults) << "\n      " << k.help
        << '\n';
  }
  return out.str();
}

}  // namespace rasl
