// rasl command-line tool: run, simulate, rotavg, transavg, evaluate.
//
// Exit codes: 0 success, 1 input/format/configuration error, 2 a solver did
// not converge (outputs are still written).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rasl/backend.h"
#include "rasl/config.h"
#include "rasl/error.h"
#include "rasl/io.h"
#include "rasl/rotation_averaging.h"
#include "rasl/simulate.h"
#include "rasl/trajectory.h"
#include "rasl/translation_averaging.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNonConvergence = 2;

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  bool print_config = false;
};

void AddCommon(CLI::App* cmd, CommonArgs* args) {
  cmd->add_option("-c,--config", args->config_path, "config file (key = value)");
  cmd->add_option("--set", args->overrides, "override a config key (key=value)");
  cmd->add_flag("--print-config", args->print_config,
                "print the effective configuration");
}

rasl::RunConfig LoadRunConfig(const CommonArgs& args) {
  rasl::RunConfig config;
  if (!args.config_path.empty()) rasl::LoadConfigFile(config, args.config_path);
  for (const std::string& o : args.overrides) rasl::ApplyConfigOverride(config, o);
  config.Validate();
  if (args.print_config) rasl::PrintConfig(std::cout, config);
  return config;
}

std::ofstream OpenOutput(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw rasl::Error(rasl::ErrorCode::kIoError, "cannot write " + path);
  return out;
}

rasl::TrajectoryFormat ParseFormat(const std::string& name) {
  if (name == "tum") return rasl::TrajectoryFormat::kTum;
  if (name == "kitti") return rasl::TrajectoryFormat::kKitti;
  throw rasl::Error(rasl::ErrorCode::kInvalidArgument,
                    "unknown trajectory format '" + name + "'");
}

// Whole pose graph as a rotation-averaging problem; the gauge is the first
// vertex with the rotation stored in the file.
rasl::RotGraph ToRotGraph(const rasl::PoseGraph& graph) {
  rasl::RotGraph rg;
  rg.ids = graph.ids;
  std::map<int, int> index;
  for (std::size_t k = 0; k < graph.ids.size(); ++k) {
    index[graph.ids[k]] = static_cast<int>(k);
  }
  rg.rotations.assign(graph.ids.size(), rasl::Rotation::Identity());
  if (!graph.poses.empty()) rg.rotations[0] = graph.poses[0].rotation;
  for (const rasl::RelativeMeasurement& m : graph.edges) {
    rg.edges.push_back({index.at(m.i), index.at(m.j), m.rotation,
                        rasl::EdgeStatus::kActive});
  }
  return rg;
}

void WriteRotavgReport(std::ostream& out, const rasl::RotGraph& graph,
                       const rasl::RotationAveragingResult& result,
                       const rasl::OptimalityCertificate& cert) {
  char buf[256];
  out << "# rasl rotavg report\n";
  std::snprintf(buf, sizeof(buf),
                "vertices %d edges %zu irls_iterations %d prune_rounds %d "
                "converged %s final_update %.3e\n",
                graph.num_vertices(), graph.edges.size(), result.irls_iterations,
                result.prune_rounds, result.converged ? "yes" : "no",
                result.final_update);
  out << buf;
  int replaced = 0;
  for (const rasl::PruneReport& pr : result.reports) {
    std::snprintf(buf, sizeof(buf), "prune round %d threshold %.6f\n",
                  pr.iteration, pr.alpha_max);
    out << buf;
    for (const rasl::ReplacedEdge& e : pr.replaced_edges) {
      std::snprintf(buf, sizeof(buf), "replaced %d %d alpha %.6f\n",
                    graph.ids[e.i], graph.ids[e.j], e.alpha);
      out << buf;
      ++replaced;
    }
  }
  std::snprintf(buf, sizeof(buf),
                "replaced_total %d\ncertificate optimal %s max_alpha %.6f "
                "alpha_max %.6f all_constraints_removed %s\n",
                replaced, cert.optimal ? "yes" : "no", cert.max_alpha,
                cert.alpha_max, cert.all_constraints_removed ? "yes" : "no");
  out << buf;
}

int CmdRun(const CommonArgs& common, const std::string& input,
           const std::string& output, const std::string& report_path) {
  const rasl::RunConfig config = LoadRunConfig(common);
  rasl::BackendInput backend_input;
  std::vector<std::string> warnings;
  if (rasl::LooksLikeCorrespondenceFile(input)) {
    const rasl::CorrespondenceFile file = rasl::ReadCorrespondenceFile(input);
    backend_input = rasl::InputFromCorrespondences(
        file.sets, config.camera, config.relrot, config.fps, &warnings);
  } else {
    backend_input = rasl::InputFromPoseGraph(rasl::ReadPoseGraphFile(input),
                                             config.fps, config.backend);
  }
  rasl::RunOutput result = rasl::RunPipeline(backend_input, config.backend);
  result.report.warnings.insert(result.report.warnings.begin(),
                                warnings.begin(), warnings.end());
  rasl::WriteTrajectoryFile(output, result.trajectory, config.output_format);
  if (!report_path.empty()) {
    auto out = OpenOutput(report_path);
    rasl::WriteRunReport(out, result.report);
  }
  for (const std::string& w : result.report.warnings) {
    std::cerr << "warning: " << w << '\n';
  }
  if (result.report.nonconvergence) {
    std::cerr << "error: a solver did not converge (see the report)\n";
    return kExitNonConvergence;
  }
  return kExitOk;
}

int CmdSimulate(const CommonArgs& common, const std::string& gt_path,
                const std::string& graph_path, const std::string& corrs_path) {
  const rasl::RunConfig config = LoadRunConfig(common);
  const rasl::SimulationSpec spec = config.SimulationSettings();
  if (!corrs_path.empty() && spec.points_per_pair == 0) {
    throw rasl::Error(rasl::ErrorCode::kInvalidSpec,
                      "--corrs needs simulate.points_per_pair > 0");
  }
  const rasl::SyntheticScene scene = rasl::SimulateScene(spec);
  if (!gt_path.empty()) {
    rasl::WriteTrajectoryFile(gt_path, scene.ground_truth, config.output_format);
  }
  if (!graph_path.empty()) {
    rasl::WritePoseGraphFile(graph_path, scene.ToPoseGraph());
  }
  if (!corrs_path.empty()) {
    rasl::CorrespondenceFile file;
    file.image_width = spec.image_width;
    file.image_height = spec.image_height;
    file.sets = scene.correspondences;
    rasl::WriteCorrespondenceFile(corrs_path, file);
  }
  std::printf("frames %d measurements %zu outliers %zu\n", spec.num_frames,
              scene.measurements.size(), scene.outlier_edges.size());
  return kExitOk;
}

int CmdRotavg(const CommonArgs& common, const std::string& input,
              const std::string& output, const std::string& report_path) {
  const rasl::RunConfig config = LoadRunConfig(common);
  const rasl::PoseGraph pose_graph = rasl::ReadPoseGraphFile(input);
  rasl::RotGraph graph = ToRotGraph(pose_graph);
  const rasl::RotationAveragingResult result =
      rasl::RotationAveraging(graph, config.backend.rotavg);
  const rasl::OptimalityCertificate cert = rasl::CertifyGlobalOptimality(
      graph, result.rotations, result.final_update);
  {
    auto out = OpenOutput(output);
    out << "# id qx qy qz qw (camera-to-world)\n";
    rasl::WriteRotations(out, graph.ids, result.rotations);
  }
  if (!report_path.empty()) {
    auto out = OpenOutput(report_path);
    WriteRotavgReport(out, graph, result, cert);
  } else {
    WriteRotavgReport(std::cout, graph, result, cert);
  }
  return result.converged ? kExitOk : kExitNonConvergence;
}

int CmdTransavg(const CommonArgs& common, const std::string& input,
                const std::string& output) {
  const rasl::RunConfig config = LoadRunConfig(common);
  const rasl::PoseGraph pose_graph = rasl::ReadPoseGraphFile(input);
  rasl::RotGraph graph = ToRotGraph(pose_graph);
  const rasl::RotationAveragingResult rotations =
      rasl::RotationAveraging(graph, config.backend.rotavg);
  std::vector<rasl::DirectionEdge> edges;
  std::map<int, int> index;
  for (std::size_t k = 0; k < graph.ids.size(); ++k) {
    index[graph.ids[k]] = static_cast<int>(k);
  }
  for (const rasl::RelativeMeasurement& m : pose_graph.edges) {
    if (m.direction_reliable) {
      edges.push_back({index.at(m.i), index.at(m.j), m.direction});
    }
  }
  const rasl::TranslationAveragingResult result = rasl::TranslationAveraging(
      rotations.rotations, edges, config.backend.admm);
  rasl::Trajectory trajectory(graph.ids.size());
  for (std::size_t k = 0; k < trajectory.size(); ++k) {
    trajectory[k].timestamp = graph.ids[k] / config.fps;
    trajectory[k].pose.rotation = rotations.rotations[k];
    trajectory[k].pose.translation = result.positions[k];
  }
  rasl::WriteTrajectoryFile(output, trajectory, config.output_format);
  std::printf("admm iterations %d converged %s objective %.6e\n",
              result.admm.iterations, result.admm.converged ? "yes" : "no",
              result.admm.final_objective);
  return rotations.converged && result.admm.converged ? kExitOk
                                                      : kExitNonConvergence;
}

int CmdEvaluate(const std::string& estimate, const std::string& ground_truth,
                const std::string& format_name, const std::string& aligned,
                double fps) {
  const rasl::TrajectoryFormat format = ParseFormat(format_name);
  const rasl::Trajectory est = rasl::ReadTrajectoryFile(estimate, format, fps);
  const rasl::Trajectory gt = rasl::ReadTrajectoryFile(ground_truth, format, fps);
  const rasl::RmseResult r = rasl::EvaluateRmse(est, gt);
  std::printf("RMSE %.6f\nscale %.6f\nmatched %d\n", r.rmse, r.scale, r.matched);
  if (!aligned.empty()) rasl::WriteTrajectoryFile(aligned, r.aligned, format);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rasl: keyframed rotation and translation averaging back-end"};
  app.require_subcommand(1);
  app.footer("\n" + rasl::ConfigHelp() +
             "\nExit codes: 0 success, 1 error, 2 solver non-convergence.");

  CommonArgs common;
  std::string input, output, report;
  std::string gt_path, graph_path, corrs_path;
  std::string estimate, ground_truth, format = "tum", aligned;
  double fps = 10.0;

  CLI::App* run = app.add_subcommand("run", "run the back-end on correspondences or a pose graph");
  AddCommon(run, &common);
  run->add_option("-i,--input", input, "CORRS file or g2o pose graph")->required();
  run->add_option("-o,--output", output, "trajectory output")->required();
  run->add_option("-r,--report", report, "run report output");

  CLI::App* sim = app.add_subcommand("simulate", "generate a synthetic scene");
  AddCommon(sim, &common);
  sim->add_option("--ground-truth", gt_path, "ground-truth trajectory output");
  sim->add_option("--graph", graph_path, "g2o pose graph output");
  sim->add_option("--corrs", corrs_path, "CORRS correspondence output");

  CLI::App* rot = app.add_subcommand("rotavg", "rotation averaging of a g2o pose graph");
  AddCommon(rot, &common);
  rot->add_option("-i,--input", input, "g2o pose graph")->required();
  rot->add_option("-o,--output", output, "rotations output (id qx qy qz qw)")->required();
  rot->add_option("-r,--report", report, "report output (default: stdout)");

  CLI::App* trans = app.add_subcommand("transavg", "rotation then translation averaging of a g2o pose graph");
  AddCommon(trans, &common);
  trans->add_option("-i,--input", input, "g2o pose graph")->required();
  trans->add_option("-o,--output", output, "trajectory output (zero mean, unit norm)")->required();

  CLI::App* eval = app.add_subcommand("evaluate", "similarity-aligned position RMSE");
  eval->add_option("-e,--estimate", estimate, "estimated trajectory")->required();
  eval->add_option("-g,--ground-truth", ground_truth, "ground-truth trajectory")->required();
  eval->add_option("-f,--format", format, "tum or kitti")->capture_default_str();
  eval->add_option("-a,--aligned", aligned, "aligned estimate output");
  eval->add_option("--fps", fps, "KITTI frame rate for timestamps")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (run->parsed()) return CmdRun(common, input, output, report);
    if (sim->parsed()) return CmdSimulate(common, gt_path, graph_path, corrs_path);
    if (rot->parsed()) return CmdRotavg(common, input, output, report);
    if (trans->parsed()) return CmdTransavg(common, input, output);
    if (eval->parsed()) return CmdEvaluate(estimate, ground_truth, format, aligned, fps);
  } catch (const rasl::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
