#include <sstream>

#include <gtest/gtest.h>

#include "expect_error.h"
#include "rasl/config.h"

namespace rasl {
namespace {

TEST(Config, DefaultsAreValid) {
  RunConfig config;
  EXPECT_NO_THROW(config.Validate());
  EXPECT_EQ(config.backend.keyframe_interval, 30);
  EXPECT_DOUBLE_EQ(config.relrot.independence_tol, 1e-6);
  EXPECT_EQ(config.backend.admm.max_iters, 2000);
}

TEST(Config, OverridesAndRoundTrip) {
  RunConfig config;
  ApplyConfigOverride(config, "backend.keyframe_interval=15");
  ApplyConfigOverride(config, " transavg.beta = 2.5 ");
  ApplyConfigOverride(config, "loop.enabled=false");
  ApplyConfigOverride(config, "backend.output_format=kitti");
  ApplyConfigOverride(config, "simulate.shape=square-loop");
  EXPECT_EQ(config.backend.keyframe_interval, 15);
  EXPECT_DOUBLE_EQ(config.backend.admm.beta, 2.5);
  EXPECT_FALSE(config.backend.loop.enabled);
  EXPECT_EQ(config.output_format, TrajectoryFormat::kKitti);
  EXPECT_EQ(config.simulate.shape, TrajectoryShape::kSquareLoop);

  std::stringstream ss;
  PrintConfig(ss, config);
  RunConfig back;
  LoadConfig(back, ss, "printed");
  std::stringstream again;
  PrintConfig(again, back);
  EXPECT_EQ(again.str(), ss.str());
}

TEST(Config, Errors) {
  RunConfig config;
  EXPECT_RASL_ERROR(ApplyConfigOverride(config, "no.such.key=1"), ErrorCode::kInvalidConfig);
  EXPECT_RASL_ERROR(ApplyConfigOverride(config, "transavg.beta=abc"), ErrorCode::kInvalidConfig);
  EXPECT_RASL_ERROR(ApplyConfigOverride(config, "transavg.beta"), ErrorCode::kInvalidConfig);
  std::istringstream in("# header\nbackend.keyframe_interval = 10\nbogus = 1\n");
  try {
    LoadConfig(config, in, "run.cfg");
    FAIL();
  } catch (const Error& err) {
    const std::string what = err.what();
    EXPECT_EQ(err.code(), ErrorCode::kInvalidConfig);
    EXPECT_NE(what.find("run.cfg:3"), std::string::npos) << what;
    EXPECT_EQ(what.find("InvalidConfig", 5), std::string::npos) << what;
  }
  EXPECT_EQ(config.backend.keyframe_interval, 10);
}

TEST(Config, HelpListsEveryKey) {
  const std::string help = ConfigHelp();
  for (const ConfigKey& k : ConfigKeys()) EXPECT_NE(help.find(k.key), std::string::npos) << k.key;
}

}  // namespace
}  // namespace rasl
