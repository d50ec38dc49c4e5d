#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "expect_error.h"
#include "rasl/relative_pose.h"
#include "support.h"

namespace rasl {
namespace {

using testing::MakeRelrotTrial;
using testing::Perturbation;
using testing::RandomRotation;
using testing::RandomUnit;

// Exact bearings of random points in front of both cameras.
std::vector<BearingPair> ExactPairs(std::mt19937_64& rng, const Rotation& r,
                                    const Eigen::Vector3d& t, int count) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<BearingPair> pairs;
  while (static_cast<int>(pairs.size()) < count) {
    const Eigen::Vector3d x(2.0 * u(rng), 1.5 * u(rng), 6.0 + 2.0 * u(rng));
    const Eigen::Vector3d xj = r * x + t;
    if (xj.z() < 0.5) continue;
    pairs.push_back({x.normalized(), xj.normalized()});
  }
  return pairs;
}

double DirectionAngle(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

TEST(BearingsFromPixels, Formula) {
  const CameraIntrinsics k;
  EXPECT_LT((BearingFromPixel({320.0, 240.0}, k) - Eigen::Vector3d::UnitZ()).norm(), 1e-15);
  const CameraIntrinsics unit{1.0, 1.0, 0.0, 0.0};
  EXPECT_LT((BearingFromPixel({3.0, 4.0}, unit) - Eigen::Vector3d(3, 4, 1) / std::sqrt(26.0)).norm(),
            1e-15);
}

TEST(Essential6pt, RecoversSkewTimesRotation) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const Rotation r = Perturbation(rng, 0.2);
    const Eigen::Vector3d t = RandomUnit(rng);
    const auto pairs = ExactPairs(rng, r, t, 6);
    Eigen::Matrix3d e = EstimateEssential6pt(pairs).matrix();
    Eigen::Matrix3d truth = Skew(t) * r.matrix();
    e /= e.norm();
    truth /= truth.norm();
    EXPECT_LT(std::min((e - truth).norm(), (e + truth).norm()), 1e-8);
  }
}

TEST(Essential6pt, IdenticalBearingsAreDegenerate) {
  const BearingPair p{Eigen::Vector3d(0.1, 0.2, 1.0).normalized(),
                      Eigen::Vector3d(0.2, 0.1, 1.0).normalized()};
  const std::vector<BearingPair> pairs(6, p);
  EXPECT_RASL_ERROR(EstimateEssential6pt(pairs), ErrorCode::kDegenerateConfiguration);
}

TEST(Essential6pt, SmallResidualUnderNoise) {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> n(0.0, DegToRad(0.1) / std::sqrt(2.0));
  const Rotation r = Perturbation(rng, 0.1);
  const Eigen::Vector3d t = RandomUnit(rng);
  auto pairs = ExactPairs(rng, r, t, 6);
  for (auto& p : pairs) {
    p.f_i = (p.f_i + Eigen::Vector3d(n(rng), n(rng), n(rng))).normalized();
    p.f_j = (p.f_j + Eigen::Vector3d(n(rng), n(rng), n(rng))).normalized();
  }
  const EssentialMatrix e = EstimateEssential6pt(pairs);
  double sum = 0.0;
  for (const auto& p : pairs) sum += std::pow(e.Residual(p.f_i, p.f_j), 2);
  EXPECT_LE(sum, 1e-4);
}

TEST(DecomposeEssential, RecoversExactMotion) {
  std::mt19937_64 rng(25);
  for (int trial = 0; trial < 20; ++trial) {
    const Rotation r = Perturbation(rng, 0.3);
    const Eigen::Vector3d t = RandomUnit(rng);
    const auto pairs = ExactPairs(rng, r, t, 8);
    const RelativeMotion m = DecomposeEssential(EssentialFromPose(r, t), pairs);
    EXPECT_LT(AngularDistance(m.rotation, r), 1e-6);
    EXPECT_LT(DirectionAngle(m.direction, t), 1e-6);

    const RelativeMotion neg =
        DecomposeEssential(EssentialMatrix(-EssentialFromPose(r, t).matrix()), pairs);
    EXPECT_LT(AngularDistance(neg.rotation, m.rotation), 1e-12);
    EXPECT_LT((neg.direction - m.direction).norm(), 1e-12);
  }
}

TEST(DecomposeEssential, PureXTranslation) {
  std::mt19937_64 rng(27);
  const Eigen::Vector3d t = Eigen::Vector3d::UnitX();
  const auto pairs = ExactPairs(rng, Rotation::Identity(), t, 8);
  const RelativeMotion m = DecomposeEssential(EssentialFromPose(Rotation::Identity(), t), pairs);
  EXPECT_LT(AngularDistance(m.rotation, Rotation::Identity()), 1e-9);
}

TEST(IndependenceCheck, Examples) {
  std::mt19937_64 rng(29);
  const Rotation r = Perturbation(rng, 0.05);
  const auto rotation_only = ExactPairs(rng, r, Eigen::Vector3d::Zero(), 6);
  EXPECT_TRUE(IndependenceCheck(rotation_only, r, 1e-8));
  const auto wide = ExactPairs(rng, r, Eigen::Vector3d(1.0, 0.0, 0.0), 6);
  EXPECT_FALSE(IndependenceCheck(wide, r, 1e-8));
  EXPECT_TRUE(IndependenceCheck(wide, r, std::numeric_limits<double>::infinity()));
}

TEST(IndependenceCheck, ParallaxIsLargestTripleProduct) {
  std::mt19937_64 rng(31);
  const Rotation r = Perturbation(rng, 0.1);
  const auto pairs = ExactPairs(rng, r, Eigen::Vector3d(0.1, 0.05, 0.0), 6);
  const Rotation guess = Perturbation(rng, 0.01) * r;
  double best = 0.0;
  for (const auto& p : pairs) {
    // Brute-force max over unit t on a fine sphere sampling.
    for (int a = 0; a <= 180; ++a) {
      for (int b = 0; b < 360; ++b) {
        const double th = DegToRad(a), ph = DegToRad(b);
        const Eigen::Vector3d t(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph),
                                std::cos(th));
        best = std::max(best, std::abs(p.f_j.dot(Skew(t) * (guess * p.f_i))));
      }
    }
  }
  const double parallax = TranslationParallax(pairs, guess);
  EXPECT_GE(parallax, best - 1e-12);
  EXPECT_LE(parallax - best, 2e-4 * parallax);
}

TEST(EstimateRelativeRotation, ConsecutiveFramesExact) {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 20; ++trial) {
    const auto scene = MakeRelrotTrial(rng, DegToRad(1.0), 0.05, 0.0);
    const RelativeMotion m = EstimateRelativeMotionFromBearings(scene.pairs, {});
    EXPECT_LT(AngularDistance(m.rotation, scene.rotation), 1e-6);
  }
}

TEST(EstimateRelativeRotation, ZeroMotion) {
  std::mt19937_64 rng(35);
  auto pairs = ExactPairs(rng, Rotation::Identity(), Eigen::Vector3d::Zero(), 6);
  const RelativeMotion m = EstimateRelativeRotationFromBearings(pairs, {});
  EXPECT_LT(AngularDistance(m.rotation, Rotation::Identity()), 1e-10);
  EXPECT_LT(m.residual, 1e-10);
  EXPECT_FALSE(m.direction_reliable);
}

TEST(EstimateRelativeRotation, GatedRejectsWideBaseline) {
  std::mt19937_64 rng(37);
  const auto pairs = ExactPairs(rng, Perturbation(rng, 0.1), Eigen::Vector3d(1, 0, 0), 6);
  EXPECT_RASL_ERROR(EstimateRelativeRotationFromBearings(pairs, {}),
                    ErrorCode::kNoValidHypothesis);
  EXPECT_NO_THROW(EstimateRelativeMotionFromBearings(pairs, {}));
}

TEST(EstimateRelativeRotation, GaugeInvariant) {
  std::mt19937_64 rng(39);
  for (int trial = 0; trial < 10; ++trial) {
    const Rotation r = Perturbation(rng, DegToRad(2.0));
    const Eigen::Vector3d t = RandomUnit(rng) * 0.3;
    auto pairs = ExactPairs(rng, r, t, 6);
    const Rotation g = RandomRotation(rng);
    // World rotated by g: bearings in both frames rotate with the cameras,
    // R' = g R g^T, so the error is measured in the rotated frame.
    std::vector<BearingPair> rotated;
    for (const auto& p : pairs) rotated.push_back({g * p.f_i, g * p.f_j});
    const Rotation r2 = g * r * g.Inverse();
    const double e1 = AngularDistance(EstimateRelativeMotionFromBearings(pairs, {}).rotation, r);
    const double e2 =
        AngularDistance(EstimateRelativeMotionFromBearings(rotated, {}).rotation, r2);
    EXPECT_NEAR(e1, e2, 1e-9);
  }
}

TEST(EstimateRelativeRotation, EpipolarIdentityOnExactData) {
  std::mt19937_64 rng(41);
  const Rotation r = Perturbation(rng, 0.2);
  const Eigen::Vector3d t = RandomUnit(rng);
  const auto pairs = ExactPairs(rng, r, t, 20);
  const EssentialMatrix e = EssentialFromPose(r, t);
  for (const auto& p : pairs) EXPECT_LE(std::abs(e.Residual(p.f_i, p.f_j)), 1e-10);
}

TEST(EstimateDirectionGivenRotation, ExactDirectionAndSign) {
  std::mt19937_64 rng(43);
  const Rotation r = Perturbation(rng, 0.1);
  const Eigen::Vector3d t = RandomUnit(rng);
  const auto pairs = ExactPairs(rng, r, t, 12);
  EXPECT_LT(DirectionAngle(EstimateDirectionGivenRotation(pairs, r), t), 1e-8);
}

TEST(EstimateRelativeRotation, FromCorrespondenceSet) {
  std::mt19937_64 rng(45);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const CameraIntrinsics k;
  const Rotation r = Perturbation(rng, DegToRad(1.0));
  const Eigen::Vector3d t(0.05, 0.0, 0.01);
  CorrespondenceSet corrs;
  while (corrs.matches.size() < 300) {
    const double px = 640.0 * u01(rng), py = 480.0 * u01(rng), d = 4.0 + 4.0 * u01(rng);
    const Eigen::Vector3d x((px - k.cx) / k.fx * d, (py - k.cy) / k.fy * d, d);
    const Eigen::Vector3d xj = r * x + t;
    const Eigen::Vector2d q(k.fx * xj.x() / xj.z() + k.cx, k.fy * xj.y() / xj.z() + k.cy);
    if (q.x() < 0 || q.x() > 640 || q.y() < 0 || q.y() > 480) continue;
    corrs.matches.push_back({{px, py}, q, u01(rng)});
  }
  const RelativeMotion m = EstimateRelativeMotion(corrs, k, {});
  EXPECT_LT(AngularDistance(m.rotation, r), 1e-6);
}

}  // namespace
}  // namespace rasl
