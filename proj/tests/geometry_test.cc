#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "expect_error.h"
#include "rasl/geometry.h"
#include "support.h"

namespace rasl {
namespace {

using testing::RandomRotation;

TEST(Geometry, ChordalMatchesAngularIdentity) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 2000; ++k) {
    const Rotation a = RandomRotation(rng), b = RandomRotation(rng);
    const double alpha = AngularDistance(a, b);
    EXPECT_NEAR(ChordalDistance(a, b), 2.0 * std::sqrt(2.0) * std::sin(alpha / 2.0),
                1e-9);
  }
}

TEST(Geometry, ChordalIdentityNearZeroAndPi) {
  const Eigen::Vector3d axis = Eigen::Vector3d(1, 2, 3).normalized();
  for (double angle : {0.0, 1e-9, 1e-6, kPi - 1e-6, kPi}) {
    const Rotation r = Rotation::FromAngleAxis(angle, axis);
    EXPECT_NEAR(AngularDistance(r, Rotation::Identity()), angle, 1e-9);
    EXPECT_NEAR(ChordalDistance(r, Rotation::Identity()),
                2.0 * std::sqrt(2.0) * std::sin(angle / 2.0), 1e-9);
  }
}

TEST(Geometry, RelativeRotationComposes) {
  std::mt19937_64 rng(5);
  const Rotation ri = RandomRotation(rng), rj = RandomRotation(rng);
  const Rotation rij = RelativeRotation(ri, rj);
  EXPECT_LT(AngularDistance(rij * ri, rj), 1e-12);
}

TEST(Geometry, ExpLogRoundTrip) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const Eigen::Vector3d w(u(rng), u(rng), u(rng));
    EXPECT_LT((So3Log(So3Exp(w)) - w).norm(), 1e-12);
  }
  EXPECT_LT(So3Log(So3Exp(Eigen::Vector3d::Zero())).norm(), 1e-15);
}

TEST(Geometry, LogRejectsNearPi) {
  const Rotation r = Rotation::FromAngleAxis(kPi, Eigen::Vector3d::UnitZ());
  EXPECT_RASL_ERROR(So3Log(r), ErrorCode::kNearPiSingularity);
  EXPECT_NEAR(So3LogUnchecked(r.matrix()).norm(), kPi, 1e-9);
}

TEST(Geometry, FromMatrixValidatesAndRepairs) {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  m(0, 1) = 1e-7;
  const Rotation r = Rotation::FromMatrix(m);
  EXPECT_LT((r.matrix() * r.matrix().transpose() -
             Eigen::Matrix3d::Identity()).norm(), 1e-12);
  EXPECT_RASL_ERROR(Rotation::FromMatrix(2.0 * Eigen::Matrix3d::Identity()),
                    ErrorCode::kInvalidArgument);
  EXPECT_RASL_ERROR(Rotation::FromMatrix(-Eigen::Matrix3d::Identity()),
                    ErrorCode::kInvalidArgument);
}

TEST(Geometry, ProjectToRotationIsNearest) {
  std::mt19937_64 rng(11);
  const Rotation r = RandomRotation(rng);
  EXPECT_LT(AngularDistance(ProjectToRotation(3.0 * r.matrix()), r), 1e-12);
  EXPECT_RASL_ERROR(ProjectToRotation(Eigen::Matrix3d::Zero()),
                    ErrorCode::kDegenerateMatrix);
}

TEST(Geometry, EssentialSatisfiesEpipolarConstraint) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Rotation r = RandomRotation(rng);
  const Eigen::Vector3d t(0.3, -0.1, 0.2);
  const EssentialMatrix e = EssentialFromPose(r, t);
  for (int k = 0; k < 50; ++k) {
    const Eigen::Vector3d x(u(rng), u(rng), 5.0 + u(rng));
    const Eigen::Vector3d xj = r * x + t;
    EXPECT_LT(std::abs(e.Residual(x.normalized(), xj.normalized())), 1e-12);
  }
  EXPECT_RASL_ERROR(EssentialFromPose(r, Eigen::Vector3d::Zero()),
                    ErrorCode::kZeroTranslation);
}

TEST(Geometry, QuaternionRoundTrip) {
  std::mt19937_64 rng(17);
  const Rotation r = RandomRotation(rng);
  EXPECT_LT(AngularDistance(Rotation::FromQuaternion(r.ToQuaternion()), r), 1e-12);
}


TEST(Geometry, SkewAndEssentialExamples) {
  EXPECT_EQ(Skew(Eigen::Vector3d::Zero()), Eigen::Matrix3d::Zero());
  Eigen::Matrix3d z;
  z << 0, -1, 0, 1, 0, 0, 0, 0, 0;
  EXPECT_EQ(Skew(Eigen::Vector3d::UnitZ()), z);
  const Eigen::Vector3d x = Eigen::Vector3d::UnitX();
  EXPECT_LT((EssentialFromPose(Rotation::Identity(), x).matrix() - Skew(x)).norm(), 1e-15);
  std::mt19937_64 rng(19);
  const Rotation r = RandomRotation(rng);
  const Eigen::Vector3d t(0.2, 0.4, -0.1);
  EXPECT_LT((EssentialFromPose(r, 2.0 * t).matrix() - 2.0 * EssentialFromPose(r, t).matrix())
                .norm(), 1e-14);
}

TEST(Geometry, DistanceExamples) {
  std::mt19937_64 rng(23);
  const Rotation a = RandomRotation(rng);
  EXPECT_NEAR(ChordalDistance(a, a), 0.0, 1e-15);
  EXPECT_NEAR(AngularDistance(a, a), 0.0, 1e-15);
  EXPECT_LT(AngularDistance(RelativeRotation(a, a), Rotation::Identity()), 1e-15);
  EXPECT_LT(AngularDistance(RelativeRotation(Rotation::Identity(), a), a), 1e-15);
  const Eigen::Vector3d axis = testing::RandomUnit(rng);
  const Rotation b60 = Rotation::FromAngleAxis(kPi / 3.0, axis) * a;
  EXPECT_NEAR(ChordalDistance(a, b60), std::sqrt(2.0), 1e-12);
  const Rotation b180 = Rotation::FromAngleAxis(kPi, axis) * a;
  EXPECT_NEAR(ChordalDistance(a, b180), 2.0 * std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(AngularDistance(Rotation::FromAngleAxis(kPi / 2.0, axis) * a, a), kPi / 2.0, 1e-12);
}

TEST(Geometry, ProjectionAndExpExamples) {
  std::mt19937_64 rng(29);
  const Rotation r = RandomRotation(rng);
  EXPECT_LT((ProjectToRotation(r.matrix()).matrix() - r.matrix()).norm(), 1e-14);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    Eigen::Matrix3d noise;
    for (int e = 0; e < 9; ++e) noise(e) = n(rng);
    noise *= 1e-3 / noise.norm();
    EXPECT_LE(ChordalDistance(ProjectToRotation(r.matrix() + noise), r), 2e-3);
  }
  EXPECT_LT((So3Exp(Eigen::Vector3d::Zero()).matrix() - Eigen::Matrix3d::Identity()).norm(), 1e-15);
  Eigen::Matrix3d rx;
  rx << 1, 0, 0, 0, 0, -1, 0, 1, 0;
  EXPECT_LT((So3Exp(Eigen::Vector3d(kPi / 2.0, 0, 0)).matrix() - rx).norm(), 1e-15);
}

}  // namespace
}  // namespace rasl
