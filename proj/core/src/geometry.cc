#include "rasl/geometry.h"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "rasl/error.h"

namespace rasl {
namespace {

Eigen::Vector3d Vee(const Eigen::Matrix3d& m) {
  return Eigen::Vector3d(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0),
                         m(1, 0) - m(0, 1));
}

}  // namespace

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kZeroTranslation: return "ZeroTranslation";
    case ErrorCode::kDegenerateMatrix: return "DegenerateMatrix";
    case ErrorCode::kNearPiSingularity: return "NearPiSingularity";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kInsufficientRegions: return "InsufficientRegions";
    case ErrorCode::kDegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorCode::kCheiralityAmbiguity: return "CheiralityAmbiguity";
    case ErrorCode::kNoValidHypothesis: return "NoValidHypothesis";
    case ErrorCode::kDisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::kNonConvergence: return "NonConvergence";
    case ErrorCode::kParallelDirections: return "ParallelDirections";
    case ErrorCode::kInsufficientConstraints: return "InsufficientConstraints";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kNoOverlap: return "NoOverlap";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

Rotation Rotation::FromMatrix(const Eigen::Matrix3d& m) {
  if (!m.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "rotation matrix is not finite");
  }
  const Rotation candidate(m);
  const double err = candidate.InvariantError();
  if (err <= kOrthonormalityTol) {
    return candidate;
  }
  if (err <= kRepairTol) {
    return ProjectToRotation(m);
  }
  throw Error(ErrorCode::kInvalidArgument,
              "matrix is not a rotation (invariant error " +
                  std::to_string(err) + ")");
}

Rotation Rotation::FromQuaternion(const Eigen::Quaterniond& q) {
  if (q.norm() < 1e-12) {
    throw Error(ErrorCode::kInvalidArgument, "zero quaternion");
  }
  return Rotation(q.normalized().toRotationMatrix());
}

Rotation Rotation::FromAngleAxis(double angle, const Eigen::Vector3d& axis) {
  return So3Exp(angle * axis.normalized());
}

Eigen::Quaterniond Rotation::ToQuaternion() const {
  Eigen::Quaterniond q(m_);
  q.normalize();
  // Canonical sign so that serialization is deterministic.
  if (q.w() < 0.0) {
    q.coeffs() *= -1.0;
  }
  return q;
}

double Rotation::InvariantError() const {
  return (m_.transpose() * m_ - Eigen::Matrix3d::Identity()).norm() +
         std::abs(m_.determinant() - 1.0);
}

void CameraIntrinsics::Validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "camera focal lengths must be positive");
  }
}

Eigen::Matrix3d Skew(const Eigen::Vector3d& t) {
  Eigen::Matrix3d s;
  s << 0.0, -t.z(), t.y(),
       t.z(), 0.0, -t.x(),
       -t.y(), t.x(), 0.0;
  return s;
}

EssentialMatrix EssentialFromPose(const Rotation& rotation,
                                  const Eigen::Vector3d& translation) {
  if (translation.norm() < 1e-12) {
    throw Error(ErrorCode::kZeroTranslation,
                "essential matrix needs a nonzero translation");
  }
  return EssentialMatrix(Skew(translation) * rotation.matrix());
}

Rotation RelativeRotation(const Rotation& r_i, const Rotation& r_j) {
  return r_j * r_i.Inverse();
}

double ChordalDistance(const Rotation& a, const Rotation& b) {
  return (a.matrix() - b.matrix()).norm();
}

double RotationAngle(const Eigen::Matrix3d& r) {
  // atan2 of the sine (skew part) and cosine (trace) keeps full precision near
  // both 0 and pi; the cosine is clamped against rounding past +-1.
  const double cos_theta = std::clamp((r.trace() - 1.0) * 0.5, -1.0, 1.0);
  const double sin_theta = 0.5 * Vee(r).norm();
  return std::atan2(sin_theta, cos_theta);
}

double AngularDistance(const Rotation& a, const Rotation& b) {
  return RotationAngle(a.matrix() * b.matrix().transpose());
}

Rotation ProjectToRotation(const Eigen::Matrix3d& m) {
  if (!m.allFinite()) {
    throw Error(ErrorCode::kDegenerateMatrix, "matrix is not finite");
  }
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU |
                                               Eigen::ComputeFullV);
  const Eigen::Vector3d& s = svd.singularValues();
  if (s(0) <= 0.0 || s(1) < 1e-12 * s(0)) {
    throw Error(ErrorCode::kDegenerateMatrix,
                "matrix rank below 2; no unique nearest rotation");
  }
  const Eigen::Matrix3d& u = svd.matrixU();
  const Eigen::Matrix3d& v = svd.matrixV();
  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  if ((u * v.transpose()).determinant() < 0.0) {
    d(2, 2) = -1.0;
  }
  return Rotation::FromMatrixUnchecked(u * d * v.transpose());
}

Rotation So3Exp(const Eigen::Vector3d& w) {
  const double theta2 = w.squaredNorm();
  const double theta = std::sqrt(theta2);
  const Eigen::Matrix3d k = Skew(w);
  double a;
  double b;
  if (theta < 1e-5) {
    a = 1.0 - theta2 / 6.0;
    b = 0.5 - theta2 / 24.0;
  } else {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / theta2;
  }
  return Rotation::FromMatrixUnchecked(Eigen::Matrix3d::Identity() + a * k +
                                       b * k * k);
}

Eigen::Vector3d So3LogUnchecked(const Eigen::Matrix3d& r) {
  const double theta = RotationAngle(r);
  const Eigen::Vector3d v = Vee(r);
  if (theta < 1e-5) {
    return 0.5 * (1.0 + theta * theta / 6.0) * v;
  }
  if (theta < kPi - 1e-3) {
    return theta / (2.0 * std::sin(theta)) * v;
  }
  // Near pi the skew part vanishes; read the axis from the symmetric part,
  // (R + R^T)/2 - cos(theta) I = (1 - cos(theta)) a a^T.
  const double cos_theta = std::cos(theta);
  const Eigen::Matrix3d b = 0.5 * (r + r.transpose()) -
                            cos_theta * Eigen::Matrix3d::Identity();
  Eigen::Index col = 0;
  b.diagonal().maxCoeff(&col);
  Eigen::Vector3d axis = b.col(col).normalized();
  if (axis.dot(v) < 0.0) {
    axis = -axis;
  }
  return theta * axis;
}

Eigen::Vector3d So3Log(const Rotation& r) {
  const double theta = RotationAngle(r.matrix());
  if (theta >= kPi - 1e-6) {
    throw Error(ErrorCode::kNearPiSingularity,
                "logarithm is ambiguous at rotation angle pi");
  }
  return So3LogUnchecked(r.matrix());
}

}  // namespace rasl
