#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace rasl {

// Element of SO(3) stored as a 3x3 matrix.
//
// Throughout the library a Rotation R_i maps world coordinates into camera i
// coordinates, so the relative rotation from frame i to frame j is
// R_ij = R_j * R_i^T and a common right factor G (R_i -> R_i * G) is the
// global gauge.
class Rotation {
 public:
  Rotation() : m_(Eigen::Matrix3d::Identity()) {}

  static Rotation Identity() { return Rotation(); }

  // Validates orthonormality and det = +1 at kOrthonormalityTol. Matrices that
  // drifted slightly (long compositions) are re-projected instead of rejected
  // when they are within kRepairTol; anything further off throws
  // kInvalidArgument.
  static Rotation FromMatrix(const Eigen::Matrix3d& m);

  // Wraps m without checking. Callers must guarantee m is in SO(3).
  static Rotation FromMatrixUnchecked(const Eigen::Matrix3d& m) {
    return Rotation(m);
  }

  static Rotation FromQuaternion(const Eigen::Quaterniond& q);
  static Rotation FromAngleAxis(double angle, const Eigen::Vector3d& axis);

  const Eigen::Matrix3d& matrix() const { return m_; }
  Eigen::Quaterniond ToQuaternion() const;
  Rotation Inverse() const { return Rotation(m_.transpose()); }

  Rotation operator*(const Rotation& other) const {
    return Rotation(m_ * other.m_);
  }
  Eigen::Vector3d operator*(const Eigen::Vector3d& v) const { return m_ * v; }

  // Frobenius deviation from orthonormality plus |det - 1|.
  double InvariantError() const;

  static constexpr double kOrthonormalityTol = 1e-9;
  static constexpr double kRepairTol = 1e-5;

 private:
  explicit Rotation(const Eigen::Matrix3d& m) : m_(m) {}
  Eigen::Matrix3d m_;
};

// Camera pose: orientation (world -> camera) and camera position in the world
// frame. The position is what the translation averaging recovers.
struct Pose {
  Rotation rotation;
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
};

class EssentialMatrix {
 public:
  EssentialMatrix() : m_(Eigen::Matrix3d::Zero()) {}
  explicit EssentialMatrix(const Eigen::Matrix3d& m) : m_(m) {}

  const Eigen::Matrix3d& matrix() const { return m_; }

  // Algebraic epipolar residual f_j^T E f_i.
  double Residual(const Eigen::Vector3d& f_i, const Eigen::Vector3d& f_j) const {
    return f_j.dot(m_ * f_i);
  }

 private:
  Eigen::Matrix3d m_;
};

struct CameraIntrinsics {
  double fx = 500.0;
  double fy = 500.0;
  double cx = 320.0;
  double cy = 240.0;

  // Throws kInvalidArgument unless fx > 0 and fy > 0.
  void Validate() const;
};

Eigen::Matrix3d Skew(const Eigen::Vector3d& t);

// E = [t]x R. With X_j = R X_i + t this satisfies f_j^T E f_i = 0 for every
// correspondence. Throws kZeroTranslation when |t| < 1e-12.
EssentialMatrix EssentialFromPose(const Rotation& rotation,
                                  const Eigen::Vector3d& translation);

// R_ij = R_j * R_i^T.
Rotation RelativeRotation(const Rotation& r_i, const Rotation& r_j);

// |A - B|_F, in [0, 2*sqrt(2)].
double ChordalDistance(const Rotation& a, const Rotation& b);

// Geodesic angle of A * B^T in [0, pi].
double AngularDistance(const Rotation& a, const Rotation& b);

// Geodesic angle of a single rotation (distance to identity).
double RotationAngle(const Eigen::Matrix3d& r);

// Frobenius-nearest rotation. Throws kDegenerateMatrix if the numerical rank
// of m is below 2 (relative tolerance 1e-12).
Rotation ProjectToRotation(const Eigen::Matrix3d& m);

Rotation So3Exp(const Eigen::Vector3d& w);

// Inverse of So3Exp on angles below pi - 1e-6; throws kNearPiSingularity
// beyond that.
Eigen::Vector3d So3Log(const Rotation& r);

// Same as So3Log but total: at the pi boundary it picks one of the two
// equivalent axes. Used inside solvers where the residual may be ~pi.
Eigen::Vector3d So3LogUnchecked(const Eigen::Matrix3d& r);

inline constexpr double kPi = 3.14159265358979323846;

inline double DegToRad(double deg) { return deg * kPi / 180.0; }
inline double RadToDeg(double rad) { return rad * 180.0 / kPi; }

}  // namespace rasl
