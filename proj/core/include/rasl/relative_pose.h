#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "rasl/correspond.h"
#include "rasl/geometry.h"

namespace rasl {

struct BearingPair {
  Eigen::Vector3d f_i = Eigen::Vector3d::UnitZ();
  Eigen::Vector3d f_j = Eigen::Vector3d::UnitZ();
};

// Two-view motion from frame i to frame j: X_j = rotation * X_i + s * direction
// for an unknown scale s > 0. `direction` is therefore expressed in frame j and
// points from camera j towards camera i; see BaselineDirection() for the
// i -> j direction in frame i used by the pose graph.
struct RelativeMotion {
  Rotation rotation;
  Eigen::Vector3d direction = Eigen::Vector3d::UnitZ();
  double residual = 0.0;
  // False when the baseline is too short to define a direction (pure
  // rotation); `direction` is then an arbitrary unit vector.
  bool direction_reliable = true;
};

// Unit direction from camera i to camera j expressed in frame i.
Eigen::Vector3d BaselineDirection(const RelativeMotion& motion);

Eigen::Vector3d BearingFromPixel(const Eigen::Vector2d& pixel,
                                 const CameraIntrinsics& camera);

std::vector<BearingPair> BearingsFromPixels(
    std::span<const Correspondence> matches, const CameraIntrinsics& camera);

// Least-squares essential matrix from six (or more) bearing pairs under the
// epipolar constraint f_j^T E f_i = 0.
//
// Six pairs leave a three-dimensional solution space E = x E1 + y E2 + z E3
// for the linear constraints. The cubic essential-matrix identities
// (det E = 0 and 2 E E^T E - tr(E E^T) E = 0) are linear in the ten cubic
// monomials of (x, y, z); their null vector fixes (x, y, z). The result is
// projected onto the essential manifold (singular values 1, 1, 0).
//
// Throws kDegenerateConfiguration if the stacked design matrix has numerical
// rank below 6 (relative tolerance 1e-10) or the cubic system has no
// isolated solution.
EssentialMatrix EstimateEssential6pt(std::span<const BearingPair> pairs);

// Picks among the four (R, +-t) factorizations the one with most points in
// front of both cameras. Throws kCheiralityAmbiguity on a tie between the
// best and second-best candidates.
RelativeMotion DecomposeEssential(const EssentialMatrix& essential,
                                  std::span<const BearingPair> pairs);

// Largest derotated parallax max_n |f_j,n x R f_i,n|. This is the largest
// epipolar triple product f_j^T [t]x R f_i over unit t, so it vanishes exactly
// when the rotation explains every pair without any translation.
double TranslationParallax(std::span<const BearingPair> pairs,
                           const Rotation& rotation);

// True iff TranslationParallax(pairs, rotation) < tol. Requires >= 2 pairs.
bool IndependenceCheck(std::span<const BearingPair> pairs,
                       const Rotation& rotation, double tol);

// Rotation aligning f_i onto f_j in the least-squares sense (no translation).
Rotation AlignBearings(std::span<const BearingPair> pairs);

// Gauss-Newton/LM refinement of the epipolar least-squares cost
// sum_n (f_j^T [t]x R f_i)^2 over R in SO(3) and unit t.
RelativeMotion RefineRelativeMotion(std::span<const BearingPair> pairs,
                                    const Rotation& initial_rotation,
                                    int max_iterations = 50);

// Unit t (X_j = R X_i + s t) minimizing the epipolar residuals for a fixed
// rotation, signed so that most points lie in front of both cameras.
Eigen::Vector3d EstimateDirectionGivenRotation(
    std::span<const BearingPair> pairs, const Rotation& rotation);

struct RelativeRotationOptions {
  // Parallax gate for the translation-independent rotation hypotheses.
  double independence_tol = 1e-6;
  GridConfig grid;
};

// Translation-independent rotation on six bearing pairs: each of the 15
// two-pair subsets seeds a rotation hypothesis; hypotheses passing
// IndependenceCheck are refined on all six pairs and the lowest-residual one
// is returned (direction flagged unreliable). Throws kNoValidHypothesis when
// every subset is rejected.
RelativeMotion EstimateRelativeRotationFromBearings(
    std::span<const BearingPair> six, const RelativeRotationOptions& options);

// Full epipolar pipeline without the independence gate: linear six-point
// estimate plus the two-pair seeds, each refined by RefineRelativeMotion,
// cheirality-resolved. Lowest epipolar cost wins.
RelativeMotion EstimateEssentialMotion(std::span<const BearingPair> pairs);

// Gated estimate, falling back to EstimateEssentialMotion on
// kNoValidHypothesis.
RelativeMotion EstimateRelativeMotionFromBearings(
    std::span<const BearingPair> six, const RelativeRotationOptions& options);

// Grid selection of six representative matches followed by the gated
// estimator. Throws kNoValidHypothesis like the bearing variant.
RelativeMotion EstimateRelativeRotation(const CorrespondenceSet& corrs,
                                        const CameraIntrinsics& camera,
                                        const RelativeRotationOptions& options);

// EstimateRelativeRotation with the essential-matrix fallback.
RelativeMotion EstimateRelativeMotion(const CorrespondenceSet& corrs,
                                      const CameraIntrinsics& camera,
                                      const RelativeRotationOptions& options);

}  // namespace rasl
