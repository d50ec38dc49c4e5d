#include "rasl/relative_pose.h"

#include <array>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "rasl/error.h"

namespace rasl {
namespace {

// Polynomials of total degree <= 3 in (x, y, z), dense over 20 monomials.
class CubicPoly {
 public:
  static constexpr int kNumMonomials = 20;

  CubicPoly() { coeffs_.fill(0.0); }

  static CubicPoly Linear(double cx, double cy, double cz) {
    CubicPoly p;
    p.coeffs_[Index(1, 0, 0)] = cx;
    p.coeffs_[Index(0, 1, 0)] = cy;
    p.coeffs_[Index(0, 0, 1)] = cz;
    return p;
  }

  static int Index(int a, int b, int c) { return Table().index[a][b][c]; }

  double operator[](int idx) const { return coeffs_[idx]; }

  CubicPoly operator+(const CubicPoly& o) const {
    CubicPoly r;
    for (int n = 0; n < kNumMonomials; ++n) r.coeffs_[n] = coeffs_[n] + o.coeffs_[n];
    return r;
  }
  CubicPoly operator-(const CubicPoly& o) const {
    CubicPoly r;
    for (int n = 0; n < kNumMonomials; ++n) r.coeffs_[n] = coeffs_[n] - o.coeffs_[n];
    return r;
  }
  CubicPoly operator*(double s) const {
    CubicPoly r;
    for (int n = 0; n < kNumMonomials; ++n) r.coeffs_[n] = coeffs_[n] * s;
    return r;
  }
  // Terms above degree 3 never occur in the essential constraints.
  CubicPoly operator*(const CubicPoly& o) const {
    const auto& t = Table();
    CubicPoly r;
    for (int m = 0; m < kNumMonomials; ++m) {
      if (coeffs_[m] == 0.0) continue;
      for (int n = 0; n < kNumMonomials; ++n) {
        if (o.coeffs_[n] == 0.0) continue;
        const int a = t.exps[m][0] + t.exps[n][0];
        const int b = t.exps[m][1] + t.exps[n][1];
        const int c = t.exps[m][2] + t.exps[n][2];
        if (a + b + c > 3) continue;
        r.coeffs_[t.index[a][b][c]] += coeffs_[m] * o.coeffs_[n];
      }
    }
    return r;
  }

  // The ten degree-3 monomials in a fixed order.
  static const std::array<int, 10>& CubicTerms() { return Table().cubic; }

 private:
  struct MonomialTable {
    int index[4][4][4];
    int exps[kNumMonomials][3];
    std::array<int, 10> cubic;
  };

  static const MonomialTable& Table() {
    static const MonomialTable table = [] {
      MonomialTable t{};
      int n = 0;
      int k = 0;
      for (int deg = 0; deg <= 3; ++deg) {
        for (int a = deg; a >= 0; --a) {
          for (int b = deg - a; b >= 0; --b) {
            const int c = deg - a - b;
            t.index[a][b][c] = n;
            t.exps[n][0] = a;
            t.exps[n][1] = b;
            t.exps[n][2] = c;
            if (deg == 3) t.cubic[k++] = n;
            ++n;
          }
        }
      }
      return t;
    }();
    return table;
  }

  std::array<double, kNumMonomials> coeffs_;
};

using PolyMatrix = std::array<std::array<CubicPoly, 3>, 3>;

CubicPoly Det3(const PolyMatrix& e) {
  return e[0][0] * (e[1][1] * e[2][2] - e[1][2] * e[2][1]) -
         e[0][1] * (e[1][0] * e[2][2] - e[1][2] * e[2][0]) +
         e[0][2] * (e[1][0] * e[2][1] - e[1][1] * e[2][0]);
}

Eigen::Matrix3d ProjectToEssential(const Eigen::Matrix3d& e) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(e, Eigen::ComputeFullU |
                                               Eigen::ComputeFullV);
  return svd.matrixU() * Eigen::Vector3d(1.0, 1.0, 0.0).asDiagonal() *
         svd.matrixV().transpose();
}

int CountPositiveDepths(std::span<const BearingPair> pairs,
                        const Eigen::Matrix3d& r, const Eigen::Vector3d& t) {
  int count = 0;
  for (const auto& p : pairs) {
    // d_j f_j = d_i R f_i + t, least squares in (d_i, d_j).
    const Eigen::Vector3d a = r * p.f_i;
    const Eigen::Vector3d b = -p.f_j;
    const double aa = a.dot(a);
    const double ab = a.dot(b);
    const double bb = b.dot(b);
    const double det = aa * bb - ab * ab;
    if (det < 1e-14) continue;
    const double ra = -a.dot(t);
    const double rb = -b.dot(t);
    const double d_i = (bb * ra - ab * rb) / det;
    const double d_j = (aa * rb - ab * ra) / det;
    if (d_i > 0.0 && d_j > 0.0) ++count;
  }
  return count;
}

double EpipolarCost(std::span<const BearingPair> pairs, const Eigen::Matrix3d& r,
                    const Eigen::Vector3d& t) {
  double cost = 0.0;
  for (const auto& p : pairs) {
    const double res = t.dot((r * p.f_i).cross(p.f_j));
    cost += res * res;
  }
  return cost;
}

// Unit t minimizing sum (t . (R f_i x f_j))^2 for fixed R.
Eigen::Vector3d BestDirection(std::span<const BearingPair> pairs,
                              const Eigen::Matrix3d& r) {
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  for (const auto& p : pairs) {
    const Eigen::Vector3d n = (r * p.f_i).cross(p.f_j);
    m += n * n.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(m);
  return eig.eigenvectors().col(0).normalized();
}

void TangentBasis(const Eigen::Vector3d& t, Eigen::Vector3d* b1,
                  Eigen::Vector3d* b2) {
  Eigen::Vector3d helper = std::abs(t.x()) < 0.9 ? Eigen::Vector3d::UnitX()
                                                 : Eigen::Vector3d::UnitY();
  *b1 = t.cross(helper).normalized();
  *b2 = t.cross(*b1).normalized();
}

void RequirePairs(std::span<const BearingPair> pairs, std::size_t n,
                  const char* what) {
  if (pairs.size() < n) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(what) + " needs at least " + std::to_string(n) +
                    " bearing pairs");
  }
}

}  // namespace

Eigen::Vector3d BaselineDirection(const RelativeMotion& motion) {
  // X_j = R X_i + t with t = R_j (c_i - c_j), so R^T t = R_i (c_i - c_j).
  return -(motion.rotation.matrix().transpose() * motion.direction).normalized();
}

Eigen::Vector3d BearingFromPixel(const Eigen::Vector2d& pixel,
                                 const CameraIntrinsics& camera) {
  return Eigen::Vector3d((pixel.x() - camera.cx) / camera.fx,
                         (pixel.y() - camera.cy) / camera.fy, 1.0)
      .normalized();
}

std::vector<BearingPair> BearingsFromPixels(
    std::span<const Correspondence> matches, const CameraIntrinsics& camera) {
  camera.Validate();
  std::vector<BearingPair> pairs;
  pairs.reserve(matches.size());
  for (const auto& m : matches) {
    pairs.push_back({BearingFromPixel(m.p_i, camera),
                     BearingFromPixel(m.p_j, camera)});
  }
  return pairs;
}

EssentialMatrix EstimateEssential6pt(std::span<const BearingPair> pairs) {
  RequirePairs(pairs, 6, "six-point essential estimation");
  Eigen::MatrixXd design(pairs.size(), 9);
  for (std::size_t n = 0; n < pairs.size(); ++n) {
    const auto& p = pairs[n];
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        design(n, 3 * r + c) = p.f_j(r) * p.f_i(c);
      }
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (sv(0) <= 0.0 || sv(5) < 1e-10 * sv(0)) {
    throw Error(ErrorCode::kDegenerateConfiguration,
                "epipolar design matrix has rank below 6");
  }

  std::array<Eigen::Matrix3d, 3> basis;
  for (int k = 0; k < 3; ++k) {
    const Eigen::VectorXd v = svd.matrixV().col(6 + k);
    basis[k] = Eigen::Map<const Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(
        v.data());
  }

  PolyMatrix e;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      e[r][c] = CubicPoly::Linear(basis[0](r, c), basis[1](r, c),
                                  basis[2](r, c));
    }
  }
  PolyMatrix eet;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      eet[r][c] = e[r][0] * e[c][0] + e[r][1] * e[c][1] + e[r][2] * e[c][2];
    }
  }
  const CubicPoly trace = eet[0][0] + eet[1][1] + eet[2][2];

  std::array<CubicPoly, 10> constraints;
  constraints[0] = Det3(e);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      const CubicPoly eete =
          eet[r][0] * e[0][c] + eet[r][1] * e[1][c] + eet[r][2] * e[2][c];
      constraints[1 + 3 * r + c] = eete * 2.0 - trace * e[r][c];
    }
  }

  const auto& terms = CubicPoly::CubicTerms();
  Eigen::Matrix<double, 10, 10> coeffs;
  for (int row = 0; row < 10; ++row) {
    for (int col = 0; col < 10; ++col) {
      coeffs(row, col) = constraints[row][terms[col]];
    }
  }
  Eigen::JacobiSVD<Eigen::Matrix<double, 10, 10>> csvd(coeffs,
                                                       Eigen::ComputeFullV);
  const auto& csv = csvd.singularValues();
  if (csv(0) <= 0.0 || csv(8) < 1e-12 * csv(0)) {
    throw Error(ErrorCode::kDegenerateConfiguration,
                "essential constraints admit a continuum of solutions");
  }
  const Eigen::Matrix<double, 10, 1> mono = csvd.matrixV().col(9);
  auto term = [&](int a, int b, int c) {
    const int idx = CubicPoly::Index(a, b, c);
    for (int col = 0; col < 10; ++col) {
      if (terms[col] == idx) return mono(col);
    }
    return 0.0;
  };
  // (x^3, x^2 y, x^2 z) = x^2 (x, y, z), and likewise for y^2 and z^2; the
  // largest of the three triples is the best-conditioned read-out.
  const std::array<Eigen::Vector3d, 3> triples = {
      Eigen::Vector3d(term(3, 0, 0), term(2, 1, 0), term(2, 0, 1)),
      Eigen::Vector3d(term(1, 2, 0), term(0, 3, 0), term(0, 2, 1)),
      Eigen::Vector3d(term(1, 0, 2), term(0, 1, 2), term(0, 0, 3))};
  Eigen::Vector3d xyz = triples[0];
  for (const auto& t : triples) {
    if (t.norm() > xyz.norm()) xyz = t;
  }
  const Eigen::Matrix3d estimate =
      xyz(0) * basis[0] + xyz(1) * basis[1] + xyz(2) * basis[2];
  if (estimate.norm() < 1e-12) {
    throw Error(ErrorCode::kDegenerateConfiguration,
                "essential solution vanished");
  }
  Eigen::Matrix3d best = ProjectToEssential(estimate / estimate.norm());
  // Noise bends the cubic read-out; polish both rotations of the twisted
  // pair on the epipolar cost and keep whichever fits best.
  double best_cost = 0.0;
  for (const auto& p : pairs) best_cost += std::pow(p.f_j.dot(best * p.f_i), 2);
  Eigen::JacobiSVD<Eigen::Matrix3d> esvd(best, Eigen::ComputeFullU |
                                                   Eigen::ComputeFullV);
  Eigen::Matrix3d u = esvd.matrixU();
  Eigen::Matrix3d v = esvd.matrixV();
  if (u.determinant() < 0.0) u = -u;
  if (v.determinant() < 0.0) v = -v;
  Eigen::Matrix3d w;
  w << 0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0;
  for (const Eigen::Matrix3d& r : {Eigen::Matrix3d(u * w * v.transpose()),
                                   Eigen::Matrix3d(u * w.transpose() *
                                                   v.transpose())}) {
    const RelativeMotion m =
        RefineRelativeMotion(pairs, Rotation::FromMatrixUnchecked(r), 50);
    const Eigen::Matrix3d candidate =
        Skew(m.direction) * m.rotation.matrix() / std::sqrt(2.0);
    double cost = 0.0;
    for (const auto& p : pairs) {
      cost += std::pow(p.f_j.dot(candidate * p.f_i), 2);
    }
    if (cost < best_cost) {
      best_cost = cost;
      best = candidate;
    }
  }
  return EssentialMatrix(ProjectToEssential(best));
}

RelativeMotion DecomposeEssential(const EssentialMatrix& essential,
                                  std::span<const BearingPair> pairs) {
  RequirePairs(pairs, 1, "essential decomposition");
  const Eigen::Matrix3d& e = essential.matrix();
  if (!e.allFinite() || e.norm() < 1e-12) {
    throw Error(ErrorCode::kDegenerateConfiguration, "essential matrix is zero");
  }
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(e, Eigen::ComputeFullU |
                                               Eigen::ComputeFullV);
  Eigen::Matrix3d u = svd.matrixU();
  Eigen::Matrix3d v = svd.matrixV();
  if (u.determinant() < 0.0) u = -u;
  if (v.determinant() < 0.0) v = -v;
  Eigen::Matrix3d w;
  w << 0.0, -1.0, 0.0,
       1.0, 0.0, 0.0,
       0.0, 0.0, 1.0;
  const Eigen::Matrix3d r1 = u * w * v.transpose();
  const Eigen::Matrix3d r2 = u * w.transpose() * v.transpose();
  const Eigen::Vector3d t = u.col(2).normalized();

  struct Candidate {
    Eigen::Matrix3d r;
    Eigen::Vector3d t;
    int score;
  };
  std::array<Candidate, 4> candidates = {Candidate{r1, t, 0},
                                         Candidate{r1, -t, 0},
                                         Candidate{r2, t, 0},
                                         Candidate{r2, -t, 0}};
  for (auto& c : candidates) {
    c.score = CountPositiveDepths(pairs, c.r, c.t);
  }
  int best = 0;
  for (int k = 1; k < 4; ++k) {
    if (candidates[k].score > candidates[best].score) best = k;
  }
  for (int k = 0; k < 4; ++k) {
    if (k != best && candidates[k].score == candidates[best].score) {
      throw Error(ErrorCode::kCheiralityAmbiguity,
                  "two factorizations explain the same number of points");
    }
  }

  RelativeMotion motion;
  motion.rotation = ProjectToRotation(candidates[best].r);
  motion.direction = candidates[best].t;
  const Eigen::Matrix3d e_unit = Skew(motion.direction) * motion.rotation.matrix();
  double sum = 0.0;
  for (const auto& p : pairs) {
    sum += std::abs(p.f_j.dot(e_unit * p.f_i));
  }
  motion.residual = sum / static_cast<double>(pairs.size());
  return motion;
}

double TranslationParallax(std::span<const BearingPair> pairs,
                           const Rotation& rotation) {
  double worst = 0.0;
  for (const auto& p : pairs) {
    worst = std::max(worst, p.f_j.cross(rotation * p.f_i).norm());
  }
  return worst;
}

bool IndependenceCheck(std::span<const BearingPair> pairs,
                       const Rotation& rotation, double tol) {
  RequirePairs(pairs, 2, "independence check");
  return TranslationParallax(pairs, rotation) < tol;
}

Rotation AlignBearings(std::span<const BearingPair> pairs) {
  Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
  for (const auto& p : pairs) {
    h += p.f_j * p.f_i.transpose();
  }
  return ProjectToRotation(h);
}

RelativeMotion RefineRelativeMotion(std::span<const BearingPair> pairs,
                                    const Rotation& initial_rotation,
                                    int max_iterations) {
  RequirePairs(pairs, 5, "epipolar refinement");
  const std::size_t n = pairs.size();
  Eigen::Matrix3d r = initial_rotation.matrix();
  Eigen::Vector3d t = BestDirection(pairs, r);
  double cost = EpipolarCost(pairs, r, t);
  double damping = 1e-6;

  Eigen::VectorXd residuals(n);
  Eigen::MatrixXd jac(n, 5);
  for (int iter = 0; iter < max_iterations && cost > 1e-30; ++iter) {
    Eigen::Vector3d b1;
    Eigen::Vector3d b2;
    TangentBasis(t, &b1, &b2);
    for (std::size_t k = 0; k < n; ++k) {
      const Eigen::Vector3d a = r * pairs[k].f_i;
      const Eigen::Vector3d& f = pairs[k].f_j;
      const Eigen::Vector3d axf = a.cross(f);
      residuals(k) = t.dot(axf);
      // d/d(delta) of t . ((a + delta x a) x f).
      jac.block<1, 3>(k, 0) = (t.dot(a) * f - a.dot(f) * t).transpose();
      jac(k, 3) = b1.dot(axf);
      jac(k, 4) = b2.dot(axf);
    }
    const Eigen::Matrix<double, 5, 5> jtj = jac.transpose() * jac;
    const Eigen::Matrix<double, 5, 1> jtr = jac.transpose() * residuals;

    bool improved = false;
    for (int attempt = 0; attempt < 10; ++attempt) {
      Eigen::Matrix<double, 5, 5> lhs = jtj;
      lhs.diagonal().array() += damping * (1.0 + jtj.diagonal().array());
      const Eigen::Matrix<double, 5, 1> step = lhs.ldlt().solve(-jtr);
      const Eigen::Matrix3d r_new =
          So3Exp(step.head<3>()).matrix() * r;
      const Eigen::Vector3d t_new =
          (t + step(3) * b1 + step(4) * b2).normalized();
      const double cost_new = EpipolarCost(pairs, r_new, t_new);
      if (cost_new < cost) {
        const bool tiny = step.norm() < 1e-14;
        r = ProjectToRotation(r_new).matrix();
        t = t_new;
        cost = cost_new;
        damping = std::max(damping * 0.3, 1e-12);
        improved = !tiny;
        break;
      }
      damping *= 10.0;
    }
    if (!improved) break;
  }

  RelativeMotion motion;
  motion.rotation = Rotation::FromMatrixUnchecked(r);
  motion.direction = t;
  motion.residual = std::sqrt(cost / static_cast<double>(n));
  return motion;
}

RelativeMotion EstimateRelativeRotationFromBearings(
    std::span<const BearingPair> six, const RelativeRotationOptions& options) {
  RequirePairs(six, 2, "relative rotation estimation");
  bool found = false;
  RelativeMotion best;
  best.residual = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < six.size(); ++a) {
    for (std::size_t b = a + 1; b < six.size(); ++b) {
      if (six[a].f_i.cross(six[b].f_i).norm() < 1e-9 ||
          six[a].f_j.cross(six[b].f_j).norm() < 1e-9) {
        continue;
      }
      const std::array<BearingPair, 2> seed_pairs = {six[a], six[b]};
      const Rotation hypothesis = AlignBearings(seed_pairs);
      if (!IndependenceCheck(six, hypothesis, options.independence_tol)) {
        continue;
      }
      // Translation-free least squares on all pairs.
      const Rotation refined = AlignBearings(six);
      double parallax = 0.0;
      for (const auto& p : six) {
        parallax += p.f_j.cross(refined * p.f_i).norm();
      }
      parallax /= static_cast<double>(six.size());
      if (parallax < best.residual) {
        best.rotation = refined;
        best.residual = parallax;
        best.direction = Eigen::Vector3d::UnitZ();
        best.direction_reliable = false;
        found = true;
      }
    }
  }
  if (!found) {
    throw Error(ErrorCode::kNoValidHypothesis,
                "no two-pair hypothesis passed the independence check");
  }
  return best;
}

RelativeMotion EstimateEssentialMotion(std::span<const BearingPair> pairs) {
  RequirePairs(pairs, 6, "essential pipeline");
  std::vector<Rotation> seeds;
  try {
    const EssentialMatrix linear = EstimateEssential6pt(pairs);
    seeds.push_back(DecomposeEssential(linear, pairs).rotation);
  } catch (const Error&) {
    // Seeds below still cover the search.
  }
  for (std::size_t a = 0; a < pairs.size(); ++a) {
    for (std::size_t b = a + 1; b < pairs.size(); ++b) {
      if (pairs[a].f_i.cross(pairs[b].f_i).norm() < 1e-9) continue;
      const std::array<BearingPair, 2> seed_pairs = {pairs[a], pairs[b]};
      seeds.push_back(AlignBearings(seed_pairs));
    }
  }
  if (seeds.empty()) {
    throw Error(ErrorCode::kDegenerateConfiguration,
                "no usable rotation seed");
  }

  // Every refined seed contributes its four factorizations; the winner has the
  // most points in front of both cameras, then the lowest epipolar cost.
  RelativeMotion best;
  int best_front = -1;
  double best_cost = std::numeric_limits<double>::infinity();
  for (const Rotation& seed : seeds) {
    const RelativeMotion refined = RefineRelativeMotion(pairs, seed);
    const Eigen::Matrix3d& r = refined.rotation.matrix();
    const Eigen::Vector3d t = refined.direction.normalized();
    const Eigen::Matrix3d twist = 2.0 * t * t.transpose() -
                                  Eigen::Matrix3d::Identity();
    for (const Eigen::Matrix3d& cand_r : {Eigen::Matrix3d(r),
                                          Eigen::Matrix3d(twist * r)}) {
      for (const Eigen::Vector3d& cand_t : {t, Eigen::Vector3d(-t)}) {
        const int front = CountPositiveDepths(pairs, cand_r, cand_t);
        const double cost = refined.residual;
        if (front > best_front || (front == best_front && cost < best_cost)) {
          best_front = front;
          best_cost = cost;
          best.rotation = ProjectToRotation(cand_r);
          best.direction = cand_t;
        }
      }
    }
  }
  const Eigen::Matrix3d e_unit = Skew(best.direction) * best.rotation.matrix();
  double sum = 0.0;
  for (const auto& p : pairs) {
    sum += std::abs(p.f_j.dot(e_unit * p.f_i));
  }
  best.residual = sum / static_cast<double>(pairs.size());
  return best;
}

RelativeMotion EstimateRelativeMotionFromBearings(
    std::span<const BearingPair> six, const RelativeRotationOptions& options) {
  try {
    return EstimateRelativeRotationFromBearings(six, options);
  } catch (const Error& err) {
    if (err.code() != ErrorCode::kNoValidHypothesis) throw;
  }
  return EstimateEssentialMotion(six);
}

namespace {

std::vector<BearingPair> SelectBearings(const CorrespondenceSet& corrs,
                                        const CameraIntrinsics& camera,
                                        const RelativeRotationOptions& options) {
  corrs.Validate();
  GridConfig grid = options.grid;
  grid.image_width = corrs.image_width;
  grid.image_height = corrs.image_height;
  const std::vector<std::size_t> picked =
      SelectRepresentativePoints(corrs, grid, 6);
  std::vector<Correspondence> six;
  six.reserve(picked.size());
  for (std::size_t idx : picked) six.push_back(corrs.matches[idx]);
  return BearingsFromPixels(six, camera);
}

}  // namespace

Eigen::Vector3d EstimateDirectionGivenRotation(
    std::span<const BearingPair> pairs, const Rotation& rotation) {
  RequirePairs(pairs, 2, "EstimateDirectionGivenRotation");
  const Eigen::Matrix3d& r = rotation.matrix();
  const Eigen::Vector3d t = BestDirection(pairs, r);
  return CountPositiveDepths(pairs, r, -t) > CountPositiveDepths(pairs, r, t)
             ? Eigen::Vector3d(-t)
             : t;
}

RelativeMotion EstimateRelativeRotation(const CorrespondenceSet& corrs,
                                        const CameraIntrinsics& camera,
                                        const RelativeRotationOptions& options) {
  const auto six = SelectBearings(corrs, camera, options);
  return EstimateRelativeRotationFromBearings(six, options);
}

RelativeMotion EstimateRelativeMotion(const CorrespondenceSet& corrs,
                                      const CameraIntrinsics& camera,
                                      const RelativeRotationOptions& options) {
  const auto six = SelectBearings(corrs, camera, options);
  return EstimateRelativeMotionFromBearings(six, options);
}

}  // namespace rasl
