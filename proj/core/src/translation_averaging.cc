#include "rasl/translation_averaging.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <utility>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "rasl/error.h"

namespace rasl {
namespace {

Eigen::VectorXd SoftThreshold(const Eigen::VectorXd& v, double t) {
  return v.unaryExpr([t](double a) {
    if (a > t) return a - t;
    if (a < -t) return a + t;
    return 0.0;
  });
}

// Minimizer of y^T D y - 2 c^T y on |y| = 1 in the eigenbasis of H
// (d ascending). `prev` breaks the tie in the hard case.
Eigen::VectorXd SphereQuadraticMin(const Eigen::VectorXd& d,
                                   const Eigen::VectorXd& c,
                                   const Eigen::VectorXd& prev) {
  const Eigen::Index n = d.size();
  const double c_norm = c.norm();
  const double scale = std::max(1.0, d.cwiseAbs().maxCoeff());
  Eigen::Index g = 0;  // size of the bottom eigenspace
  while (g < n && d(g) - d(0) <= 1e-12 * scale) ++g;
  const double c_bottom = c.head(g).norm();

  auto y_of = [&](const Eigen::VectorXd& cc, double mu) {
    Eigen::VectorXd y(n);
    for (Eigen::Index k = 0; k < n; ++k) y(k) = cc(k) / (d(k) - mu);
    return y;
  };
  auto bisect = [&](const Eigen::VectorXd& cc, double lo, double hi) {
    // |y(mu)| increases with mu on (-inf, d0); find |y| = 1.
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (y_of(cc, mid).squaredNorm() > 1.0) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    return 0.5 * (lo + hi);
  };

  if (c_bottom > 1e-13 * std::max(1.0, c_norm)) {
    const double mu = bisect(c, d(0) - c_norm, d(0) - c_bottom);
    return y_of(c, mu).normalized();
  }

  // Hard case: no pull along the bottom eigenspace.
  Eigen::VectorXd rest = Eigen::VectorXd::Zero(n);
  for (Eigen::Index k = g; k < n; ++k) rest(k) = c(k) / (d(k) - d(0));
  const double rest_norm = rest.norm();
  if (rest_norm > 1.0) {
    Eigen::VectorXd c_top = c;
    c_top.head(g).setZero();
    const double mu = bisect(c_top, d(0) - c_norm, d(0));
    return y_of(c_top, mu).normalized();
  }
  Eigen::VectorXd fill = Eigen::VectorXd::Zero(n);
  fill.head(g) = prev.head(g);
  if (fill.norm() < 1e-12) {
    fill(0) = 1.0;
  }
  fill.normalize();
  Eigen::VectorXd y =
      rest + std::sqrt(std::max(0.0, 1.0 - rest_norm * rest_norm)) * fill;
  return y.normalized();
}


// Exchange pivots on min |By|_1 subject to c^T y = 1, starting from the
// vertex where the dim - 1 rows in `zero_rows` vanish. Each pivot frees the
// zero row with the most negative directional derivative and follows the
// edge to the breakpoint where the slope turns non-negative.
bool PlaneVertexDescent(const Eigen::MatrixXd& b, const Eigen::VectorXd& c,
                        std::vector<Eigen::Index>* zero_rows,
                        Eigen::VectorXd* y) {
  const Eigen::Index dim = b.cols();
  const Eigen::Index rows = b.rows();
  const Eigen::Index nz = dim - 1;
  std::vector<Eigen::Index>& z = *zero_rows;
  std::vector<bool> in_z(rows, false);
  Eigen::MatrixXd m(dim, dim);
  for (Eigen::Index r = 0; r < nz; ++r) {
    m.row(r) = b.row(z[r]);
    in_z[z[r]] = true;
  }
  m.row(nz) = c.transpose();

  std::vector<std::pair<double, Eigen::Index>> breaks;
  Eigen::MatrixXd minv;
  for (Eigen::Index pivot = 0; pivot < 4 * dim; ++pivot) {
    // Row swaps update the inverse in O(dim^2); refactor now and then.
    if (pivot % 32 == 0) {
      const Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
      if (!(lu.rcond() > 1e-12)) return false;
      minv = lu.inverse();
    }
    const Eigen::VectorXd vertex = minv.col(nz);
    const Eigen::VectorXd bv = b * vertex;
    Eigen::VectorXd g = Eigen::VectorXd::Zero(dim);
    for (Eigen::Index k = 0; k < rows; ++k) {
      if (in_z[k] || bv(k) == 0.0) continue;
      g += (bv(k) > 0.0 ? 1.0 : -1.0) * b.row(k).transpose();
    }
    // rho_r: derivative of the off-Z terms along the edge with b_r d = 1.
    const Eigen::VectorXd rho = minv.leftCols(nz).transpose() * g;
    Eigen::Index leave = 0;
    const double best = rho.cwiseAbs().maxCoeff(&leave);
    if (best <= 1.0 + 1e-12) {
      *y = vertex;
      return true;
    }
    const Eigen::VectorXd d = (rho(leave) > 0.0 ? -1.0 : 1.0) * minv.col(leave);
    const Eigen::VectorXd bd = b * d;
    double slope = 1.0 - best;
    breaks.clear();
    for (Eigen::Index k = 0; k < rows; ++k) {
      if (in_z[k] || bd(k) == 0.0) continue;
      if (bv(k) == 0.0) {
        slope += std::abs(bd(k));
      } else if (bv(k) * bd(k) < 0.0) {
        breaks.emplace_back(-bv(k) / bd(k), k);
      }
    }
    std::sort(breaks.begin(), breaks.end());
    Eigen::Index enter = -1;
    for (const auto& [t, k] : breaks) {
      slope += 2.0 * std::abs(bd(k));
      if (slope >= 0.0) {
        enter = k;
        break;
      }
    }
    if (enter < 0) return false;
    const Eigen::RowVectorXd u = b.row(enter) - m.row(leave);
    const Eigen::RowVectorXd u_minv = u * minv;
    const double denom = 1.0 + u_minv(leave);
    if (std::abs(denom) < 1e-12) return false;
    const Eigen::VectorXd col = minv.col(leave);
    minv.noalias() -= (col / denom) * u_minv;
    in_z[z[leave]] = false;
    in_z[enter] = true;
    z[leave] = enter;
    m.row(leave) = b.row(enter);
  }
  return false;
}

// Local optimality of the unit vertex y_p of |By|_1 on the sphere: a
// multiplier with lambda = sign(By) off Z and |lambda_Z| <= 1 makes B^T lambda
// parallel to y_p.
bool SphereKkt(const Eigen::MatrixXd& b, const Eigen::VectorXd& y_p,
               const std::vector<Eigen::Index>& zero_rows,
               Eigen::VectorXd* lambda) {
  const Eigen::Index dim = b.cols();
  const Eigen::Index rows = b.rows();
  const Eigen::Index nz = static_cast<Eigen::Index>(zero_rows.size());
  const Eigen::VectorXd by = b * y_p;
  Eigen::VectorXd lam = Eigen::VectorXd::Zero(rows);
  std::vector<bool> in_z(rows, false);
  for (Eigen::Index k : zero_rows) in_z[k] = true;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
  for (Eigen::Index k = 0; k < rows; ++k) {
    if (in_z[k]) continue;
    lam(k) = by(k) >= 0.0 ? 1.0 : -1.0;
    rhs -= lam(k) * b.row(k).transpose();
  }
  // [B_Z^T, -y] [lambda_Z; mu] = -B_N^T sign.
  Eigen::MatrixXd kkt(dim, nz + 1);
  for (Eigen::Index r = 0; r < nz; ++r) kkt.col(r) = b.row(zero_rows[r]).transpose();
  kkt.col(nz) = -y_p;
  const Eigen::VectorXd sol = kkt.colPivHouseholderQr().solve(rhs);
  if ((kkt * sol - rhs).norm() > 1e-8 * std::max(1.0, rhs.norm())) {
    return false;
  }
  if (sol.head(nz).lpNorm<Eigen::Infinity>() > 1.0 + 1e-9) return false;
  for (Eigen::Index r = 0; r < nz; ++r) {
    lam(zero_rows[r]) = std::clamp(sol(r), -1.0, 1.0);
  }
  *lambda = lam;
  return true;
}

// Vertex polish for AdmmSolve. Local minima of |By|_1 on the unit sphere sit
// at points where dim - 1 independent rows vanish (on a larger face the
// objective is linear and has no interior minimum on the sphere). The start
// vertex takes rows the slack has zeroed, then the smallest residuals; exchange
// pivots on the tangent-plane problem at the current point then find the
// vertex, repeated with the plane moved to the new point until the sphere
// optimality conditions hold. Accepted only if the objective does not rise.
bool TryPolish(const Eigen::SparseMatrix<double>& a, const Eigen::MatrixXd& b,
               const Eigen::MatrixXd& basis, Eigen::VectorXd* y,
               Eigen::VectorXd* x, Eigen::VectorXd* ax, Eigen::VectorXd* e,
               Eigen::VectorXd* lambda) {
  const Eigen::Index dim = b.cols();
  const Eigen::Index rows = b.rows();
  if (dim < 2 || rows < dim - 1) return false;
  const Eigen::VectorXd by_now = b * *y;
  std::vector<Eigen::Index> order(rows);
  for (Eigen::Index k = 0; k < rows; ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index p, Eigen::Index q) {
    const bool zp = (*e)(p) == 0.0;
    const bool zq = (*e)(q) == 0.0;
    if (zp != zq) return zp;
    return std::abs(by_now(p)) < std::abs(by_now(q));
  });

  // Greedy Gram-Schmidt over rows in that order.
  Eigen::MatrixXd span(dim, dim - 1);
  std::vector<Eigen::Index> zero_rows;
  for (Eigen::Index k : order) {
    if (static_cast<Eigen::Index>(zero_rows.size()) == dim - 1) break;
    Eigen::VectorXd r = b.row(k).transpose();
    const double norm0 = r.norm();
    if (norm0 == 0.0) continue;
    const Eigen::Index m = static_cast<Eigen::Index>(zero_rows.size());
    for (int pass = 0; pass < 2; ++pass) {
      r -= span.leftCols(m) * (span.leftCols(m).transpose() * r);
    }
    if (r.norm() < 1e-3 * norm0) continue;  // skip ill-conditioned rows
    span.col(m) = r.normalized();
    zero_rows.push_back(k);
  }
  if (static_cast<Eigen::Index>(zero_rows.size()) != dim - 1) return false;

  Eigen::VectorXd plane = *y;
  for (int round = 0; round < 4; ++round) {
    Eigen::VectorXd vertex;
    if (!PlaneVertexDescent(b, plane, &zero_rows, &vertex)) return false;
    const Eigen::VectorXd y_p = vertex.normalized();
    Eigen::VectorXd lam;
    if (SphereKkt(b, y_p, zero_rows, &lam)) {
      if ((b * y_p).lpNorm<1>() > by_now.lpNorm<1>() + 1e-12) return false;
      *y = y_p;
      *x = basis * y_p;
      *x /= x->norm();
      *ax = a * *x;
      *e = *ax;
      for (Eigen::Index k : zero_rows) (*e)(k) = 0.0;
      *lambda = lam;
      return true;
    }
    plane = y_p;
  }
  return false;
}

// Vertex of min |Ax - b|_1: exact fit of n independent best-fitting rows,
// accepted when it does not raise the objective and a multiplier with
// A^T lambda = 0, lambda = sign(r) off the fitted rows, |lambda| <= 1 on them
// exists.
bool TryPolishLad(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                  Eigen::VectorXd* x, Eigen::VectorXd* lambda) {
  const Eigen::Index n = a.cols();
  const Eigen::Index rows = a.rows();
  const Eigen::VectorXd r_now = a * *x - b;
  std::vector<Eigen::Index> order(rows);
  for (Eigen::Index k = 0; k < rows; ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](Eigen::Index p, Eigen::Index q) {
    return std::abs(r_now(p)) < std::abs(r_now(q));
  });
  Eigen::MatrixXd span(n, n);
  std::vector<Eigen::Index> fit;
  for (Eigen::Index k : order) {
    if (static_cast<Eigen::Index>(fit.size()) == n) break;
    Eigen::VectorXd r = a.row(k).transpose();
    const double norm0 = r.norm();
    if (norm0 == 0.0) continue;
    const Eigen::Index m = static_cast<Eigen::Index>(fit.size());
    for (int pass = 0; pass < 2; ++pass) {
      r -= span.leftCols(m) * (span.leftCols(m).transpose() * r);
    }
    if (r.norm() < 1e-3 * norm0) continue;
    span.col(m) = r.normalized();
    fit.push_back(k);
  }
  if (static_cast<Eigen::Index>(fit.size()) != n) return false;

  Eigen::MatrixXd a_z(n, n);
  Eigen::VectorXd b_z(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    a_z.row(k) = a.row(fit[k]);
    b_z(k) = b(fit[k]);
  }
  const auto qr = a_z.colPivHouseholderQr();
  const Eigen::VectorXd x_p = qr.solve(b_z);
  const Eigen::VectorXd r = a * x_p - b;
  if (r.lpNorm<1>() > r_now.lpNorm<1>() + 1e-12 * std::max(1.0, b.lpNorm<1>())) {
    return false;
  }

  std::vector<bool> in_z(rows, false);
  for (Eigen::Index k : fit) in_z[k] = true;
  Eigen::VectorXd lam = Eigen::VectorXd::Zero(rows);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (Eigen::Index k = 0; k < rows; ++k) {
    if (in_z[k]) continue;
    lam(k) = r(k) >= 0.0 ? 1.0 : -1.0;
    rhs -= lam(k) * a.row(k).transpose();
  }
  const Eigen::VectorXd lam_z = a_z.transpose().colPivHouseholderQr().solve(rhs);
  if ((a_z.transpose() * lam_z - rhs).norm() > 1e-8 * std::max(1.0, rhs.norm())) {
    return false;
  }
  if (lam_z.lpNorm<Eigen::Infinity>() > 1.0 + 1e-9) return false;
  for (Eigen::Index k = 0; k < n; ++k) lam(fit[k]) = lam_z(k);
  *x = x_p;
  *lambda = lam;
  return true;
}

}  // namespace

ScalePair SolvePairScales(const Rotation& r_i, const Rotation& r_j,
                          const Eigen::Vector3d& dir_ij,
                          const Eigen::Vector3d& ray_i,
                          const Eigen::Vector3d& ray_j) {
  const Eigen::Vector3d base = r_i.matrix().transpose() * dir_ij.normalized();
  const Eigen::Vector3d u = r_i.matrix().transpose() * ray_i.normalized();
  const Eigen::Vector3d v = r_j.matrix().transpose() * ray_j.normalized();
  if (u.cross(v).norm() < 1e-10) {
    throw Error(ErrorCode::kParallelDirections,
                "rays from the two cameras are parallel");
  }
  // s_i u - s_j v = base in the least-squares sense.
  Eigen::Matrix<double, 3, 2> m;
  m.col(0) = u;
  m.col(1) = -v;
  const Eigen::Vector2d s = (m.transpose() * m).ldlt().solve(m.transpose() * base);
  if (!(s(0) > 0.0) || !(s(1) > 0.0)) {
    throw Error(ErrorCode::kDegenerateConfiguration,
                "rays meet behind a camera");
  }
  return {s(0), s(1)};
}

double PairScaleResidual(const Rotation& r_i, const Rotation& r_j,
                         const Eigen::Vector3d& dir_ij,
                         const Eigen::Vector3d& ray_i,
                         const Eigen::Vector3d& ray_j, const ScalePair& s) {
  const Eigen::Vector3d base = r_i.matrix().transpose() * dir_ij.normalized();
  const Eigen::Vector3d u = r_i.matrix().transpose() * ray_i.normalized();
  const Eigen::Vector3d v = r_j.matrix().transpose() * ray_j.normalized();
  return (s.s_i * u - base - s.s_j * v).norm();
}

std::vector<PairConstraint> BuildPairConstraints(
    const std::vector<Rotation>& rotations,
    const std::vector<DirectionEdge>& edges, ConstraintBuildStats* stats) {
  const int n = static_cast<int>(rotations.size());
  // World direction from a to b for every measured (unordered) pair.
  std::map<std::pair<int, int>, Eigen::Vector3d> world;
  std::vector<std::set<int>> adj(n);
  for (const DirectionEdge& e : edges) {
    if (e.i < 0 || e.j < 0 || e.i >= n || e.j >= n || e.i == e.j) {
      throw Error(ErrorCode::kInvalidArgument, "direction edge out of range");
    }
    const Eigen::Vector3d u =
        rotations[e.i].matrix().transpose() * e.direction.normalized();
    world[{e.i, e.j}] = u;
    world[{e.j, e.i}] = -u;
    adj[e.i].insert(e.j);
    adj[e.j].insert(e.i);
  }

  ConstraintBuildStats local;
  std::vector<PairConstraint> out;
  // Local frames are irrelevant once directions are in the world frame, so
  // the scale solve runs with identity rotations.
  const Rotation id;
  auto add = [&](int a, int b, int c) {
    const Eigen::Vector3d& u_ab = world.at({a, b});
    const Eigen::Vector3d& u_ac = world.at({a, c});
    const Eigen::Vector3d& u_bc = world.at({b, c});
    try {
      const ScalePair s = SolvePairScales(id, id, u_ab, u_ac, u_bc);
      PairConstraint pc;
      pc.i = a;
      pc.j = b;
      pc.k = c;
      pc.a_i = s.s_i * u_ac * u_ab.transpose();
      pc.a_j = -s.s_j * u_bc * u_ab.transpose();
      out.push_back(pc);
    } catch (const Error&) {
      ++local.skipped_blocks;
    }
  };
  for (int i = 0; i < n; ++i) {
    for (int j : adj[i]) {
      if (j <= i) continue;
      for (int k : adj[j]) {
        if (k <= j || !adj[i].count(k)) continue;
        ++local.triangles;
        add(i, j, k);
        add(i, k, j);
        add(j, k, i);
      }
    }
  }
  if (stats) *stats = local;
  return out;
}

Eigen::SparseMatrix<double> BuildConstraintMatrix(
    const std::vector<PairConstraint>& constraints, int num_cameras) {
  const int rows = 3 * static_cast<int>(constraints.size());
  const int cols = 3 * num_cameras;
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(constraints.size() * 27);
  for (std::size_t n = 0; n < constraints.size(); ++n) {
    const PairConstraint& pc = constraints[n];
    const int r0 = 3 * static_cast<int>(n);
    // (A_j - A_i)(c_i - c_j) + c_i + c_j - 2 c_k
    const Eigen::Matrix3d d = pc.a_j - pc.a_i;
    const Eigen::Matrix3d blk_i = d + Eigen::Matrix3d::Identity();
    const Eigen::Matrix3d blk_j = -d + Eigen::Matrix3d::Identity();
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        if (blk_i(r, c) != 0.0) {
          triplets.emplace_back(r0 + r, 3 * pc.i + c, blk_i(r, c));
        }
        if (blk_j(r, c) != 0.0) {
          triplets.emplace_back(r0 + r, 3 * pc.j + c, blk_j(r, c));
        }
      }
      triplets.emplace_back(r0 + r, 3 * pc.k + r, -2.0);
    }
  }
  Eigen::SparseMatrix<double> a(rows, cols);
  a.setFromTriplets(triplets.begin(), triplets.end());
  const int needed = std::max(0, cols - 4);
  if (rows == 0 || NumericalRank(a) < needed) {
    throw Error(ErrorCode::kInsufficientConstraints,
                "constraint rank below 3m-4 for " +
                    std::to_string(num_cameras) + " cameras");
  }
  return a;
}

int NumericalRank(const Eigen::SparseMatrix<double>& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0;
  const Eigen::MatrixXd dense(a);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(dense);
  qr.setThreshold(1e-10);
  return static_cast<int>(qr.rank());
}

Eigen::MatrixXd ZeroMeanBasis(int num_cameras) {
  const int n = 3 * num_cameras;
  Eigen::MatrixXd shifts = Eigen::MatrixXd::Zero(n, 3);
  for (int v = 0; v < num_cameras; ++v) {
    shifts.block<3, 3>(3 * v, 0).setIdentity();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(shifts);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  return q.rightCols(n - 3);
}

AdmmResult AdmmSolve(TranslationSystem& system, const Eigen::MatrixXd& basis,
                     const AdmmOptions& options) {
  const Eigen::SparseMatrix<double>& a = system.a;
  if (basis.rows() != a.cols() || basis.cols() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "ADMM: basis size mismatch");
  }
  if (!(options.beta > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "ADMM: beta must be positive");
  }
  double beta = options.beta;

  const Eigen::MatrixXd b = a * basis;
  const Eigen::MatrixXd h = b.transpose() * b;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
  const Eigen::VectorXd& d = eig.eigenvalues();
  const Eigen::MatrixXd& v = eig.eigenvectors();

  Eigen::VectorXd y;
  if (system.x.size() == a.cols() &&
      std::abs(system.x.norm() - 1.0) < 1e-9) {
    y = (basis.transpose() * system.x).normalized();
  } else {
    y = v.col(0);
  }
  Eigen::VectorXd x = (basis * y).normalized();
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(a.rows());
  Eigen::VectorXd e = Eigen::VectorXd::Zero(a.rows());

  AdmmResult result;
  result.max_norm_deviation = std::abs(x.norm() - 1.0);
  result.initial_objective = (a * x).lpNorm<1>();
  double best_objective = result.initial_objective;
  Eigen::VectorXd best_x = x;
  Eigen::VectorXd best_e = e;
  Eigen::VectorXd best_lambda = lambda;

  double last_checkpoint = std::numeric_limits<double>::infinity();
  // c = (B V)^T g is all the x-step needs from the data.
  const Eigen::MatrixXd bv = b * v;
  Eigen::VectorXd ax = a * x;
  // beta is relative to the mean initial row residual so that the e-step
  // threshold 1/beta tracks the noise level of the data.
  if (options.relative_beta && a.rows() > 0) {
    const double mean_residual = ax.lpNorm<1>() / static_cast<double>(a.rows());
    if (mean_residual > 1e-12) beta /= mean_residual;
  }
  for (int iter = 0; iter < options.max_iters; ++iter) {
    e = SoftThreshold(ax + lambda / beta, 1.0 / beta);
    const Eigen::VectorXd g = e - lambda / beta;
    const Eigen::VectorXd c = bv.transpose() * g;
    const Eigen::VectorXd y_eig = SphereQuadraticMin(d, c, v.transpose() * y);
    y = v * y_eig;
    Eigen::VectorXd x_new = basis * y;
    x_new /= x_new.norm();
    result.max_norm_deviation =
        std::max(result.max_norm_deviation, std::abs(x_new.norm() - 1.0));

    ax = a * x_new;
    const Eigen::VectorXd r = ax - e;
    lambda += beta * r;
    result.primal_residual = r.size() ? r.lpNorm<Eigen::Infinity>() : 0.0;
    result.dual_residual = (x_new - x).lpNorm<Eigen::Infinity>();
    x = x_new;
    result.iterations = iter + 1;

    const double objective = ax.lpNorm<1>();
    if (objective < best_objective) {
      best_objective = objective;
      best_x = x;
      best_e = e;
      best_lambda = lambda;
    }
    if (result.primal_residual < options.primal_tol &&
        result.dual_residual < options.dual_tol) {
      result.converged = true;
      break;
    }

    // ADMM only approaches a vertex linearly; once progress stalls, try to
    // snap to it (see TryPolish).
    const double objective_now = ax.lpNorm<1>();
    if (options.polish && iter % 10 == 9) {
      if ((iter >= 49 || last_checkpoint - objective_now <= 1e-6 * last_checkpoint) &&
          TryPolish(a, b, basis, &y, &x, &ax, &e, &lambda)) {
        ++result.polish_steps;
      }
      last_checkpoint = objective_now;
    }
  }
  system.beta = beta;

  if (!result.converged) {
    x = best_x;
    e = best_e;
    lambda = best_lambda;
  }
  system.x = x;
  system.e = e;
  system.lambda = lambda;
  result.final_objective = (a * x).lpNorm<1>();
  return result;
}

AdmmResult AdmmSolve(TranslationSystem& system, const AdmmOptions& options) {
  return AdmmSolve(system,
                   Eigen::MatrixXd::Identity(system.a.cols(), system.a.cols()),
                   options);
}

TranslationAveragingResult TranslationAveraging(
    const std::vector<Rotation>& rotations,
    const std::vector<DirectionEdge>& edges, const AdmmOptions& options) {
  const int m = static_cast<int>(rotations.size());
  if (m < 3) {
    throw Error(ErrorCode::kInsufficientConstraints,
                "translation averaging needs at least three cameras");
  }
  TranslationAveragingResult result;
  const std::vector<PairConstraint> constraints =
      BuildPairConstraints(rotations, edges, &result.stats);
  TranslationSystem system;
  system.a = BuildConstraintMatrix(constraints, m);
  result.rows = static_cast<int>(system.a.rows());
  result.admm = AdmmSolve(system, ZeroMeanBasis(m), options);

  Eigen::VectorXd x = system.x;
  double agreement = 0.0;
  for (const DirectionEdge& e : edges) {
    const Eigen::Vector3d u =
        rotations[e.i].matrix().transpose() * e.direction.normalized();
    agreement += u.dot(x.segment<3>(3 * e.j) - x.segment<3>(3 * e.i));
  }
  if (agreement < 0.0) x = -x;
  result.positions.resize(m);
  for (int v = 0; v < m; ++v) result.positions[v] = x.segment<3>(3 * v);
  return result;
}

AdmmResult L1Solve(const Eigen::SparseMatrix<double>& a,
                   const Eigen::VectorXd& b, Eigen::VectorXd* x,
                   const AdmmOptions& options) {
  if (a.rows() != b.size() || a.cols() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "L1Solve: size mismatch");
  }
  const Eigen::SparseMatrix<double> ata = a.transpose() * a;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(ata);
  if (ldlt.info() != Eigen::Success ||
      ldlt.vectorD().minCoeff() <= 1e-12 * ldlt.vectorD().maxCoeff()) {
    throw Error(ErrorCode::kInsufficientConstraints,
                "L1Solve: rank-deficient system");
  }
  const Eigen::MatrixXd dense = Eigen::MatrixXd(a);
  Eigen::VectorXd sol = ldlt.solve(a.transpose() * b);
  Eigen::VectorXd r = a * sol - b;

  AdmmResult result;
  result.initial_objective = r.lpNorm<1>();
  const double mean_residual = r.cwiseAbs().mean();
  double beta = options.beta;
  if (options.relative_beta && mean_residual > 0.0) beta /= mean_residual;

  Eigen::VectorXd e = r;
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(a.rows());
  double checkpoint = result.initial_objective;
  if (mean_residual <= 1e-15 * std::max(1.0, b.cwiseAbs().mean())) {
    result.converged = true;
  }
  for (int iter = 0; !result.converged && iter < options.max_iters; ++iter) {
    result.iterations = iter + 1;
    e = SoftThreshold(r + lambda / beta, 1.0 / beta);
    const Eigen::VectorXd prev = sol;
    sol = ldlt.solve(a.transpose() * (b + e - lambda / beta));
    r = a * sol - b;
    lambda += beta * (r - e);
    result.primal_residual = (r - e).lpNorm<Eigen::Infinity>();
    result.dual_residual = (sol - prev).lpNorm<Eigen::Infinity>();
    if (result.primal_residual < options.primal_tol &&
        result.dual_residual < options.dual_tol) {
      result.converged = true;
      break;
    }
    if (options.polish && iter % 10 == 9) {
      const double objective = r.lpNorm<1>();
      if (checkpoint - objective <= 1e-6 * checkpoint &&
          TryPolishLad(dense, b, &sol, &lambda)) {
        ++result.polish_steps;
        r = a * sol - b;
        e = r;
        result.primal_residual = 0.0;
        result.dual_residual = 0.0;
        result.converged = true;
        break;
      }
      checkpoint = objective;
    }
  }
  result.final_objective = r.lpNorm<1>();
  *x = sol;
  return result;
}

}  // namespace rasl
