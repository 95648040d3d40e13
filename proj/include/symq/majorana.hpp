#pragma once

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "symq/block_diag.hpp"
#include "symq/parallel.hpp"
#include "symq/spin_ops.hpp"
#include "symq/sym_space.hpp"

namespace symq {

// Single-spin ket, amplitudes in descending-m order.
struct Spinor {
  HalfInt j;
  Vec a;
};

// Multiset of unit directions; coincident stars repeat.
struct Constellation {
  std::vector<Vec3> stars;

  std::size_t size() const { return stars.size(); }

  bool has_coincident(double tol = 1e-6) const {
    for (std::size_t i = 0; i < stars.size(); ++i)
      for (std::size_t l = i + 1; l < stars.size(); ++l)
        if (angular_distance(stars[i], stars[l]) < tol) return true;
    return false;
  }

  static double angular_distance(const Vec3& a, const Vec3& b) {
    return std::atan2(a.cross(b).norm(), a.dot(b));
  }
};

inline Constellation rotate_constellation(const Mat3& R, const Constellation& c) {
  Constellation out;
  out.stars.reserve(c.stars.size());
  for (const Vec3& n : c.stars) out.stars.push_back(R * n);
  return out;
}

namespace detail {

// p(zeta) = sum_i (-1)^i sqrt(C(2j,i)) a_i zeta^{2j-i}; returned ascending.
inline Vec majorana_poly(const Vec& a) {
  int n = static_cast<int>(a.size()) - 1;  // = 2j
  Vec q = Vec::Zero(n + 1);
  for (int i = 0; i <= n; ++i) {
    double sign = (i % 2 == 0) ? 1.0 : -1.0;
    q(n - i) = sign * std::sqrt(binomial(n, i)) * a(i);
  }
  return q;
}

inline cd poly_eval(const Vec& q, cd z) {
  cd acc = 0.0;
  for (int i = static_cast<int>(q.size()) - 1; i >= 0; --i) acc = acc * z + q(i);
  return acc;
}

// Roots of an ascending-coefficient polynomial via the companion matrix,
// one Newton step per root.  Exact zeros at the origin are split off first.
inline std::vector<cd> poly_roots(Vec q) {
  double scale = q.cwiseAbs().maxCoeff();
  if (scale == 0.0) throw std::invalid_argument("zero polynomial");
  int hi = static_cast<int>(q.size()) - 1;
  while (hi > 0 && std::abs(q(hi)) < 1e-14 * scale) --hi;
  int lo = 0;
  while (lo < hi && std::abs(q(lo)) < 1e-14 * scale) ++lo;
  std::vector<cd> roots(lo, cd(0.0));  // factors of zeta
  int deg = hi - lo;
  if (deg > 0) {
    Mat comp = Mat::Zero(deg, deg);
    for (int i = 0; i + 1 < deg; ++i) comp(i + 1, i) = 1.0;
    for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -q(lo + i) / q(hi);
    Eigen::ComplexEigenSolver<Mat> es(comp);
    Vec sub = q.segment(lo, deg + 1);
    Vec dsub = Vec::Zero(deg);
    for (int i = 1; i <= deg; ++i) dsub(i - 1) = static_cast<double>(i) * sub(i);
    for (int i = 0; i < deg; ++i) {
      cd z = es.eigenvalues()(i);
      for (int it = 0; it < 2; ++it) {
        cd dp = poly_eval(dsub, z);
        if (std::abs(dp) < 1e-30) break;
        z -= poly_eval(sub, z) / dp;
      }
      roots.push_back(z);
    }
  }
  return roots;  // size = hi; degree deficiency handled by the caller
}

inline Vec3 star_from_root(cd zeta) {
  double theta = 2.0 * std::atan(std::abs(zeta));
  double phi = std::arg(zeta);
  return Vec3(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
              std::cos(theta));
}

}  // namespace detail

inline Constellation majorana_roots(const Spinor& psi) {
  if (psi.a.norm() == 0.0) throw std::invalid_argument("zero spinor has no constellation");
  int n = psi.j.twice();
  Vec q = detail::majorana_poly(psi.a);
  std::vector<cd> roots = detail::poly_roots(q);
  Constellation c;
  for (cd z : roots) c.stars.push_back(detail::star_from_root(z));
  while (static_cast<int>(c.stars.size()) < n) c.stars.emplace_back(0.0, 0.0, -1.0);
  return c;
}

inline Spinor constellation_to_state(const Constellation& c) {
  if (c.stars.empty()) throw std::invalid_argument("empty constellation");
  int n = static_cast<int>(c.stars.size());
  // Projective root (alpha : beta), factor (beta*zeta - alpha); south-pole
  // stars have beta = 0 and drop the degree.
  Vec q = Vec::Zero(n + 1);
  q(0) = 1.0;
  int deg = 0;
  for (const Vec3& star : c.stars) {
    double theta = std::acos(std::clamp(star.z(), -1.0, 1.0));
    double phi = std::atan2(star.y(), star.x());
    cd alpha = std::sin(theta / 2.0) * std::exp(cd(0.0, phi));
    cd beta = std::cos(theta / 2.0);
    for (int t = deg + 1; t >= 1; --t) q(t) = beta * q(t - 1) - alpha * q(t);
    q(0) *= -alpha;
    ++deg;
  }
  Vec a = Vec::Zero(n + 1);
  for (int i = 0; i <= n; ++i) {
    double sign = (i % 2 == 0) ? 1.0 : -1.0;
    a(i) = sign * q(n - i) / std::sqrt(detail::binomial(n, i));
  }
  a.normalize();
  for (int i = 0; i <= n; ++i) {
    if (std::abs(a(i)) > 1e-12) {
      a *= std::conj(a(i)) / std::abs(a(i));
      break;
    }
  }
  return Spinor{HalfInt::from_twice(n), a};
}

inline Vec3 spin_expectation(const Spinor& psi) {
  const Vec& a = psi.a;
  double nrm2 = a.squaredNorm();
  return Vec3(std::real(a.dot(spin_x(psi.j) * a)), std::real(a.dot(spin_y(psi.j) * a)),
              std::real(a.dot(spin_z(psi.j) * a))) /
         nrm2;
}

// Coefficients of rho = sum c_{lm} T_{lm}; rows[l] holds m = l..-l.
struct MultipoleCoeffs {
  int twice_j = 0;
  std::vector<Vec> rows;

  cd at(int l, int m) const { return rows[l](l - m); }

  double norm() const {
    double s = 0.0;
    for (const Vec& r : rows) s += r.squaredNorm();
    return std::sqrt(s);
  }
};

inline MultipoleCoeffs multipole_coeffs(HalfInt j, const Mat& rho) {
  MultipoleCoeffs out;
  out.twice_j = j.twice();
  for (int l = 0; l <= j.twice(); ++l) {
    Vec row(2 * l + 1);
    for (int m = l; m >= -l; --m)
      row(l - m) = (tensor_operator(j, l, m).adjoint() * rho).trace();
    out.rows.push_back(row);
  }
  return out;
}

inline Mat multipole_reconstruct(HalfInt j, const MultipoleCoeffs& c) {
  int d = j.multiplet_dim();
  Mat rho = Mat::Zero(d, d);
  for (int l = 0; l <= j.twice(); ++l)
    for (int m = l; m >= -l; --m) rho += c.at(l, m) * tensor_operator(j, l, m);
  return rho;
}

inline Constellation principal_constellation(const SymState& state,
                                             const BlockDiagonalizer& bd) {
  SymState blk = to_basis(state, Basis::block, &bd);
  Vec top = bd.block_component(blk.amp, 0);
  HalfInt jtop = HalfInt::from_twice(bd.layout[0].twice_j);
  return majorana_roots(Spinor{jtop, top});
}

// Minimum-total-weight bipartite matching (Hungarian, O(n^3)); returns
// row-to-column assignment.
inline std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost) {
  int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = -1;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

// Largest angular mismatch under the optimal star pairing; infinity on
// cardinality mismatch.
inline double constellation_distance(const Constellation& a, const Constellation& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  if (a.size() == 0) return 0.0;
  int n = static_cast<int>(a.size());
  Eigen::MatrixXd cost(n, n);
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < n; ++l)
      cost(i, l) = Constellation::angular_distance(a.stars[i], b.stars[l]);
  std::vector<int> match = min_cost_assignment(cost);
  double worst = 0.0;
  for (int i = 0; i < n; ++i) worst = std::max(worst, cost(i, match[i]));
  return worst;
}

struct VeeFactorization {
  bool factorizable = false;
  bool degenerate_constellation = false;
  std::vector<Spinor> factors;
};

namespace detail {

// Unordered partitions of {0..n-1} into k groups of size g: the smallest
// unassigned index anchors each new group, so every partition appears once.
inline void enumerate_partitions(int n, int g, std::vector<int>& assigned,
                                 std::vector<std::vector<int>>& groups,
                                 std::vector<std::vector<int>>& out,
                                 std::size_t cap) {
  if (out.size() > cap) throw std::runtime_error("partition search too large");
  int first = -1;
  for (int i = 0; i < n; ++i)
    if (!assigned[i]) {
      first = i;
      break;
    }
  if (first < 0) {
    std::vector<int> flat;
    for (const std::vector<int>& grp : groups) flat.insert(flat.end(), grp.begin(), grp.end());
    out.push_back(flat);
    return;
  }
  groups.emplace_back();
  groups.back().push_back(first);
  assigned[first] = 1;
  std::vector<int> pool;
  for (int i = first + 1; i < n; ++i)
    if (!assigned[i]) pool.push_back(i);
  std::vector<int> choice(g - 1);
  std::function<void(int, int)> pick = [&](int start, int need) {
    if (need == 0) {
      for (int idx : choice) {
        groups.back().push_back(idx);
        assigned[idx] = 1;
      }
      enumerate_partitions(n, g, assigned, groups, out, cap);
      for (int idx : choice) {
        groups.back().pop_back();
        assigned[idx] = 0;
      }
      return;
    }
    for (int t = start; t <= static_cast<int>(pool.size()) - need; ++t) {
      choice[g - 1 - need] = pool[t];
      pick(t + 1, need - 1);
    }
  };
  if (g == 1)
    enumerate_partitions(n, g, assigned, groups, out, cap);
  else
    pick(0, g - 1);
  assigned[first] = 0;
  groups.pop_back();
}

}  // namespace detail

// Searches all partitions of the principal constellation into k groups of
// 2s stars; first matching partition by enumeration index wins.
inline VeeFactorization vee_factorize(const SymState& state, const BlockDiagonalizer& bd) {
  VeeFactorization result;
  int twice_s = state.s.twice(), k = state.k;
  SymState blk = to_basis(state, Basis::block, &bd);
  Vec top = bd.block_component(blk.amp, 0);
  if (top.norm() < 1e-12 * blk.amp.norm()) return result;  // principal spinor vanishes

  Constellation principal =
      majorana_roots(Spinor{HalfInt::from_twice(bd.layout[0].twice_j), top});
  // Repeated roots split numerically like eps^(1/multiplicity), so exact
  // coincidence tolerance would miss them; 1e-2 catches splittings up to
  // roughly tenfold roots while generic constellations stay well clear.
  result.degenerate_constellation = principal.has_coincident(1e-2);

  int n = static_cast<int>(principal.size());
  std::vector<std::vector<int>> partitions;
  {
    std::vector<int> assigned(n, 0);
    std::vector<std::vector<int>> groups;
    detail::enumerate_partitions(n, twice_s, assigned, groups, partitions, 4000000);
  }

  SymState in_std = to_basis(state, Basis::standard, &bd);
  double in_norm2 = in_std.amp.squaredNorm();
  std::atomic<std::size_t> best{partitions.size()};

  auto try_partition = [&](std::size_t pi) -> cd {
    std::vector<Vec> factors(k);
    for (int grp = 0; grp < k; ++grp) {
      Constellation sub;
      for (int t = 0; t < twice_s; ++t)
        sub.stars.push_back(principal.stars[partitions[pi][grp * twice_s + t]]);
      factors[grp] = constellation_to_state(sub).a;
    }
    SymState cand = vee_product(state.s, factors);
    cd ov = cand.amp.dot(in_std.amp);  // conjugates cand
    double fid = std::norm(ov) / (cand.amp.squaredNorm() * in_norm2);
    return (fid > 1.0 - 1e-9) ? ov / cand.amp.squaredNorm() : cd(0.0);
  };

  parallel_ranges(partitions.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t pi = b; pi < e; ++pi) {
      if (pi >= best.load(std::memory_order_relaxed)) break;
      if (try_partition(pi) != cd(0.0)) {
        std::size_t cur = best.load(std::memory_order_relaxed);
        while (pi < cur && !best.compare_exchange_weak(cur, pi)) {
        }
      }
    }
  });

  std::size_t found = best.load();
  if (found == partitions.size()) return result;
  cd scale = try_partition(found);
  result.factorizable = true;
  for (int grp = 0; grp < k; ++grp) {
    Constellation sub;
    for (int t = 0; t < twice_s; ++t)
      sub.stars.push_back(principal.stars[partitions[found][grp * twice_s + t]]);
    Spinor f = constellation_to_state(sub);
    if (grp == 0) f.a *= scale;
    result.factors.push_back(f);
  }
  return result;
}

// A_t = ((t+1)/t) (1 - Tr rho_t^2) for the t-party reduced state.
inline double t_anticoherence(const SymState& state, int t) {
  if (t < 1 || t >= state.k) throw std::invalid_argument("need 1 <= t < k");
  Mat rho = reduced_density(state, t);
  double purity = std::real((rho * rho).trace());
  return (t + 1.0) / t * (1.0 - purity);
}

// Single spinor via its realization as 2j symmetrized qubits (amplitudes
// carry over verbatim in the standard basis).
inline double t_anticoherence(const Spinor& psi, int t) {
  SymState qubits{HalfInt::from_twice(1), psi.j.twice(), Basis::standard, psi.a};
  return t_anticoherence(qubits, t);
}

}  // namespace symq
