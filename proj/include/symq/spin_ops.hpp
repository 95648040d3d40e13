#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "symq/half_int.hpp"

namespace symq {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

constexpr double pi = 3.14159265358979323846;

namespace detail {

// Factorials up to 200! in long double; plenty for the j-range supported here.
inline long double factorial(int n) {
  static std::vector<long double> table = [] {
    std::vector<long double> t(201);
    t[0] = 1.0L;
    for (int i = 1; i <= 200; ++i) t[i] = t[i - 1] * i;
    return t;
  }();
  if (n < 0) throw std::domain_error("factorial of negative integer");
  if (n > 200) throw std::domain_error("factorial table exhausted");
  return table[static_cast<std::size_t>(n)];
}

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  return static_cast<double>(factorial(n) / (factorial(k) * factorial(n - k)));
}

}  // namespace detail

// Spin matrices in the m-descending basis: row/column 0 is |j, j>,
// row/column 2j is |j, -j>.  Condon-Shortley phases (real S_x, ladder
// coefficients positive).
inline Mat spin_z(HalfInt j) {
  int d = j.multiplet_dim();
  Mat Sz = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i) Sz(i, i) = j.value() - i;
  return Sz;
}

inline Mat spin_plus(HalfInt j) {
  int d = j.multiplet_dim();
  double jv = j.value();
  Mat Sp = Mat::Zero(d, d);
  for (int i = 0; i + 1 < d; ++i) {
    double m = jv - (i + 1);  // column state |j, m>, maps to row i = |j, m+1>
    Sp(i, i + 1) = std::sqrt(jv * (jv + 1) - m * (m + 1));
  }
  return Sp;
}

inline Mat spin_minus(HalfInt j) { return spin_plus(j).adjoint(); }

inline Mat spin_x(HalfInt j) { return 0.5 * (spin_plus(j) + spin_minus(j)); }

inline Mat spin_y(HalfInt j) {
  return cd(0, -0.5) * (spin_plus(j) - spin_minus(j));
}

inline Mat spin_axis(HalfInt j, const Vec3& n) {
  return n.x() * spin_x(j) + n.y() * spin_y(j) + n.z() * spin_z(j);
}

// D^(j)(n, eta) = exp(-i eta n.S), evaluated through the spectral
// decomposition of the Hermitian generator.
inline Mat wigner_rotation(HalfInt j, const Vec3& axis, double angle) {
  Vec3 n = axis;
  double len = n.norm();
  if (len < 1e-14) throw std::invalid_argument("rotation axis must be nonzero");
  n /= len;
  Mat H = spin_axis(j, n);
  Eigen::SelfAdjointEigenSolver<Mat> es(H);
  int d = j.multiplet_dim();
  Vec phases(d);
  for (int i = 0; i < d; ++i)
    phases(i) = std::exp(cd(0, -angle * es.eigenvalues()(i)));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

// chi^(j)(alpha) = sin((2j+1) alpha/2) / sin(alpha/2).  Near the removable
// singularities sin(alpha/2) ~ 0 the finite Fourier sum is used instead.
inline double character(HalfInt j, double alpha) {
  double s = std::sin(0.5 * alpha);
  if (std::abs(s) < 1e-6) {
    double sum = 0.0;
    for (int t = j.twice(); t >= -j.twice(); t -= 2) sum += std::cos(0.5 * t * alpha);
    return sum;
  }
  return std::sin(0.5 * (j.twice() + 1) * alpha) / s;
}

// <j1 m1 j2 m2 | j m>, Condon-Shortley convention (Racah's formula).
// All arguments are half-integers; returns 0 outside the triangle or when
// m != m1 + m2.
inline double clebsch_gordan(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2,
                             HalfInt j, HalfInt m) {
  using detail::factorial;
  if ((m1 + m2) != m) return 0.0;
  if (j > j1 + j2 || j < HalfInt::from_twice(std::abs((j1 - j2).twice()))) return 0.0;
  if (HalfInt::from_twice(std::abs(m1.twice())) > j1 ||
      HalfInt::from_twice(std::abs(m2.twice())) > j2 ||
      HalfInt::from_twice(std::abs(m.twice())) > j)
    return 0.0;
  // Integrality: j1 + j2 + j must be an integer, and m-j pairs consistent.
  if ((j1 + j2 + j).twice() % 2 != 0) return 0.0;
  if ((j1 + m1).twice() % 2 != 0 || (j2 + m2).twice() % 2 != 0 ||
      (j + m).twice() % 2 != 0)
    return 0.0;

  auto iv = [](HalfInt h) {
    if (h.twice() % 2 != 0) throw std::logic_error("expected integer combination");
    return h.twice() / 2;
  };

  int a = iv(j1 + j2 - j);
  int b = iv(j1 - j2 + j);
  int c = iv(-j1 + j2 + j);
  int tot = iv(j1 + j2 + j);

  long double pref = (2.0L * j.value() + 1.0L) * factorial(a) * factorial(b) *
                     factorial(c) / factorial(tot + 1);
  pref *= factorial(iv(j + m)) * factorial(iv(j - m)) * factorial(iv(j1 - m1)) *
          factorial(iv(j1 + m1)) * factorial(iv(j2 - m2)) * factorial(iv(j2 + m2));

  int kmin = std::max(0, std::max(iv(j2 - j - m1), iv(j1 + m2 - j)));
  int kmax = std::min(a, std::min(iv(j1 - m1), iv(j2 + m2)));
  long double sum = 0.0L;
  for (int k = kmin; k <= kmax; ++k) {
    long double term = 1.0L /
        (factorial(k) * factorial(a - k) * factorial(iv(j1 - m1) - k) *
         factorial(iv(j2 + m2) - k) * factorial(iv(j - j2 + m1) + k) *
         factorial(iv(j - j1 - m2) + k));
    sum += (k % 2 == 0) ? term : -term;
  }
  return static_cast<double>(std::sqrt(pref) * sum);
}

// Irreducible tensor operator T^(j)_{LM} with unit Frobenius norm:
// <j m'| T_{LM} |j m> = sqrt((2L+1)/(2j+1)) <j m L M | j m'>.
inline Mat tensor_operator(HalfInt j, int L, int M) {
  int d = j.multiplet_dim();
  if (L < 0 || L > j.twice()) throw std::invalid_argument("tensor rank L out of range");
  if (std::abs(M) > L) throw std::invalid_argument("tensor component M out of range");
  double scale = std::sqrt((2.0 * L + 1.0) / d);
  Mat T = Mat::Zero(d, d);
  for (int row = 0; row < d; ++row) {
    HalfInt mp = HalfInt::from_twice(j.twice() - 2 * row);
    for (int col = 0; col < d; ++col) {
      HalfInt mm = HalfInt::from_twice(j.twice() - 2 * col);
      T(row, col) = scale * clebsch_gordan(j, mm, HalfInt(L), HalfInt(M), j, mp);
    }
  }
  return T;
}

// Generalized character chi^(j)_L(eta): coefficient of T_{L0} in the
// expansion of the diagonal rotation exp(-i eta S_z), up to the fixed
// i^L sqrt((2j+1)/(2L+1)) normalization.  Real for all (j, L, eta).
inline double generalized_character(HalfInt j, int L, double eta) {
  int d = j.multiplet_dim();
  Mat T = tensor_operator(j, L, 0);
  cd tr = 0.0;
  double jv = j.value();
  for (int i = 0; i < d; ++i) {
    double m = jv - i;
    tr += std::conj(T(i, i)) * std::exp(cd(0, -eta * m));
  }
  cd iL = std::pow(cd(0, 1), L);
  cd val = iL * std::sqrt(static_cast<double>(d) / (2.0 * L + 1.0)) * tr;
  return val.real();
}

// Orthonormal spherical harmonic Y_{LM}(theta, phi), Condon-Shortley phase.
inline cd spherical_harmonic(int L, int M, double theta, double phi) {
  if (L < 0 || std::abs(M) > L) throw std::invalid_argument("invalid (L, M)");
  int am = std::abs(M);
  double x = std::cos(theta);
  double sx = std::sin(theta);
  // P_am^am up to P_L^am by stable upward recursion in degree.
  double pmm = 1.0;
  for (int i = 1; i <= am; ++i) pmm *= -(2.0 * i - 1.0) * sx;
  double p_prev = 0.0, p = pmm;
  for (int l = am + 1; l <= L; ++l) {
    double p_next = ((2.0 * l - 1.0) * x * p - (l + am - 1.0) * p_prev) / (l - am);
    p_prev = p;
    p = p_next;
  }
  double norm = std::sqrt((2.0 * L + 1.0) / (4.0 * pi) *
                          static_cast<double>(detail::factorial(L - am) /
                                              detail::factorial(L + am)));
  cd y = norm * p * std::exp(cd(0, am * phi));
  if (M < 0) y = (am % 2 == 0 ? 1.0 : -1.0) * std::conj(y);
  return y;
}

// Rebuild D^(j)(n, eta) from generalized characters and tensor operators:
//   D = 2 sqrt(pi) sum_L (-i)^L / sqrt(2j+1) chi_L(eta) sum_M Y*_{LM}(n) T_{LM}.
// Agreement with wigner_rotation is the defining contract of
// generalized_character and tensor_operator together.
inline Mat rotation_from_tensor_expansion(HalfInt j, const Vec3& axis, double eta) {
  Vec3 n = axis.normalized();
  double theta = std::acos(std::clamp(n.z(), -1.0, 1.0));
  double phi = std::atan2(n.y(), n.x());
  int d = j.multiplet_dim();
  Mat D = Mat::Zero(d, d);
  for (int L = 0; L <= j.twice(); ++L) {
    cd miL = std::pow(cd(0, -1), L);
    double chi = generalized_character(j, L, eta);
    Mat term = Mat::Zero(d, d);
    for (int M = -L; M <= L; ++M)
      term += std::conj(spherical_harmonic(L, M, theta, phi)) * tensor_operator(j, L, M);
    D += miL * chi * term;
  }
  return 2.0 * std::sqrt(pi) / std::sqrt(static_cast<double>(d)) * D;
}

// Rodrigues rotation matrix for axis n (normalized internally) and angle.
inline Mat3 rotation_matrix(const Vec3& axis, double angle) {
  Vec3 n = axis.normalized();
  Mat3 K;
  K << 0, -n.z(), n.y(), n.z(), 0, -n.x(), -n.y(), n.x(), 0;
  return Mat3::Identity() + std::sin(angle) * K + (1 - std::cos(angle)) * K * K;
}

struct AxisAngle {
  Vec3 axis;
  double angle;  // in [0, pi]
};

// Axis-angle of a proper rotation matrix.  angle is in [0, pi]; at angle pi
// the axis sign is fixed by making its first component of magnitude > 1e-8
// positive, so the decomposition is deterministic.
inline AxisAngle axis_angle_from_matrix(const Mat3& R) {
  double tr = std::clamp((R.trace() - 1.0) / 2.0, -1.0, 1.0);
  double angle = std::acos(tr);
  AxisAngle out;
  out.angle = angle;
  if (angle < 1e-12) {
    out.axis = Vec3(0, 0, 1);
    out.angle = 0.0;
    return out;
  }
  if (angle > pi - 1e-6) {
    // R ~ 2 n n^T - I; take the dominant column of (R + I)/2.
    Mat3 B = 0.5 * (R + Mat3::Identity());
    int c = 0;
    for (int i = 1; i < 3; ++i)
      if (B(i, i) > B(c, c)) c = i;
    Vec3 n = B.col(c) / std::sqrt(std::max(B(c, c), 1e-300));
    n.normalize();
    for (int i = 0; i < 3; ++i) {
      if (std::abs(n(i)) > 1e-8) {
        if (n(i) < 0) n = -n;
        break;
      }
    }
    out.axis = n;
    out.angle = pi;
    return out;
  }
  Vec3 n(R(2, 1) - R(1, 2), R(0, 2) - R(2, 0), R(1, 0) - R(0, 1));
  out.axis = n / (2.0 * std::sin(angle));
  out.axis.normalize();
  return out;
}

// Lift an SO(3) element to the spin-j representation via its axis-angle
// decomposition (angle in [0, pi], deterministic axis at angle pi).
inline Mat wigner_rotation(HalfInt j, const Mat3& R) {
  AxisAngle aa = axis_angle_from_matrix(R);
  if (aa.angle == 0.0) return Mat::Identity(j.multiplet_dim(), j.multiplet_dim());
  return wigner_rotation(j, aa.axis, aa.angle);
}

// Rotation taking v to the +z axis, as an SO(3) matrix.
inline Mat3 rotation_to_z(const Vec3& v) {
  Vec3 n = v.normalized();
  double c = std::clamp(n.z(), -1.0, 1.0);
  if (c > 1.0 - 1e-14) return Mat3::Identity();
  if (c < -1.0 + 1e-14) return rotation_matrix(Vec3(1, 0, 0), pi);
  Vec3 axis = n.cross(Vec3(0, 0, 1));
  return rotation_matrix(axis, std::acos(c));
}

}  // namespace symq
