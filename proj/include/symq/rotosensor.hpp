#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "symq/block_diag.hpp"
#include "symq/decompose.hpp"
#include "symq/parallel.hpp"
#include "symq/rng.hpp"
#include "symq/sym_space.hpp"
#include "symq/wedge_space.hpp"

namespace symq {

namespace detail {

inline double operator_variance(const Mat& op, const Vec& v) {
  Vec ov = op * v;
  double e1 = v.dot(ov).real();
  return ov.squaredNorm() - e1 * e1;
}

}  // namespace detail

// Variance of the collective spin component along `axis`; the sensitivity of
// the state to infinitesimal rotations about that axis.
inline double variance_about_axis(const SymState& state, const Vec3& axis) {
  SymState st = convert_induced_standard(state, Basis::standard);
  Vec v = st.amp / st.amp.norm();
  return detail::operator_variance(collective_spin_axis(st.s, st.k, axis), v);
}

inline double variance_about_axis(const WedgeState& state, const Vec3& axis) {
  if (state.basis != Basis::standard)
    throw std::invalid_argument("variance_about_axis needs a standard-basis wedge state");
  Vec v = state.amp / state.amp.norm();
  return detail::operator_variance(wedge_collective_operator(state.s, state.k, spin_axis(state.s, axis)), v);
}

// Same variance from block components: per-block spin moments weighted by the
// block occupations.  Valid for both symmetric and antisymmetric layouts.
inline double variance_about_axis_blocks(const Vec& block_amp,
                                         const std::vector<BlockInfo>& layout,
                                         const Vec3& axis) {
  double e1 = 0.0, e2 = 0.0;
  for (const BlockInfo& b : layout) {
    Vec seg = block_amp.segment(b.offset, b.dim());
    if (seg.squaredNorm() < 1e-300) continue;
    Vec sv = spin_axis(HalfInt::from_twice(b.twice_j), axis) * seg;
    e1 += seg.dot(sv).real();
    e2 += sv.squaredNorm();
  }
  double n = block_amp.squaredNorm();
  e1 /= n;
  e2 /= n;
  return e2 - e1 * e1;
}

// Rotation sensitivity averaged uniformly over the axis: one third of the sum
// of the variances about the coordinate axes.
inline double averaged_infinitesimal(const SymState& state) {
  return (variance_about_axis(state, Vec3::UnitX()) +
          variance_about_axis(state, Vec3::UnitY()) +
          variance_about_axis(state, Vec3::UnitZ())) / 3.0;
}

// Survival probability |<Psi| exp(-i eta axis.S) |Psi>|^2 under a finite rotation.
inline double fidelity(const SymState& state, double eta, const Vec3& axis) {
  SymState st = convert_induced_standard(state, Basis::standard);
  Vec v = st.amp / st.amp.norm();
  Eigen::SelfAdjointEigenSolver<Mat> es(collective_spin_axis(st.s, st.k, axis));
  Vec c = es.eigenvectors().adjoint() * v;
  cd amp = 0.0;
  for (int i = 0; i < c.size(); ++i)
    amp += std::norm(c(i)) * std::exp(cd(0.0, -eta * es.eigenvalues()(i)));
  return std::norm(amp);
}

// Per-block multipole expectation values t_L(M) = <psi| T_LM |psi>, M = -L..L.
inline std::vector<std::vector<cd>> multipole_expectations(HalfInt j, const Vec& psi) {
  std::vector<std::vector<cd>> t(j.twice() + 1);
  for (int L = 0; L <= j.twice(); ++L) {
    t[L].resize(2 * L + 1);
    for (int M = -L; M <= L; ++M)
      t[L][M + L] = psi.dot(tensor_operator(j, L, M) * psi);
  }
  return t;
}

// w_L^2 = sum_M <T_LM> <T_LM^dagger>; real and nonnegative for any state.
inline std::vector<cd> multipole_strengths(HalfInt j, const Vec& psi) {
  Vec v = psi / psi.norm();
  std::vector<cd> w(j.twice() + 1, cd(0.0, 0.0));
  for (int L = 0; L <= j.twice(); ++L)
    for (int M = -L; M <= L; ++M) {
      cd t = v.dot(tensor_operator(j, L, M) * v);
      cd td = v.dot(tensor_operator(j, L, M).adjoint() * v);
      w[L] += t * td;
    }
  return w;
}

namespace detail {

struct BlockSpinor {
  HalfInt j;
  double weight = 0.0;  // |z|^2
  Vec psi;              // unit norm
};

inline std::vector<BlockSpinor> block_spinors(const SymState& state,
                                              const BlockDiagonalizer& bd) {
  SymState bs = to_basis(state, Basis::block, &bd);
  double total = bs.amp.squaredNorm();
  std::vector<BlockSpinor> out;
  for (const BlockInfo& b : bd.layout) {
    Vec seg = bs.amp.segment(b.offset, b.dim());
    double w = seg.squaredNorm() / total;
    if (w < 1e-30) continue;
    out.push_back({HalfInt::from_twice(b.twice_j), w, seg.normalized()});
  }
  return out;
}

inline double block_fidelity(const std::vector<BlockSpinor>& blocks, double eta,
                             const Vec3& axis) {
  cd amp = 0.0;
  for (const BlockSpinor& b : blocks)
    amp += b.weight * b.psi.dot(wigner_rotation(b.j, axis, eta) * b.psi);
  return std::norm(amp);
}

}  // namespace detail

// Axis-averaged fidelity in closed form: a double sum over block pairs of
// generalized characters against the blocks' multipole expectations.
inline double averaged_fidelity(const SymState& state, double eta,
                                const BlockDiagonalizer& bd) {
  std::vector<detail::BlockSpinor> blocks = detail::block_spinors(state, bd);
  std::vector<std::vector<std::vector<cd>>> t;
  std::vector<std::vector<double>> chi;
  for (const detail::BlockSpinor& b : blocks) {
    t.push_back(multipole_expectations(b.j, b.psi));
    std::vector<double> c(b.j.twice() + 1);
    for (int L = 0; L <= b.j.twice(); ++L) c[L] = generalized_character(b.j, L, eta);
    chi.push_back(c);
  }
  cd total = 0.0;
  for (std::size_t q = 0; q < blocks.size(); ++q)
    for (std::size_t r = 0; r < blocks.size(); ++r) {
      double pref = blocks[q].weight * blocks[r].weight /
                    std::sqrt(double(blocks[q].j.multiplet_dim()) *
                              double(blocks[r].j.multiplet_dim()));
      int lmax = std::min(blocks[q].j.twice(), blocks[r].j.twice());
      cd inner = 0.0;
      for (int L = 0; L <= lmax; ++L) {
        cd m_sum = 0.0;
        for (int M = -L; M <= L; ++M)
          m_sum += t[q][L][M + L] * std::conj(t[r][L][M + L]);
        inner += chi[q][L] * chi[r][L] * m_sum;
      }
      total += pref * inner;
    }
  return total.real();
}

// Axis average by a product quadrature: Gauss-Legendre in the polar cosine
// times a uniform azimuthal grid.  Exact whenever the integrand is band
// limited below min(2 n_theta, n_phi) in the axis direction, which holds for
// every state here since the fidelity is a polynomial of degree 4ks in n.
inline double averaged_fidelity_quadrature(const SymState& state, double eta,
                                           const BlockDiagonalizer& bd,
                                           int n_theta = 16, int n_phi = 32) {
  std::vector<detail::BlockSpinor> blocks = detail::block_spinors(state, bd);
  Quadrature gl = gauss_legendre(n_theta, -1.0, 1.0);
  double sum = 0.0;
  for (int i = 0; i < n_theta; ++i) {
    double z = gl.nodes[i];
    double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    double inner = 0.0;
    for (int p = 0; p < n_phi; ++p) {
      double phi = 2.0 * pi * p / n_phi;
      inner += detail::block_fidelity(blocks, eta,
                                      Vec3(rho * std::cos(phi), rho * std::sin(phi), z));
    }
    sum += gl.weights[i] * inner / n_phi;
  }
  return sum / 2.0;  // weights integrate dz over [-1, 1]
}

// Monte Carlo cross-check; returns (mean, standard error).  Sample axes are a
// pure function of (seed, index), so the result is scheduling independent.
inline std::pair<double, double> averaged_fidelity_mc(const SymState& state, double eta,
                                                      const BlockDiagonalizer& bd,
                                                      std::int64_t samples,
                                                      std::uint64_t seed) {
  std::vector<detail::BlockSpinor> blocks = detail::block_spinors(state, bd);
  std::vector<double> vals(static_cast<std::size_t>(samples));
  parallel_ranges(vals.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      CounterRng rng(seed, i);
      vals[i] = detail::block_fidelity(blocks, eta, rng.sphere_point());
    }
  });
  double mean = 0.0;
  for (double v : vals) mean += v;
  mean /= samples;
  double var = 0.0;
  for (double v : vals) var += (v - mean) * (v - mean);
  var /= (samples > 1 ? samples - 1 : 1);
  return {mean, std::sqrt(var / samples)};
}

}  // namespace symq
