#pragma once

#include <Eigen/SVD>
#include <stdexcept>
#include <vector>

#include "symq/block_diag.hpp"
#include "symq/sym_space.hpp"
#include "symq/wedge_space.hpp"

namespace symq {

// H^{(s,k)}: vee^k H_s -> vee^{2s} H_{k/2} on standard bases, built from the
// two block diagonalizers; block layouts agree because the multiplicity
// tables are duality-symmetric.
inline Mat hermite_matrix(const BlockDiagonalizer& bd_sk, const BlockDiagonalizer& bd_dual) {
  if (bd_sk.dim() != bd_dual.dim())
    throw std::invalid_argument("hermite spaces have different dimensions");
  for (std::size_t b = 0; b < bd_sk.layout.size(); ++b)
    if (bd_sk.layout[b].twice_j != bd_dual.layout[b].twice_j)
      throw std::invalid_argument("hermite block layouts disagree");
  return bd_dual.U.adjoint() * bd_sk.U;
}

inline Mat hermite_matrix(HalfInt s, int k) {
  BlockDiagonalizer a = block_diagonalizer(s, k);
  BlockDiagonalizer b = block_diagonalizer(HalfInt::from_twice(k), s.twice());
  return hermite_matrix(a, b);
}

// M^{(s,k)}: vee^k H_s -> wedge^k H_{s+(k-1)/2} on standard bases.
inline Mat murnaghan_matrix(const BlockDiagonalizer& bd_sym, const BlockDiagonalizer& bd_wedge) {
  if (!bd_wedge.antisymmetric || bd_sym.antisymmetric)
    throw std::invalid_argument("murnaghan needs a symmetric and an antisymmetric diagonalizer");
  if (bd_sym.dim() != bd_wedge.dim())
    throw std::invalid_argument("murnaghan spaces have different dimensions");
  for (std::size_t b = 0; b < bd_sym.layout.size(); ++b)
    if (bd_sym.layout[b].twice_j != bd_wedge.layout[b].twice_j)
      throw std::invalid_argument("murnaghan block layouts disagree");
  return bd_wedge.U.adjoint() * bd_sym.U;
}

inline Mat murnaghan_matrix(HalfInt s, int k) {
  BlockDiagonalizer a = block_diagonalizer(s, k);
  BlockDiagonalizer b = wedge_block_diagonalizer(HalfInt::from_twice(s.twice() + k - 1), k);
  return murnaghan_matrix(a, b);
}

// Sign of the permutation (A, complement(A)) of (0..d-1), A strictly
// increasing: parity of the number of inversions between the two halves.
inline int complement_sign(const MultiIndex& a, int d) {
  int inversions = 0;
  std::vector<char> in_a(d, 0);
  for (int x : a) in_a[x] = 1;
  int seen_comp = 0;
  for (int x = d - 1; x >= 0; --x) {
    if (in_a[x])
      inversions += seen_comp;
    else
      ++seen_comp;
  }
  return (inversions % 2 == 0) ? 1 : -1;
}

// Complement map wedge^k H_s -> wedge^{d-k} H_s over the standard basis:
// e_A -> sign(A) e_{A^c}, conjugating amplitudes by default.  The antilinear
// (default) variant sends a factorizable state to one spanning the Hermitian
// orthocomplement of its plane; the linear variant keeps the same index
// complement without conjugation.  Applying either variant twice returns the
// input up to a unit scalar.  Chaining Murnaghan, this complement, and the
// inverse Murnaghan does not reproduce the Hermite map itself: it reproduces
// the Hermite image of the time-reversed input, with an extra minus sign on
// every other total-spin block (see the loop tests for the exact identity,
// which is forced by which tensor actions the two variants intertwine).
inline WedgeState hodge_complement(const WedgeState& in, bool conjugate_amplitudes = true) {
  int d = in.d();
  if (in.basis != Basis::standard)
    throw std::invalid_argument("hodge complement expects the standard basis");
  const IndexTable& tab = wedge_table(d, in.k);
  const IndexTable& ctab = wedge_table(d, d - in.k);
  Vec out = Vec::Zero(static_cast<Eigen::Index>(ctab.size()));
  for (std::size_t i = 0; i < tab.size(); ++i) {
    const MultiIndex& a = tab.tuple(i);
    std::vector<char> in_a(d, 0);
    for (int x : a) in_a[x] = 1;
    MultiIndex comp;
    for (int x = 0; x < d; ++x)
      if (!in_a[x]) comp.push_back(x);
    cd amp = conjugate_amplitudes ? std::conj(in.amp(i)) : in.amp(i);
    out(ctab.index_of(comp)) += static_cast<double>(complement_sign(a, d)) * amp;
  }
  return WedgeState{in.s, d - in.k, Basis::standard, out};
}

// Exterior multiplication by a single vector: H_s x wedge^m -> wedge^{m+1},
// standard bases, scaled so that e_a ^ e_A maps to the signed basis tuple.
inline Vec wedge_multiply(const Vec& w, const WedgeState& psi) {
  int d = psi.d();
  const IndexTable& tab = wedge_table(d, psi.k);
  const IndexTable& otab = wedge_table(d, psi.k + 1);
  Vec out = Vec::Zero(static_cast<Eigen::Index>(otab.size()));
  for (std::size_t o = 0; o < otab.size(); ++o) {
    const MultiIndex& a = otab.tuple(o);
    cd acc = 0.0;
    MultiIndex rest(a.size() - 1);
    for (std::size_t p = 0; p < a.size(); ++p) {
      for (std::size_t t = 0, r = 0; t < a.size(); ++t)
        if (t != p) rest[r++] = a[t];
      double sgn = (p % 2 == 0) ? 1.0 : -1.0;
      acc += sgn * w(a[p]) * psi.amp(tab.index_of(rest));
    }
    out(o) = acc;
  }
  return out;
}

// Orthonormal basis of the plane of a decomposable wedge state: kernel of
// w -> w ^ psi.  Throws when the kernel dimension is not k (input not
// factorizable within tol).
inline Mat wedge_plane(const WedgeState& psi, double tol = 1e-8) {
  int d = psi.d();
  const IndexTable& otab = wedge_table(d, psi.k + 1);
  Mat map(static_cast<Eigen::Index>(otab.size()), d);
  for (int col = 0; col < d; ++col) {
    Vec w = Vec::Zero(d);
    w(col) = 1.0;
    map.col(col) = wedge_multiply(w, psi);
  }
  Eigen::JacobiSVD<Mat> svd(map, Eigen::ComputeFullV);
  double scale = svd.singularValues()(0);
  int kernel = 0;
  for (int i = 0; i < d; ++i)
    if (svd.singularValues()(i) < tol * scale) ++kernel;
  if (kernel != psi.k) throw std::invalid_argument("state is not wedge-factorizable");
  return svd.matrixV().rightCols(psi.k);
}

struct PluckerResult {
  bool factorizable = false;
  double residual = 0.0;
};

// Decomposability of a two-vector over H_{3/2}: the single Plucker relation
// p01 p23 - p02 p13 + p03 p12 on normalized standard amplitudes.  Block-basis
// input (spin-2 then spin-0 components, m descending) uses the equivalent
// quadratic 2 c_{2,2} c_{2,-2} - 2 c_{2,1} c_{2,-1} + c_{2,0}^2 - c_{0,0}^2,
// which is twice the standard-basis relation.
inline PluckerResult plucker_wedge_factorizable(const WedgeState& in, double tol = 1e-9) {
  if (in.d() != 4 || in.k != 2)
    throw std::invalid_argument("plucker test covers two-vectors over a 4-dimensional space");
  Vec c = in.amp / in.amp.norm();
  cd rel;
  if (in.basis == Basis::standard) {
    rel = c(0) * c(5) - c(1) * c(4) + c(2) * c(3);
  } else if (in.basis == Basis::block) {
    rel = 2.0 * c(0) * c(4) - 2.0 * c(1) * c(3) + c(2) * c(2) - c(5) * c(5);
  } else {
    throw std::invalid_argument("plucker test expects standard or block basis");
  }
  PluckerResult out;
  out.residual = std::abs(rel);
  out.factorizable = out.residual < tol;
  return out;
}

}  // namespace symq
