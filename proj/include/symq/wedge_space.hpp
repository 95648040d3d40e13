#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "symq/sym_space.hpp"

namespace symq {

// A k-party state in the antisymmetric power of the spin-s space, indexed by
// strictly increasing multi-indices in lexicographic order (standard basis)
// or by the (j, alpha, m) layout of the antisymmetric block diagonalizer.
struct WedgeState {
  HalfInt s;
  int k = 1;
  Basis basis = Basis::standard;
  Vec amp;

  int d() const { return s.multiplet_dim(); }
  std::int64_t dim() const { return wedge_dim(d(), k); }
};

// v_1 ^ ... ^ v_k with the 1/k! antisymmetrization convention; the component
// on the orthonormal basis vector of a strictly increasing tuple A is
// det(M_A) / sqrt(k!), with M_A[i][j] = (v_j)_{a_i}.
inline WedgeState wedge_product(HalfInt s, const std::vector<Vec>& factors) {
  int k = static_cast<int>(factors.size());
  int d = s.multiplet_dim();
  for (const Vec& f : factors)
    if (f.size() != d) throw std::invalid_argument("factor dimension mismatch");
  const IndexTable& tab = wedge_table(d, k);
  double kfac = 1.0;
  for (int i = 2; i <= k; ++i) kfac *= i;
  WedgeState out{s, k, Basis::standard, Vec::Zero(tab.size())};
  Mat M(k, k);
  for (std::size_t idx = 0; idx < tab.size(); ++idx) {
    const MultiIndex& a = tab.tuple(idx);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) M(i, j) = factors[j](a[i]);
    out.amp(idx) = M.determinant() / std::sqrt(kfac);
  }
  return out;
}

// Collective one-body operator on the antisymmetric power, standard basis.
// Replacing one label and re-sorting contributes the parity of the shuffle.
inline Mat wedge_collective_operator(HalfInt s, int k, const Mat& op) {
  int d = s.multiplet_dim();
  if (op.rows() != d || op.cols() != d)
    throw std::invalid_argument("single-particle operator dimension mismatch");
  const IndexTable& tab = wedge_table(d, k);
  std::size_t D = tab.size();
  Mat out = Mat::Zero(D, D);
  for (std::size_t col = 0; col < D; ++col) {
    const MultiIndex& a = tab.tuple(col);
    for (int slot = 0; slot < k; ++slot) {
      for (int b = 0; b < d; ++b) {
        cd amp = op(b, a[slot]);
        if (amp == cd(0.0)) continue;
        bool occupied = false;
        for (int t = 0; t < k; ++t)
          if (t != slot && a[t] == b) { occupied = true; break; }
        if (occupied) continue;
        MultiIndex ap = a;
        ap[slot] = b;
        // parity of moving slot to its sorted position
        int swaps = 0;
        for (int t = slot; t + 1 < k && ap[t] > ap[t + 1]; ++t) {
          std::swap(ap[t], ap[t + 1]);
          ++swaps;
        }
        for (int t = slot; t - 1 >= 0 && ap[t] < ap[t - 1]; --t) {
          std::swap(ap[t], ap[t - 1]);
          ++swaps;
        }
        std::size_t row = tab.index_of(ap);
        double sgn = (swaps % 2 == 0) ? 1.0 : -1.0;
        out(row, col) += sgn * amp;
      }
    }
  }
  return out;
}

inline cd wedge_overlap(const WedgeState& a, const WedgeState& b) {
  if (a.s != b.s || a.k != b.k) throw std::invalid_argument("state shape mismatch");
  if (a.basis != b.basis) throw std::invalid_argument("overlap needs matching bases");
  return a.amp.dot(b.amp);
}

}  // namespace symq
