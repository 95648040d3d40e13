#pragma once

#include <Eigen/SparseCore>
#include <algorithm>
#include <stdexcept>
#include <vector>

#include "symq/decompose.hpp"
#include "symq/sym_space.hpp"
#include "symq/wedge_space.hpp"

namespace symq {

using SpMat = Eigen::SparseMatrix<cd>;

// Sparse collective one-body operator; same action as collective_operator /
// wedge_collective_operator but assembled from triplets.
inline SpMat collective_operator_sparse(HalfInt s, int k, const Mat& op, bool strict) {
  int d = s.multiplet_dim();
  const IndexTable& tab = strict ? wedge_table(d, k) : sym_table(d, k);
  std::vector<Eigen::Triplet<cd>> trip;
  for (std::size_t col = 0; col < tab.size(); ++col) {
    const MultiIndex& a = tab.tuple(col);
    for (int slot = 0; slot < k; ++slot) {
      if (!strict && slot > 0 && a[slot] == a[slot - 1]) continue;
      int count = 1;
      if (!strict)
        for (int t = slot + 1; t < k && a[t] == a[slot]; ++t) ++count;
      for (int b = 0; b < d; ++b) {
        cd amp = op(b, a[slot]);
        if (amp == cd(0.0)) continue;
        MultiIndex ap = a;
        ap[slot] = b;
        double sgn = 1.0;
        if (strict) {
          bool occupied = false;
          for (int t = 0; t < k; ++t)
            if (t != slot && a[t] == b) { occupied = true; break; }
          if (occupied) continue;
          int swaps = 0;
          for (int t = slot; t + 1 < k && ap[t] > ap[t + 1]; ++t) {
            std::swap(ap[t], ap[t + 1]);
            ++swaps;
          }
          for (int t = slot; t - 1 >= 0 && ap[t] < ap[t - 1]; --t) {
            std::swap(ap[t], ap[t - 1]);
            ++swaps;
          }
          sgn = (swaps % 2 == 0) ? 1.0 : -1.0;
        } else {
          std::sort(ap.begin(), ap.end());
        }
        std::size_t row = tab.index_of(ap);
        cd value = amp * sgn;
        if (!strict)
          value *= static_cast<double>(count) * sym_normalizer(a) / sym_normalizer(ap);
        trip.emplace_back(static_cast<int>(row), static_cast<int>(col), value);
      }
    }
  }
  SpMat out(static_cast<int>(tab.size()), static_cast<int>(tab.size()));
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

struct BlockInfo {
  int twice_j;
  int alpha;           // 1-based copy index within equal j
  std::size_t offset;  // first row of this block in the block-basis layout
  int dim() const { return twice_j + 1; }
};

// Unitary change of basis to the spin-adapted (block) basis.  Rows are
// grouped into (j, alpha) multiplets in decreasing j, each multiplet ordered
// by decreasing m.  Highest-weight vectors are constructed as the orthogonal
// complement of the lowered higher multiplets inside each S_z eigenspace,
// Gram-Schmidt against the lexicographic basis, with the first nonzero
// component made real positive; lower rows follow by exact ladder descent,
// so each block carries the standard spin-j matrices.
struct BlockDiagonalizer {
  HalfInt s;
  int k = 1;
  bool antisymmetric = false;
  Mat U;  // Psi_block = U * Psi_standard
  std::vector<BlockInfo> layout;

  std::size_t dim() const { return static_cast<std::size_t>(U.rows()); }

  Vec to_block(const Vec& standard) const { return U * standard; }
  Vec from_block(const Vec& block) const { return U.adjoint() * block; }

  Vec block_component(const Vec& block_vec, std::size_t b) const {
    const BlockInfo& info = layout[b];
    return block_vec.segment(info.offset, info.dim());
  }
};

namespace detail {

inline BlockDiagonalizer build_block_diagonalizer(HalfInt s, int k, bool strict) {
  int d = s.multiplet_dim();
  const IndexTable& tab = strict ? wedge_table(d, k) : sym_table(d, k);
  std::size_t D = tab.size();
  if (D > 4000) throw std::invalid_argument("block diagonalizer capped at dimension 4000");

  MultTable mult = strict ? wedge_multiplicities(s, k)
                          : multiplicities(s, k, MultMethod::recursion);

  SpMat Sminus = collective_operator_sparse(s, k, spin_minus(s), strict);

  // Standard-basis indices per twice-weight level, lexicographic within.
  std::map<int, std::vector<std::size_t>, std::greater<int>> levels;
  for (std::size_t i = 0; i < D; ++i)
    levels[tab.twice_weight(i, s.twice())].push_back(i);

  struct Multiplet {
    int twice_j;
    int alpha;
    std::vector<Vec> rows;  // states from m = j downward, filled as we descend
  };
  std::vector<Multiplet> multiplets;

  int top = levels.begin()->first;
  for (int twice_m = top; twice_m >= -top; twice_m -= 2) {
    auto lv = levels.find(twice_m);
    std::vector<std::size_t> level_idx =
        (lv == levels.end()) ? std::vector<std::size_t>{} : lv->second;

    // Lower every live multiplet one step into this level.
    std::vector<Vec> occupied;
    for (Multiplet& mp : multiplets) {
      if (twice_m < -mp.twice_j) continue;
      const Vec& prev = mp.rows.back();
      double tj = mp.twice_j, tm = twice_m;
      double c2 = (tj * (tj + 2.0) - tm * (tm + 2.0)) / 4.0;  // from m+1 down to m
      Vec lowered = (Sminus * prev) / std::sqrt(c2);
      mp.rows.push_back(lowered);
      occupied.push_back(lowered);
    }

    // New highest-weight vectors at j = m.
    auto mu_it = mult.find(twice_m);
    std::int64_t mu = (mu_it == mult.end()) ? 0 : mu_it->second;
    if (twice_m < 0 && mu > 0) throw std::logic_error("multiplicity below weight zero");
    int alpha = 0;
    for (std::int64_t n = 0; n < mu; ++n) {
      Vec v;
      bool found = false;
      for (std::size_t cand : level_idx) {
        v = Vec::Zero(D);
        v(cand) = 1.0;
        for (int pass = 0; pass < 2; ++pass)
          for (const Vec& u : occupied) v -= u.dot(v) * u;
        if (v.norm() > 1e-6) { found = true; break; }
      }
      if (!found) throw std::logic_error("highest-weight construction failed");
      v.normalize();
      for (std::size_t i = 0; i < D; ++i) {
        if (std::abs(v(i)) > 1e-9) {
          v *= std::conj(v(i)) / std::abs(v(i));
          break;
        }
      }
      occupied.push_back(v);
      multiplets.push_back({twice_m, ++alpha, {v}});
    }
  }

  BlockDiagonalizer bd;
  bd.s = s;
  bd.k = k;
  bd.antisymmetric = strict;
  bd.U = Mat::Zero(D, D);

  // Layout: decreasing j, construction order within equal j.
  std::stable_sort(multiplets.begin(), multiplets.end(),
                   [](const Multiplet& a, const Multiplet& b) {
                     return a.twice_j > b.twice_j;
                   });
  std::size_t row = 0;
  for (const Multiplet& mp : multiplets) {
    bd.layout.push_back({mp.twice_j, mp.alpha, row});
    for (const Vec& state : mp.rows) bd.U.row(row++) = state.adjoint();
  }
  if (row != D) throw std::logic_error("block layout does not fill the space");
  return bd;
}

}  // namespace detail

inline BlockDiagonalizer block_diagonalizer(HalfInt s, int k) {
  return detail::build_block_diagonalizer(s, k, false);
}

inline BlockDiagonalizer wedge_block_diagonalizer(HalfInt s, int k) {
  return detail::build_block_diagonalizer(s, k, true);
}

// Basis conversion for symmetric-power states.  Conversions touching the
// block basis need the matching diagonalizer.
inline SymState to_basis(const SymState& in, Basis target,
                         const BlockDiagonalizer* bd = nullptr) {
  if (in.basis == target) return in;
  if (in.basis != Basis::block && target != Basis::block)
    return convert_induced_standard(in, target);
  if (bd == nullptr || bd->antisymmetric || bd->s != in.s || bd->k != in.k)
    throw std::invalid_argument("block conversion needs the matching diagonalizer");
  if (in.basis == Basis::block) {
    SymState std_state{in.s, in.k, Basis::standard, bd->from_block(in.amp)};
    return (target == Basis::standard)
               ? std_state
               : convert_induced_standard(std_state, target);
  }
  SymState std_state = convert_induced_standard(in, Basis::standard);
  return SymState{in.s, in.k, Basis::block, bd->to_block(std_state.amp)};
}

inline WedgeState to_basis(const WedgeState& in, Basis target,
                           const BlockDiagonalizer* bd = nullptr) {
  if (in.basis == target) return in;
  if (in.basis == Basis::induced || target == Basis::induced)
    throw std::invalid_argument("antisymmetric states use standard or block basis");
  if (bd == nullptr || !bd->antisymmetric || bd->s != in.s || bd->k != in.k)
    throw std::invalid_argument("block conversion needs the matching diagonalizer");
  Vec out = (target == Basis::block) ? bd->to_block(in.amp) : bd->from_block(in.amp);
  return WedgeState{in.s, in.k, target, out};
}

}  // namespace symq
