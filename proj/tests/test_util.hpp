#pragma once

#include <symq/block_diag.hpp>
#include <symq/rng.hpp>
#include <symq/sym_space.hpp>

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace symq::test {

// Largest elementwise deviation after aligning one unit phase per irreducible
// block of the layout.  Rows of U within a block may only differ from the
// reference by a common phase, chosen here from the largest entry of the block.
inline double block_phase_aligned_error(const Mat& got, const Mat& want,
                                        const std::vector<BlockInfo>& layout) {
  double worst = 0.0;
  for (const auto& b : layout) {
    Eigen::Index r0 = b.offset, n = b.dim();
    Mat gb = got.block(r0, 0, n, got.cols());
    Mat wb = want.block(r0, 0, n, want.cols());
    Eigen::Index pr = 0, pc = 0;
    wb.cwiseAbs().maxCoeff(&pr, &pc);
    cd g = gb(pr, pc), w = wb(pr, pc);
    cd phase = (std::abs(g) > 0) ? w / g * std::abs(g / w) : cd(1, 0);
    worst = std::max(worst, (gb * phase - wb).cwiseAbs().maxCoeff());
  }
  return worst;
}

inline double phase_aligned_error(const Vec& got, const Vec& want) {
  Eigen::Index p = 0;
  want.cwiseAbs().maxCoeff(&p);
  cd g = got(p), w = want(p);
  cd phase = (std::abs(g) > 0) ? w / g * std::abs(g / w) : cd(1, 0);
  return (got * phase - want).cwiseAbs().maxCoeff();
}

inline Vec random_ket(int dim, std::uint64_t seed, std::uint64_t stream = 0) {
  CounterRng rng(seed, stream);
  return rng.haar_ket(dim);
}

inline SymState random_sym_state(HalfInt s, int k, std::uint64_t seed) {
  SymState st;
  st.s = s;
  st.k = k;
  st.basis = Basis::standard;
  st.amp = random_ket(static_cast<int>(sym_dim(s.multiplet_dim(), k)), seed);
  return st;
}

// Overlap of symmetrized product states computed directly in the k-fold
// tensor space, as an independent check on the permanent route.
inline cd brute_sym_overlap(const std::vector<Vec>& bra,
                            const std::vector<Vec>& ket) {
  int k = static_cast<int>(bra.size());
  std::vector<int> perm(k);
  for (int i = 0; i < k; ++i) perm[i] = i;
  cd total = 0;
  double count = 0;
  do {
    cd term = 1;
    for (int i = 0; i < k; ++i) term *= bra[i].dot(ket[perm[i]]);
    total += term;
    count += 1;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total / count;
}

}  // namespace symq::test
