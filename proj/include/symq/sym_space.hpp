#pragma once

#include <algorithm>
#include <bit>
#include <complex>
#include <cstdint>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "symq/multi_index.hpp"
#include "symq/spin_ops.hpp"

namespace symq {

enum class Basis { induced, standard, block };

inline const char* basis_name(Basis b) {
  switch (b) {
    case Basis::induced: return "induced";
    case Basis::standard: return "standard";
    case Basis::block: return "block";
  }
  return "?";
}

inline Basis basis_from_name(const std::string& s) {
  if (s == "induced") return Basis::induced;
  if (s == "standard") return Basis::standard;
  if (s == "block") return Basis::block;
  throw std::invalid_argument("unknown basis: " + s);
}

// A k-party state in the symmetric power of the spin-s space.  amp holds the
// components in the given basis; for induced/standard these are indexed by
// the lexicographic nondecreasing multi-index table, for block by the
// (j, alpha, m) layout of the corresponding BlockDiagonalizer.
struct SymState {
  HalfInt s;
  int k = 1;
  Basis basis = Basis::standard;
  Vec amp;

  int d() const { return s.multiplet_dim(); }
  std::int64_t dim() const { return sym_dim(d(), k); }
};

inline const IndexTable& sym_table(int d, int k) {
  // Keyed cache: tables are reused heavily across calls.
  static std::map<std::pair<int, int>, IndexTable> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(d, k);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, IndexTable(d, k, /*strict=*/false)).first;
  return it->second;
}

inline const IndexTable& wedge_table(int d, int k) {
  static std::map<std::pair<int, int>, IndexTable> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(d, k);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, IndexTable(d, k, /*strict=*/true)).first;
  return it->second;
}

// Permanent by Ryser's formula with Gray-code subset updates, O(2^n n).
inline cd permanent(const Mat& A) {
  int n = static_cast<int>(A.rows());
  if (n != A.cols()) throw std::invalid_argument("permanent needs a square matrix");
  if (n == 0) return 1.0;
  if (n > 20) throw std::invalid_argument("permanent dimension too large");
  std::vector<cd> rowsum(n, 0.0);
  cd total = 0.0;
  std::uint64_t prev = 0;
  for (std::uint64_t g = 1; g < (1ull << n); ++g) {
    std::uint64_t gray = g ^ (g >> 1);
    std::uint64_t diff = gray ^ prev;
    int col = std::countr_zero(diff);
    double sgn_col = (gray & diff) ? 1.0 : -1.0;
    for (int i = 0; i < n; ++i) rowsum[i] += sgn_col * A(i, col);
    prev = gray;
    cd prod = 1.0;
    for (int i = 0; i < n; ++i) prod *= rowsum[i];
    int bits = std::popcount(gray);
    total += ((n - bits) % 2 == 0) ? prod : -prod;
  }
  return total;
}

// Product state v_1 v ... v v_k in the orthonormal (standard) basis:
// component on a tuple A is perm(M_A) / sqrt(k! prod_i A_i!), with
// M_A[i][j] = (v_j)_{a_i}.
inline SymState vee_product(HalfInt s, const std::vector<Vec>& factors) {
  int k = static_cast<int>(factors.size());
  int d = s.multiplet_dim();
  for (const Vec& f : factors)
    if (f.size() != d) throw std::invalid_argument("factor dimension mismatch");
  const IndexTable& tab = sym_table(d, k);
  double kfac = 1.0;
  for (int i = 2; i <= k; ++i) kfac *= i;
  SymState out{s, k, Basis::standard, Vec::Zero(tab.size())};
  Mat M(k, k);
  for (std::size_t idx = 0; idx < tab.size(); ++idx) {
    const MultiIndex& a = tab.tuple(idx);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) M(i, j) = factors[j](a[i]);
    double mfac = 1.0;
    int run = 1;
    for (int i = 1; i < k; ++i) {
      if (a[i] == a[i - 1]) ++run; else run = 1;
      mfac *= run;
    }
    out.amp(idx) = permanent(M) / std::sqrt(kfac * mfac);
  }
  return out;
}

// Induced-basis components x_A (on e_A = e_{a_1} v ... v e_{a_k}) relate to
// standard components by x_A = N_A * xhat_A.
inline SymState convert_induced_standard(const SymState& in, Basis target) {
  if (in.basis == target) return in;
  if (in.basis == Basis::block || target == Basis::block)
    throw std::invalid_argument("block conversions need a BlockDiagonalizer");
  const IndexTable& tab = sym_table(in.d(), in.k);
  SymState out = in;
  out.basis = target;
  for (std::size_t i = 0; i < tab.size(); ++i) {
    double n = sym_normalizer(tab.tuple(i));
    out.amp(i) = (target == Basis::standard) ? in.amp(i) / n : in.amp(i) * n;
  }
  return out;
}

inline cd overlap(const SymState& a, const SymState& b) {
  if (a.s != b.s || a.k != b.k) throw std::invalid_argument("state shape mismatch");
  if (a.basis != b.basis) throw std::invalid_argument("overlap needs matching bases");
  if (a.basis == Basis::induced) {
    const IndexTable& tab = sym_table(a.d(), a.k);
    cd acc = 0.0;
    for (std::size_t i = 0; i < tab.size(); ++i) {
      double n = sym_normalizer(tab.tuple(i));
      acc += std::conj(a.amp(i)) * b.amp(i) / (n * n);
    }
    return acc;
  }
  return a.amp.dot(b.amp);
}

inline double state_norm(const SymState& a) {
  return std::sqrt(std::abs(overlap(a, a).real()));
}

// Induced inner product of two product states from the factor Gram matrix:
// <v_1 v ... v v_k, w_1 v ... v w_k> = perm(<v_i|w_j>) / k!.
inline cd vee_overlap(const std::vector<Vec>& v, const std::vector<Vec>& w) {
  int k = static_cast<int>(v.size());
  if (static_cast<int>(w.size()) != k) throw std::invalid_argument("factor count mismatch");
  Mat G(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) G(i, j) = v[i].dot(w[j]);
  double kfac = 1.0;
  for (int i = 2; i <= k; ++i) kfac *= i;
  return permanent(G) / kfac;
}

// Collective one-body operator sum_i 1 x ... x op x ... x 1 restricted to the
// symmetric power, in the standard basis.
inline Mat collective_operator(HalfInt s, int k, const Mat& op) {
  int d = s.multiplet_dim();
  if (op.rows() != d || op.cols() != d)
    throw std::invalid_argument("single-particle operator dimension mismatch");
  const IndexTable& tab = sym_table(d, k);
  std::size_t D = tab.size();
  Mat out = Mat::Zero(D, D);
  for (std::size_t col = 0; col < D; ++col) {
    const MultiIndex& a = tab.tuple(col);
    double na = sym_normalizer(a);
    for (int slot = 0; slot < k; ++slot) {
      if (slot > 0 && a[slot] == a[slot - 1]) continue;  // handled with count
      int count = 1;
      for (int t = slot + 1; t < k && a[t] == a[slot]; ++t) ++count;
      for (int b = 0; b < d; ++b) {
        cd amp = op(b, a[slot]);
        if (amp == cd(0.0)) continue;
        MultiIndex ap = a;
        ap[slot] = b;
        std::sort(ap.begin(), ap.end());
        std::size_t row = tab.index_of(ap);
        out(row, col) += static_cast<double>(count) * amp * na / sym_normalizer(ap);
      }
    }
  }
  return out;
}

inline Mat collective_spin_axis(HalfInt s, int k, const Vec3& n) {
  return collective_operator(s, k, spin_axis(s, n));
}

// Simultaneous rotation of every constituent, exp(-i angle axis.S_coll), on
// standard-basis amplitudes.
inline Mat collective_rotation(HalfInt s, int k, const Vec3& axis, double angle) {
  Eigen::SelfAdjointEigenSolver<Mat> es(collective_spin_axis(s, k, axis));
  Vec phases(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < phases.size(); ++i)
    phases(i) = std::exp(cd(0.0, -angle * es.eigenvalues()(i)));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

// Expansion of the state in the full k-fold tensor product (dimension d^k).
// Guarded by the d^k <= 2^22 cap; used for reduced densities.
inline Vec to_full_tensor(const SymState& state) {
  if (state.basis != Basis::standard)
    throw std::invalid_argument("to_full_tensor expects the standard basis");
  int d = state.d(), k = state.k;
  double sz = std::pow(static_cast<double>(d), k);
  if (sz > static_cast<double>(1 << 22))
    throw std::invalid_argument("full tensor embedding exceeds the 2^22 cap");
  std::int64_t N = static_cast<std::int64_t>(sz + 0.5);
  const IndexTable& tab = sym_table(d, k);
  Vec full = Vec::Zero(N);
  MultiIndex digits(k), sorted(k);
  for (std::int64_t lin = 0; lin < N; ++lin) {
    std::int64_t r = lin;
    for (int i = k - 1; i >= 0; --i) {
      digits[i] = static_cast<int>(r % d);
      r /= d;
    }
    sorted = digits;
    std::sort(sorted.begin(), sorted.end());
    std::size_t idx = tab.index_of(sorted);
    full(lin) = state.amp(idx) / sym_normalizer(sorted);
  }
  return full;
}

// Reduced density matrix of t parties (dimension d^t) obtained by embedding
// into the full tensor product and tracing out the remaining k - t parties.
inline Mat reduced_density(const SymState& state, int t) {
  if (t < 1 || t > state.k) throw std::invalid_argument("subsystem size out of range");
  SymState st = state.basis == Basis::standard
                    ? state
                    : convert_induced_standard(state, Basis::standard);
  double n = state_norm(st);
  if (n < 1e-15) throw std::invalid_argument("cannot reduce the zero state");
  Vec full = to_full_tensor(st) / n;
  std::int64_t rows = 1, cols = 1;
  for (int i = 0; i < t; ++i) rows *= st.d();
  for (int i = t; i < st.k; ++i) cols *= st.d();
  Eigen::Map<const Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
      M(full.data(), rows, cols);
  return M * M.adjoint();
}

// |s, s-i> basis ket of the single-spin space (m-descending component i).
inline Vec basis_ket(HalfInt s, int i) {
  Vec v = Vec::Zero(s.multiplet_dim());
  v(i) = 1.0;
  return v;
}

// Spin coherent state along n: the rotation image of |s, s>.
inline Vec coherent_spinor(HalfInt s, const Vec3& n) {
  Mat3 Rz = rotation_to_z(n);
  Mat D = wigner_rotation(s, Mat3(Rz.transpose()));
  return D.col(0);
}

// (|s,s>^xk + e^{i theta} |s,-s>^xk) / sqrt(2) in the standard basis.
inline SymState ghz_state(HalfInt s, int k, double theta = 0.0) {
  int d = s.multiplet_dim();
  const IndexTable& tab = sym_table(d, k);
  SymState out{s, k, Basis::standard, Vec::Zero(tab.size())};
  MultiIndex top(k, 0), bottom(k, d - 1);
  out.amp(tab.index_of(top)) = 1.0 / std::sqrt(2.0);
  out.amp(tab.index_of(bottom)) = std::exp(cd(0, theta)) / std::sqrt(2.0);
  return out;
}

}  // namespace symq
