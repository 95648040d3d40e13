#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

namespace symq {

using MultiIndex = std::vector<int>;  // 0-based single-particle labels

inline std::int64_t binom64(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    if (r > INT64_MAX / (n - k + i)) throw std::overflow_error("binomial overflow");
    r = r * (n - k + i) / i;
  }
  return r;
}

inline std::int64_t sym_dim(int d, int k) { return binom64(d + k - 1, k); }
inline std::int64_t wedge_dim(int d, int k) { return binom64(d, k); }

// Basis index set for the k-fold symmetric (nondecreasing tuples) or
// antisymmetric (strictly increasing tuples) power of C^d, enumerated in
// lexicographic order.
class IndexTable {
public:
  IndexTable(int d, int k, bool strict) : d_(d), k_(k), strict_(strict) {
    std::int64_t dim = strict ? wedge_dim(d, k) : sym_dim(d, k);
    if (dim <= 0) throw std::invalid_argument("empty index set");
    if (dim > (1 << 26)) throw std::invalid_argument("basis too large");
    tuples_.reserve(static_cast<std::size_t>(dim));
    MultiIndex a(k);
    for (int i = 0; i < k; ++i) a[i] = strict ? i : 0;
    if (k > 0 && strict && a.back() >= d) throw std::invalid_argument("k > d for strict tuples");
    while (true) {
      tuples_.push_back(a);
      rank_[a] = tuples_.size() - 1;
      int i = k - 1;
      while (i >= 0) {
        int cap = strict ? d - (k - i) : d - 1;
        if (a[i] < cap) break;
        --i;
      }
      if (i < 0) break;
      ++a[i];
      for (int t = i + 1; t < k; ++t) a[t] = strict ? a[t - 1] + 1 : a[i];
    }
  }

  int d() const { return d_; }
  int k() const { return k_; }
  std::size_t size() const { return tuples_.size(); }
  const MultiIndex& tuple(std::size_t i) const { return tuples_[i]; }

  std::size_t index_of(const MultiIndex& a) const {
    auto it = rank_.find(a);
    if (it == rank_.end()) throw std::out_of_range("tuple not in basis");
    return it->second;
  }

  // Twice the collective S_z weight of basis element i, for single-particle
  // labels carrying m = s - a (a the 0-based label).
  int twice_weight(std::size_t i, int twice_s) const {
    int w = 0;
    for (int a : tuples_[i]) w += twice_s - 2 * a;
    return w;
  }

private:
  int d_, k_;
  bool strict_;
  std::vector<MultiIndex> tuples_;
  std::map<MultiIndex, std::size_t> rank_;
};

// sqrt(k! / prod_i mult_i!) for a nondecreasing tuple; the ratio between the
// orthonormal basis vector and the plain symmetrized product.
inline double sym_normalizer(const MultiIndex& a) {
  double num = 1.0, den = 1.0;
  int run = 1;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num *= static_cast<double>(i + 1);
    if (i > 0 && a[i] == a[i - 1]) ++run; else run = 1;
    den *= run;
  }
  return std::sqrt(num / den);
}

}  // namespace symq
