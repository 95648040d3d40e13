#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "symq/spin_ops.hpp"

namespace symq {

// Gauss-Legendre nodes and weights on [a, b]; Newton iteration on P_n.
struct Quadrature {
  std::vector<double> nodes, weights;
};

inline Quadrature gauss_legendre(int n, double a, double b) {
  Quadrature q;
  q.nodes.resize(n);
  q.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Chebyshev initial guess for the i-th root of P_n.
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int l = 2; l <= n; ++l) {
        double p2 = ((2.0 * l - 1.0) * x * p1 - (l - 1.0) * p0) / l;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    q.nodes[i] = 0.5 * (b - a) * x + 0.5 * (a + b);
    q.weights[i] = (b - a) / ((1.0 - x * x) * dp * dp);
  }
  return q;
}

enum class MultMethod { integral, recursion, genfunc };

// Multiplicities keyed by twice the spin j; only nonzero entries present.
using MultTable = std::map<int, std::int64_t, std::greater<int>>;

namespace detail {

inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("multiplicity overflow");
  return r;
}

// Weight-multiset counts of the k-fold symmetric (or antisymmetric) power:
// counts[i] = number of basis tuples with twice-weight (twice_smax - 2i).
inline std::vector<std::int64_t> weight_counts(int twice_s, int k, bool strict) {
  int d = twice_s + 1;
  int span = twice_s * k;  // twice the top weight
  std::vector<std::vector<std::int64_t>> dp(
      k + 1, std::vector<std::int64_t>(span + 1, 0));
  dp[0][0] = 1;  // offset index: (twice_smax - twice_weight) / 2
  // Labels a = 0..d-1 carry twice-weight twice_s - 2a; using label a for one
  // slot adds a to the offset.
  for (int a = 0; a < d; ++a) {
    if (strict) {
      for (int t = k; t >= 1; --t)
        for (int off = span; off >= a; --off)
          if (dp[t - 1][off - a] != 0)
            dp[t][off] = checked_add(dp[t][off], dp[t - 1][off - a]);
    } else {
      for (int t = 1; t <= k; ++t)
        for (int off = a; off <= span; ++off)
          if (dp[t - 1][off - a] != 0)
            dp[t][off] = checked_add(dp[t][off], dp[t - 1][off - a]);
    }
  }
  return dp[k];
}

}  // namespace detail

// Symmetric-power weight counts indexed by offset i from the top weight:
// twice_weight = twice_s * k - 2 i.
inline std::vector<std::int64_t> sym_weight_counts(HalfInt s, int k) {
  return detail::weight_counts(s.twice(), k, false);
}

inline std::vector<std::int64_t> wedge_weight_counts(HalfInt s, int k) {
  return detail::weight_counts(s.twice(), k, true);
}

inline MultTable table_from_weight_counts(const std::vector<std::int64_t>& w,
                                          int twice_top) {
  MultTable out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    int twice_j = twice_top - 2 * static_cast<int>(i);
    if (twice_j < 0) break;
    // mu_j = N(weight j) - N(weight j + 1); counts are indexed downward from
    // the top weight, so the weight above sits one slot earlier.
    std::int64_t above = (i >= 1) ? w[i - 1] : 0;
    std::int64_t mu = w[i] - above;
    if (mu < 0) throw std::logic_error("weight counts not unimodal");
    if (mu > 0) out[twice_j] = mu;
  }
  return out;
}

// Character of the symmetric power at rotation angle alpha, by the power-sum
// recursion xi_n = (1/n) sum_m chi_s(m alpha) xi_{n-m}.
inline double sym_power_character(HalfInt s, int k, double alpha) {
  std::vector<double> xi(k + 1);
  xi[0] = 1.0;
  for (int n = 1; n <= k; ++n) {
    double acc = 0.0;
    for (int m = 1; m <= n; ++m) acc += character(s, m * alpha) * xi[n - m];
    xi[n] = acc / n;
  }
  return xi[k];
}

// Antisymmetric counterpart: the signs alternate (elementary symmetric
// polynomials instead of complete homogeneous ones).
inline double wedge_power_character(HalfInt s, int k, double alpha) {
  std::vector<double> xi(k + 1);
  xi[0] = 1.0;
  for (int n = 1; n <= k; ++n) {
    double acc = 0.0;
    for (int m = 1; m <= n; ++m) {
      double term = character(s, m * alpha) * xi[n - m];
      acc += (m % 2 == 1) ? term : -term;
    }
    xi[n] = acc / n;
  }
  return xi[k];
}

// mu_j = (1/pi) Int_0^{2pi} sin^2(alpha/2) xi(alpha) chi_j(alpha) d alpha.
// The integrand is a 2pi-periodic trigonometric polynomial with harmonics
// |m| <= 2sk + 1, so the uniform rule with 4(sk + 1) nodes is exact up to
// rounding.  Returns the raw quadrature values before rounding, keyed by
// twice j.
inline std::map<int, double, std::greater<int>> multiplicities_integral_raw(
    HalfInt s, int k, bool strict = false) {
  int twice_top = s.twice() * k;
  int n_nodes = 2 * twice_top + 4;
  std::vector<double> nodes(n_nodes), xi(n_nodes);
  for (int i = 0; i < n_nodes; ++i) {
    nodes[i] = 2.0 * pi * (i + 0.5) / n_nodes;
    xi[i] = strict ? wedge_power_character(s, k, nodes[i])
                   : sym_power_character(s, k, nodes[i]);
  }
  std::map<int, double, std::greater<int>> out;
  for (int twice_j = twice_top; twice_j >= 0; twice_j -= 2) {
    HalfInt j = HalfInt::from_twice(twice_j);
    double acc = 0.0;
    for (int i = 0; i < n_nodes; ++i) {
      double shalf = std::sin(0.5 * nodes[i]);
      acc += shalf * shalf * xi[i] * character(j, nodes[i]);
    }
    out[twice_j] = acc * 2.0 / n_nodes;
  }
  return out;
}

namespace detail {

// Exact power-sum recursion on weight-multiset vectors (the Fourier
// coefficients of the character recursion).  Entries are indexed by offset
// from the running top weight; division by n is exact.
inline std::vector<std::int64_t> weight_counts_recursive(int twice_s, int k) {
  std::vector<std::vector<std::int64_t>> W(k + 1);
  W[0] = {1};
  for (int n = 1; n <= k; ++n) {
    // W[n] spans offsets 0..n*twice_s from top weight n*s.
    std::vector<std::int64_t> acc(n * twice_s + 1, 0);
    for (int m = 1; m <= n; ++m) {
      // chi_s(m alpha) has weights m*(s - a), i.e. offsets m*a scaled by m.
      const std::vector<std::int64_t>& rest = W[n - m];
      for (int a = 0; a <= twice_s; ++a) {
        int base = m * a;
        for (std::size_t r = 0; r < rest.size(); ++r) {
          if (rest[r] == 0) continue;
          acc[base + r] = checked_add(acc[base + r], rest[r]);
        }
      }
    }
    W[n].resize(acc.size());
    for (std::size_t i = 0; i < acc.size(); ++i) {
      if (acc[i] % n != 0) throw std::logic_error("recursion not divisible");
      W[n][i] = acc[i] / n;
    }
  }
  return W[k];
}

// Gaussian binomial C(n, m)_q coefficients (degree m (n - m)).
inline std::vector<std::int64_t> gaussian_binomial(int n, int m) {
  // dp[mm] = coefficients of C(nn, mm)_q, built up in nn.
  std::vector<std::vector<std::int64_t>> dp(m + 1);
  dp[0] = {1};
  for (int nn = 1; nn <= n; ++nn) {
    for (int mm = std::min(nn, m); mm >= 1; --mm) {
      // C(nn, mm)_q = C(nn-1, mm)_q + q^{nn-mm} C(nn-1, mm-1)_q
      std::vector<std::int64_t> next(mm * (nn - mm) + 1, 0);
      if (mm < nn) {
        const std::vector<std::int64_t>& keep = dp[mm];
        for (std::size_t i = 0; i < keep.size(); ++i) next[i] = keep[i];
      }
      const std::vector<std::int64_t>& add = dp[mm - 1];
      int shift = nn - mm;
      for (std::size_t i = 0; i < add.size(); ++i)
        next[i + shift] = checked_add(next[i + shift], add[i]);
      dp[mm] = std::move(next);
    }
  }
  return dp[m];
}

}  // namespace detail

// Irreducible multiplicities of the k-fold symmetric power of spin s.
inline MultTable multiplicities(HalfInt s, int k, MultMethod method) {
  int twice_top = s.twice() * k;
  switch (method) {
    case MultMethod::integral: {
      auto raw = multiplicities_integral_raw(s, k);
      MultTable out;
      for (auto& [twice_j, v] : raw) {
        double r = std::round(v);
        if (std::abs(v - r) > 1e-6)
          throw std::runtime_error("character integral did not round to an integer");
        if (r > 0.5) out[twice_j] = static_cast<std::int64_t>(r);
      }
      return out;
    }
    case MultMethod::recursion:
      return table_from_weight_counts(
          detail::weight_counts_recursive(s.twice(), k), twice_top);
    case MultMethod::genfunc: {
      // Laurent expansion of (1 - x^{-1}) x^{-sk} C(k+2s, 2s)_x: the
      // coefficient of x^j is c_{j+sk} - c_{j+sk+1}.
      std::vector<std::int64_t> c = detail::gaussian_binomial(k + s.twice(), s.twice());
      MultTable out;
      for (int twice_j = twice_top; twice_j >= 0; twice_j -= 2) {
        std::size_t i = static_cast<std::size_t>((twice_j + twice_top) / 2);
        std::int64_t ci = (i < c.size()) ? c[i] : 0;
        std::int64_t cn = (i + 1 < c.size()) ? c[i + 1] : 0;
        if (ci - cn > 0) out[twice_j] = ci - cn;
      }
      return out;
    }
  }
  throw std::logic_error("unreachable");
}

// Antisymmetric-power multiplicities (weight-count method).
inline MultTable wedge_multiplicities(HalfInt s, int k) {
  int d = s.multiplet_dim();
  if (k > d) throw std::invalid_argument("antisymmetric power vanishes for k > 2s+1");
  std::vector<std::int64_t> w = wedge_weight_counts(s, k);
  // The strict-tuple DP indexes offsets from k*s; the top weight actually
  // attained starts k(k-1)/2 steps below that.
  int lead = k * (k - 1) / 2;
  w.erase(w.begin(), w.begin() + lead);
  return table_from_weight_counts(w, s.twice() * k - k * (k - 1));
}

// Multiplicity of the trivial (j = 0) irrep in the k-fold symmetric power,
// for k = 0..k_max: the coefficients of the invariant-counting series.
inline std::vector<std::int64_t> molien_coefficients(HalfInt s, int k_max) {
  std::vector<std::int64_t> out(k_max + 1);
  out[0] = 1;
  for (int k = 1; k <= k_max; ++k) {
    MultTable t = multiplicities(s, k, MultMethod::genfunc);
    auto it = t.find(0);
    out[k] = (it == t.end()) ? 0 : it->second;
  }
  return out;
}

}  // namespace symq
