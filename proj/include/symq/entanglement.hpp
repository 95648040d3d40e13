#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "symq/majorana.hpp"
#include "symq/parallel.hpp"
#include "symq/rng.hpp"
#include "symq/sym_space.hpp"

namespace symq {

// Gram matrix of factor kets, G(I, J) = <psi_I|psi_J>.
inline Mat gram_matrix(const std::vector<Vec>& factors) {
  int k = static_cast<int>(factors.size());
  Mat G(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) G(i, j) = factors[i].dot(factors[j]);
  return G;
}

// Eigenvalues of the factor Gram matrix, ascending, clamped to >= 0.
inline Eigen::VectorXd gram_spectrum(const std::vector<Vec>& factors) {
  Eigen::SelfAdjointEigenSolver<Mat> es(gram_matrix(factors));
  Eigen::VectorXd ev = es.eigenvalues();
  for (int i = 0; i < ev.size(); ++i) ev(i) = std::max(0.0, ev(i));
  return ev;
}

struct EntanglementOptions {
  int restarts = 64;       // Haar-random starts
  int grid_starts = 0;     // extra coherent-direction starts, qubit factors only
  int max_iter = 2000;
  double grad_tol = 1e-12;
  std::uint64_t seed = 0x5E3D1A7C9B42F0ULL;
  std::uint64_t stream_base = 0;  // offsets the per-restart RNG streams
  bool classify = true;           // second-derivative test at the maximizer
};

struct EntanglementResult {
  double E = 0.0;        // Fubini-Study angle to the closest product state
  double E_tilde = 0.0;  // 1 - squared overlap with it
  Vec maximizer;         // unit-norm single-party ket, first significant entry real positive
  double residual = 0.0;
  int restarts_used = 0;
  bool converged = false;
  bool degenerate = false;  // flat direction at the maximum beyond the gauge ones
};

namespace detail {

constexpr std::uint64_t kStreamStride = 0x10000;

inline void fix_phase(Vec& v, double rel_tol = 1e-9) {
  double scale = v.norm();
  for (int i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > rel_tol * scale) {
      v *= std::conj(v(i)) / std::abs(v(i));
      return;
    }
  }
}

// Squared overlap of phi^(x k) with a fixed symmetric state, as a gauge-invariant
// function of phi.  The overlap is a degree-k polynomial P in conj(phi) with one
// term per basis multi-index; value and Wirtinger gradient share the scratch
// buffers, so instances are not shareable across threads.
class SymOverlap {
 public:
  explicit SymOverlap(const SymState& state) {
    if (state.basis == Basis::block)
      throw std::invalid_argument("SymOverlap needs an induced- or standard-basis state");
    SymState std_state = convert_induced_standard(state, Basis::standard);
    double n = std_state.amp.norm();
    if (n < 1e-300) throw std::invalid_argument("SymOverlap: zero state");
    d_ = state.d();
    k_ = state.k;
    tab_ = &sym_table(d_, k_);
    coef_ = std_state.amp / n;
    for (std::size_t i = 0; i < tab_->size(); ++i)
      coef_(static_cast<int>(i)) *= sym_normalizer(tab_->tuple(i));
    pre_.resize(k_ + 1);
    suf_.resize(k_ + 1);
    c_.resize(d_);
    dP_.resize(d_);
  }

  int dim() const { return d_; }
  int parties() const { return k_; }

  double value(const Vec& phi) { return eval(phi, nullptr); }

  // Returns f and fills g with the gauge-projected gradient df/d(conj phi).
  double value_grad(const Vec& phi, Vec& g) { return eval(phi, &g); }

 private:
  double eval(const Vec& phi, Vec* g) {
    c_ = phi.conjugate();
    cd P = 0.0;
    if (g) dP_.setZero();
    for (std::size_t idx = 0; idx < tab_->size(); ++idx) {
      const MultiIndex& a = tab_->tuple(idx);
      pre_[0] = 1.0;
      for (int i = 0; i < k_; ++i) pre_[i + 1] = pre_[i] * c_(a[i]);
      cd w = coef_(static_cast<int>(idx));
      P += w * pre_[k_];
      if (g) {
        suf_[k_] = 1.0;
        for (int i = k_ - 1; i >= 0; --i) suf_[i] = suf_[i + 1] * c_(a[i]);
        for (int i = 0; i < k_; ++i) dP_(a[i]) += w * pre_[i] * suf_[i + 1];
      }
    }
    double n = phi.squaredNorm();
    double nk = std::pow(n, k_);
    double f = std::norm(P) / nk;
    if (g) {
      *g = dP_ * (std::conj(P) / nk) - phi * (k_ * f / n);
      *g -= phi * (phi.dot(*g) / n);  // gauge directions are exactly flat
    }
    return f;
  }

  const IndexTable* tab_;
  Vec coef_;
  int d_, k_;
  std::vector<cd> pre_, suf_;
  Vec c_, dP_;
};

// Squared overlap with the closest product state of a vee product of k factors,
// written in the factor coordinates z_I = <psi_I|phi>.  Only the k x k Gram
// matrix of the factors enters; requires it to be invertible.
class GramOverlap {
 public:
  explicit GramOverlap(const Mat& G) : k_(static_cast<int>(G.rows())) {
    Eigen::SelfAdjointEigenSolver<Mat> es(G);
    double lo = es.eigenvalues()(0), hi = es.eigenvalues()(k_ - 1);
    if (lo < 1e-12 * hi)
      throw std::invalid_argument("GramOverlap: singular Gram matrix, reduce the rank first");
    Ginv_ = es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
            es.eigenvectors().adjoint();
    p0_ = permanent(G).real();
    for (int i = 2; i <= k_; ++i) p0_ /= i;
    pre_.resize(k_ + 1);
    suf_.resize(k_ + 1);
    zr_.resize(k_);
  }

  int dim() const { return k_; }

  double value(const Vec& z) { return eval(z, nullptr); }
  double value_grad(const Vec& z, Vec& g) { return eval(z, &g); }

  Vec raised(const Vec& z) const { return Ginv_ * z; }

  // Largest deviation of the per-factor contributions conj(z_I) (Ginv z)_I from
  // their common critical-point value D/k, relative to D.
  double residual(const Vec& z) const {
    Vec zr = Ginv_ * z;
    double D = z.dot(zr).real();
    double r = 0.0;
    for (int i = 0; i < k_; ++i)
      r = std::max(r, std::abs(std::conj(z(i)) * zr(i) / D - cd(1.0 / k_, 0.0)));
    return r;
  }

 private:
  double eval(const Vec& z, Vec* g) {
    zr_.noalias() = Ginv_ * z;
    double D = z.dot(zr_).real();
    pre_[0] = 1.0;
    for (int i = 0; i < k_; ++i) pre_[i + 1] = pre_[i] * std::norm(z(i));
    double f = pre_[k_] / (std::pow(D, k_) * p0_);
    if (g) {
      suf_[k_] = 1.0;
      for (int i = k_ - 1; i >= 0; --i) suf_[i] = suf_[i + 1] * std::norm(z(i));
      g->resize(k_);
      double scale = std::pow(D, k_) * p0_;
      for (int i = 0; i < k_; ++i)
        (*g)(i) = z(i) * (pre_[i] * suf_[i + 1] / scale) - zr_(i) * (k_ * f / D);
      *g -= z * (z.dot(*g) / z.squaredNorm());
    }
    return f;
  }

  Mat Ginv_;
  double p0_;
  int k_;
  std::vector<double> pre_, suf_;
  Vec zr_;
};

struct AscentState {
  Vec x;
  double f = -1.0;
  double gnorm = 0.0;
  bool converged = false;
};

// Projected gradient ascent with multiplicative step adaptation.  Stops when
// the gauge-projected gradient is below grad_tol or the step underflows, the
// latter meaning f is flat to machine precision along the gradient.
template <class Obj>
AscentState ascend(Obj& obj, Vec x, int max_iter, double grad_tol) {
  x.normalize();
  Vec g(x.size()), trial(x.size());
  double f = obj.value_grad(x, g);
  double eta = 0.25;
  for (int it = 0; it < max_iter; ++it) {
    double gn = g.norm();
    if (gn < grad_tol) return {x, f, gn, true};
    trial = x + eta * g;
    trial.normalize();
    double ft = obj.value(trial);
    if (ft > f) {
      x.swap(trial);
      f = obj.value_grad(x, g);
      eta *= 1.3;
    } else {
      eta *= 0.4;
      if (eta < 1e-18) break;
    }
  }
  double gn = g.norm();
  return {x, f, gn, gn < grad_tol};
}

// Real second-derivative matrix of f on the affine chart that freezes the
// component `pin` of x; coordinates are (Re, Im) of the remaining entries.
template <class Obj>
Eigen::MatrixXd chart_hessian_step(Obj& obj, const Vec& x, int pin, double h) {
  int n = static_cast<int>(x.size());
  int m = 2 * (n - 1);
  auto at = [&](const Eigen::VectorXd& u) {
    Vec y = x;
    int t = 0;
    for (int a = 0; a < n; ++a) {
      if (a == pin) continue;
      y(a) += cd(u(2 * t), u(2 * t + 1));
      ++t;
    }
    return obj.value(y);
  };
  Eigen::VectorXd u = Eigen::VectorXd::Zero(m);
  double f0 = at(u);
  Eigen::MatrixXd H(m, m);
  for (int i = 0; i < m; ++i) {
    u(i) = h;
    double fp = at(u);
    u(i) = -h;
    double fm = at(u);
    u(i) = 0.0;
    H(i, i) = (fp - 2.0 * f0 + fm) / (h * h);
    for (int j = 0; j < i; ++j) {
      double s = 0.0;
      for (int si : {1, -1})
        for (int sj : {1, -1}) {
          u(i) = si * h;
          u(j) = sj * h;
          s += si * sj * at(u);
        }
      u(i) = u(j) = 0.0;
      H(i, j) = H(j, i) = s / (4.0 * h * h);
    }
  }
  return H;
}

template <class Obj>
Eigen::MatrixXd chart_hessian(Obj& obj, const Vec& x, int pin, double h = 1e-3) {
  // One Richardson sweep removes the leading h^2 truncation term.
  return (4.0 * chart_hessian_step(obj, x, pin, h / 2) - chart_hessian_step(obj, x, pin, h)) / 3.0;
}

// Newton refinement on the pinned chart with the curvature clamped away from
// zero, so flat directions of a degenerate maximizer family are left alone
// instead of blowing up the step.
template <class Obj>
void polish(Obj& obj, AscentState& st, double grad_tol, Eigen::MatrixXd* hessian_out) {
  int n = static_cast<int>(st.x.size());
  int m = 2 * (n - 1);
  Vec g(n);
  Eigen::MatrixXd H;
  if (m == 0) {  // one-dimensional party space: everything is gauge
    st.x.normalize();
    st.f = obj.value_grad(st.x, g);
    st.gnorm = g.norm();
    st.converged = st.gnorm < grad_tol;
    if (hessian_out) hessian_out->resize(0, 0);
    return;
  }
  for (int round = 0; round < 3 && !(st.gnorm < grad_tol); ++round) {
    st.x.normalize();
    int pin = 0;
    for (int a = 1; a < n; ++a)
      if (std::abs(st.x(a)) > std::abs(st.x(pin))) pin = a;
    H = chart_hessian(obj, st.x, pin);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    double clamp = std::max(1e-6, 1e-6 * es.eigenvalues().cwiseAbs().maxCoeff());
    Eigen::VectorXd inv_ev(m);
    for (int i = 0; i < m; ++i) inv_ev(i) = 1.0 / std::min(es.eigenvalues()(i), -clamp);
    for (int step = 0; step < 10 && !(st.gnorm < grad_tol); ++step) {
      st.f = obj.value_grad(st.x, g);
      st.gnorm = g.norm();
      if (st.gnorm < grad_tol) break;
      Eigen::VectorXd gr(m);
      int t = 0;
      for (int a = 0; a < n; ++a) {
        if (a == pin) continue;
        gr(2 * t) = 2.0 * g(a).real();
        gr(2 * t + 1) = 2.0 * g(a).imag();
        ++t;
      }
      Eigen::VectorXd du = -(es.eigenvectors() * inv_ev.asDiagonal() *
                             es.eigenvectors().transpose() * gr);
      bool accepted = false;
      for (int halve = 0; halve < 6 && !accepted; ++halve) {
        Vec y = st.x;
        int tt = 0;
        for (int a = 0; a < n; ++a) {
          if (a == pin) continue;
          y(a) += cd(du(2 * tt), du(2 * tt + 1));
          ++tt;
        }
        Vec gy(n);
        double fy = obj.value_grad(y, gy);
        if (gy.norm() < st.gnorm) {
          st.x = y;
          st.f = fy;
          st.gnorm = gy.norm();
          accepted = true;
        } else {
          du *= 0.5;
        }
      }
      if (!accepted) break;
    }
  }
  st.x.normalize();
  st.f = obj.value_grad(st.x, g);
  st.gnorm = g.norm();
  st.converged = st.gnorm < grad_tol;
  if (hessian_out) {
    int pin = 0;
    for (int a = 1; a < n; ++a)
      if (std::abs(st.x(a)) > std::abs(st.x(pin))) pin = a;
    *hessian_out = chart_hessian(obj, st.x, pin);
  }
}

inline std::vector<Vec3> fibonacci_sphere(int m) {
  std::vector<Vec3> pts;
  pts.reserve(m);
  double golden_angle = pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < m; ++i) {
    double z = 1.0 - 2.0 * (i + 0.5) / m;
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    double phi = golden_angle * i;
    pts.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
  }
  return pts;
}

template <class Obj>
AscentState run_multistart(Obj& obj, int dim, const EntanglementOptions& opt,
                           const std::vector<Vec>& extra_starts, int* starts_used) {
  AscentState best;
  int used = 0;
  for (const Vec& s : extra_starts) {
    AscentState r = ascend(obj, s, opt.max_iter, opt.grad_tol);
    ++used;
    if (r.f > best.f) best = r;
  }
  for (int r = 0; r < opt.restarts; ++r) {
    CounterRng rng(opt.seed, opt.stream_base + r + 1);
    AscentState a = ascend(obj, rng.haar_ket(dim), opt.max_iter, opt.grad_tol);
    ++used;
    if (a.f > best.f) best = a;
  }
  if (starts_used) *starts_used = used;
  return best;
}

inline void finish_result(EntanglementResult& out, const AscentState& st,
                          const Eigen::MatrixXd* H) {
  double f = std::clamp(st.f, 0.0, 1.0);
  out.E_tilde = 1.0 - f;
  out.E = std::acos(std::sqrt(f));
  out.converged = st.converged;
  if (H && H->size() > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(*H);
    out.degenerate = es.eigenvalues().maxCoeff() > -1e-8;
  }
}

}  // namespace detail

// Geometric measure of entanglement by multi-start ascent over the single-party
// ket phi, maximizing the squared overlap of phi^(x k) with the state.
inline EntanglementResult geometric_entanglement(const SymState& state,
                                                 const EntanglementOptions& opt = {}) {
  detail::SymOverlap obj(state);
  std::vector<Vec> seeds;
  if (opt.grid_starts > 0 && obj.dim() == 2) {
    for (const Vec3& n : detail::fibonacci_sphere(opt.grid_starts))
      seeds.push_back(coherent_spinor(HalfInt::from_twice(1), n));
  }
  EntanglementResult out;
  detail::AscentState best =
      detail::run_multistart(obj, obj.dim(), opt, seeds, &out.restarts_used);
  Eigen::MatrixXd H;
  detail::polish(obj, best, opt.grad_tol, opt.classify ? &H : nullptr);
  detail::finish_result(out, best, opt.classify ? &H : nullptr);
  out.maximizer = best.x;
  detail::fix_phase(out.maximizer);
  out.residual = best.gnorm;
  return out;
}

// Same maximization in factor coordinates z_I = <psi_I|phi>, which only sees
// the factor Gram matrix.  Requires linearly independent factors.
inline EntanglementResult gram_entanglement(const std::vector<Vec>& factors,
                                            const EntanglementOptions& opt = {}) {
  int k = static_cast<int>(factors.size());
  if (k == 0) throw std::invalid_argument("gram_entanglement: no factors");
  detail::GramOverlap obj(gram_matrix(factors));
  EntanglementResult out;
  detail::AscentState best = detail::run_multistart(obj, k, opt, {}, &out.restarts_used);
  Eigen::MatrixXd H;
  detail::polish(obj, best, opt.grad_tol, opt.classify ? &H : nullptr);
  detail::finish_result(out, best, opt.classify ? &H : nullptr);
  out.residual = obj.residual(best.x);
  Vec c = obj.raised(best.x);
  Vec phi = Vec::Zero(factors[0].size());
  for (int i = 0; i < k; ++i) phi += c(i) * factors[i];
  phi.normalize();
  detail::fix_phase(phi);
  out.maximizer = phi;
  return out;
}

// Orthonormalizes the factors in order and rotates them onto the leading
// coordinates, so factor I has support on the first rank(psi_1..psi_I) entries.
struct RankReduction {
  std::vector<Vec> reduced;  // rank-dimensional kets with the staircase pattern
  Mat U;                     // unitary; U * (reduced_I padded with zeros) = factor_I
  int rank = 0;
};

inline RankReduction rank_reduce(const std::vector<Vec>& factors, double tol = 1e-10) {
  if (factors.empty()) throw std::invalid_argument("rank_reduce: no factors");
  int d = static_cast<int>(factors[0].size());
  std::vector<Vec> q;
  auto residue = [&](Vec w) {
    for (int pass = 0; pass < 2; ++pass)
      for (const Vec& b : q) w -= b * b.dot(w);
    return w;
  };
  for (const Vec& f : factors) {
    Vec w = residue(f);
    if (w.norm() > tol * f.norm()) q.push_back(w.normalized());
  }
  int r = static_cast<int>(q.size());
  for (int a = 0; a < d && static_cast<int>(q.size()) < d; ++a) {
    Vec w = residue(Vec::Unit(d, a));
    if (w.norm() > 0.3) q.push_back(w.normalized());
  }
  RankReduction out;
  out.rank = r;
  out.U.resize(d, d);
  for (int i = 0; i < d; ++i) out.U.col(i) = q[i];
  for (const Vec& f : factors) out.reduced.push_back((out.U.adjoint() * f).head(r));
  return out;
}

enum class Measure { haar, stars };

inline const char* measure_name(Measure m) { return m == Measure::haar ? "haar" : "stars"; }

inline Measure measure_from_name(const std::string& s) {
  if (s == "haar") return Measure::haar;
  if (s == "stars") return Measure::stars;
  throw std::invalid_argument("unknown measure: " + s);
}

// Deterministic factor sample: `haar` draws each factor uniformly on the unit
// sphere of C^d, `stars` places 2s independent uniform points on S^2 per factor.
// Every output is a pure function of (seed, sample_index).
inline std::vector<Vec> random_factorizable(HalfInt s, int k, Measure measure,
                                            std::uint64_t seed, std::uint64_t sample_index = 0) {
  CounterRng rng(seed, sample_index * detail::kStreamStride);
  int d = s.multiplet_dim();
  std::vector<Vec> out;
  out.reserve(k);
  for (int i = 0; i < k; ++i) {
    if (measure == Measure::haar) {
      out.push_back(rng.haar_ket(d));
    } else {
      Constellation c;
      for (int star = 0; star < s.twice(); ++star) c.stars.push_back(rng.sphere_point());
      out.push_back(constellation_to_state(c).a);
    }
  }
  return out;
}

struct ScanRecord {
  std::int64_t sample_index = 0;
  std::vector<double> lambdas;  // ascending; min(k, d) - 1 values below the top one
  double E_tilde = 0.0;
};

struct ScanOptions {
  int restarts = 8;
  int grid_starts = 16;
  int max_iter = 600;
  double grad_tol = 1e-10;
};

// Number of Gram eigenvalues a scan reports: the largest one is fixed by the
// trace and is dropped, zeros beyond the generic rank are dropped too.
inline int scan_lambda_count(HalfInt s, int k) {
  return std::max(0, std::min(k, s.multiplet_dim()) - 1);
}

inline std::vector<ScanRecord> scan(HalfInt s, int k, std::int64_t samples, Measure measure,
                                    std::uint64_t seed, const ScanOptions& sopt = {}) {
  std::vector<ScanRecord> out(static_cast<std::size_t>(samples));
  int keep = scan_lambda_count(s, k);
  parallel_ranges(static_cast<std::size_t>(samples), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      std::vector<Vec> factors = random_factorizable(s, k, measure, seed, i);
      Eigen::VectorXd ev = gram_spectrum(factors);
      ScanRecord& rec = out[i];
      rec.sample_index = static_cast<std::int64_t>(i);
      for (int j = k - 1 - keep; j < k - 1; ++j) rec.lambdas.push_back(ev(j));
      SymState state = vee_product(s, factors);
      state.amp /= state.amp.norm();
      EntanglementOptions opt;
      opt.restarts = sopt.restarts;
      opt.grid_starts = sopt.grid_starts;
      opt.max_iter = sopt.max_iter;
      opt.grad_tol = sopt.grad_tol;
      opt.seed = seed;
      opt.stream_base = i * detail::kStreamStride;
      opt.classify = false;
      rec.E_tilde = geometric_entanglement(state, opt).E_tilde;
    }
  });
  return out;
}

// RFC-4180 CSV with a header row; floats carry 17 significant digits.
inline void write_scan_csv(std::ostream& os, HalfInt s, int k,
                           const std::vector<ScanRecord>& records, Measure measure,
                           std::uint64_t seed) {
  int keep = scan_lambda_count(s, k);
  os << "sample_index";
  for (int i = 1; i <= keep; ++i) os << ",lambda_" << i;
  os << ",E_tilde,measure,seed\r\n";
  char buf[64];
  auto fmt = [&](double x) {
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return std::string(buf);
  };
  for (const ScanRecord& r : records) {
    os << r.sample_index;
    for (double l : r.lambdas) os << ',' << fmt(l);
    os << ',' << fmt(r.E_tilde) << ',' << measure_name(measure) << ',' << seed << "\r\n";
  }
}

// Constant-speed Fubini-Study geodesic between two rays; gamma(0) = psi0 and
// gamma(1) = psi1 up to phase and normalization of the inputs.
inline Vec fs_geodesic(const Vec& psi0, const Vec& psi1, double t) {
  Vec a = psi0.normalized(), b = psi1.normalized();
  cd ov = a.dot(b);
  if (std::abs(ov) < 1e-12)
    throw std::invalid_argument("fs_geodesic: antipodal endpoints give no unique geodesic");
  b *= std::conj(ov) / std::abs(ov);
  double c = std::clamp(std::abs(ov), 0.0, 1.0);
  double theta = std::acos(c);
  if (theta < 1e-12) return a;
  Vec u = (b - c * a) / std::sin(theta);
  return std::cos(t * theta) * a + std::sin(t * theta) * u;
}

// Qubit case only: the factor spinors of a symmetric multiqubit state are the
// root spinors of its amplitude vector read as one spin-k/2 ket.
inline std::vector<Vec> qubit_factors(const SymState& state) {
  if (state.d() != 2)
    throw std::invalid_argument("qubit_factors needs spin-1/2 parties");
  SymState std_state = convert_induced_standard(state, Basis::standard);
  Constellation c = majorana_roots({HalfInt::from_twice(state.k), std_state.amp});
  std::vector<Vec> out;
  for (const Vec3& n : c.stars) {
    Constellation single;
    single.stars.push_back(n);
    out.push_back(constellation_to_state(single).a);
  }
  return out;
}

}  // namespace symq
