#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "symq/block_diag.hpp"
#include "symq/majorana.hpp"
#include "symq/spin_ops.hpp"

namespace symq {

// True when some nonidentity rotation maps the constellation to itself
// within tol.  Candidate rotations are generated from ordered star pairs
// sharing the relative angle of a fixed probe pair; collinear constellations
// have a continuous stabilizer.
inline bool constellation_symmetric(const Constellation& c, double tol = 1e-6) {
  int n = static_cast<int>(c.size());
  if (n == 0) return false;
  const std::vector<Vec3>& st = c.stars;
  int q = -1;
  for (int i = 1; i < n; ++i) {
    if (st[i].cross(st[0]).norm() > tol) {
      q = i;
      break;
    }
  }
  if (q < 0) return true;  // all stars on one axis
  auto frame = [](const Vec3& a, const Vec3& b) {
    Mat3 F;
    F.col(0) = a;
    F.col(1) = (b - a.dot(b) * a).normalized();
    F.col(2) = a.cross(F.col(1));
    return F;
  };
  Mat3 Fpq = frame(st[0], st[q]);
  double ref_cos = st[0].dot(st[q]);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (b == a || std::abs(st[a].dot(st[b]) - ref_cos) > 2.0 * tol) continue;
      if (st[b].cross(st[a]).norm() <= tol) continue;
      Mat3 R = frame(st[a], st[b]) * Fpq.transpose();
      if (axis_angle_from_matrix(R).angle < 2.0 * tol) continue;
      Constellation rot = rotate_constellation(R, c);
      if (constellation_distance(rot, c) < tol) return true;
    }
  }
  return false;
}

struct ReferenceOrientation {
  Mat3 rot = Mat3::Identity();  // R2 * R1
  Mat dj;                       // the Wigner matrix of rot actually used
  bool anticoherent_fallback = false;
  bool symmetric = false;
};

namespace detail {

// First multipole coefficient with m != 0, scanning l ascending and m
// descending; positive m suffices since c_{l,-m} = (-1)^m conj(c_{lm}).
inline bool first_transverse_multipole(const MultipoleCoeffs& c, int& l_out, int& m_out,
                                       double rel_tol = 1e-9) {
  double scale = c.norm();
  for (int l = 1; l <= c.twice_j; ++l) {
    for (int m = l; m >= 1; --m) {
      if (std::abs(c.at(l, m)) > rel_tol * scale) {
        l_out = l;
        m_out = m;
        return true;
      }
    }
  }
  return false;
}

inline void phase_fix(Vec& v, double rel_tol = 1e-9) {
  double scale = v.norm();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > rel_tol * scale) {
      v *= std::conj(v(i)) / std::abs(v(i));
      return;
    }
  }
}

}  // namespace detail

// Orientation fix: rotate the spin expectation to +z, then about z until the
// first transverse multipole is real positive.  Anticoherent states fall
// back to aligning the spin expectation of the first nonzero multipole row
// read as a spin-l ket; that convention is flagged.
inline ReferenceOrientation reference_orientation(const Spinor& psi) {
  ReferenceOrientation out;
  Vec a = psi.a / psi.a.norm();
  Mat rho = a * a.adjoint();

  Vec3 sv = spin_expectation(Spinor{psi.j, a});
  Mat3 R1 = Mat3::Identity();
  if (sv.norm() > 1e-9) {
    R1 = rotation_to_z(sv);
  } else {
    out.anticoherent_fallback = true;
    MultipoleCoeffs mc = multipole_coeffs(psi.j, rho);
    double scale = mc.norm();
    for (int l = 1; l <= psi.j.twice(); ++l) {
      if (mc.rows[l].norm() > 1e-9 * scale) {
        Vec3 aux = spin_expectation(Spinor{HalfInt::from_twice(2 * l), mc.rows[l]});
        if (aux.norm() > 1e-9) R1 = rotation_to_z(aux);
        break;
      }
    }
  }

  Mat D1 = wigner_rotation(psi.j, R1);
  Mat rho1 = D1 * rho * D1.adjoint();
  MultipoleCoeffs mc1 = multipole_coeffs(psi.j, rho1);
  int lt = 0, mt = 0;
  Mat3 R2 = Mat3::Identity();
  double phi2 = 0.0;
  if (detail::first_transverse_multipole(mc1, lt, mt)) {
    double delta = std::arg(mc1.at(lt, mt));
    // Every angle delta/mt + 2 pi n/mt leaves c_{lt,mt} real positive, and
    // which n the principal arg lands on depends on the starting frame.  Tie
    // the choice to the state itself: take the branch whose multipole list,
    // in scan order, is lexicographically largest (real part before
    // imaginary part, 1e-9 relative tolerance).  A state invariant under the
    // leftover z-rotations ties exactly at that level; the surviving
    // ambiguity is the stabilizer eigenphase on the ket, so break it with
    // the same comparison on the candidate tilted kets, smallest first.
    // Both candidate lists transform rigidly with the input frame, which
    // keeps the selection frame independent; the ket stage ties the leftover
    // phase convention to the input ket's own phase.
    Vec t0 = D1 * a;
    double scale = mc1.norm();
    auto rank = [&](double phi_a, double phi_b) {
      for (int l = 1; l <= mc1.twice_j; ++l) {
        for (int m = l; m >= -l; --m) {
          cd ca = mc1.at(l, m) * std::exp(cd(0.0, -m * phi_a));
          cd cb = mc1.at(l, m) * std::exp(cd(0.0, -m * phi_b));
          if (std::abs(ca.real() - cb.real()) > 1e-9 * scale)
            return (ca.real() > cb.real()) ? 1 : -1;
          if (std::abs(ca.imag() - cb.imag()) > 1e-9 * scale)
            return (ca.imag() > cb.imag()) ? 1 : -1;
        }
      }
      for (Eigen::Index i = 0; i < t0.size(); ++i) {
        double mi = 0.5 * (psi.j.twice() - 2 * static_cast<int>(i));
        cd va = t0(i) * std::exp(cd(0.0, -mi * phi_a));
        cd vb = t0(i) * std::exp(cd(0.0, -mi * phi_b));
        if (std::abs(va.real() - vb.real()) > 1e-9)
          return (va.real() < vb.real()) ? 1 : -1;
        if (std::abs(va.imag() - vb.imag()) > 1e-9)
          return (va.imag() < vb.imag()) ? 1 : -1;
      }
      return 0;
    };
    int best_n = 0;
    for (int n = 1; n < mt; ++n) {
      double phi_a = delta / mt + 2.0 * pi * best_n / mt;
      double phi_b = delta / mt + 2.0 * pi * n / mt;
      if (rank(phi_a, phi_b) < 0) best_n = n;
    }
    phi2 = delta / mt + 2.0 * pi * best_n / mt;
    R2 = rotation_matrix(Vec3(0.0, 0.0, 1.0), phi2);
  }
  out.rot = R2 * R1;
  out.dj = D1;
  for (Eigen::Index i = 0; i < out.dj.rows(); ++i) {
    double mi = 0.5 * (psi.j.twice() - 2 * static_cast<int>(i));
    out.dj.row(i) *= std::exp(cd(0.0, -mi * phi2));
  }
  out.symmetric = constellation_symmetric(majorana_roots(Spinor{psi.j, a}));
  return out;
}

// Canonical ket of the constellation: reference-oriented ket with first
// nonzero component real positive, rotated back to the constellation's
// actual orientation.
inline Spinor reference_ket(const Constellation& c) {
  Spinor psi0 = constellation_to_state(c);
  ReferenceOrientation ro = reference_orientation(psi0);
  const Mat& D = ro.dj;
  Vec tilted = D * psi0.a;
  detail::phase_fix(tilted);
  tilted.normalize();
  return Spinor{psi0.j, D.adjoint() * tilted};
}

struct BlockConstellation {
  int twice_j = 0;
  int alpha = 1;
  Constellation stars;
  cd z{0.0, 0.0};
  // Reference ket the weight was measured against.  For an asymmetric
  // constellation this equals reference_ket(stars); a symmetric one leaves a
  // stabilizer eigenphase free, and keeping the ket pins that convention.
  Vec canonical;
  bool zero = false;
  bool symmetric = false;
  bool anticoherent_fallback = false;
};

struct Multiconstellation {
  HalfInt s;
  int k = 1;
  std::vector<BlockConstellation> blocks;
  Constellation spectator;

  Vec weights() const {
    Vec z(blocks.size());
    for (std::size_t i = 0; i < blocks.size(); ++i) z(i) = blocks[i].z;
    return z;
  }
};

inline Multiconstellation multiconstellation(const SymState& state,
                                             const BlockDiagonalizer& bd) {
  SymState blk = to_basis(state, Basis::block, &bd);
  double total = blk.amp.norm();
  if (total == 0.0) throw std::invalid_argument("zero state");

  Multiconstellation mc;
  mc.s = state.s;
  mc.k = state.k;
  for (std::size_t b = 0; b < bd.layout.size(); ++b) {
    BlockConstellation entry;
    entry.twice_j = bd.layout[b].twice_j;
    entry.alpha = bd.layout[b].alpha;
    Vec comp = bd.block_component(blk.amp, b);
    if (comp.norm() <= 1e-12 * total) {
      entry.zero = true;
      mc.blocks.push_back(entry);
      continue;
    }
    HalfInt j = HalfInt::from_twice(entry.twice_j);
    Spinor block_spinor{j, comp};
    entry.stars = majorana_roots(block_spinor);

    ReferenceOrientation ro = reference_orientation(block_spinor);
    entry.symmetric = ro.symmetric;
    entry.anticoherent_fallback = ro.anticoherent_fallback;

    const Mat& D = ro.dj;
    Vec tilted = D * comp;
    detail::phase_fix(tilted);
    tilted.normalize();
    entry.canonical = D.adjoint() * tilted;
    entry.z = entry.canonical.dot(comp);
    mc.blocks.push_back(entry);
  }

  int t = static_cast<int>(mc.blocks.size());
  if (t >= 2) {
    Vec zvec = mc.weights();
    mc.spectator = majorana_roots(Spinor{HalfInt::from_twice(t - 1), zvec});
  }
  return mc;
}

// Rebuild the state (standard basis) from its multiconstellation; exact up
// to one global phase.
inline SymState reconstruct(const Multiconstellation& mc, const BlockDiagonalizer& bd) {
  Vec blk = Vec::Zero(bd.dim());
  for (std::size_t b = 0; b < mc.blocks.size(); ++b) {
    const BlockConstellation& entry = mc.blocks[b];
    if (entry.zero) continue;
    Vec ket = entry.canonical.size() > 0 ? entry.canonical
                                         : reference_ket(entry.stars).a;
    blk.segment(bd.layout[b].offset, bd.layout[b].dim()) = entry.z * ket;
  }
  SymState block_state{mc.s, mc.k, Basis::block, blk};
  return to_basis(block_state, Basis::standard, &bd);
}

}  // namespace symq
