#pragma once

// Scalar-generic version of the collar pushforward, instantiated with double
// and with forward-mode AD scalars for the linearization.

#include "fbflow/common.hpp"

#include <cmath>
#include <unsupported/Eigen/AutoDiff>

namespace fbflow::detail {

using ADVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 15, 1>;
using AD = Eigen::AutoDiffScalar<ADVec>;

inline double value_of(double x) { return x; }
inline double value_of(const AD& x) { return x.value(); }

template <class T>
using VecT = Eigen::Matrix<T, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
template <class T>
using MatT = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

/// Gauss-Jordan inverse with partial pivoting on the value part; returns det.
template <class T>
T invert(const MatT<T>& A, MatT<T>& inv) {
  const int n = static_cast<int>(A.rows());
  MatT<T> M = A;
  inv = MatT<T>::Identity(n, n);
  T det = T(1.0);
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(value_of(M(r, c))) > std::abs(value_of(M(piv, c)))) piv = r;
    if (piv != c) {
      M.row(c).swap(M.row(piv));
      inv.row(c).swap(inv.row(piv));
      det = -det;
    }
    const T d = M(c, c);
    det = det * d;
    if (value_of(d) == 0.0) return det;
    for (int k = 0; k < n; ++k) {
      M(c, k) = M(c, k) / d;
      inv(c, k) = inv(c, k) / d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      const T f = M(r, c);
      for (int k = 0; k < n; ++k) {
        M(r, k) = M(r, k) - f * M(c, k);
        inv(r, k) = inv(r, k) - f * inv(c, k);
      }
    }
  }
  return det;
}

template <class T>
struct PushT {
  MatT<T> Phi, Psi;
  std::array<MatT<T>, kMaxDim> Psi2;
  T det_phi;
  T g;
  VecT<T> dg;
  MatT<T> d2g;
  T den;
};

/// h-jet (h, hg, hh) and v-jet -> Jacobians and g-jets at Phi(x).
template <class T>
PushT<T> push_jets(const T& h, const VecT<T>& hg, const MatT<T>& hh, const Jet3& v) {
  const int n = static_cast<int>(hg.size());
  PushT<T> P;
  P.Phi.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < n; ++l)
      P.Phi(i, l) = T(i == l ? 1.0 : 0.0) - hg(l) * v.grad(i) - h * v.hess(i, l);
  P.det_phi = invert<T>(P.Phi, P.Psi);

  // Psi^k_ij = Psi^k_p Psi^l_i Psi^q_j (h_lq v_p + h_l v_pq + h_q v_pl + h v_pql)
  std::array<MatT<T>, kMaxDim> C;  // C[p](l, q)
  for (int p = 0; p < n; ++p) {
    C[p].resize(n, n);
    for (int l = 0; l < n; ++l)
      for (int q = 0; q < n; ++q)
        C[p](l, q) = hh(l, q) * v.grad(p) + hg(l) * v.hess(p, q) + hg(q) * v.hess(p, l) + h * v.third[l](p, q);
  }
  for (int k = 0; k < n; ++k) {
    MatT<T> S = MatT<T>::Zero(n, n);
    for (int p = 0; p < n; ++p) S += P.Psi(k, p) * C[p];
    P.Psi2[k] = P.Psi.transpose() * S * P.Psi;
  }

  // w = v (1 + h)
  const T one_h = T(1.0) + h;
  VecT<T> wk(n);
  MatT<T> wkl(n, n);
  for (int k = 0; k < n; ++k) wk(k) = v.grad(k) * one_h + v.value * hg(k);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l)
      wkl(k, l) = v.hess(k, l) * one_h + v.grad(k) * hg(l) + v.grad(l) * hg(k) + v.value * hh(k, l);

  P.g = v.value * one_h;
  P.dg = P.Psi.transpose() * wk;
  P.d2g = P.Psi.transpose() * wkl * P.Psi;
  for (int k = 0; k < n; ++k) P.d2g += wk(k) * P.Psi2[k];
  P.den = T(v.value);
  for (int i = 0; i < n; ++i) P.den += P.dg(i) * v.grad(i);
  return P;
}

}  // namespace fbflow::detail
