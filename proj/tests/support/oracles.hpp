#pragma once

// Reference implementations that share no code path with the library.

#include <complex>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

using cplx = std::complex<double>;

// e^{-iHt} psi by Pade scaling-and-squaring on the dense matrix.
inline Eigen::VectorXcd expm_apply(const Eigen::MatrixXcd& h, double t, const Eigen::VectorXcd& psi) {
  const Eigen::MatrixXcd a = cplx(0.0, -t) * h;
  const Eigen::MatrixXcd u = a.exp();
  return u * psi;
}

inline Eigen::Index idx(int site, int level) { return 2 * site + level; }

// Dense operator matrices on a chain of L sites, level 0 = g, 1 = e.
inline Eigen::MatrixXcd ix_matrix(int sites) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2 * sites, 2 * sites);
  for (int l = 0; l + 1 < sites; ++l) {
    m(idx(l, 1), idx(l + 1, 0)) = 0.5;
    m(idx(l + 1, 0), idx(l, 1)) = 0.5;
  }
  return m;
}

inline Eigen::MatrixXcd iy_matrix(int sites) {
  // (a+_{le} a_{l+1g} - h.c.)/(2i)
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2 * sites, 2 * sites);
  for (int l = 0; l + 1 < sites; ++l) {
    m(idx(l, 1), idx(l + 1, 0)) = cplx(0.0, -0.5);
    m(idx(l + 1, 0), idx(l, 1)) = cplx(0.0, 0.5);
  }
  return m;
}

inline Eigen::MatrixXcd sy_matrix(int sites) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2 * sites, 2 * sites);
  for (int l = 0; l < sites; ++l) {
    m(idx(l, 1), idx(l, 0)) = cplx(0.0, -0.5);
    m(idx(l, 0), idx(l, 1)) = cplx(0.0, 0.5);
  }
  return m;
}

inline Eigen::MatrixXcd sz_matrix(int sites) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2 * sites, 2 * sites);
  for (int l = 0; l < sites; ++l) {
    m(idx(l, 1), idx(l, 1)) = 0.5;
    m(idx(l, 0), idx(l, 0)) = -0.5;
  }
  return m;
}

inline Eigen::MatrixXcd x_matrix(int sites) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2 * sites, 2 * sites);
  for (int l = 0; l < sites; ++l) {
    m(idx(l, 0), idx(l, 0)) = l;
    m(idx(l, 1), idx(l, 1)) = l;
  }
  return m;
}

inline double expect(const Eigen::MatrixXcd& op, const Eigen::VectorXcd& psi) {
  return psi.dot(op * psi).real();
}

}  // namespace oracle
