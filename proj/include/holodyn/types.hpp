#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace holodyn {

using complexd = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

// Thrown when an input violates a documented precondition (singular bases,
// degenerate lattices, non-unit determinants, incompatible twists, ...).
class ContractViolation : public std::runtime_error {
public:
  explicit ContractViolation(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when an iterative limit fails to settle within its budget.
class NonConvergence : public std::runtime_error {
public:
  explicit NonConvergence(const std::string& what) : std::runtime_error(what) {}
};

inline double op_norm(const CMat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMat> svd(m);
  return svd.singularValues()(0);
}

inline double op_norm(const RMat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<RMat> svd(m);
  return svd.singularValues()(0);
}

// Interleaved real coordinates: (Re z1, Im z1, Re z2, Im z2, ...).
inline RVec realify(const CVec& z) {
  RVec x(2 * z.size());
  for (Eigen::Index k = 0; k < z.size(); ++k) {
    x(2 * k) = z(k).real();
    x(2 * k + 1) = z(k).imag();
  }
  return x;
}

inline CVec complexify(const RVec& x) {
  CVec z(x.size() / 2);
  for (Eigen::Index k = 0; k < z.size(); ++k)
    z(k) = complexd(x(2 * k), x(2 * k + 1));
  return z;
}

// Real 2n x 2n matrix of v |-> P v + Q conj(v) in interleaved coordinates.
inline RMat realify_linear_antilinear(const CMat& p, const CMat& q) {
  const Eigen::Index n = p.rows();
  RMat m(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const complexd pij = p(i, j), qij = q(i, j);
      m(2 * i, 2 * j) = pij.real() + qij.real();
      m(2 * i, 2 * j + 1) = -pij.imag() + qij.imag();
      m(2 * i + 1, 2 * j) = pij.imag() + qij.imag();
      m(2 * i + 1, 2 * j + 1) = pij.real() - qij.real();
    }
  return m;
}

// Inverse of realify_linear_antilinear.
inline void split_real_matrix(const RMat& m, CMat& p, CMat& q) {
  const Eigen::Index n = m.rows() / 2;
  p.resize(n, n);
  q.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double a = m(2 * i, 2 * j);
      const double b = m(2 * i, 2 * j + 1);
      const double c = m(2 * i + 1, 2 * j);
      const double d = m(2 * i + 1, 2 * j + 1);
      p(i, j) = complexd((a + d) / 2, (c - b) / 2);
      q(i, j) = complexd((a - d) / 2, (c + b) / 2);
    }
}

inline RMat realify_linear(const CMat& p) {
  return realify_linear_antilinear(p, CMat::Zero(p.rows(), p.cols()));
}

}  // namespace holodyn
