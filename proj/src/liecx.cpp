#include "holodyn/liecx.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#ifndef HOLODYN_DATA_DIR
#define HOLODYN_DATA_DIR "data"
#endif

namespace holodyn::liecx {

//------------------------------------------------------------------------------
// RatMat
//------------------------------------------------------------------------------

RatMat RatMat::identity(int n) {
  RatMat m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

RatMat RatMat::operator*(const RatMat& o) const {
  if (cols != o.rows) throw ContractViolation("RatMat: dimension mismatch in product");
  RatMat r(rows, o.cols);
  for (int i = 0; i < rows; ++i)
    for (int k = 0; k < cols; ++k) {
      const Rational s = (*this)(i, k);
      if (s == Rational(0)) continue;
      for (int j = 0; j < o.cols; ++j) r(i, j) += s * o(k, j);
    }
  return r;
}

RatMat RatMat::operator-(const RatMat& o) const {
  RatMat r = *this;
  for (size_t k = 0; k < a.size(); ++k) r.a[k] -= o.a[k];
  return r;
}

RatMat RatMat::operator+(const RatMat& o) const {
  RatMat r = *this;
  for (size_t k = 0; k < a.size(); ++k) r.a[k] += o.a[k];
  return r;
}

RatVec RatMat::apply(const RatVec& v) const {
  if (static_cast<int>(v.size()) != cols) throw ContractViolation("RatMat: vector size mismatch");
  RatVec r(rows, Rational(0));
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      if (v[j] != Rational(0)) r[i] += (*this)(i, j) * v[j];
  return r;
}

RatMat RatMat::pow(int e) const {
  RatMat r = identity(rows);
  for (int k = 0; k < e; ++k) r = r * (*this);
  return r;
}

namespace {

// Gaussian elimination over Q; returns (echelon form, rank, det of square part).
std::pair<int, Rational> eliminate(RatMat& m) {
  int rank = 0;
  Rational det(1);
  for (int col = 0; col < m.cols && rank < m.rows; ++col) {
    int piv = -1;
    for (int r = rank; r < m.rows; ++r)
      if (m(r, col) != Rational(0)) {
        piv = r;
        break;
      }
    if (piv < 0) {
      det = 0;
      continue;
    }
    if (piv != rank) {
      for (int j = 0; j < m.cols; ++j) std::swap(m(piv, j), m(rank, j));
      det = -det;
    }
    det *= m(rank, col);
    const Rational inv = Rational(m(rank, col).denominator(), m(rank, col).numerator());
    for (int j = 0; j < m.cols; ++j) m(rank, j) *= inv;
    for (int r = 0; r < m.rows; ++r) {
      if (r == rank || m(r, col) == Rational(0)) continue;
      const Rational s = m(r, col);
      for (int j = 0; j < m.cols; ++j) m(r, j) -= s * m(rank, j);
    }
    ++rank;
  }
  return {rank, det};
}

}  // namespace

Rational RatMat::determinant() const {
  if (rows != cols) throw ContractViolation("RatMat: determinant of non-square matrix");
  RatMat m = *this;
  auto [rank, det] = eliminate(m);
  return rank == rows ? det : Rational(0);
}

int RatMat::rank() const {
  RatMat m = *this;
  return eliminate(m).first;
}

bool RatMat::is_integer() const {
  for (const auto& x : a)
    if (x.denominator() != 1) return false;
  return true;
}

RMat RatMat::to_double() const {
  RMat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      m(i, j) = boost::rational_cast<double>((*this)(i, j));
  return m;
}

RatMat column_space_basis(const RatMat& m) {
  // row-reduce the transpose; nonzero rows give a reduced basis of the span
  RatMat t(m.cols, m.rows);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) t(j, i) = m(i, j);
  const int rank = eliminate(t).first;
  RatMat basis(m.rows, rank);
  for (int r = 0; r < rank; ++r)
    for (int i = 0; i < m.rows; ++i) basis(i, r) = t(r, i);
  return basis;
}

//------------------------------------------------------------------------------
// StructureAlgebra
//------------------------------------------------------------------------------

RatVec basis_vector(int dim, int k) {
  RatVec v(dim, Rational(0));
  v[k] = 1;
  return v;
}

StructureAlgebra::StructureAlgebra(int dim, const std::vector<BracketEntry>& brackets,
                                   std::optional<RatMat> j)
    : dim_(dim), c_(static_cast<size_t>(dim) * dim, RatVec(dim, Rational(0))), j_(std::move(j)) {
  for (const auto& e : brackets) {
    if (e.i < 0 || e.j < 0 || e.i >= dim || e.j >= dim || e.i == e.j)
      throw ContractViolation("StructureAlgebra: bad bracket index");
    if (static_cast<int>(e.coeffs.size()) != dim)
      throw ContractViolation("StructureAlgebra: bracket coefficient size mismatch");
    c_[static_cast<size_t>(e.i) * dim + e.j] = e.coeffs;
    RatVec neg = e.coeffs;
    for (auto& x : neg) x = -x;
    c_[static_cast<size_t>(e.j) * dim + e.i] = neg;
  }
  for (const auto& row : c_)
    for (const auto& x : row)
      if (x.denominator() != 1) integral_ = false;
  if (j_) {
    if (j_->rows != dim || j_->cols != dim)
      throw ContractViolation("StructureAlgebra: J has wrong dimension");
    RatMat sq = (*j_) * (*j_);
    RatMat minus_id = RatMat::identity(dim);
    for (auto& x : minus_id.a) x = -x;
    if (!(sq == minus_id)) throw ContractViolation("StructureAlgebra: J^2 != -I");
  }
  check_jacobi();
}

RatVec StructureAlgebra::basis_bracket(int i, int j) const {
  return c_[static_cast<size_t>(i) * dim_ + j];
}

RatVec StructureAlgebra::bracket(const RatVec& x, const RatVec& y) const {
  if (static_cast<int>(x.size()) != dim_ || static_cast<int>(y.size()) != dim_)
    throw ContractViolation("bracket: dimension mismatch");
  RatVec out(dim_, Rational(0));
  for (int i = 0; i < dim_; ++i) {
    if (x[i] == Rational(0)) continue;
    for (int j = 0; j < dim_; ++j) {
      if (y[j] == Rational(0)) continue;
      const Rational s = x[i] * y[j];
      const RatVec& cij = c_[static_cast<size_t>(i) * dim_ + j];
      for (int k = 0; k < dim_; ++k) out[k] += s * cij[k];
    }
  }
  return out;
}

RVec StructureAlgebra::bracket_d(const RVec& x, const RVec& y) const {
  RVec out = RVec::Zero(dim_);
  for (int i = 0; i < dim_; ++i) {
    if (x(i) == 0.0) continue;
    for (int j = 0; j < dim_; ++j) {
      if (y(j) == 0.0) continue;
      const RatVec& cij = c_[static_cast<size_t>(i) * dim_ + j];
      for (int k = 0; k < dim_; ++k)
        out(k) += x(i) * y(j) * boost::rational_cast<double>(cij[k]);
    }
  }
  return out;
}

void StructureAlgebra::check_jacobi() const {
  for (int i = 0; i < dim_; ++i)
    for (int j = i + 1; j < dim_; ++j)
      for (int k = j + 1; k < dim_; ++k) {
        const RatVec ei = basis_vector(dim_, i), ej = basis_vector(dim_, j), ek = basis_vector(dim_, k);
        RatVec s = bracket(bracket(ei, ej), ek);
        const RatVec t = bracket(bracket(ej, ek), ei);
        const RatVec u = bracket(bracket(ek, ei), ej);
        for (int m = 0; m < dim_; ++m) {
          s[m] += t[m] + u[m];
          if (s[m] != Rational(0))
            throw ContractViolation("StructureAlgebra: Jacobi identity fails at basis triple");
        }
      }
}

RatVec nijenhuis(const StructureAlgebra& alg, const RatVec& x, const RatVec& y) {
  if (!alg.j()) throw ContractViolation("nijenhuis: algebra carries no almost complex structure");
  const RatMat& j = *alg.j();
  const RatVec jx = j.apply(x), jy = j.apply(y);
  RatVec t = alg.bracket(jx, y);
  const RatVec t2 = alg.bracket(x, jy);
  for (size_t k = 0; k < t.size(); ++k) t[k] += t2[k];
  RatVec out = alg.bracket(x, y);
  const RatVec jt = j.apply(t);
  const RatVec t3 = alg.bracket(jx, jy);
  for (size_t k = 0; k < out.size(); ++k) out[k] += jt[k] - t3[k];
  return out;
}

//------------------------------------------------------------------------------
// Automorphism checks and splittings
//------------------------------------------------------------------------------

AutomorphismCheck automorphism_check(const StructureAlgebra& alg, const RatMat& f) {
  const int d = alg.dim();
  if (f.rows != d || f.cols != d)
    throw ContractViolation("automorphism_check: matrix dimension mismatch");

  AutomorphismCheck out{true, true, false};
  for (int i = 0; i < d && out.is_automorphism; ++i)
    for (int j = i + 1; j < d; ++j) {
      const RatVec lhs = f.apply(alg.basis_bracket(i, j));
      RatVec fi(d), fj(d);
      for (int k = 0; k < d; ++k) {
        fi[k] = f(k, i);
        fj[k] = f(k, j);
      }
      const RatVec rhs = alg.bracket(fi, fj);
      if (lhs != rhs) {
        out.is_automorphism = false;
        break;
      }
    }
  if (alg.j()) {
    const RatMat lhs = f * (*alg.j());
    const RatMat rhs = (*alg.j()) * f;
    out.commutes_with_j = (lhs == rhs);
  }
  const Rational det = f.determinant();
  out.preserves_lattice = f.is_integer() && (det == Rational(1) || det == Rational(-1));
  return out;
}

namespace {

// Orthonormal real basis of ker(prod (f - lambda I)^mult over one modulus group),
// obtained from the small SVD of the real polynomial in f.
RMat modulus_group_space(const RMat& f, const std::vector<std::complex<double>>& eigs,
                         const std::function<bool(double)>& in_group) {
  const int d = static_cast<int>(f.rows());
  RMat poly = RMat::Identity(d, d);
  for (const auto& lam : eigs) {
    if (!in_group(std::abs(lam))) continue;
    if (std::abs(lam.imag()) < 1e-12) {
      poly = poly * (f - lam.real() * RMat::Identity(d, d));
    } else if (lam.imag() > 0) {  // conjugate pair handled once
      poly = poly * (f * f - 2.0 * lam.real() * f + std::norm(lam) * RMat::Identity(d, d));
    }
  }
  Eigen::JacobiSVD<RMat> svd(poly, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double floor = 1e-9 * std::max(1.0, sv.size() ? sv(0) : 1.0);
  int null_dim = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k)
    if (sv(k) < floor) ++null_dim;
  return svd.matrixV().rightCols(null_dim);
}

}  // namespace

HyperbolicSplitting hyperbolic_splitting(const StructureAlgebra& alg, const RatMat& fr) {
  const auto check = automorphism_check(alg, fr);
  if (!check.is_automorphism)
    throw ContractViolation("hyperbolic_splitting: f is not an automorphism of the algebra");

  const RMat f = fr.to_double();
  Eigen::EigenSolver<RMat> es(f);
  std::vector<std::complex<double>> eigs(es.eigenvalues().data(),
                                         es.eigenvalues().data() + es.eigenvalues().size());

  HyperbolicSplitting out;
  out.ambiguous = false;
  for (const auto& lam : eigs) {
    const double gap = std::abs(std::abs(lam) - 1.0);
    if (gap > 1e-14 && gap <= 1e-9) out.ambiguous = true;
  }
  const double tol = 1e-9;
  out.stable = modulus_group_space(f, eigs, [&](double m) { return m < 1.0 - tol; });
  out.center = modulus_group_space(f, eigs, [&](double m) { return std::abs(m - 1.0) <= tol; });
  out.unstable = modulus_group_space(f, eigs, [&](double m) { return m > 1.0 + tol; });

  double resid = 0.0;
  for (const RMat* sub : {&out.stable, &out.center, &out.unstable}) {
    if (sub->cols() == 0) continue;
    const RMat img = f * (*sub);
    const RMat proj = (*sub) * ((*sub).transpose() * img);
    resid = std::max(resid, (img - proj).cwiseAbs().maxCoeff());
  }
  out.invariance_residual = resid;
  if (out.stable.cols() + out.center.cols() + out.unstable.cols() != f.rows())
    throw NonConvergence("hyperbolic_splitting: eigenspace dimensions do not sum to dim");
  return out;
}

Accessibility accessibility_dimension(const StructureAlgebra& alg, const RatMat& f) {
  const int d = alg.dim();
  const auto split = hyperbolic_splitting(alg, f);  // validates f, flags ambiguity

  // Unimodular part must be eigenvalue-1 for the exact route: (f - I)^d then
  // has column space exactly E^s + E^u over Q.
  const RMat fd = f.to_double();
  Eigen::EigenSolver<RMat> es(fd);
  bool unit_only = true;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    const auto lam = es.eigenvalues()(k);
    if (std::abs(std::abs(lam) - 1.0) <= 1e-9 && std::abs(lam - 1.0) > 1e-9) unit_only = false;
  }

  Accessibility out;
  out.exact = unit_only;
  if (!unit_only) {
    // Orthonormal closure in floating point when the hyperbolic sum has no
    // rational description.
    RMat span(d, split.stable.cols() + split.unstable.cols());
    span << split.stable, split.unstable;
    out.growth.push_back(static_cast<int>(span.cols()));
    for (int sweep = 0; sweep < d; ++sweep) {
      std::vector<RVec> cand;
      for (int i = 0; i < span.cols(); ++i)
        for (int j = i + 1; j < span.cols(); ++j)
          cand.push_back(alg.bracket_d(span.col(i), span.col(j)));
      RMat stacked(d, span.cols() + static_cast<Eigen::Index>(cand.size()));
      stacked.leftCols(span.cols()) = span;
      for (size_t j = 0; j < cand.size(); ++j)
        stacked.col(span.cols() + static_cast<Eigen::Index>(j)) = cand[j];
      Eigen::ColPivHouseholderQR<RMat> qr(stacked);
      qr.setThreshold(1e-9);
      const Eigen::Index rank = qr.rank();
      RMat next = qr.householderQ() * RMat::Identity(d, rank);
      out.growth.push_back(static_cast<int>(rank));
      const bool stable = (rank == span.cols());
      span = next;
      if (stable) break;
    }
    out.dim = static_cast<int>(span.cols());
    if (alg.j()) {
      const RMat jd = alg.j()->to_double();
      RMat both(d, 2 * span.cols());
      both << span, jd * span;
      Eigen::ColPivHouseholderQR<RMat> qr(both);
      qr.setThreshold(1e-9);
      out.j_invariant = (qr.rank() == span.cols());
    }
    return out;
  }

  RatMat fm = f - RatMat::identity(d);
  RatMat fpow = fm.pow(d - 1) * fm;  // (f - I)^d
  RatMat span = column_space_basis(fpow);
  out.growth.push_back(span.cols);

  for (int sweep = 0; sweep < d; ++sweep) {
    std::vector<RatVec> cand;
    for (int i = 0; i < span.cols; ++i)
      for (int j = i + 1; j < span.cols; ++j) {
        RatVec x(d), y(d);
        for (int k = 0; k < d; ++k) {
          x[k] = span(k, i);
          y[k] = span(k, j);
        }
        cand.push_back(alg.bracket(x, y));
      }
    RatMat stacked(d, span.cols + static_cast<int>(cand.size()));
    for (int j = 0; j < span.cols; ++j)
      for (int k = 0; k < d; ++k) stacked(k, j) = span(k, j);
    for (size_t j = 0; j < cand.size(); ++j)
      for (int k = 0; k < d; ++k) stacked(k, span.cols + static_cast<int>(j)) = cand[j][k];
    RatMat next = column_space_basis(stacked);
    out.growth.push_back(next.cols);
    if (next.cols == span.cols) {
      span = next;
      break;
    }
    span = next;
  }

  out.dim = span.cols;
  out.generated_basis = span;
  if (alg.j()) {
    // J-invariance: rank must not grow after appending J * span.
    RatMat jspan = (*alg.j()) * span;
    RatMat both(d, 2 * span.cols);
    for (int j = 0; j < span.cols; ++j)
      for (int k = 0; k < d; ++k) {
        both(k, j) = span(k, j);
        both(k, span.cols + j) = jspan(k, j);
      }
    out.j_invariant = (both.rank() == span.cols);
  }
  return out;
}

//------------------------------------------------------------------------------
// Catalog
//------------------------------------------------------------------------------

namespace {

Rational parse_rational(const nlohmann::json& v) {
  if (v.is_number_integer()) return Rational(v.get<long long>());
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    const auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(std::stoll(s));
    return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
  }
  throw ContractViolation("algebra file: rational entries must be integers or \"p/q\" strings");
}

RatMat parse_matrix(const nlohmann::json& rows) {
  const int r = static_cast<int>(rows.size());
  const int c = static_cast<int>(rows.at(0).size());
  RatMat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = parse_rational(rows.at(i).at(j));
  return m;
}

}  // namespace

StructureAlgebra StructureAlgebra::from_json(const nlohmann::json& j) {
  const int dim = j.at("dim").get<int>();
  std::vector<BracketEntry> entries;
  for (const auto& b : j.at("brackets")) {
    BracketEntry e;
    e.i = b.at(0).get<int>();
    e.j = b.at(1).get<int>();
    for (const auto& v : b.at(2)) e.coeffs.push_back(parse_rational(v));
    entries.push_back(std::move(e));
  }
  std::optional<RatMat> jm;
  if (j.contains("J")) jm = parse_matrix(j.at("J"));
  return StructureAlgebra(dim, entries, std::move(jm));
}

nlohmann::json StructureAlgebra::to_json() const {
  nlohmann::json out;
  out["dim"] = dim_;
  nlohmann::json brackets = nlohmann::json::array();
  for (int i = 0; i < dim_; ++i)
    for (int j = i + 1; j < dim_; ++j) {
      const RatVec& c = basis_bracket(i, j);
      bool nonzero = false;
      for (const auto& x : c) nonzero |= (x != Rational(0));
      if (!nonzero) continue;
      nlohmann::json coeffs = nlohmann::json::array();
      for (const auto& x : c)
        coeffs.push_back(x.denominator() == 1 ? nlohmann::json(x.numerator())
                                              : nlohmann::json(std::to_string(x.numerator()) + "/" +
                                                               std::to_string(x.denominator())));
      brackets.push_back({i, j, coeffs});
    }
  out["brackets"] = brackets;
  return out;
}

std::string data_directory() {
  if (const char* env = std::getenv("HOLODYN_DATA")) return env;
  return HOLODYN_DATA_DIR;
}

CatalogEntry load_algebra(const std::string& name) {
  const std::string path = data_directory() + "/algebras/" + name + ".json";
  std::ifstream in(path);
  if (!in) throw ContractViolation("load_algebra: cannot open " + path);
  nlohmann::json j;
  in >> j;
  CatalogEntry e{StructureAlgebra::from_json(j), parse_matrix(j.at("f")), name};
  return e;
}

}  // namespace holodyn::liecx
