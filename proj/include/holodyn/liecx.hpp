#pragma once

#include <optional>
#include <string>
#include <vector>

#include <boost/rational.hpp>
#include <nlohmann/json_fwd.hpp>

#include "holodyn/types.hpp"

namespace holodyn::liecx {

using Rational = boost::rational<long long>;
using RatVec = std::vector<Rational>;

//------------------------------------------------------------------------------
// Small exact matrices over Q
//------------------------------------------------------------------------------

struct RatMat {
  int rows = 0, cols = 0;
  std::vector<Rational> a;  // row major

  RatMat() = default;
  RatMat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, Rational(0)) {}
  Rational& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  const Rational& operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

  static RatMat identity(int n);
  RatMat operator*(const RatMat& o) const;
  RatMat operator-(const RatMat& o) const;
  RatMat operator+(const RatMat& o) const;
  bool operator==(const RatMat& o) const { return rows == o.rows && cols == o.cols && a == o.a; }
  RatVec apply(const RatVec& v) const;
  RatMat pow(int e) const;
  Rational determinant() const;       // fraction-free elimination
  int rank() const;
  bool is_integer() const;
  RMat to_double() const;
};

// Reduced column basis of the span of the given columns (rational RREF of the transpose).
RatMat column_space_basis(const RatMat& m);

//------------------------------------------------------------------------------
// Nilpotent Lie algebras from structure constants
//------------------------------------------------------------------------------

// [e_i, e_j] = sum_k c[i][j][k] e_k, exact rational constants.  Antisymmetry is
// built in; the Jacobi identity is verified exactly at construction and a
// violation throws.  An optional almost complex structure J (J^2 = -I) rides
// along for Nijenhuis computations.
class StructureAlgebra {
public:
  struct BracketEntry {
    int i, j;
    RatVec coeffs;  // coefficients of [e_i, e_j]
  };

  StructureAlgebra(int dim, const std::vector<BracketEntry>& brackets,
                   std::optional<RatMat> j = std::nullopt);

  int dim() const { return dim_; }
  const std::optional<RatMat>& j() const { return j_; }
  bool integral_constants() const { return integral_; }

  RatVec bracket(const RatVec& x, const RatVec& y) const;
  RatVec basis_bracket(int i, int j) const;

  // Floating-point bracket for spans without a rational description.
  RVec bracket_d(const RVec& x, const RVec& y) const;

  static StructureAlgebra from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

private:
  void check_jacobi() const;

  int dim_;
  std::vector<RatVec> c_;  // c_[i*dim+j] = coefficients of [e_i, e_j]
  std::optional<RatMat> j_;
  bool integral_ = true;
};

RatVec basis_vector(int dim, int k);

// N_J(X, Y) = [X, Y] + J([JX, Y] + [X, JY]) - [JX, JY], exact.
RatVec nijenhuis(const StructureAlgebra& alg, const RatVec& x, const RatVec& y);

//------------------------------------------------------------------------------
// Automorphisms and invariant splittings
//------------------------------------------------------------------------------

struct AutomorphismCheck {
  bool is_automorphism;    // f[X,Y] = [fX, fY] on all basis pairs, exact
  bool commutes_with_j;    // vacuously true when the algebra carries no J
  bool preserves_lattice;  // integer matrix with determinant +-1
};

AutomorphismCheck automorphism_check(const StructureAlgebra& alg, const RatMat& f);

struct HyperbolicSplitting {
  RMat stable, center, unstable;  // orthonormal real column bases
  bool ambiguous;                 // some |lambda| within (1e-14, 1e-9] of 1
  double invariance_residual;
};

// Generalized eigenspaces of f grouped by |lambda| < 1, = 1, > 1.
HyperbolicSplitting hyperbolic_splitting(const StructureAlgebra& alg, const RatMat& f);

struct Accessibility {
  int dim;
  RatMat generated_basis;        // columns span the subalgebra (exact path)
  bool exact;                    // rational computation used throughout
  std::optional<bool> j_invariant;  // span closed under J, when J is present
  std::vector<int> growth;       // dimension after each bracket-closure sweep
};

// Smallest Lie subalgebra containing E^s + E^u, by iterated brackets.  When
// the unimodular spectrum of f is exactly {1} the hyperbolic sum equals the
// column space of (f - I)^dim and everything runs in rational arithmetic.
Accessibility accessibility_dimension(const StructureAlgebra& alg, const RatMat& f);

//------------------------------------------------------------------------------
// Catalog
//------------------------------------------------------------------------------

struct CatalogEntry {
  StructureAlgebra algebra;
  RatMat f;
  std::string name;
};

// Loads one of the shipped algebra files (h3_complex, h5_plus_center) from the
// data directory (HOLODYN_DATA env var, falling back to the build-time path).
CatalogEntry load_algebra(const std::string& name);

std::string data_directory();

}  // namespace holodyn::liecx
