#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "holodyn/cxcore.hpp"
#include "holodyn/types.hpp"

namespace holodyn::lattices {

//------------------------------------------------------------------------------
// Lattices in C^n
//------------------------------------------------------------------------------

// Full-rank discrete subgroup of C^n given by 2n generators.
class Lattice {
public:
  Lattice(int ambient_dim, std::vector<CVec> basis);

  int ambient_dim() const { return ambient_dim_; }
  const std::vector<CVec>& basis() const { return basis_; }

  // Real 2n x 2n period matrix (columns = realified generators).
  const RMat& period() const { return period_; }

  // Representative with lattice coordinates in [0, 1)^{2n}.
  CVec reduce(const CVec& z) const;

  // Lattice coordinates of a vector.
  RVec coordinates(const CVec& z) const;

  bool contains(const CVec& z, double tol = 1e-9) const;

  // Quotient-torus distance: min over nearby lattice translates.
  double torus_distance(const CVec& a, const CVec& b) const;

  nlohmann::json to_json() const;
  static Lattice from_json(const nlohmann::json& j);

  static Lattice gaussian(int n);  // Z[i]^n

private:
  int ambient_dim_;
  std::vector<CVec> basis_;
  RMat period_;
  RMat period_inv_;
};

//------------------------------------------------------------------------------
// Moduli of 1-dimensional complex tori
//------------------------------------------------------------------------------

struct Modulus {
  complexd tau;
};

struct ModulusReduction {
  Modulus modulus;
  std::vector<std::string> word;  // "S", "T", "T^-1" steps applied to tau
};

// Reduces tau = +-w2/w1 into the fundamental domain |Re tau| <= 1/2, |tau| >= 1
// with canonical boundary: Re tau in (-1/2, 1/2], and Re tau >= 0 when |tau| = 1.
ModulusReduction modulus_reduce(complexd w1, complexd w2, double tol = 1e-12);

// Equality of reduced moduli with the fundamental-domain boundary identified.
bool moduli_equal(complexd t1, complexd t2, double tol = 1e-9);

bool torus_equivalent_1d(const Lattice& l1, const Lattice& l2, double tol = 1e-9);

//------------------------------------------------------------------------------
// Real-linear lattice correspondences
//------------------------------------------------------------------------------

struct ExtensionResidual {
  double residual;  // operator norm of the antilinear block
  cxcore::RLinearMap map;
};

// The unique real-linear map pairing basis vectors of l1 with those of l2
// (basis order i -> pairing[i]); residual 0 exactly when it is C-linear.
ExtensionResidual clinear_extension_residual(const Lattice& l1, const Lattice& l2,
                                             const std::vector<int>& pairing);

//------------------------------------------------------------------------------
// Line-bundle degree bookkeeping and involution fixed fibers
//------------------------------------------------------------------------------

struct BundleDegree {
  long degree;
  bool kahler;  // true only when every summand is trivial
};

BundleDegree det_degree(const std::vector<long>& summand_degrees);

// Count of fibers fixed by an involution negating `negated_factors` elliptic
// factors, with an optional half translation on one untouched factor.
// 4^k two-torsion points per negated factor; the identity involution
// (k = 0, no translation) is rejected: it is neither free nor has isolated
// fixed fibers.
long involution_fixed_fibers(int negated_factors, std::optional<int> half_translation_axis);

}  // namespace holodyn::lattices
