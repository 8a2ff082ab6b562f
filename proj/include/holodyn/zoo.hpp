#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "holodyn/cxcore.hpp"
#include "holodyn/lattices.hpp"
#include "holodyn/liecx.hpp"
#include "holodyn/types.hpp"

namespace holodyn::zoo {

enum class SystemKind {
  TorusAutomorphism,
  HolomorphicSkewProduct,
  MobiusFiberSystem,
  BlanchardCalabi,
  NilmanifoldAutomorphism,
  EllipticQuotient,
};

enum class Hyperbolicity { Anosov, PartiallyHyperbolic, Parabolic, Isometry, Expanding };

const char* to_string(SystemKind k);
const char* to_string(Hyperbolicity h);

//------------------------------------------------------------------------------
// Points
//------------------------------------------------------------------------------

// Coordinates of a point in one chart.  Torus coordinates are kept as
// fundamental-domain representatives; Mobius-fiber systems carry the sphere
// point separately in homogeneous form.
struct SystemPoint {
  int chart = 0;
  CVec z;
  std::optional<cxcore::SpherePoint> fiber;
};

//------------------------------------------------------------------------------
// Per-kind parameter blocks
//------------------------------------------------------------------------------

struct TorusData {
  CMat a;  // C-linear part, preserves the lattice
  CVec b;  // translation
  lattices::Lattice lattice;
};

struct SkewProductData {
  TorusData base;                  // automorphism of a complex 2-torus
  lattices::Lattice fiber_lattice; // rank-2 lattice in C
  Eigen::RowVectorXcd ell;         // C-linear twist, ell(base lattice) inside fiber lattice
};

struct MobiusFiberData {
  TorusData base;
  Eigen::Matrix2cd g;  // constant fiber transformation
  bool holomorphic = true;
  // optional non-constant continuous twist (forces holomorphic = false)
  std::function<Eigen::Matrix2cd(const CVec&)> g_of_base;
};

struct BlanchardCalabiData {
  int copies = 1;  // number of rank-2 blocks in the fiber
  RMat a;          // integer matrix mixing blocks (1x1 expanding scalar allowed)
  // sections of the degree-1 bundle over P^1 as linear polynomials
  // s1 = s1c[0] + s1c[1] z, s2 = s2c[0] + s2c[1] z; they must have no common
  // zero on either chart, i.e. the coefficient determinant must not vanish.
  std::array<complexd, 2> s1c{complexd(1.0), complexd(0.0)};
  std::array<complexd, 2> s2c{complexd(0.0), complexd(1.0)};
};

struct NilmanifoldData {
  std::shared_ptr<liecx::StructureAlgebra> algebra;
  liecx::RatMat f;
};

struct EllipticQuotientData {
  complexd tau;        // modulus of the elliptic factor
  // the map is A = [[2,1,0],[1,1,0],[0,0,1]] on E^3; the involution negates the
  // first two factors and half-translates the third
};

struct SystemDescriptor {
  std::string name;
  SystemKind kind;
  Hyperbolicity hyperbolicity;
  bool invertible = true;
  bool holomorphic = true;
  int complex_dim = 0;  // ambient complex dimension of the chart coordinates

  std::variant<std::monostate, TorusData, SkewProductData, MobiusFiberData, BlanchardCalabiData,
               NilmanifoldData, EllipticQuotientData>
      data;

  const TorusData& torus() const { return std::get<TorusData>(data); }
  const SkewProductData& skew() const { return std::get<SkewProductData>(data); }
  const MobiusFiberData& mobius() const { return std::get<MobiusFiberData>(data); }
  const BlanchardCalabiData& bc() const { return std::get<BlanchardCalabiData>(data); }
  const NilmanifoldData& nil() const { return std::get<NilmanifoldData>(data); }
  const EllipticQuotientData& elliptic() const { return std::get<EllipticQuotientData>(data); }

  nlohmann::json to_json() const;
};

//------------------------------------------------------------------------------
// Constructors
//------------------------------------------------------------------------------

// Linear automorphism z -> A z + b on C^n / lattice.  A must map the lattice
// bijectively onto itself; hyperbolicity is classified from the spectrum.
SystemDescriptor make_torus_automorphism(const CMat& a, lattices::Lattice lattice,
                                         const CVec& b = CVec());

// (z, w) -> (A z, w + ell(z)) on base x C/fiber_lattice.
SystemDescriptor make_skew_product(SystemDescriptor base, lattices::Lattice fiber_lattice,
                                   const Eigen::RowVectorXcd& ell);

// (z, w) -> (A z, g . w) on base x P^1.
SystemDescriptor make_mobius_fiber_system(SystemDescriptor base, const Eigen::Matrix2cd& g);
SystemDescriptor make_mobius_fiber_system(SystemDescriptor base,
                                          std::function<Eigen::Matrix2cd(const CVec&)> g_of_base);

// Twisted torus bundle over P^1 with section frame s = (1, z): the fiber over z
// is C^{2n} modulo the frame lattice, and the map acts by the integer matrix a
// across the n blocks (identity on the base).  For n = 1 pass a 1x1 expanding
// integer; lattice-preserving hyperbolic automorphisms need n >= 2.
SystemDescriptor make_blanchard_calabi(int copies, const RMat& a,
                                       std::array<complexd, 2> s1 = {complexd(1.0), complexd(0.0)},
                                       std::array<complexd, 2> s2 = {complexd(0.0), complexd(1.0)});

SystemDescriptor make_nilmanifold(const std::string& catalog_name);

SystemDescriptor make_elliptic_quotient(complexd tau);

//------------------------------------------------------------------------------
// Evaluation
//------------------------------------------------------------------------------

SystemPoint evaluate(const SystemDescriptor& sys, const SystemPoint& p);

// For invertible kinds this is the inverse map; for fiberwise expanding
// Blanchard-Calabi systems it returns the principal preimage branch, so that
// evaluate(evaluate_inverse(p)) == p always holds.
SystemPoint evaluate_inverse(const SystemDescriptor& sys, const SystemPoint& p);

// Derivative in chart coordinates, source chart -> image chart.  For
// Mobius-fiber systems the last diagonal entry is the fiber chart derivative.
CMat tangent(const SystemDescriptor& sys, const SystemPoint& p);

// Distance compatible with the quotient structure of each kind.
double distance(const SystemDescriptor& sys, const SystemPoint& p, const SystemPoint& q);

// Fundamental-domain representative of a point's torus coordinates.
SystemPoint reduce_point(const SystemDescriptor& sys, const SystemPoint& p);

// Difference p - q in chart coordinates with every torus factor wrapped to its
// minimal representative; safe against fundamental-domain jumps.
CVec chart_difference(const SystemDescriptor& sys, const SystemPoint& p, const SystemPoint& q);

SystemPoint random_point(const SystemDescriptor& sys, std::uint64_t seed);

//------------------------------------------------------------------------------
// Closed-form invariant data
//------------------------------------------------------------------------------

// Unit unstable / stable directions of the constant tangent cocycle (complex
// one-dimensional where defined).
CVec unstable_direction(const SystemDescriptor& sys);
CVec stable_direction(const SystemDescriptor& sys);
double unstable_multiplier(const SystemDescriptor& sys);  // |top eigenvalue|

// Blanchard-Calabi section frame: columns sigma_1..sigma_4 of one block at the
// given base chart coordinate, as a real 4x4 matrix.
RMat bc_frame(const BlanchardCalabiData& bc, int chart, complexd zeta);
// Real Gram determinant of the frame (positive everywhere).
double bc_frame_gram(const BlanchardCalabiData& bc, int chart, complexd zeta);
// Fiber lattice of the whole 2n-dimensional fiber over a base point.
lattices::Lattice bc_fiber_lattice(const SystemDescriptor& sys, int chart, complexd zeta);

// Center holonomy between the unstable plaques through x and y (same center
// leaf), expressed in the flat linearization charts at both endpoints.
cxcore::RLinearMap center_holonomy_closed_form(const SystemDescriptor& sys,
                                               const SystemPoint& x, const SystemPoint& y);

// Point-level center holonomy for fibered kinds: the image in W^u(y) of a
// point p in W^u(x).  Used to probe the holonomy germ numerically.
SystemPoint center_holonomy_point(const SystemDescriptor& sys, const SystemPoint& x,
                                  const SystemPoint& y, const SystemPoint& p);

// Exact commutation check sigma A = A sigma for the elliptic quotient.
bool elliptic_quotient_commutes();

//------------------------------------------------------------------------------
// Registry
//------------------------------------------------------------------------------

std::vector<std::string> registry_names();
SystemDescriptor make_system(const std::string& name);

}  // namespace holodyn::zoo
