#pragma once

#include <optional>
#include <vector>

#include "holodyn/cxcore.hpp"
#include "holodyn/lattices.hpp"
#include "holodyn/zoo.hpp"

namespace holodyn::dynamics {

//------------------------------------------------------------------------------
// Invariant splittings
//------------------------------------------------------------------------------

struct BlockDims {
  int stable, center, unstable;  // complex dimensions
};

// Declared block structure of each system kind.
BlockDims block_dims(const zoo::SystemDescriptor& sys);

struct SplittingEstimate {
  CMat stable, center, unstable;  // orthonormal complex column bases at the probe point
  double residual = 0.0;          // max |Df v - proj(Df v)| over unit basis vectors
  int iterations = 0;
  std::vector<double> residual_history;  // invariance residual after each power step
};

// Power iteration of the tangent cocycle: E^u from pushing a seeded frame
// forward along the orbit through p, E^s backward, E^c as the intersection of
// the center-unstable and center-stable estimates.  Non-convergence shows up
// as a large reported residual, never as an exception.
SplittingEstimate cone_splitting(const zoo::SystemDescriptor& sys, const zoo::SystemPoint& p,
                                 int iterations, double cone_aperture = 0.5,
                                 std::uint64_t seed = 1);

struct LyapunovSpectrum {
  std::vector<double> exponents;        // distinct values, descending
  std::vector<int> real_multiplicity;   // real dimensions per exponent
  std::vector<double> raw;              // one exponent per complex direction
};

// QR cocycle averages over n steps after a burn-in that aligns the frame
// (the raw average carries an O(1/n) transient otherwise).
LyapunovSpectrum lyapunov(const zoo::SystemDescriptor& sys, const zoo::SystemPoint& p, int n,
                          int burn_in = 100);

//------------------------------------------------------------------------------
// Holonomy limits along unstable leaves
//------------------------------------------------------------------------------

enum class LeafRelation { Unstable, Stable, Center };

struct HolonomyProbe {
  zoo::SystemPoint source, target;
  LeafRelation relation;
  cxcore::RLinearMap map;  // on the one-dimensional unstable fiber, in the flat frame
  std::vector<double> history;  // successive differences of the sandwich products
  int iterations = 0;
};

// H = lim Df^n . I . Df^{-n} along the backward orbits, computed on the
// realified unstable frame so C-linearity of the limit is observable rather
// than assumed.  Requires y on the unstable set of x (validated by backward
// convergence) and dim_C E^u = 1.
HolonomyProbe unstable_holonomy(const zoo::SystemDescriptor& sys, const zoo::SystemPoint& x,
                                const zoo::SystemPoint& y, double tol = 1e-10, int n_max = 200);

// Convenience: a point of W^u(x) at parameter t in the flat unstable chart.
zoo::SystemPoint unstable_point(const zoo::SystemDescriptor& sys, const zoo::SystemPoint& x,
                                complexd t);

//------------------------------------------------------------------------------
// Non-stationary linearization
//------------------------------------------------------------------------------

struct LinearizationProbe {
  zoo::SystemPoint value;  // Phi_x(t)
  double equivariance_residual = 0.0;
  std::vector<double> history;
  int iterations = 0;
};

// Phi_x(t) as the limit of f^n ( exp_{f^-n x} ( Df^-n (t u) ) ); requires a
// one-dimensional unstable block.
LinearizationProbe nonstationary_linearization(const zoo::SystemDescriptor& sys,
                                               const zoo::SystemPoint& x, complexd t,
                                               double tol = 1e-12, int n_max = 200);

// Finite-difference check of D_0 Phi_x = Id; returns the deviation.
double linearization_derivative_defect(const zoo::SystemDescriptor& sys, const zoo::SystemPoint& x,
                                       double h = 1e-5);

//------------------------------------------------------------------------------
// d-bar defect of the center holonomy
//------------------------------------------------------------------------------

// Operator norm of the C-antilinear block of the center holonomy germ between
// the unstable plaques through x and y, in the flat linearization charts.
double dbar_defect(const zoo::SystemDescriptor& sys, const zoo::SystemPoint& x,
                   const zoo::SystemPoint& y);

// Same quantity probed by finite differences of the point-level holonomy map.
double dbar_defect_sampled(const zoo::SystemDescriptor& sys, const zoo::SystemPoint& x,
                           const zoo::SystemPoint& y, double eps = 1e-6);

//------------------------------------------------------------------------------
// Isometry / contraction dichotomy
//------------------------------------------------------------------------------

enum class DichotomyVerdict { Isometry, Contraction, Inconclusive };

struct DichotomyReport {
  DichotomyVerdict verdict;
  std::vector<double> growth_curve;  // ||Df^n|_{E^c}|| per n (sup over samples)
  double bound_used = 0.0;
  std::optional<cxcore::SpherePoint> exceptional_point;  // contraction case
  std::vector<double> pair_distance_curve;  // max distance of sampled pairs off b per n
};

// Isometry when the center growth stays below bound_c; Contraction when it
// exceeds 10 * bound_c, with the exceptional point recovered from the
// degenerating fiber cocycle; anything in between is reported Inconclusive.
DichotomyReport dichotomy_classify(const zoo::SystemDescriptor& sys, int n_growth, double bound_c,
                                   int pair_iterations = 40, std::uint64_t seed = 7);

//------------------------------------------------------------------------------
// Translation maps and fiber-modulus scans
//------------------------------------------------------------------------------

struct TranslationMap {
  const zoo::SystemDescriptor* sys;
  zoo::SystemPoint anchor;
  complexd v;  // translation parameter in the flat unstable chart

  zoo::SystemPoint apply(const zoo::SystemPoint& p) const;
  // Projection of p along unstable leaves to the center leaf of the anchor.
  zoo::SystemPoint project_to_center(const zoo::SystemPoint& p) const;
};

TranslationMap translation_map(const zoo::SystemDescriptor& sys, const zoo::SystemPoint& x,
                               complexd v);

struct ModulusScan {
  std::vector<complexd> taus;
  double total_variation = 0.0;
  int degenerate_samples = 0;
};

// Pushes the lattice spanned by (v1, v2) in the unstable chart at x through the
// center holonomy to each sampled point of the center leaf and reduces it.
ModulusScan modulus_scan(const zoo::SystemDescriptor& sys, const zoo::SystemPoint& x,
                         int n_samples, complexd v1, complexd v2, std::uint64_t seed = 11);

// Blanchard-Calabi variant: scans base points along a path, restricting the
// pushed lattice to one complex fiber coordinate; degenerate projections are
// counted rather than reduced.
ModulusScan modulus_scan_bc(const zoo::SystemDescriptor& sys,
                            const std::vector<complexd>& base_points, const CVec& v1,
                            const CVec& v2, int coordinate);

}  // namespace holodyn::dynamics
