#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "holodyn/lattices.hpp"
#include "holodyn/zoo.hpp"

namespace holodyn::measures {

//------------------------------------------------------------------------------
// Particle measures
//------------------------------------------------------------------------------

// Weighted sample points of one system, stored columnwise.  Mobius-fiber
// systems keep the homogeneous sphere pair in two extra rows.
struct ParticleMeasure {
  CMat points;   // coordinates, one column per particle
  RVec weights;  // nonnegative, renormalized to sum 1 after every push
  bool has_sphere_rows = false;

  Eigen::Index size() const { return points.cols(); }
  void normalize();
  double integrate(const std::function<double(const CVec&)>& f) const;

  // CSV rows: re/im of every coordinate, then the weight.
  void to_csv(std::ostream& out) const;
};

// One forward push of every particle, with exact weight renormalization.
void push_forward(const zoo::SystemDescriptor& sys, ParticleMeasure& m);

//------------------------------------------------------------------------------
// Fiber densities in Fourier space
//------------------------------------------------------------------------------

// Real density on a flat torus C/lattice as truncated Fourier coefficients
// over the dual lattice, indexed by integer pairs |m_i| <= cutoff.
class FiberDensity {
public:
  FiberDensity(lattices::Lattice lattice, int cutoff);

  static FiberDensity constant(lattices::Lattice lattice, int cutoff, double mass = 1.0);
  // heat-mollified point mass at fiber coordinate w
  static FiberDensity mollified_particle(const lattices::Lattice& lattice, int cutoff, complexd w,
                                         double weight, double mollify_time);

  int cutoff() const { return cutoff_; }
  const lattices::Lattice& lattice() const { return lattice_; }

  complexd& coeff(int m1, int m2);
  complexd coeff(int m1, int m2) const;
  double mass() const { return coeff(0, 0).real(); }

  // dual vector of the index pair, and its squared flat norm
  Eigen::Vector2d dual_vector(int m1, int m2) const;

  double value(complexd w) const;
  void add(const FiberDensity& other);
  void scale(double s);

  // heat semigroup: multiply each coefficient by exp(-4 pi^2 |xi|^2 t)
  void heat(double t);
  // translation by delta: multiply by the character at delta
  void translate(complexd delta);

  double l2_distance_to_mean() const;
  double max_abs_coeff_boundary() const;  // largest |c| on the truncation boundary

  // Fourier coefficient table {lattice, cutoff, coefficients: [[m1, m2, re, im], ...]}.
  nlohmann::json to_json() const;

private:
  lattices::Lattice lattice_;
  int cutoff_;
  Eigen::Matrix2d dual_basis_;  // columns: dual generators
  CMat coeff_;                  // (2K+1) x (2K+1)
};

FiberDensity heat_step(const FiberDensity& d, double t);

//------------------------------------------------------------------------------
// Hybrid measures: base particles carrying fiber densities
//------------------------------------------------------------------------------

struct HybridMeasure {
  struct Atom {
    CVec base;
    double weight;
    FiberDensity density;
  };
  std::vector<Atom> atoms;
  bool aliasing_warning = false;
};

// Heat-evolved measure: fiber conditionals flow for time t, base marginal is
// untouched.  Particle input is binned per fiber and mollified first.
HybridMeasure mu_t(const zoo::SystemDescriptor& sys, const ParticleMeasure& m, double t,
                   int cutoff = 32, double mollify_time = 1e-3);
HybridMeasure mu_t(HybridMeasure m, double t);

// Push-forward of a hybrid measure under a translation-fiber skew product.
HybridMeasure push_forward_hybrid(const zoo::SystemDescriptor& sys, const HybridMeasure& m);

double hybrid_distance(const HybridMeasure& a, const HybridMeasure& b);

//------------------------------------------------------------------------------
// Heat-decay diagnostics
//------------------------------------------------------------------------------

struct DecayReport {
  std::vector<double> times;
  std::vector<double> l2_distances;
  double fitted_rate = 0.0;    // slope of -log distance against t
  double expected_rate = 0.0;  // 4 pi^2 |xi_min|^2 of the dual lattice
};

DecayReport limit_average_check(const FiberDensity& d, const std::vector<double>& t_grid);

//------------------------------------------------------------------------------
// Gibbs u-state estimation
//------------------------------------------------------------------------------

struct GibbsEstimate {
  ParticleMeasure measure;  // the full Cesaro cloud
  std::vector<double> panel;        // test integrals
  std::vector<double> panel_sigma;  // batch-means Monte Carlo errors
};

// Quadrature points on the unstable disk of the given radius, pushed for
// j = 0..n_iter-1 with uniform Cesaro weights.  The panel holds the canonical
// trigonometric test integrals with batch-means error estimates.
GibbsEstimate gibbs_u_estimate(const zoo::SystemDescriptor& sys, const zoo::SystemPoint& x,
                               double radius, int n_iter, int m_samples, std::uint64_t seed);

// The 16 trigonometric moments used for measure comparison on torus systems.
std::vector<std::function<double(const CVec&)>> test_panel(const zoo::SystemDescriptor& sys);

//------------------------------------------------------------------------------
// Center growth statistics
//------------------------------------------------------------------------------

struct GrowthCurve {
  std::vector<double> sup;   // sup over samples of ||Df^n|_{E^c}||
  std::vector<double> mean;
};

GrowthCurve center_growth_statistics(const zoo::SystemDescriptor& sys, int n_samples, int n,
                                     std::uint64_t seed = 3);

}  // namespace holodyn::measures
