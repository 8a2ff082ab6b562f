#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "holodyn/types.hpp"

namespace holodyn::cxcore {

//------------------------------------------------------------------------------
// Real-linear maps of C^n and their C-linear / C-antilinear decomposition
//------------------------------------------------------------------------------

// v |-> P v + Q conj(v).  The decomposition of a real-linear map into these
// two blocks is unique; ||Q|| = 0 exactly for C-linear (conformal) maps.
struct RLinearMap {
  CMat linear;      // P
  CMat antilinear;  // Q

  CVec apply(const CVec& v) const { return linear * v + antilinear * v.conjugate(); }

  // Operator norm of the antilinear block; the d-bar defect of the map.
  double antilinear_norm() const { return op_norm(antilinear); }

  RMat real_matrix() const { return realify_linear_antilinear(linear, antilinear); }

  static RLinearMap identity(Eigen::Index n) {
    return {CMat::Identity(n, n), CMat::Zero(n, n)};
  }
  static RLinearMap from_real_matrix(const RMat& m) {
    RLinearMap t;
    split_real_matrix(m, t.linear, t.antilinear);
    return t;
  }

  RLinearMap compose(const RLinearMap& inner) const {
    return {linear * inner.linear + antilinear * inner.antilinear.conjugate(),
            linear * inner.antilinear + antilinear * inner.linear.conjugate()};
  }

  RLinearMap inverse() const;
};

// One sampled action vector: (input v, image T v).
using ActionSample = std::pair<CVec, CVec>;

// Recovers the unique real-linear map agreeing with the samples and splits it.
// The 2n inputs must form a real basis of C^n; on the standard basis {e_k, i e_k}
// the blocks are P e_k = (T(e_k) - i T(i e_k))/2 and Q e_k = (T(e_k) + i T(i e_k))/2.
RLinearMap antilinear_split(const std::vector<ActionSample>& samples);

//------------------------------------------------------------------------------
// KAK / SVD of 2x2 complex matrices with unit determinant
//------------------------------------------------------------------------------

struct KakResult {
  Eigen::Matrix2cd u;  // unitary
  Eigen::Matrix2cd d;  // diag(sigma, 1/sigma), sigma >= 1
  Eigen::Matrix2cd v;  // unitary
  double sigma = 1.0;
};

// A = U D V.  Computed from the closed-form Hermitian eigenproblem of A^H A.
// Requires |det A - 1| < det_tol.  Isotropic inputs get U = A, D = V = I.
KakResult kak(const Eigen::Matrix2cd& a, double det_tol = 1e-8);

// Scale-invariant norm sqrt(s1 / s2) of the projective action; equals the KAK
// sigma on unit-determinant input but stays finite-precision safe for badly
// scaled matrices (it never forms the determinant).  Saturates near 1e8.
double psl_norm(const Eigen::Matrix2cd& a);

//------------------------------------------------------------------------------
// The Riemann sphere: homogeneous points, Mobius action, chordal metric
//------------------------------------------------------------------------------

struct SpherePoint {
  complexd a{1.0, 0.0};
  complexd b{0.0, 0.0};

  // Normalizes to unit Euclidean norm with the first nonzero coordinate
  // real positive, giving one canonical representative per projective point.
  static SpherePoint make(complexd a, complexd b);

  // Affine coordinate a/b or its reciprocal depending on which chart is safe.
  complexd affine() const { return a / b; }
};

// |p ^ q| for unit homogeneous representatives; symmetric, 1 for antipodal pairs.
double chordal_distance(const SpherePoint& p, const SpherePoint& q);

SpherePoint mobius_apply(const Eigen::Matrix2cd& a, const SpherePoint& p);

//------------------------------------------------------------------------------
// Degenerating sequences in PSL(2,C)
//------------------------------------------------------------------------------

struct DegenerateLimitResult {
  SpherePoint b;          // exceptional point: kernel direction of the normalized limit
  SpherePoint attractor;  // image direction of the normalized limit
  std::vector<double> contraction_curve;  // max pair distance per subsequence index
  std::vector<int> subsequence;           // indices with strictly increasing norm
};

// Examines A_1..A_sampleK (given as a generator), extracts the norm-increasing
// subsequence and the kernel/image directions of A/||A|| at the deepest sample.
// Sequences whose norms stay below norm_floor are rejected as not degenerating.
DegenerateLimitResult degenerate_limit(const std::function<Eigen::Matrix2cd(int)>& seq,
                                       int sample_k, double norm_floor = 1e4);

//------------------------------------------------------------------------------
// Pointwise dilatation of planar germs
//------------------------------------------------------------------------------

struct DilatationResult {
  double k = 1.0;  // estimate at the finest radius
  std::vector<std::pair<double, double>> per_radius;  // (r, K(r))
  double richardson_slope = 0.0;  // least-squares slope of K(r) against r
};

// max/min ratio of image displacements over circles of shrinking radius.
// Throws if the sampled germ is not injective on a circle.
DilatationResult dilatation(const std::function<complexd(complexd)>& germ,
                            complexd center,
                            const std::vector<double>& radii = {1e-2, 1e-3, 1e-4},
                            int circle_samples = 64);

}  // namespace holodyn::cxcore
