#include "holodyn/cxcore.hpp"

#include <algorithm>
#include <cmath>

namespace holodyn::cxcore {

RLinearMap RLinearMap::inverse() const {
  const RMat m = real_matrix();
  Eigen::FullPivLU<RMat> lu(m);
  if (!lu.isInvertible())
    throw ContractViolation("RLinearMap::inverse: map is singular");
  return from_real_matrix(lu.inverse());
}

RLinearMap antilinear_split(const std::vector<ActionSample>& samples) {
  if (samples.empty())
    throw ContractViolation("antilinear_split: no samples");
  const Eigen::Index n = samples.front().first.size();
  if (static_cast<Eigen::Index>(samples.size()) != 2 * n)
    throw ContractViolation("antilinear_split: need 2n samples for C^n");

  // Solve for the real 2n x 2n matrix with M * realify(v) = realify(Tv).
  RMat vin(2 * n, 2 * n), vout(2 * n, 2 * n);
  for (Eigen::Index k = 0; k < 2 * n; ++k) {
    vin.col(k) = realify(samples[k].first);
    vout.col(k) = realify(samples[k].second);
  }
  Eigen::FullPivLU<RMat> lu(vin);
  const double scale = vin.cwiseAbs().maxCoeff();
  if (!lu.isInvertible() || std::abs(lu.determinant()) < 1e-12 * std::pow(std::max(scale, 1e-30), 2.0 * n))
    throw ContractViolation("antilinear_split: sample vectors do not form a real basis");
  const RMat m = vout * lu.inverse();
  return RLinearMap::from_real_matrix(m);
}

//------------------------------------------------------------------------------
// KAK
//------------------------------------------------------------------------------

KakResult kak(const Eigen::Matrix2cd& a, double det_tol) {
  const complexd det = a.determinant();
  if (std::abs(det - 1.0) > det_tol)
    throw ContractViolation("kak: determinant is not 1");

  const Eigen::Matrix2cd h = a.adjoint() * a;  // Hermitian, positive definite
  const double alpha = h(0, 0).real();
  const double gamma = h(1, 1).real();
  const complexd beta = h(0, 1);
  const double mid = (alpha + gamma) / 2;
  const double rad = std::hypot((alpha - gamma) / 2, std::abs(beta));
  const double mu_max = mid + rad;

  KakResult r;
  r.sigma = std::sqrt(std::max(mu_max, 1.0));
  if (rad < 1e-14 * std::max(1.0, mid)) {
    // A^H A = mu I with mu = 1: A is unitary.  Deterministic tie-break.
    r.u = a;
    r.d.setIdentity();
    r.v.setIdentity();
    r.sigma = 1.0;
    return r;
  }

  Eigen::Vector2cd w1;
  if (std::abs(beta) > 1e-300 * rad && std::abs(beta) > 0)
    w1 << beta, complexd(mu_max - alpha, 0.0);
  else
    w1 = (alpha >= gamma) ? Eigen::Vector2cd(1, 0) : Eigen::Vector2cd(0, 1);
  w1.normalize();
  const Eigen::Vector2cd w2(-std::conj(w1(1)), std::conj(w1(0)));

  Eigen::Matrix2cd w;
  w.col(0) = w1;
  w.col(1) = w2;
  r.v = w.adjoint();
  r.d = Eigen::Vector2cd(r.sigma, 1.0 / r.sigma).asDiagonal();
  r.u = a * w * Eigen::Vector2cd(1.0 / r.sigma, r.sigma).asDiagonal();
  return r;
}

//------------------------------------------------------------------------------
// Sphere points
//------------------------------------------------------------------------------

SpherePoint SpherePoint::make(complexd a, complexd b) {
  const double n = std::sqrt(std::norm(a) + std::norm(b));
  if (!(n > 0.0) || !std::isfinite(n))
    throw ContractViolation("SpherePoint: (a, b) must be nonzero and finite");
  a /= n;
  b /= n;
  const complexd lead = (std::abs(a) >= std::abs(b)) ? a : b;
  const complexd phase = lead / std::abs(lead);
  return SpherePoint{a / phase, b / phase};
}

double chordal_distance(const SpherePoint& p, const SpherePoint& q) {
  const double np = std::sqrt(std::norm(p.a) + std::norm(p.b));
  const double nq = std::sqrt(std::norm(q.a) + std::norm(q.b));
  return std::abs(p.a * q.b - p.b * q.a) / (np * nq);
}

SpherePoint mobius_apply(const Eigen::Matrix2cd& a, const SpherePoint& p) {
  if (std::abs(a.determinant()) < 1e-14 * a.cwiseAbs().maxCoeff() * a.cwiseAbs().maxCoeff())
    throw ContractViolation("mobius_apply: matrix is not invertible");
  const Eigen::Vector2cd v = a * Eigen::Vector2cd(p.a, p.b);
  return SpherePoint::make(v(0), v(1));
}

//------------------------------------------------------------------------------
// Degenerating sequences
//------------------------------------------------------------------------------

namespace {

// Hermitian eigendata of (A/||A||)^H (A/||A||): the top right-singular
// direction and the eigenvalue pair.  Stable at any scale.
struct ProjectiveSvd {
  Eigen::Vector2cd top;     // right-singular direction of s1
  double mu_max, mu_min;    // eigenvalues of the normalized Gram matrix
  Eigen::Matrix2cd scaled;  // A / ||A||_F
};

ProjectiveSvd projective_svd(const Eigen::Matrix2cd& a) {
  const double scale = a.norm();
  if (!(scale > 0) || !std::isfinite(scale))
    throw ContractViolation("projective svd: matrix is zero or not finite");
  ProjectiveSvd out;
  out.scaled = a / scale;
  const Eigen::Matrix2cd h = out.scaled.adjoint() * out.scaled;
  const double alpha = h(0, 0).real();
  const double gamma = h(1, 1).real();
  const complexd beta = h(0, 1);
  const double mid = (alpha + gamma) / 2;
  const double rad = std::hypot((alpha - gamma) / 2, std::abs(beta));
  out.mu_max = mid + rad;
  // two routes to the small eigenvalue: the subtraction loses it below
  // 1e-16 mu_max, the determinant of the scaled matrix reaches further
  const double via_det = std::norm(out.scaled.determinant()) / out.mu_max;
  out.mu_min = std::max({mid - rad, via_det, 1e-26 * out.mu_max});
  if (rad > 1e-300 && std::abs(beta) > 0)
    out.top = Eigen::Vector2cd(beta, complexd(out.mu_max - alpha, 0.0)).normalized();
  else
    out.top = (alpha >= gamma) ? Eigen::Vector2cd(1, 0) : Eigen::Vector2cd(0, 1);
  return out;
}

}  // namespace

double psl_norm(const Eigen::Matrix2cd& a) {
  const ProjectiveSvd s = projective_svd(a);
  return std::pow(s.mu_max / s.mu_min, 0.25);
}

DegenerateLimitResult degenerate_limit(const std::function<Eigen::Matrix2cd(int)>& seq,
                                       int sample_k, double norm_floor) {
  if (sample_k < 2)
    throw ContractViolation("degenerate_limit: need at least two samples");

  std::vector<Eigen::Matrix2cd> mats;  // Frobenius-normalized record samples
  std::vector<double> dets;            // |det| of the normalized samples
  std::vector<int> subseq;
  std::optional<Eigen::Matrix2cd> deepest;  // may sit past the det resolution
  double best = 0.0;
  for (int n = 1; n <= sample_k; ++n) {
    const ProjectiveSvd s = projective_svd(seq(n));
    const double sigma = std::pow(s.mu_max / s.mu_min, 0.25);
    const bool saturated = s.mu_min <= 1.01e-26 * s.mu_max;
    if (sigma > best) {
      best = sigma;
      subseq.push_back(n);
      deepest = s.scaled;
      if (!saturated) {
        // curve samples need a trustworthy determinant; the kernel direction
        // itself stays accurate at any depth
        mats.push_back(s.scaled);
        dets.push_back(std::sqrt(s.mu_max * s.mu_min));
      }
    }
    if (saturated) break;
  }
  if (best < norm_floor || !deepest)
    throw ContractViolation("degenerate_limit: norms stay bounded, sequence does not degenerate");

  const ProjectiveSvd deep = projective_svd(*deepest);
  DegenerateLimitResult r;
  // A/||A|| tends to a rank-one map; b is its kernel direction (the orthogonal
  // complement of the top right-singular direction), the attractor its image.
  r.b = SpherePoint::make(-std::conj(deep.top(1)), std::conj(deep.top(0)));
  const Eigen::Vector2cd img = (deep.scaled * deep.top).normalized();
  r.attractor = SpherePoint::make(img(0), img(1));
  r.subsequence = subseq;

  // Fixed probe points; pairs kept only away from b.
  std::vector<SpherePoint> probes;
  for (int j = 0; j < 8; ++j) {
    const double t = 0.35 + 0.55 * j / 7.0;
    const double ph = 2.399963 * j;  // golden-angle spread
    probes.push_back(SpherePoint::make(complexd(std::cos(ph), std::sin(ph)) * std::sin(t * 1.5),
                                       complexd(std::cos(t), 0.1 * j)));
  }
  std::vector<SpherePoint> kept;
  for (const auto& p : probes)
    if (chordal_distance(p, r.b) >= 0.1) kept.push_back(p);
  if (kept.size() < 2) kept = {r.attractor, SpherePoint::make(1.0, 1.0)};

  r.contraction_curve.reserve(mats.size());
  for (size_t m = 0; m < mats.size(); ++m) {
    // d(A p, A q) = |det A| |p ^ q| / (||A p|| ||A q||); this factored form
    // avoids the cancellation of subtracting two nearly equal image points.
    double worst = 0.0;
    for (size_t i = 0; i < kept.size(); ++i)
      for (size_t j = i + 1; j < kept.size(); ++j) {
        const Eigen::Vector2cd pi = mats[m] * Eigen::Vector2cd(kept[i].a, kept[i].b);
        const Eigen::Vector2cd pj = mats[m] * Eigen::Vector2cd(kept[j].a, kept[j].b);
        const double wedge = std::abs(complexd(kept[i].a * kept[j].b - kept[i].b * kept[j].a));
        worst = std::max(worst, dets[m] * wedge / (pi.norm() * pj.norm()));
      }
    r.contraction_curve.push_back(worst);
  }
  return r;
}

//------------------------------------------------------------------------------
// Dilatation
//------------------------------------------------------------------------------

DilatationResult dilatation(const std::function<complexd(complexd)>& germ,
                            complexd center, const std::vector<double>& radii,
                            int circle_samples) {
  if (radii.empty())
    throw ContractViolation("dilatation: need at least one radius");
  const complexd f0 = germ(center);

  DilatationResult res;
  for (double r : radii) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    std::vector<complexd> images(circle_samples);
    for (int j = 0; j < circle_samples; ++j) {
      const double th = 2.0 * M_PI * j / circle_samples;
      const complexd w = germ(center + r * complexd(std::cos(th), std::sin(th))) - f0;
      images[j] = w;
      const double d = std::abs(w);
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    if (!(lo > 0.0))
      throw ContractViolation("dilatation: germ collapses a circle point, distortion undefined");
    for (int i = 0; i < circle_samples; ++i)
      for (int j = i + 1; j < circle_samples; ++j)
        if (std::abs(images[i] - images[j]) < 1e-12 * hi)
          throw ContractViolation("dilatation: germ is not injective on the sampled circle");
    res.per_radius.emplace_back(r, hi / lo);
  }

  res.k = res.per_radius.back().second;
  if (res.per_radius.size() >= 2) {
    // least squares K(r) ~ K0 + slope * r
    double sr = 0, sk = 0, srr = 0, srk = 0;
    const double n = static_cast<double>(res.per_radius.size());
    for (auto& [r, k] : res.per_radius) {
      sr += r;
      sk += k;
      srr += r * r;
      srk += r * k;
    }
    const double denom = n * srr - sr * sr;
    if (std::abs(denom) > 0) res.richardson_slope = (n * srk - sr * sk) / denom;
  }
  return res;
}

}  // namespace holodyn::cxcore
