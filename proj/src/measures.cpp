#include "holodyn/measures.hpp"

#include <cmath>
#include <map>
#include <ostream>
#include <random>

#include <nlohmann/json.hpp>

#include "holodyn/parallel.hpp"

namespace holodyn::measures {

using zoo::SystemDescriptor;
using zoo::SystemKind;
using zoo::SystemPoint;

//------------------------------------------------------------------------------
// ParticleMeasure
//------------------------------------------------------------------------------

void ParticleMeasure::normalize() {
  const double total = weights.sum();
  if (!(total > 0)) throw ContractViolation("ParticleMeasure: nonpositive total mass");
  weights /= total;
}

double ParticleMeasure::integrate(const std::function<double(const CVec&)>& f) const {
  double acc = 0.0;
  for (Eigen::Index k = 0; k < size(); ++k) acc += weights(k) * f(points.col(k));
  return acc;
}

void ParticleMeasure::to_csv(std::ostream& out) const {
  for (Eigen::Index r = 0; r < points.rows(); ++r)
    out << "re_" << r << ",im_" << r << ",";
  out << "weight\n";
  for (Eigen::Index k = 0; k < size(); ++k) {
    for (Eigen::Index r = 0; r < points.rows(); ++r)
      out << points(r, k).real() << "," << points(r, k).imag() << ",";
    out << weights(k) << "\n";
  }
}

namespace {

SystemPoint column_to_point(const CMat& pts, Eigen::Index k, bool sphere_rows) {
  SystemPoint p;
  if (sphere_rows) {
    p.z = pts.col(k).head(pts.rows() - 2);
    p.fiber = cxcore::SpherePoint{pts(pts.rows() - 2, k), pts(pts.rows() - 1, k)};
  } else {
    p.z = pts.col(k);
  }
  return p;
}

void point_to_column(const SystemPoint& p, CMat& pts, Eigen::Index k, bool sphere_rows) {
  if (sphere_rows) {
    pts.col(k).head(pts.rows() - 2) = p.z;
    pts(pts.rows() - 2, k) = p.fiber->a;
    pts(pts.rows() - 1, k) = p.fiber->b;
  } else {
    pts.col(k) = p.z;
  }
}

}  // namespace

void push_forward(const SystemDescriptor& sys, ParticleMeasure& m) {
  parallel_for(m.size(), [&](Eigen::Index k) {
    const SystemPoint p = column_to_point(m.points, k, m.has_sphere_rows);
    point_to_column(zoo::evaluate(sys, p), m.points, k, m.has_sphere_rows);
  });
  m.normalize();
}

//------------------------------------------------------------------------------
// FiberDensity
//------------------------------------------------------------------------------

FiberDensity::FiberDensity(lattices::Lattice lattice, int cutoff)
    : lattice_(std::move(lattice)), cutoff_(cutoff), coeff_(2 * cutoff + 1, 2 * cutoff + 1) {
  if (lattice_.ambient_dim() != 1)
    throw ContractViolation("FiberDensity: fiber lattice must be rank 2 in C");
  if (cutoff < 1) throw ContractViolation("FiberDensity: cutoff must be positive");
  coeff_.setZero();
  dual_basis_ = lattice_.period().transpose().inverse();
}

FiberDensity FiberDensity::constant(lattices::Lattice lattice, int cutoff, double mass) {
  FiberDensity d(std::move(lattice), cutoff);
  d.coeff(0, 0) = mass;
  return d;
}

complexd& FiberDensity::coeff(int m1, int m2) { return coeff_(m1 + cutoff_, m2 + cutoff_); }
complexd FiberDensity::coeff(int m1, int m2) const { return coeff_(m1 + cutoff_, m2 + cutoff_); }

Eigen::Vector2d FiberDensity::dual_vector(int m1, int m2) const {
  return dual_basis_ * Eigen::Vector2d(m1, m2);
}

FiberDensity FiberDensity::mollified_particle(const lattices::Lattice& lattice, int cutoff,
                                              complexd w, double weight, double mollify_time) {
  FiberDensity d(lattice, cutoff);
  const Eigen::Vector2d x(w.real(), w.imag());
  for (int m1 = -cutoff; m1 <= cutoff; ++m1)
    for (int m2 = -cutoff; m2 <= cutoff; ++m2) {
      const Eigen::Vector2d xi = d.dual_vector(m1, m2);
      const double phase = -2.0 * M_PI * xi.dot(x);
      const double damp = std::exp(-4.0 * M_PI * M_PI * xi.squaredNorm() * mollify_time);
      d.coeff(m1, m2) = weight * damp * std::polar(1.0, phase);
    }
  return d;
}

double FiberDensity::value(complexd w) const {
  const Eigen::Vector2d x(w.real(), w.imag());
  // density per unit covolume; real by conjugate symmetry of the table
  complexd acc = 0.0;
  for (int m1 = -cutoff_; m1 <= cutoff_; ++m1)
    for (int m2 = -cutoff_; m2 <= cutoff_; ++m2) {
      const double phase = 2.0 * M_PI * dual_vector(m1, m2).dot(x);
      acc += coeff(m1, m2) * std::polar(1.0, phase);
    }
  return acc.real();
}

void FiberDensity::add(const FiberDensity& other) {
  if (other.cutoff_ != cutoff_)
    throw ContractViolation("FiberDensity: cutoff mismatch");
  coeff_ += other.coeff_;
}

void FiberDensity::scale(double s) { coeff_ *= s; }

void FiberDensity::heat(double t) {
  if (!(t >= 0)) throw ContractViolation("heat: time must be nonnegative");
  for (int m1 = -cutoff_; m1 <= cutoff_; ++m1)
    for (int m2 = -cutoff_; m2 <= cutoff_; ++m2) {
      if (m1 == 0 && m2 == 0) continue;  // mass coefficient is untouched
      coeff(m1, m2) *= std::exp(-4.0 * M_PI * M_PI * dual_vector(m1, m2).squaredNorm() * t);
    }
}

void FiberDensity::translate(complexd delta) {
  const Eigen::Vector2d x(delta.real(), delta.imag());
  for (int m1 = -cutoff_; m1 <= cutoff_; ++m1)
    for (int m2 = -cutoff_; m2 <= cutoff_; ++m2)
      coeff(m1, m2) *= std::polar(1.0, -2.0 * M_PI * dual_vector(m1, m2).dot(x));
}

double FiberDensity::l2_distance_to_mean() const {
  double acc = 0.0;
  for (int m1 = -cutoff_; m1 <= cutoff_; ++m1)
    for (int m2 = -cutoff_; m2 <= cutoff_; ++m2) {
      if (m1 == 0 && m2 == 0) continue;
      acc += std::norm(coeff(m1, m2));
    }
  return std::sqrt(acc);
}

nlohmann::json FiberDensity::to_json() const {
  nlohmann::json j;
  j["lattice"] = lattice_.to_json();
  j["cutoff"] = cutoff_;
  nlohmann::json table = nlohmann::json::array();
  for (int m1 = -cutoff_; m1 <= cutoff_; ++m1)
    for (int m2 = -cutoff_; m2 <= cutoff_; ++m2) {
      const complexd c = coeff(m1, m2);
      if (std::abs(c) < 1e-300) continue;
      table.push_back({m1, m2, c.real(), c.imag()});
    }
  j["coefficients"] = table;
  return j;
}

double FiberDensity::max_abs_coeff_boundary() const {
  double worst = 0.0;
  for (int m = -cutoff_; m <= cutoff_; ++m) {
    worst = std::max({worst, std::abs(coeff(m, cutoff_)), std::abs(coeff(m, -cutoff_)),
                      std::abs(coeff(cutoff_, m)), std::abs(coeff(-cutoff_, m))});
  }
  return worst;
}

FiberDensity heat_step(const FiberDensity& d, double t) {
  if (!(t > 0)) throw ContractViolation("heat_step: time must be positive");
  FiberDensity out = d;
  out.heat(t);
  return out;
}

//------------------------------------------------------------------------------
// Hybrid measures
//------------------------------------------------------------------------------

HybridMeasure mu_t(const SystemDescriptor& sys, const ParticleMeasure& m, double t, int cutoff,
                   double mollify_time) {
  if (sys.kind != SystemKind::HolomorphicSkewProduct)
    throw ContractViolation("mu_t: particle binning needs flat torus fibers");
  const auto& d = sys.skew();

  // bin particles per fiber (base coordinates agree to 1e-9)
  struct Key {
    long a, b, c, dd;
    bool operator<(const Key& o) const {
      return std::tie(a, b, c, dd) < std::tie(o.a, o.b, o.c, o.dd);
    }
  };
  std::map<Key, std::vector<Eigen::Index>> bins;
  for (Eigen::Index k = 0; k < m.size(); ++k) {
    const RVec coords = d.base.lattice.coordinates(m.points.col(k).head(2));
    Key key{std::lround(coords(0) * 1e9), std::lround(coords(1) * 1e9),
            std::lround(coords(2) * 1e9), std::lround(coords(3) * 1e9)};
    bins[key].push_back(k);
  }

  HybridMeasure out;
  for (const auto& [key, idx] : bins) {
    double mass = 0.0;
    for (const auto k : idx) mass += m.weights(k);
    FiberDensity density(d.fiber_lattice, cutoff);
    for (const auto k : idx)
      density.add(FiberDensity::mollified_particle(d.fiber_lattice, cutoff, m.points(2, k),
                                                   m.weights(k) / mass, mollify_time));
    if (density.max_abs_coeff_boundary() > 1e-8) out.aliasing_warning = true;
    density.heat(t);
    out.atoms.push_back({m.points.col(idx.front()).head(2), mass, std::move(density)});
  }
  return out;
}

HybridMeasure mu_t(HybridMeasure m, double t) {
  for (auto& atom : m.atoms) atom.density.heat(t);
  return m;
}

HybridMeasure push_forward_hybrid(const SystemDescriptor& sys, const HybridMeasure& m) {
  if (sys.kind != SystemKind::HolomorphicSkewProduct)
    throw ContractViolation("push_forward_hybrid: needs translation fibers");
  const auto& d = sys.skew();
  HybridMeasure out = m;
  for (auto& atom : out.atoms) {
    const complexd shift = (d.ell * atom.base)(0);
    atom.base = d.base.lattice.reduce(d.base.a * atom.base + d.base.b);
    atom.density.translate(shift);
  }
  return out;
}

double hybrid_distance(const HybridMeasure& a, const HybridMeasure& b) {
  if (a.atoms.size() != b.atoms.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (size_t k = 0; k < a.atoms.size(); ++k) {
    const auto& x = a.atoms[k];
    const auto& y = b.atoms[k];
    worst = std::max(worst, (x.base - y.base).norm());
    worst = std::max(worst, std::abs(x.weight - y.weight));
    const int cut = x.density.cutoff();
    for (int m1 = -cut; m1 <= cut; ++m1)
      for (int m2 = -cut; m2 <= cut; ++m2)
        worst = std::max(worst, std::abs(x.density.coeff(m1, m2) - y.density.coeff(m1, m2)));
  }
  return worst;
}

//------------------------------------------------------------------------------
// Decay diagnostics
//------------------------------------------------------------------------------

DecayReport limit_average_check(const FiberDensity& d, const std::vector<double>& t_grid) {
  DecayReport rep;
  rep.times = t_grid;
  double min_dual = std::numeric_limits<double>::infinity();
  for (int m1 = -d.cutoff(); m1 <= d.cutoff(); ++m1)
    for (int m2 = -d.cutoff(); m2 <= d.cutoff(); ++m2) {
      if (m1 == 0 && m2 == 0) continue;
      min_dual = std::min(min_dual, d.dual_vector(m1, m2).squaredNorm());
    }
  rep.expected_rate = 4.0 * M_PI * M_PI * min_dual;

  for (double t : t_grid) {
    FiberDensity evolved = d;
    if (t > 0) evolved.heat(t);
    rep.l2_distances.push_back(evolved.l2_distance_to_mean());
  }

  // least-squares slope of log distance over the usable samples
  std::vector<std::pair<double, double>> pts;
  for (size_t k = 0; k < t_grid.size(); ++k)
    if (rep.l2_distances[k] > 1e-280) pts.emplace_back(t_grid[k], std::log(rep.l2_distances[k]));
  if (pts.size() >= 2) {
    double st = 0, sl = 0, stt = 0, stl = 0;
    for (auto& [t, l] : pts) {
      st += t;
      sl += l;
      stt += t * t;
      stl += t * l;
    }
    const double n = static_cast<double>(pts.size());
    rep.fitted_rate = -(n * stl - st * sl) / (n * stt - st * st);
  }
  return rep;
}

//------------------------------------------------------------------------------
// Gibbs u-state estimation
//------------------------------------------------------------------------------

std::vector<std::function<double(const CVec&)>> test_panel(const SystemDescriptor& sys) {
  // eight low frequency vectors on the torus coordinates, cosine and sine each
  const lattices::Lattice* lat = nullptr;
  switch (sys.kind) {
    case SystemKind::TorusAutomorphism: lat = &sys.torus().lattice; break;
    case SystemKind::HolomorphicSkewProduct: lat = &sys.skew().base.lattice; break;
    case SystemKind::MobiusFiberSystem: lat = &sys.mobius().base.lattice; break;
    default:
      throw ContractViolation("test_panel: torus coordinates required");
  }
  const int dim2 = 2 * lat->ambient_dim();
  std::vector<RVec> freqs;
  for (int k = 0; k < dim2 && static_cast<int>(freqs.size()) < 8; ++k) {
    RVec m = RVec::Zero(dim2);
    m(k) = 1;
    freqs.push_back(m);
  }
  for (int k = 1; k < dim2 && static_cast<int>(freqs.size()) < 8; ++k) {
    RVec m = RVec::Zero(dim2);
    m(0) = 1;
    m(k) = 1;
    freqs.push_back(m);
  }
  while (static_cast<int>(freqs.size()) < 8) {
    RVec m = RVec::Zero(dim2);
    m(0) = static_cast<double>(freqs.size());
    freqs.push_back(m);
  }

  std::vector<std::function<double(const CVec&)>> panel;
  for (const auto& m : freqs) {
    panel.push_back([lat, m, dim2](const CVec& z) {
      const RVec a = lat->coordinates(z.head(dim2 / 2));
      return std::cos(2.0 * M_PI * m.dot(a));
    });
    panel.push_back([lat, m, dim2](const CVec& z) {
      const RVec a = lat->coordinates(z.head(dim2 / 2));
      return std::sin(2.0 * M_PI * m.dot(a));
    });
  }
  return panel;
}

GibbsEstimate gibbs_u_estimate(const SystemDescriptor& sys, const SystemPoint& x, double radius,
                               int n_iter, int m_samples, std::uint64_t seed) {
  const CVec u = zoo::unstable_direction(sys);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  const bool sphere = sys.kind == SystemKind::MobiusFiberSystem;
  const Eigen::Index rows = x.z.size() + (sphere ? 2 : 0);

  // area-uniform quadrature points on the unstable disk
  CMat cloud(rows, m_samples);
  for (int k = 0; k < m_samples; ++k) {
    const double r = radius * std::sqrt(unif(rng));
    const double th = 2.0 * M_PI * unif(rng);
    SystemPoint p = x;
    p.z = x.z + std::polar(r, th) * u.head(x.z.size());
    p = zoo::reduce_point(sys, p);
    point_to_column(p, cloud, k, sphere);
  }

  const auto panel = test_panel(sys);
  const int n_batches = 64;
  const int batch_size = std::max(1, m_samples / n_batches);
  std::vector<std::vector<double>> batch_sums(panel.size(),
                                              std::vector<double>(n_batches, 0.0));

  GibbsEstimate est;
  est.measure.has_sphere_rows = sphere;
  est.measure.points.resize(rows, static_cast<Eigen::Index>(n_iter) * m_samples);
  est.measure.weights = RVec::Constant(static_cast<Eigen::Index>(n_iter) * m_samples,
                                       1.0 / (static_cast<double>(n_iter) * m_samples));

  for (int j = 0; j < n_iter; ++j) {
    if (j > 0) {
      parallel_for(m_samples, [&](Eigen::Index k) {
        const SystemPoint p = column_to_point(cloud, k, sphere);
        point_to_column(zoo::evaluate(sys, p), cloud, k, sphere);
      });
    }
    est.measure.points.middleCols(static_cast<Eigen::Index>(j) * m_samples, m_samples) = cloud;
    for (size_t q = 0; q < panel.size(); ++q)
      for (int k = 0; k < m_samples; ++k)
        batch_sums[q][std::min(k / batch_size, n_batches - 1)] += panel[q](cloud.col(k));
  }

  const double per_batch = static_cast<double>(n_iter) * batch_size;
  for (size_t q = 0; q < panel.size(); ++q) {
    double mean = 0.0;
    for (double s : batch_sums[q]) mean += s;
    mean /= (static_cast<double>(n_iter) * m_samples);
    double var = 0.0;
    for (double s : batch_sums[q]) {
      const double b = s / per_batch;
      var += (b - mean) * (b - mean);
    }
    var /= (n_batches - 1);
    est.panel.push_back(mean);
    est.panel_sigma.push_back(std::sqrt(var / n_batches));
  }
  return est;
}

//------------------------------------------------------------------------------
// Center growth statistics
//------------------------------------------------------------------------------

GrowthCurve center_growth_statistics(const SystemDescriptor& sys, int n_samples, int n,
                                     std::uint64_t seed) {
  GrowthCurve curve;
  curve.sup.assign(n, 0.0);
  curve.mean.assign(n, 0.0);
  for (int s = 0; s < n_samples; ++s) {
    SystemPoint p = zoo::random_point(sys, seed + static_cast<std::uint64_t>(s));
    switch (sys.kind) {
      case SystemKind::HolomorphicSkewProduct: {
        double prod = 1.0;
        for (int k = 0; k < n; ++k) {
          prod *= std::abs(zoo::tangent(sys, p)(2, 2));
          p = zoo::evaluate(sys, p);
          curve.sup[k] = std::max(curve.sup[k], prod);
          curve.mean[k] += prod / n_samples;
        }
        break;
      }
      case SystemKind::BlanchardCalabi: {
        double prod = 1.0;
        for (int k = 0; k < n; ++k) {
          prod *= std::abs(zoo::tangent(sys, p)(0, 0));
          curve.sup[k] = std::max(curve.sup[k], prod);
          curve.mean[k] += prod / n_samples;
        }
        break;
      }
      case SystemKind::MobiusFiberSystem: {
        Eigen::Matrix2cd acc = Eigen::Matrix2cd::Identity();
        for (int k = 0; k < n; ++k) {
          const Eigen::Matrix2cd g =
              sys.mobius().g_of_base ? sys.mobius().g_of_base(p.z) : sys.mobius().g;
          acc = g * acc;
          acc /= acc.norm();
          p = zoo::evaluate(sys, p);
          const double sigma = cxcore::psl_norm(acc);
          curve.sup[k] = std::max(curve.sup[k], sigma);
          curve.mean[k] += sigma / n_samples;
        }
        break;
      }
      default:
        throw ContractViolation("center_growth_statistics: no center fibers for this kind");
    }
  }
  return curve;
}

}  // namespace holodyn::measures
