#include "holodyn/zoo.hpp"

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

namespace holodyn::zoo {

const char* to_string(SystemKind k) {
  switch (k) {
    case SystemKind::TorusAutomorphism: return "torus_automorphism";
    case SystemKind::HolomorphicSkewProduct: return "holomorphic_skew_product";
    case SystemKind::MobiusFiberSystem: return "mobius_fiber_system";
    case SystemKind::BlanchardCalabi: return "blanchard_calabi";
    case SystemKind::NilmanifoldAutomorphism: return "nilmanifold_automorphism";
    case SystemKind::EllipticQuotient: return "elliptic_quotient";
  }
  return "?";
}

const char* to_string(Hyperbolicity h) {
  switch (h) {
    case Hyperbolicity::Anosov: return "anosov";
    case Hyperbolicity::PartiallyHyperbolic: return "partially_hyperbolic";
    case Hyperbolicity::Parabolic: return "parabolic";
    case Hyperbolicity::Isometry: return "isometry";
    case Hyperbolicity::Expanding: return "expanding";
  }
  return "?";
}

//------------------------------------------------------------------------------
// Spectrum classification
//------------------------------------------------------------------------------

namespace {

struct Spectrum {
  std::vector<complexd> eigenvalues;
  bool unit_defective = false;  // Jordan block on the unit circle
};

Spectrum classify_spectrum(const CMat& a) {
  Spectrum s;
  Eigen::ComplexEigenSolver<CMat> es(a);
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
    s.eigenvalues.push_back(es.eigenvalues()(k));
  for (const auto& lam : s.eigenvalues) {
    if (std::abs(std::abs(lam) - 1.0) > 1e-9) continue;
    // geometric vs algebraic multiplicity of this unit-modulus eigenvalue
    int alg = 0;
    for (const auto& mu : s.eigenvalues)
      if (std::abs(mu - lam) < 1e-7) ++alg;
    Eigen::JacobiSVD<CMat> svd(a - lam * CMat::Identity(a.rows(), a.cols()));
    int geo = 0;
    const auto& sv = svd.singularValues();
    for (Eigen::Index k = 0; k < sv.size(); ++k)
      if (sv(k) < 1e-9 * std::max(1.0, sv(0))) ++geo;
    if (geo < alg) s.unit_defective = true;
  }
  return s;
}

Hyperbolicity hyperbolicity_from(const Spectrum& s) {
  int below = 0, unit = 0, above = 0;
  for (const auto& lam : s.eigenvalues) {
    const double m = std::abs(lam);
    if (m < 1.0 - 1e-9) ++below;
    else if (m > 1.0 + 1e-9) ++above;
    else ++unit;
  }
  if (s.unit_defective) return Hyperbolicity::Parabolic;
  if (unit == 0 && below > 0 && above > 0) return Hyperbolicity::Anosov;
  if (unit == 0 && below == 0 && above > 0) return Hyperbolicity::Expanding;
  if (below == 0 && above == 0) return Hyperbolicity::Isometry;
  return Hyperbolicity::PartiallyHyperbolic;
}

}  // namespace

//------------------------------------------------------------------------------
// Constructors
//------------------------------------------------------------------------------

SystemDescriptor make_torus_automorphism(const CMat& a, lattices::Lattice lattice, const CVec& b) {
  const int n = lattice.ambient_dim();
  if (a.rows() != n || a.cols() != n)
    throw ContractViolation("make_torus_automorphism: matrix does not match lattice dimension");

  // A must permute the lattice: integer coordinates for every generator image,
  // and the induced integer matrix must be unimodular.
  RMat induced(2 * n, 2 * n);
  for (int k = 0; k < 2 * n; ++k) {
    const CVec img = a * lattice.basis()[k];
    const RVec coords = lattice.coordinates(img);
    for (Eigen::Index j = 0; j < coords.size(); ++j) {
      if (std::abs(coords(j) - std::round(coords(j))) > 1e-9)
        throw ContractViolation("make_torus_automorphism: A does not preserve the lattice");
      induced(j, k) = std::round(coords(j));
    }
  }
  if (std::abs(std::abs(induced.determinant()) - 1.0) > 1e-6)
    throw ContractViolation("make_torus_automorphism: A is not invertible on the lattice");

  SystemDescriptor sys;
  sys.kind = SystemKind::TorusAutomorphism;
  sys.complex_dim = n;
  CVec shift = b.size() ? b : CVec::Zero(n);
  sys.data = TorusData{a, shift, std::move(lattice)};
  sys.hyperbolicity = hyperbolicity_from(classify_spectrum(a));
  sys.name = "torus_automorphism";
  return sys;
}

SystemDescriptor make_skew_product(SystemDescriptor base, lattices::Lattice fiber_lattice,
                                   const Eigen::RowVectorXcd& ell) {
  if (base.kind != SystemKind::TorusAutomorphism || base.complex_dim != 2)
    throw ContractViolation("make_skew_product: base must be an automorphism of a complex 2-torus");
  if (fiber_lattice.ambient_dim() != 1)
    throw ContractViolation("make_skew_product: fiber lattice must have rank 2 in C");
  const TorusData& bd = base.torus();
  for (const auto& gen : bd.lattice.basis()) {
    const complexd image = (ell * gen)(0);
    CVec v(1);
    v(0) = image;
    if (!fiber_lattice.contains(v))
      throw ContractViolation("make_skew_product: ell does not map the base lattice into the fiber lattice");
  }

  SystemDescriptor sys;
  sys.kind = SystemKind::HolomorphicSkewProduct;
  sys.complex_dim = 3;
  sys.hyperbolicity = Hyperbolicity::PartiallyHyperbolic;
  sys.data = SkewProductData{bd, std::move(fiber_lattice), ell};
  sys.name = "holomorphic_skew_product";
  return sys;
}

SystemDescriptor make_mobius_fiber_system(SystemDescriptor base, const Eigen::Matrix2cd& g) {
  if (base.kind != SystemKind::TorusAutomorphism)
    throw ContractViolation("make_mobius_fiber_system: base must be a torus automorphism");
  if (std::abs(g.determinant()) < 1e-12)
    throw ContractViolation("make_mobius_fiber_system: g must be invertible");
  SystemDescriptor sys;
  sys.kind = SystemKind::MobiusFiberSystem;
  sys.complex_dim = base.complex_dim + 1;
  sys.hyperbolicity = Hyperbolicity::PartiallyHyperbolic;
  sys.data = MobiusFiberData{base.torus(), g / std::sqrt(g.determinant()), true, nullptr};
  sys.name = "mobius_fiber_system";
  return sys;
}

SystemDescriptor make_mobius_fiber_system(SystemDescriptor base,
                                          std::function<Eigen::Matrix2cd(const CVec&)> g_of_base) {
  SystemDescriptor sys =
      make_mobius_fiber_system(std::move(base), Eigen::Matrix2cd(Eigen::Matrix2cd::Identity()));
  auto& md = std::get<MobiusFiberData>(sys.data);
  md.g_of_base = std::move(g_of_base);
  md.holomorphic = false;  // a non-constant continuous twist is not holomorphic
  sys.holomorphic = false;
  return sys;
}

SystemDescriptor make_blanchard_calabi(int copies, const RMat& a, std::array<complexd, 2> s1,
                                       std::array<complexd, 2> s2) {
  if (copies < 1) throw ContractViolation("make_blanchard_calabi: need at least one block");
  if (a.rows() != copies || a.cols() != copies)
    throw ContractViolation("make_blanchard_calabi: block matrix must be n x n");
  for (int i = 0; i < copies; ++i)
    for (int j = 0; j < copies; ++j)
      if (std::abs(a(i, j) - std::round(a(i, j))) > 1e-12)
        throw ContractViolation("make_blanchard_calabi: block matrix must be integral");

  const complexd resultant = s1[0] * s2[1] - s1[1] * s2[0];
  if (std::abs(resultant) < 1e-12)
    throw ContractViolation("make_blanchard_calabi: sections have a common zero");

  SystemDescriptor sys;
  sys.kind = SystemKind::BlanchardCalabi;
  sys.complex_dim = 2 * copies + 1;
  sys.name = "blanchard_calabi";

  const Spectrum spec = classify_spectrum(a.cast<complexd>());
  for (const auto& lam : spec.eigenvalues)
    if (std::abs(std::abs(lam) - 1.0) <= 1e-9)
      throw ContractViolation("make_blanchard_calabi: block matrix has a unimodular eigenvalue");

  if (copies == 1) {
    // a single block only admits fiberwise expanding integer multiples
    const double det = a(0, 0);
    if (std::abs(det) < 2.0)
      throw ContractViolation("make_blanchard_calabi: 1-block systems need |a| >= 2");
    sys.invertible = false;  // degree |a|^4 self-cover of each fiber
    sys.hyperbolicity = Hyperbolicity::PartiallyHyperbolic;
  } else {
    if (std::abs(std::abs(a.determinant()) - 1.0) > 1e-9)
      throw ContractViolation("make_blanchard_calabi: block matrix must be unimodular");
    sys.hyperbolicity = Hyperbolicity::PartiallyHyperbolic;
  }
  sys.data = BlanchardCalabiData{copies, a, s1, s2};
  return sys;
}

SystemDescriptor make_nilmanifold(const std::string& catalog_name) {
  liecx::CatalogEntry entry = liecx::load_algebra(catalog_name);
  SystemDescriptor sys;
  sys.kind = SystemKind::NilmanifoldAutomorphism;
  sys.complex_dim = entry.algebra.dim() / 2;
  sys.hyperbolicity = Hyperbolicity::PartiallyHyperbolic;
  sys.name = catalog_name;
  sys.data = NilmanifoldData{std::make_shared<liecx::StructureAlgebra>(std::move(entry.algebra)),
                             std::move(entry.f)};
  return sys;
}

SystemDescriptor make_elliptic_quotient(complexd tau) {
  if (!(tau.imag() > 0))
    throw ContractViolation("make_elliptic_quotient: Im tau must be positive");
  SystemDescriptor sys;
  sys.kind = SystemKind::EllipticQuotient;
  sys.complex_dim = 3;
  sys.hyperbolicity = Hyperbolicity::PartiallyHyperbolic;
  sys.name = "elliptic_quotient";
  sys.data = EllipticQuotientData{tau};
  return sys;
}

//------------------------------------------------------------------------------
// Shared coordinate helpers
//------------------------------------------------------------------------------

namespace {

CMat elliptic_matrix() {
  CMat a(3, 3);
  a << 2, 1, 0, 1, 1, 0, 0, 0, 1;
  return a;
}

lattices::Lattice elliptic_lattice(complexd tau) {
  std::vector<CVec> basis;
  for (int k = 0; k < 3; ++k) {
    CVec v = CVec::Zero(3);
    v(k) = 1.0;
    basis.push_back(v);
    v(k) = tau;
    basis.push_back(v);
  }
  return lattices::Lattice(3, std::move(basis));
}

std::pair<complexd, complexd> bc_sections(const BlanchardCalabiData& bc, int chart, complexd zeta) {
  if (chart == 0) return {bc.s1c[0] + bc.s1c[1] * zeta, bc.s2c[0] + bc.s2c[1] * zeta};
  return {bc.s1c[0] * zeta + bc.s1c[1], bc.s2c[0] * zeta + bc.s2c[1]};
}

}  // namespace

RMat bc_frame(const BlanchardCalabiData& bc, int chart, complexd zeta) {
  const auto [s1, s2] = bc_sections(bc, chart, zeta);
  const complexd i(0, 1);
  RMat frame(4, 4);
  CVec col(2);
  col << s1, s2;
  frame.col(0) = realify(col);
  col << i * s1, -i * s2;
  frame.col(1) = realify(col);
  col << -s2, s1;
  frame.col(2) = realify(col);
  col << i * s2, i * s1;
  frame.col(3) = realify(col);
  return frame;
}

double bc_frame_gram(const BlanchardCalabiData& bc, int chart, complexd zeta) {
  return bc_frame(bc, chart, zeta).determinant();
}

lattices::Lattice bc_fiber_lattice(const SystemDescriptor& sys, int chart, complexd zeta) {
  const auto& bc = sys.bc();
  const RMat frame = bc_frame(bc, chart, zeta);
  const int n = bc.copies;
  std::vector<CVec> basis;
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < 4; ++k) {
      CVec v = CVec::Zero(2 * n);
      const CVec block = complexify(frame.col(k));
      v(2 * l) = block(0);
      v(2 * l + 1) = block(1);
      basis.push_back(v);
    }
  return lattices::Lattice(2 * n, std::move(basis));
}

//------------------------------------------------------------------------------
// Evaluation
//------------------------------------------------------------------------------

namespace {

SystemPoint evaluate_bc(const SystemDescriptor& sys, const SystemPoint& p, bool inverse) {
  const auto& bc = sys.bc();
  const int n = bc.copies;
  if (p.z.size() != 2 * n + 1)
    throw ContractViolation("evaluate: point has wrong dimension");
  const complexd zeta = p.z(0);
  RMat block = bc.a;
  if (inverse) block = bc.a.inverse();

  CVec fiber = p.z.tail(2 * n);
  CVec out = CVec::Zero(2 * n);
  for (int l = 0; l < n; ++l)
    for (int m = 0; m < n; ++m) {
      out(2 * l) += block(l, m) * fiber(2 * m);
      out(2 * l + 1) += block(l, m) * fiber(2 * m + 1);
    }
  const lattices::Lattice lat = bc_fiber_lattice(sys, p.chart, zeta);
  SystemPoint q;
  q.chart = p.chart;
  q.z = CVec(2 * n + 1);
  q.z(0) = zeta;
  q.z.tail(2 * n) = lat.reduce(out);
  return q;
}

Eigen::Matrix2cd mobius_matrix_at(const MobiusFiberData& md, const CVec& base) {
  if (md.g_of_base) return md.g_of_base(base);
  return md.g;
}

}  // namespace

SystemPoint evaluate(const SystemDescriptor& sys, const SystemPoint& p) {
  switch (sys.kind) {
    case SystemKind::TorusAutomorphism: {
      const auto& d = sys.torus();
      return {0, d.lattice.reduce(d.a * p.z + d.b), std::nullopt};
    }
    case SystemKind::HolomorphicSkewProduct: {
      const auto& d = sys.skew();
      const CVec base = p.z.head(2);
      CVec out(3);
      out.head(2) = d.base.lattice.reduce(d.base.a * base + d.base.b);
      CVec w(1);
      w(0) = p.z(2) + (d.ell * base)(0);
      out(2) = d.fiber_lattice.reduce(w)(0);
      return {0, out, std::nullopt};
    }
    case SystemKind::MobiusFiberSystem: {
      const auto& d = sys.mobius();
      if (!p.fiber) throw ContractViolation("evaluate: mobius point needs a fiber coordinate");
      SystemPoint q;
      q.z = d.base.lattice.reduce(d.base.a * p.z + d.base.b);
      q.fiber = cxcore::mobius_apply(mobius_matrix_at(d, p.z), *p.fiber);
      return q;
    }
    case SystemKind::BlanchardCalabi:
      return evaluate_bc(sys, p, false);
    case SystemKind::EllipticQuotient: {
      const auto& d = sys.elliptic();
      return {0, elliptic_lattice(d.tau).reduce(elliptic_matrix() * p.z), std::nullopt};
    }
    case SystemKind::NilmanifoldAutomorphism:
      throw ContractViolation("evaluate: nilmanifold systems are analyzed at the algebra level");
  }
  throw ContractViolation("evaluate: unknown kind");
}

SystemPoint evaluate_inverse(const SystemDescriptor& sys, const SystemPoint& p) {
  switch (sys.kind) {
    case SystemKind::TorusAutomorphism: {
      const auto& d = sys.torus();
      return {0, d.lattice.reduce(d.a.partialPivLu().solve(p.z - d.b)), std::nullopt};
    }
    case SystemKind::HolomorphicSkewProduct: {
      const auto& d = sys.skew();
      CVec out(3);
      const CVec base_pre = d.base.lattice.reduce(d.base.a.partialPivLu().solve(p.z.head(2) - d.base.b));
      out.head(2) = base_pre;
      CVec w(1);
      w(0) = p.z(2) - (d.ell * base_pre)(0);
      out(2) = d.fiber_lattice.reduce(w)(0);
      return {0, out, std::nullopt};
    }
    case SystemKind::MobiusFiberSystem: {
      const auto& d = sys.mobius();
      if (!p.fiber) throw ContractViolation("evaluate_inverse: mobius point needs a fiber coordinate");
      SystemPoint q;
      q.z = d.base.lattice.reduce(d.base.a.partialPivLu().solve(p.z - d.base.b));
      q.fiber = cxcore::mobius_apply(mobius_matrix_at(d, q.z).inverse(), *p.fiber);
      return q;
    }
    case SystemKind::BlanchardCalabi:
      return evaluate_bc(sys, p, true);
    case SystemKind::EllipticQuotient: {
      const auto& d = sys.elliptic();
      return {0, elliptic_lattice(d.tau).reduce(elliptic_matrix().partialPivLu().solve(p.z)),
              std::nullopt};
    }
    case SystemKind::NilmanifoldAutomorphism:
      throw ContractViolation("evaluate_inverse: nilmanifold systems are analyzed at the algebra level");
  }
  throw ContractViolation("evaluate_inverse: unknown kind");
}

namespace {

// Chart convention on P^1: chart 0 has coordinate a/b near [0:1], chart 1 has
// coordinate b/a near [1:0]; a point canonically lives in the chart where its
// coordinate has modulus <= 1.
int sphere_chart(const cxcore::SpherePoint& p) { return std::abs(p.a) <= std::abs(p.b) ? 0 : 1; }

complexd sphere_coordinate(const cxcore::SpherePoint& p) {
  return sphere_chart(p) == 0 ? p.a / p.b : p.b / p.a;
}

complexd mobius_chart_derivative(const Eigen::Matrix2cd& g, const cxcore::SpherePoint& p) {
  Eigen::Matrix2cd swap;
  swap << 0, 1, 1, 0;
  const cxcore::SpherePoint q = cxcore::mobius_apply(g, p);
  Eigen::Matrix2cd m = g;
  if (sphere_chart(p) == 1) m = m * swap;
  if (sphere_chart(q) == 1) m = swap * m;
  const complexd s = sphere_coordinate(p);
  const complexd denom = m(1, 0) * s + m(1, 1);
  return m.determinant() / (denom * denom);
}

}  // namespace

CMat tangent(const SystemDescriptor& sys, const SystemPoint& p) {
  switch (sys.kind) {
    case SystemKind::TorusAutomorphism:
      return sys.torus().a;
    case SystemKind::HolomorphicSkewProduct: {
      const auto& d = sys.skew();
      CMat t = CMat::Zero(3, 3);
      t.topLeftCorner(2, 2) = d.base.a;
      t.row(2).head(2) = d.ell;
      t(2, 2) = 1.0;
      return t;
    }
    case SystemKind::MobiusFiberSystem: {
      const auto& d = sys.mobius();
      if (!p.fiber) throw ContractViolation("tangent: mobius point needs a fiber coordinate");
      const int n = static_cast<int>(d.base.a.rows());
      CMat t = CMat::Zero(n + 1, n + 1);
      t.topLeftCorner(n, n) = d.base.a;
      t(n, n) = mobius_chart_derivative(mobius_matrix_at(d, p.z), *p.fiber);
      return t;
    }
    case SystemKind::BlanchardCalabi: {
      const auto& bc = sys.bc();
      const int n = bc.copies;
      CMat t = CMat::Zero(2 * n + 1, 2 * n + 1);
      t(0, 0) = 1.0;
      for (int l = 0; l < n; ++l)
        for (int m = 0; m < n; ++m) {
          t(1 + 2 * l, 1 + 2 * m) = bc.a(l, m);
          t(2 + 2 * l, 2 + 2 * m) = bc.a(l, m);
        }
      return t;
    }
    case SystemKind::EllipticQuotient:
      return elliptic_matrix();
    case SystemKind::NilmanifoldAutomorphism:
      throw ContractViolation("tangent: nilmanifold systems are analyzed at the algebra level");
  }
  throw ContractViolation("tangent: unknown kind");
}

double distance(const SystemDescriptor& sys, const SystemPoint& p, const SystemPoint& q) {
  switch (sys.kind) {
    case SystemKind::TorusAutomorphism:
      return sys.torus().lattice.torus_distance(p.z, q.z);
    case SystemKind::HolomorphicSkewProduct: {
      const auto& d = sys.skew();
      const double db = d.base.lattice.torus_distance(p.z.head(2), q.z.head(2));
      CVec a(1), b(1);
      a(0) = p.z(2);
      b(0) = q.z(2);
      const double df = d.fiber_lattice.torus_distance(a, b);
      return std::hypot(db, df);
    }
    case SystemKind::MobiusFiberSystem: {
      const auto& d = sys.mobius();
      const double db = d.base.lattice.torus_distance(p.z, q.z);
      return std::hypot(db, cxcore::chordal_distance(*p.fiber, *q.fiber));
    }
    case SystemKind::BlanchardCalabi: {
      const auto& bc = sys.bc();
      const int n = bc.copies;
      if (p.chart != q.chart)
        throw ContractViolation("distance: blanchard-calabi points must share a chart");
      const double db = std::abs(p.z(0) - q.z(0));
      // product metric through the real frame coordinates of each fiber
      RVec pa(4 * n), qa(4 * n);
      const RMat fp = bc_frame(bc, p.chart, p.z(0)).inverse();
      const RMat fq = bc_frame(bc, q.chart, q.z(0)).inverse();
      for (int l = 0; l < n; ++l) {
        CVec blockp(2), blockq(2);
        blockp << p.z(1 + 2 * l), p.z(2 + 2 * l);
        blockq << q.z(1 + 2 * l), q.z(2 + 2 * l);
        pa.segment(4 * l, 4) = fp * realify(blockp);
        qa.segment(4 * l, 4) = fq * realify(blockq);
      }
      RVec d = pa - qa;
      for (Eigen::Index k = 0; k < d.size(); ++k) d(k) -= std::round(d(k));
      return std::hypot(db, d.norm());
    }
    case SystemKind::EllipticQuotient:
      return elliptic_lattice(sys.elliptic().tau).torus_distance(p.z, q.z);
    case SystemKind::NilmanifoldAutomorphism:
      throw ContractViolation("distance: nilmanifold systems are analyzed at the algebra level");
  }
  throw ContractViolation("distance: unknown kind");
}

SystemPoint reduce_point(const SystemDescriptor& sys, const SystemPoint& p) {
  SystemPoint q = p;
  switch (sys.kind) {
    case SystemKind::TorusAutomorphism:
      q.z = sys.torus().lattice.reduce(p.z);
      return q;
    case SystemKind::HolomorphicSkewProduct: {
      const auto& d = sys.skew();
      q.z.head(2) = d.base.lattice.reduce(p.z.head(2));
      CVec w(1);
      w(0) = p.z(2);
      q.z(2) = d.fiber_lattice.reduce(w)(0);
      return q;
    }
    case SystemKind::MobiusFiberSystem:
      q.z = sys.mobius().base.lattice.reduce(p.z);
      return q;
    case SystemKind::BlanchardCalabi: {
      const int n = sys.bc().copies;
      q.z.tail(2 * n) = bc_fiber_lattice(sys, p.chart, p.z(0)).reduce(p.z.tail(2 * n));
      return q;
    }
    case SystemKind::EllipticQuotient:
      q.z = elliptic_lattice(sys.elliptic().tau).reduce(p.z);
      return q;
    default:
      throw ContractViolation("reduce_point: unsupported kind");
  }
}

namespace {

CVec wrap_minimal(const lattices::Lattice& lat, const CVec& diff) {
  RVec coords = lat.coordinates(diff);
  for (Eigen::Index k = 0; k < coords.size(); ++k) coords(k) -= std::round(coords(k));
  return complexify(lat.period() * coords);
}

}  // namespace

CVec chart_difference(const SystemDescriptor& sys, const SystemPoint& p, const SystemPoint& q) {
  switch (sys.kind) {
    case SystemKind::TorusAutomorphism:
      return wrap_minimal(sys.torus().lattice, p.z - q.z);
    case SystemKind::HolomorphicSkewProduct: {
      const auto& d = sys.skew();
      CVec out(3);
      out.head(2) = wrap_minimal(d.base.lattice, CVec(p.z.head(2) - q.z.head(2)));
      CVec w(1);
      w(0) = p.z(2) - q.z(2);
      out(2) = wrap_minimal(d.fiber_lattice, w)(0);
      return out;
    }
    case SystemKind::MobiusFiberSystem:
      return wrap_minimal(sys.mobius().base.lattice, p.z - q.z);
    case SystemKind::BlanchardCalabi: {
      const int n = sys.bc().copies;
      if (p.chart != q.chart)
        throw ContractViolation("chart_difference: blanchard-calabi points must share a chart");
      // local difference: fiber wrap taken in the lattice at q's base point
      CVec out = CVec::Zero(2 * n + 1);
      out(0) = p.z(0) - q.z(0);
      out.tail(2 * n) = wrap_minimal(bc_fiber_lattice(sys, q.chart, q.z(0)),
                                     CVec(p.z.tail(2 * n) - q.z.tail(2 * n)));
      return out;
    }
    case SystemKind::EllipticQuotient:
      return wrap_minimal(elliptic_lattice(sys.elliptic().tau), p.z - q.z);
    default:
      throw ContractViolation("chart_difference: unsupported kind");
  }
}

SystemPoint random_point(const SystemDescriptor& sys, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto torus_point = [&](const lattices::Lattice& lat) {
    RVec a(2 * lat.ambient_dim());
    for (Eigen::Index k = 0; k < a.size(); ++k) a(k) = unif(rng);
    return complexify(lat.period() * a);
  };
  switch (sys.kind) {
    case SystemKind::TorusAutomorphism:
      return {0, torus_point(sys.torus().lattice), std::nullopt};
    case SystemKind::HolomorphicSkewProduct: {
      const auto& d = sys.skew();
      CVec z(3);
      z.head(2) = torus_point(d.base.lattice);
      z(2) = torus_point(d.fiber_lattice)(0);
      return {0, z, std::nullopt};
    }
    case SystemKind::MobiusFiberSystem: {
      std::normal_distribution<double> gauss(0.0, 1.0);
      SystemPoint p;
      p.z = torus_point(sys.mobius().base.lattice);
      p.fiber = cxcore::SpherePoint::make(complexd(gauss(rng), gauss(rng)),
                                          complexd(gauss(rng), gauss(rng)));
      return p;
    }
    case SystemKind::BlanchardCalabi: {
      const auto& bc = sys.bc();
      const int n = bc.copies;
      SystemPoint p;
      p.chart = 0;
      p.z = CVec(2 * n + 1);
      p.z(0) = complexd(2 * unif(rng) - 1, 2 * unif(rng) - 1) * 0.9;
      const lattices::Lattice lat = bc_fiber_lattice(sys, 0, p.z(0));
      RVec a(4 * n);
      for (Eigen::Index k = 0; k < a.size(); ++k) a(k) = unif(rng);
      p.z.tail(2 * n) = complexify(lat.period() * a);
      return p;
    }
    case SystemKind::EllipticQuotient:
      return {0, torus_point(elliptic_lattice(sys.elliptic().tau)), std::nullopt};
    case SystemKind::NilmanifoldAutomorphism:
      throw ContractViolation("random_point: nilmanifold systems are analyzed at the algebra level");
  }
  throw ContractViolation("random_point: unknown kind");
}

//------------------------------------------------------------------------------
// Closed-form invariant data
//------------------------------------------------------------------------------

namespace {

std::pair<complexd, CVec> extreme_eigenpair(const CMat& a, bool top) {
  Eigen::ComplexEigenSolver<CMat> es(a);
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < es.eigenvalues().size(); ++k) {
    const bool better = top ? std::abs(es.eigenvalues()(k)) > std::abs(es.eigenvalues()(best))
                            : std::abs(es.eigenvalues()(k)) < std::abs(es.eigenvalues()(best));
    if (better) best = k;
  }
  CVec v = es.eigenvectors().col(best);
  Eigen::Index lead = 0;
  for (Eigen::Index k = 1; k < v.size(); ++k)
    if (std::abs(v(k)) > std::abs(v(lead))) lead = k;
  v /= (v(lead) / std::abs(v(lead)));
  v.normalize();
  return {es.eigenvalues()(best), v};
}

CVec hyperbolic_direction(const SystemDescriptor& sys, bool top) {
  switch (sys.kind) {
    case SystemKind::TorusAutomorphism:
      return extreme_eigenpair(sys.torus().a, top).second;
    case SystemKind::HolomorphicSkewProduct: {
      const auto& d = sys.skew();
      auto [lam, v] = extreme_eigenpair(d.base.a, top);
      CVec u(3);
      u.head(2) = v;
      u(2) = (d.ell * v)(0) / (lam - 1.0);
      u.normalize();
      return u;
    }
    case SystemKind::MobiusFiberSystem: {
      const auto& d = sys.mobius();
      auto [lam, v] = extreme_eigenpair(d.base.a, top);
      CVec u = CVec::Zero(d.base.a.rows() + 1);
      u.head(d.base.a.rows()) = v;
      return u;
    }
    case SystemKind::EllipticQuotient: {
      CMat block(2, 2);
      block << 2, 1, 1, 1;
      auto [lam, v] = extreme_eigenpair(block, top);
      CVec u = CVec::Zero(3);
      u.head(2) = v;
      return u;
    }
    default:
      throw ContractViolation("unstable_direction: no one-dimensional hyperbolic block for this kind");
  }
}

}  // namespace

CVec unstable_direction(const SystemDescriptor& sys) { return hyperbolic_direction(sys, true); }
CVec stable_direction(const SystemDescriptor& sys) { return hyperbolic_direction(sys, false); }

double unstable_multiplier(const SystemDescriptor& sys) {
  switch (sys.kind) {
    case SystemKind::TorusAutomorphism:
      return std::abs(extreme_eigenpair(sys.torus().a, true).first);
    case SystemKind::HolomorphicSkewProduct:
      return std::abs(extreme_eigenpair(sys.skew().base.a, true).first);
    case SystemKind::MobiusFiberSystem:
      return std::abs(extreme_eigenpair(sys.mobius().base.a, true).first);
    case SystemKind::EllipticQuotient:
      return (3.0 + std::sqrt(5.0)) / 2.0;
    default:
      throw ContractViolation("unstable_multiplier: unsupported kind");
  }
}

//------------------------------------------------------------------------------
// Center holonomy
//------------------------------------------------------------------------------

cxcore::RLinearMap center_holonomy_closed_form(const SystemDescriptor& sys, const SystemPoint& x,
                                               const SystemPoint& y) {
  switch (sys.kind) {
    case SystemKind::HolomorphicSkewProduct: {
      const auto& d = sys.skew();
      if (d.base.lattice.torus_distance(x.z.head(2), y.z.head(2)) > 1e-9)
        throw ContractViolation("center_holonomy: points are not on the same center leaf");
      // the flat product structure slides unstable plaques by a vertical
      // translation; in the linearization charts this is the identity
      return cxcore::RLinearMap::identity(1);
    }
    case SystemKind::MobiusFiberSystem: {
      const auto& d = sys.mobius();
      if (!d.holomorphic)
        throw ContractViolation("center_holonomy: closed form requires a constant twist");
      if (d.base.lattice.torus_distance(x.z, y.z) > 1e-9)
        throw ContractViolation("center_holonomy: points are not on the same center leaf");
      return cxcore::RLinearMap::identity(1);
    }
    case SystemKind::BlanchardCalabi: {
      const auto& bc = sys.bc();
      const int n = bc.copies;
      const RMat fx = bc_frame(bc, x.chart, x.z(0));
      const RMat fy = bc_frame(bc, y.chart, y.z(0));
      const RMat block = fy * fx.inverse();
      RMat full = RMat::Zero(4 * n, 4 * n);
      for (int l = 0; l < n; ++l) full.block(4 * l, 4 * l, 4, 4) = block;
      return cxcore::RLinearMap::from_real_matrix(full);
    }
    default:
      throw ContractViolation("center_holonomy: unsupported kind");
  }
}

SystemPoint center_holonomy_point(const SystemDescriptor& sys, const SystemPoint& x,
                                  const SystemPoint& y, const SystemPoint& p) {
  switch (sys.kind) {
    case SystemKind::HolomorphicSkewProduct: {
      const auto& d = sys.skew();
      SystemPoint q = p;
      CVec w(1);
      w(0) = p.z(2) + (y.z(2) - x.z(2));
      q.z(2) = d.fiber_lattice.reduce(w)(0);
      return q;
    }
    case SystemKind::MobiusFiberSystem: {
      SystemPoint q = p;
      q.fiber = y.fiber;
      return q;
    }
    case SystemKind::BlanchardCalabi: {
      const auto& bc = sys.bc();
      const int n = bc.copies;
      const RMat fx = bc_frame(bc, p.chart, p.z(0)).inverse();
      const RMat fy = bc_frame(bc, y.chart, y.z(0));
      SystemPoint q;
      q.chart = y.chart;
      q.z = CVec(2 * n + 1);
      q.z(0) = y.z(0);
      for (int l = 0; l < n; ++l) {
        CVec block(2);
        block << p.z(1 + 2 * l), p.z(2 + 2 * l);
        const CVec moved = complexify(fy * (fx * realify(block)));
        q.z(1 + 2 * l) = moved(0);
        q.z(2 + 2 * l) = moved(1);
      }
      const lattices::Lattice lat = bc_fiber_lattice(sys, y.chart, y.z(0));
      q.z.tail(2 * n) = lat.reduce(q.z.tail(2 * n));
      return q;
    }
    default:
      throw ContractViolation("center_holonomy_point: unsupported kind");
  }
}

bool elliptic_quotient_commutes() {
  using liecx::RatMat;
  using liecx::Rational;
  RatMat a(3, 3);
  a(0, 0) = 2; a(0, 1) = 1; a(1, 0) = 1; a(1, 1) = 1; a(2, 2) = 1;
  RatMat neg = RatMat::identity(3);
  neg(0, 0) = -1; neg(1, 1) = -1;  // the involution's linear part
  if (!(a * neg == neg * a)) return false;
  // translation part: A t - t must be a lattice vector; t = (0, 0, 1/2)
  liecx::RatVec t(3, Rational(0));
  t[2] = Rational(1, 2);
  const liecx::RatVec at = a.apply(t);
  for (int k = 0; k < 3; ++k)
    if ((at[k] - t[k]).denominator() != 1) return false;
  return true;
}

//------------------------------------------------------------------------------
// Registry
//------------------------------------------------------------------------------

namespace {

SystemDescriptor cat_map_2c() {
  CMat a(2, 2);
  a << 2, 1, 1, 1;
  SystemDescriptor sys = make_torus_automorphism(a, lattices::Lattice::gaussian(2));
  sys.name = "cat2c";
  return sys;
}

}  // namespace

std::vector<std::string> registry_names() {
  return {"cat2c",  "skew_l1", "product_l0", "mob_ell", "mob_lox",           "mob_par",
          "bc_n1",  "bc_n2",   "iwasawa",    "h5acc",   "elliptic_quotient"};
}

SystemDescriptor make_system(const std::string& name) {
  if (name == "cat2c") return cat_map_2c();
  if (name == "skew_l1") {
    Eigen::RowVectorXcd ell(2);
    ell << 1.0, 1.0;
    SystemDescriptor sys = make_skew_product(cat_map_2c(), lattices::Lattice::gaussian(1), ell);
    sys.name = name;
    return sys;
  }
  if (name == "product_l0") {
    SystemDescriptor sys =
        make_skew_product(cat_map_2c(), lattices::Lattice::gaussian(1), Eigen::RowVectorXcd::Zero(2));
    sys.name = name;
    return sys;
  }
  if (name == "mob_ell" || name == "mob_lox" || name == "mob_par") {
    Eigen::Matrix2cd g;
    if (name == "mob_ell") {
      const double th = 2.0 * M_PI / 5.0;
      g << std::polar(1.0, th), 0, 0, std::polar(1.0, -th);
    } else if (name == "mob_lox") {
      g << 2.0, 0, 0, 0.5;
    } else {
      g << 1, 1, 0, 1;
    }
    SystemDescriptor sys = make_mobius_fiber_system(cat_map_2c(), g);
    sys.name = name;
    return sys;
  }
  if (name == "bc_n1") {
    RMat a(1, 1);
    a << 2;
    SystemDescriptor sys = make_blanchard_calabi(1, a);
    sys.name = name;
    return sys;
  }
  if (name == "bc_n2") {
    RMat a(2, 2);
    a << 2, 1, 1, 1;
    SystemDescriptor sys = make_blanchard_calabi(2, a);
    sys.name = name;
    return sys;
  }
  if (name == "iwasawa") {
    SystemDescriptor sys = make_nilmanifold("h3_complex");
    sys.name = name;
    return sys;
  }
  if (name == "h5acc") {
    SystemDescriptor sys = make_nilmanifold("h5_plus_center");
    sys.name = name;
    return sys;
  }
  if (name == "elliptic_quotient") return make_elliptic_quotient(complexd(0, 2));
  throw ContractViolation("make_system: unknown system '" + name + "'");
}

nlohmann::json SystemDescriptor::to_json() const {
  nlohmann::json j;
  j["name"] = name;
  j["kind"] = zoo::to_string(kind);
  j["hyperbolicity"] = zoo::to_string(hyperbolicity);
  j["invertible"] = invertible;
  j["holomorphic"] = holomorphic;
  j["complex_dim"] = complex_dim;
  switch (kind) {
    case SystemKind::TorusAutomorphism:
      j["lattice"] = torus().lattice.to_json();
      break;
    case SystemKind::HolomorphicSkewProduct:
      j["base_lattice"] = skew().base.lattice.to_json();
      j["fiber_lattice"] = skew().fiber_lattice.to_json();
      break;
    case SystemKind::BlanchardCalabi:
      j["copies"] = bc().copies;
      break;
    case SystemKind::EllipticQuotient:
      j["tau"] = {elliptic().tau.real(), elliptic().tau.imag()};
      break;
    default:
      break;
  }
  return j;
}

}  // namespace holodyn::zoo
