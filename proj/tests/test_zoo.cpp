#include "holodyn/zoo.hpp"

#include <random>

#include <nlohmann/json.hpp>

#include "doctest.h"

using namespace holodyn;
using namespace holodyn::zoo;

namespace {

CMat cat_matrix() {
  CMat a(2, 2);
  a << 2, 1, 1, 1;
  return a;
}

CVec cv(std::initializer_list<complexd> entries) {
  CVec v(static_cast<Eigen::Index>(entries.size()));
  Eigen::Index k = 0;
  for (auto e : entries) v(k++) = e;
  return v;
}

}  // namespace

TEST_CASE("torus automorphism construction and classification") {
  const auto cat = make_torus_automorphism(cat_matrix(), lattices::Lattice::gaussian(2));
  CHECK(cat.hyperbolicity == Hyperbolicity::Anosov);
  CHECK(cat.invertible);

  const auto id = make_torus_automorphism(CMat::Identity(2, 2), lattices::Lattice::gaussian(2));
  CHECK(id.hyperbolicity == Hyperbolicity::Isometry);  // constructible, flagged

  CMat shear(2, 2);
  shear << 1, 1, 0, 1;
  const auto par = make_torus_automorphism(shear, lattices::Lattice::gaussian(2));
  CHECK(par.hyperbolicity == Hyperbolicity::Parabolic);

  CMat doubling(2, 2);
  doubling << 2, 0, 0, 1;  // maps the lattice strictly into itself
  CHECK_THROWS_AS(make_torus_automorphism(doubling, lattices::Lattice::gaussian(2)),
                  ContractViolation);
  CMat irrational(2, 2);
  irrational << 1.5, 0, 0, 1;
  CHECK_THROWS_AS(make_torus_automorphism(irrational, lattices::Lattice::gaussian(2)),
                  ContractViolation);
}

TEST_CASE("skew products check twist compatibility") {
  auto base = make_torus_automorphism(cat_matrix(), lattices::Lattice::gaussian(2));
  Eigen::RowVectorXcd ell(2);
  ell << 1.0, 1.0;
  const auto skew = make_skew_product(base, lattices::Lattice::gaussian(1), ell);
  const CMat t = tangent(skew, random_point(skew, 1));
  CHECK((t.topLeftCorner(2, 2) - cat_matrix()).norm() < 1e-14);
  CHECK(std::abs(t(2, 0) - complexd(1)) < 1e-14);
  CHECK(std::abs(t(2, 1) - complexd(1)) < 1e-14);
  CHECK(std::abs(t(2, 2) - complexd(1)) < 1e-14);
  CHECK(std::abs(t(0, 2)) < 1e-14);

  Eigen::RowVectorXcd half(2);
  half << 0.5, 0.0;  // image 1/2 is not a fiber lattice point
  CHECK_THROWS_AS(make_skew_product(base, lattices::Lattice::gaussian(1), half),
                  ContractViolation);

  const auto product = make_system("product_l0");
  const CMat tp = tangent(product, random_point(product, 2));
  CHECK(std::abs(tp(2, 0)) < 1e-14);
  CHECK(std::abs(tp(2, 1)) < 1e-14);
}

TEST_CASE("round trips of evaluate and its inverse") {
  std::mt19937_64 seeds(99);
  for (const char* name :
       {"cat2c", "skew_l1", "product_l0", "mob_ell", "mob_lox", "bc_n1", "bc_n2",
        "elliptic_quotient"}) {
    const auto sys = make_system(name);
    for (int trial = 0; trial < 1000; ++trial) {
      const SystemPoint p = random_point(sys, seeds());
      const SystemPoint q = evaluate(sys, evaluate_inverse(sys, p));
      CHECK(distance(sys, p, q) < 1e-10);
      if (sys.invertible) {
        const SystemPoint r = evaluate_inverse(sys, evaluate(sys, p));
        CHECK(distance(sys, p, r) < 1e-10);
      }
    }
  }
}

TEST_CASE("tangent cocycle satisfies the chain rule along orbits") {
  std::mt19937_64 seeds(123);
  for (const char* name : {"cat2c", "skew_l1", "bc_n2", "elliptic_quotient"}) {
    const auto sys = make_system(name);
    const SystemPoint p = random_point(sys, seeds());

    // orbit product over 20 steps against the closed-form derivative of the
    // 20-fold composition (the constant tangent raised to the 20th power)
    CMat acc = CMat::Identity(sys.complex_dim, sys.complex_dim);
    CMat power = acc;
    SystemPoint q = p;
    const CMat df = tangent(sys, p);
    for (int n = 1; n <= 20; ++n) {
      acc = tangent(sys, q) * acc;
      power = df * power;
      q = evaluate(sys, q);
    }
    CHECK((acc - power).norm() < 1e-8 * power.norm());

    // finite-difference cross-check over six steps, displacement kept small
    // enough that nothing wraps around the torus
    CMat acc6 = CMat::Identity(sys.complex_dim, sys.complex_dim);
    SystemPoint q6 = p;
    for (int n = 1; n <= 6; ++n) {
      acc6 = tangent(sys, q6) * acc6;
      q6 = evaluate(sys, q6);
    }
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 1.0);
    CVec dir(sys.complex_dim);
    for (int k = 0; k < sys.complex_dim; ++k) dir(k) = complexd(g(rng), g(rng));
    if (sys.kind == SystemKind::BlanchardCalabi) {
      // fiber representatives over displaced base points differ by a lattice
      // drift, so the finite difference is taken within one fiber
      dir(0) = 0.0;
    }
    dir.normalize();
    const double h = 1e-7;
    SystemPoint shifted = p;
    shifted.z = p.z + h * dir;
    SystemPoint qs = shifted;
    for (int n = 1; n <= 6; ++n) qs = evaluate(sys, qs);
    const CVec fd = chart_difference(sys, qs, q6) / h;
    CHECK((fd - acc6 * dir).norm() < 1e-8 * acc6.norm() * std::max(1.0, fd.norm()));
  }
}

TEST_CASE("mobius fiber chart derivatives compose across chart changes") {
  const auto sys = make_system("mob_lox");
  SystemPoint p = random_point(sys, 17);
  p.fiber = cxcore::SpherePoint::make(complexd(0.9, 0.1), complexd(1.0, -0.2));
  complexd acc = 1.0;
  SystemPoint q = p;
  for (int n = 0; n < 9; ++n) {
    acc *= tangent(sys, q)(2, 2);
    q = evaluate(sys, q);
  }
  // finite difference of the 9-fold fiber map in the source chart coordinate
  auto fiber_coord = [](const cxcore::SpherePoint& s) {
    return std::abs(s.a) <= std::abs(s.b) ? s.a / s.b : s.b / s.a;
  };
  const double h = 1e-7;
  SystemPoint pf = p;
  const complexd w0 = fiber_coord(*p.fiber);
  pf.fiber = std::abs(p.fiber->a) <= std::abs(p.fiber->b)
                 ? cxcore::SpherePoint::make(w0 + h, 1.0)
                 : cxcore::SpherePoint::make(1.0, w0 + h);
  SystemPoint qf = pf;
  for (int n = 0; n < 9; ++n) qf = evaluate(sys, qf);
  const complexd fd = (fiber_coord(*qf.fiber) - fiber_coord(*q.fiber)) / h;
  CHECK(std::abs(fd - acc) < 1e-5 * std::abs(acc));
}

TEST_CASE("section frames at the marked base points") {
  const auto sys = make_system("bc_n1");
  const RMat f0 = bc_frame(sys.bc(), 0, 0.0);
  const CVec s1 = complexify(f0.col(0)), s2 = complexify(f0.col(1));
  const CVec s3 = complexify(f0.col(2)), s4 = complexify(f0.col(3));
  CHECK((s1 - cv({1, 0})).norm() < 1e-15);
  CHECK((s2 - cv({complexd(0, 1), 0})).norm() < 1e-15);
  CHECK((s3 - cv({0, 1})).norm() < 1e-15);
  CHECK((s4 - cv({0, complexd(0, 1)})).norm() < 1e-15);

  const RMat f1 = bc_frame(sys.bc(), 0, 1.0);
  CHECK((complexify(f1.col(0)) - cv({1, 1})).norm() < 1e-15);
  CHECK((complexify(f1.col(1)) - cv({complexd(0, 1), complexd(0, -1)})).norm() < 1e-15);
  CHECK((complexify(f1.col(2)) - cv({-1, 1})).norm() < 1e-15);
  CHECK((complexify(f1.col(3)) - cv({complexd(0, 1), complexd(0, 1)})).norm() < 1e-15);

  // sections with a common zero are rejected
  RMat a(1, 1);
  a << 2;
  CHECK_THROWS_AS(make_blanchard_calabi(1, a, {complexd(0), complexd(1)}, {complexd(0), complexd(1)}),
                  ContractViolation);
}

TEST_CASE("section frames stay R-independent on both charts") {
  const auto sys = make_system("bc_n1");
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int chart = 0; chart < 2; ++chart)
    for (int k = 0; k < 200; ++k) {
      const complexd zeta(2.0 * u(rng), 2.0 * u(rng));
      const double gram = bc_frame_gram(sys.bc(), chart, zeta);
      // |s1|^2 + |s2|^2 is bounded below by 1 on the unit chart disk
      CHECK(gram > 0.5);
    }
}

TEST_CASE("fiber lattices are preserved by the block matrix") {
  const auto sys = make_system("bc_n2");
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  for (int k = 0; k < 25; ++k) {
    const complexd zeta(u(rng), u(rng));
    const auto lat = bc_fiber_lattice(sys, 0, zeta);
    for (const auto& gen : lat.basis()) {
      SystemPoint p;
      p.chart = 0;
      p.z = CVec::Zero(5);
      p.z(0) = zeta;
      // apply the block map to the generator without reduction
      CVec fiber = gen;
      CVec out = CVec::Zero(4);
      const RMat& a = sys.bc().a;
      for (int l = 0; l < 2; ++l)
        for (int m = 0; m < 2; ++m) {
          out(2 * l) += a(l, m) * fiber(2 * m);
          out(2 * l + 1) += a(l, m) * fiber(2 * m + 1);
        }
      const RVec coords = lat.coordinates(out);
      for (Eigen::Index j = 0; j < coords.size(); ++j)
        CHECK(std::abs(coords(j) - std::round(coords(j))) < 1e-9);
    }
  }

  // the one-block doubling map multiplies lattice coordinates by 2
  const auto bc1 = make_system("bc_n1");
  const auto lat1 = bc_fiber_lattice(bc1, 0, complexd(0.3, 0.4));
  for (const auto& gen : lat1.basis()) {
    const RVec coords = lat1.coordinates(2.0 * gen);
    for (Eigen::Index j = 0; j < coords.size(); ++j)
      CHECK(std::abs(coords(j) - std::round(coords(j))) < 1e-9);
  }
}

TEST_CASE("blanchard-calabi constructor rejects bad block matrices") {
  RMat one(1, 1);
  one << 1;
  CHECK_THROWS_AS(make_blanchard_calabi(1, one), ContractViolation);  // not expanding
  RMat shear(2, 2);
  shear << 1, 1, 0, 1;  // unimodular eigenvalues
  CHECK_THROWS_AS(make_blanchard_calabi(2, shear), ContractViolation);
  RMat big(2, 2);
  big << 2, 0, 0, 2;  // determinant 4
  CHECK_THROWS_AS(make_blanchard_calabi(2, big), ContractViolation);
}

TEST_CASE("elliptic quotient commutation and fiber data") {
  CHECK(elliptic_quotient_commutes());
  CHECK(lattices::involution_fixed_fibers(2, 2) == 16);

  const auto sys = make_system("elliptic_quotient");
  // generic fiber modulus vs singular fiber modulus for tau = 2i
  const complexd tau = sys.elliptic().tau;
  const complexd generic = lattices::modulus_reduce(1.0, tau).modulus.tau;
  const complexd singular = lattices::modulus_reduce(0.5, tau).modulus.tau;
  CHECK(std::abs(generic - complexd(0, 2)) < 1e-12);
  CHECK(std::abs(singular - complexd(0, 4)) < 1e-12);
  CHECK_FALSE(lattices::moduli_equal(generic, singular));

  // squaring the involution shifts by (0, 0, 1), a lattice vector: the
  // identity on the quotient (exact half-integer arithmetic)
  const CVec t = cv({0, 0, 0.5});
  const CVec twice = 2.0 * t;
  for (int k = 0; k < 3; ++k)
    CHECK(std::abs(twice(k) - std::round(twice(k).real())) < 1e-15);

  // enumerate the fixed center fibers of the involution directly: fibers are
  // indexed by the first two elliptic coordinates, fixed exactly at the
  // two-torsion points a/2 + b tau/2
  int fixed = 0;
  for (int a1 = 0; a1 < 2; ++a1)
    for (int b1 = 0; b1 < 2; ++b1)
      for (int a2 = 0; a2 < 2; ++a2)
        for (int b2 = 0; b2 < 2; ++b2) {
          const complexd z1 = 0.5 * a1 + 0.5 * b1 * tau;
          const complexd z2 = 0.5 * a2 + 0.5 * b2 * tau;
          // sigma sends the fiber over (z1, z2) to the one over (-z1, -z2)
          const complexd d1 = 2.0 * z1, d2 = 2.0 * z2;
          auto in_lattice = [&](complexd w) {
            const double x = w.real() - tau.real() / tau.imag() * w.imag();
            const double y = w.imag() / tau.imag();
            return std::abs(x - std::round(x)) < 1e-12 && std::abs(y - std::round(y)) < 1e-12;
          };
          if (in_lattice(d1) && in_lattice(d2)) ++fixed;
        }
  CHECK(fixed == 16);
}

TEST_CASE("fixed points and evaluation basics") {
  const auto cat = make_system("cat2c");
  SystemPoint origin;
  origin.z = CVec::Zero(2);
  CHECK(distance(cat, evaluate(cat, origin), origin) < 1e-14);  // fixed point

  const auto bc = make_system("bc_n2");
  SystemPoint p = random_point(bc, 7);
  const SystemPoint q = evaluate(bc, p);
  CHECK(std::abs(q.z(0) - p.z(0)) < 1e-14);  // base coordinate unchanged
}

TEST_CASE("center holonomy closed forms") {
  // product system: identity holonomy with zero antilinear part
  const auto product = make_system("product_l0");
  SystemPoint x = random_point(product, 3);
  SystemPoint y = x;
  y.z(2) += complexd(0.3, 0.2);
  auto h = center_holonomy_closed_form(product, x, y);
  CHECK((h.linear - CMat::Identity(1, 1)).norm() < 1e-14);
  CHECK(h.antilinear_norm() < 1e-14);

  // twisted skew product: still C-linear between unstable plaques
  const auto skew = make_system("skew_l1");
  x = random_point(skew, 5);
  y = x;
  y.z(2) += complexd(0.1, 0.4);
  h = center_holonomy_closed_form(skew, x, y);
  CHECK(h.antilinear_norm() < 1e-14);

  // mismatched center leaves are rejected
  SystemPoint z = y;
  z.z(0) += 0.25;
  CHECK_THROWS_AS(center_holonomy_closed_form(skew, x, z), ContractViolation);

  // the twisted torus bundle between z = 0 and z = 1
  const auto bc = make_system("bc_n1");
  SystemPoint b0, b1;
  b0.z = cv({0, 0.1, 0.2});
  b1.z = cv({1, 0.1, 0.2});
  h = center_holonomy_closed_form(bc, b0, b1);
  CMat qexp(2, 2);
  qexp << 0, -1, 1, 0;
  CHECK((h.linear - CMat::Identity(2, 2)).norm() < 1e-12);
  CHECK((h.antilinear - qexp).norm() < 1e-12);

  // blocks repeat for two copies
  const auto bc2 = make_system("bc_n2");
  SystemPoint c0, c1;
  c0.z = CVec::Zero(5);
  c1.z = CVec::Zero(5);
  c1.z(0) = 1.0;
  h = center_holonomy_closed_form(bc2, c0, c1);
  CHECK((h.antilinear.block(0, 0, 2, 2) - qexp).norm() < 1e-12);
  CHECK((h.antilinear.block(2, 2, 2, 2) - qexp).norm() < 1e-12);
  CHECK(h.antilinear.block(0, 2, 2, 2).norm() < 1e-14);
}

TEST_CASE("non-constant fiber twists carry the non-holomorphic flag") {
  auto base = make_torus_automorphism(cat_matrix(), lattices::Lattice::gaussian(2));
  auto twist = [](const CVec& z) {
    Eigen::Matrix2cd g;
    const double th = 0.3 * z(0).real();
    g << std::polar(1.0, th), 0, 0, std::polar(1.0, -th);
    return g;
  };
  const auto sys = make_mobius_fiber_system(base, twist);
  CHECK_FALSE(sys.holomorphic);
  CHECK_FALSE(sys.mobius().holomorphic);

  SystemPoint p = random_point(sys, 12);
  const SystemPoint q = evaluate(sys, evaluate_inverse(sys, p));
  CHECK(distance(sys, p, q) < 1e-10);
  // the closed-form center holonomy is only available for constant twists
  SystemPoint y = p;
  y.fiber = cxcore::SpherePoint::make(1.0, 2.0);
  CHECK_THROWS_AS(center_holonomy_closed_form(sys, p, y), ContractViolation);
}

TEST_CASE("registry round trip and serialization") {
  for (const auto& name : registry_names()) {
    const auto sys = make_system(name);
    CHECK(sys.name == name);
    const auto j = sys.to_json();
    CHECK(j.at("name").get<std::string>() == name);
  }
  CHECK_THROWS_AS(make_system("no_such_system"), ContractViolation);
}
