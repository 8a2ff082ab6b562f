#include "holodyn/measures.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "doctest.h"

using namespace holodyn;
using namespace holodyn::measures;
using holodyn::zoo::SystemPoint;

namespace {

lattices::Lattice square() {
  CVec a(1), b(1);
  a(0) = 1.0;
  b(0) = complexd(0, 1);
  return lattices::Lattice(1, {a, b});
}

lattices::Lattice hexagonal() {
  CVec a(1), b(1);
  a(0) = 1.0;
  b(0) = std::polar(1.0, M_PI / 3.0);
  return lattices::Lattice(1, {a, b});
}

FiberDensity random_density(const lattices::Lattice& lat, int cutoff, int support,
                            std::uint64_t seed) {
  FiberDensity d(lat, cutoff);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  d.coeff(0, 0) = 1.0;
  for (int m1 = -support; m1 <= support; ++m1)
    for (int m2 = -support; m2 <= support; ++m2) {
      if (m1 == 0 && m2 == 0) continue;
      if (m1 > 0 || (m1 == 0 && m2 > 0)) {
        const complexd c(g(rng), g(rng));
        d.coeff(m1, m2) = c;
        d.coeff(-m1, -m2) = std::conj(c);  // keep the density real
      }
    }
  return d;
}

double grid_min(const FiberDensity& d, int n) {
  double lo = std::numeric_limits<double>::infinity();
  const RMat& period = d.lattice().period();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const RVec a = period * Eigen::Vector2d(static_cast<double>(i) / n, static_cast<double>(j) / n);
      lo = std::min(lo, d.value(complexd(a(0), a(1))));
    }
  return lo;
}

}  // namespace

TEST_CASE("heat multipliers: constants, single modes, mass") {
  FiberDensity c = FiberDensity::constant(square(), 8);
  const FiberDensity after = heat_step(c, 0.7);
  CHECK(after.coeff(0, 0) == c.coeff(0, 0));  // P_t 1 = 1
  CHECK(after.l2_distance_to_mean() == 0.0);

  FiberDensity mode(square(), 8);
  mode.coeff(0, 0) = 1.0;
  mode.coeff(1, 0) = 0.5;
  mode.coeff(-1, 0) = 0.5;
  const FiberDensity heated = heat_step(mode, 1.0);
  const double expect = 0.5 * std::exp(-4.0 * M_PI * M_PI);  // ~3.6e-18
  CHECK(std::abs(heated.coeff(1, 0)) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(heated.mass() == doctest::Approx(1.0));

  for (double t : {1e-4, 0.3, 2.5}) CHECK(heat_step(mode, t).mass() == mode.mass());
  CHECK_THROWS_AS(heat_step(mode, 0.0), ContractViolation);
}

TEST_CASE("heat semigroup law to machine accuracy") {
  const FiberDensity d = random_density(square(), 12, 5, 101);
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> u(1e-4, 0.2);
  for (int trial = 0; trial < 20; ++trial) {
    const double s = u(rng), t = u(rng);
    const FiberDensity two = heat_step(heat_step(d, s), t);
    const FiberDensity one = heat_step(d, s + t);
    double worst = 0.0;
    for (int m1 = -12; m1 <= 12; ++m1)
      for (int m2 = -12; m2 <= 12; ++m2)
        worst = std::max(worst, std::abs(two.coeff(m1, m2) - one.coeff(m1, m2)));
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("heat flow preserves nonnegativity of mollified densities") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.01, 0.5);
  for (int trial = 0; trial < 100; ++trial) {
    FiberDensity d = random_density(square(), 16, 3, 1000 + trial);
    // shift to a nonnegative density, then mollify the representative
    const double lo = grid_min(d, 64);
    d.coeff(0, 0) += complexd(std::max(0.0, -lo) + 1e-3, 0);
    d.heat(1e-3);
    CHECK(grid_min(d, 64) > -1e-10);
    const FiberDensity after = heat_step(d, u(rng));
    CHECK(grid_min(after, 64) > -1e-10);
  }
}

TEST_CASE("decay rates match the smallest dual norm") {
  // single mode on the unit square: rate 4 pi^2
  FiberDensity mode(square(), 6);
  mode.coeff(0, 0) = 1.0;
  mode.coeff(1, 0) = 0.25;
  mode.coeff(-1, 0) = 0.25;
  std::vector<double> grid;
  for (int k = 1; k <= 8; ++k) grid.push_back(0.002 * k);
  auto rep = limit_average_check(mode, grid);
  CHECK(rep.expected_rate == doctest::Approx(4.0 * M_PI * M_PI).epsilon(1e-12));
  CHECK(rep.fitted_rate == doctest::Approx(rep.expected_rate).epsilon(0.01));

  // hexagonal lattice: shortest dual vector has squared norm 4/3
  FiberDensity hex(hexagonal(), 6);
  hex.coeff(0, 0) = 1.0;
  // populate the shortest dual shell only
  hex.coeff(1, 0) = 0.3;
  hex.coeff(-1, 0) = 0.3;
  auto hrep = limit_average_check(hex, grid);
  CHECK(hrep.expected_rate == doctest::Approx(4.0 * M_PI * M_PI * 4.0 / 3.0).epsilon(1e-12));
  CHECK(hrep.fitted_rate == doctest::Approx(hrep.expected_rate).epsilon(0.01));

  // constant density: identically zero distances
  auto crep = limit_average_check(FiberDensity::constant(hexagonal(), 6), grid);
  for (double dist : crep.l2_distances) CHECK(dist == 0.0);
}

TEST_CASE("particle pushes renormalize mass exactly") {
  const auto sys = zoo::make_system("cat2c");
  ParticleMeasure m;
  m.points.resize(2, 64);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 64; ++k)
    m.points.col(k) = CVec::Constant(2, complexd(u(rng), u(rng)));
  m.weights = RVec::Constant(64, 1.0 / 64.0);
  for (int step = 0; step < 10000; ++step) push_forward(sys, m);
  CHECK(std::abs(m.weights.sum() - 1.0) < 1e-12);
}

TEST_CASE("hybrid heat flow commutes with isometric fiber dynamics") {
  const auto sys = zoo::make_system("skew_l1");
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  HybridMeasure m;
  for (int k = 0; k < 6; ++k) {
    CVec base(2);
    base << complexd(u(rng), u(rng)), complexd(u(rng), u(rng));
    FiberDensity d = FiberDensity::mollified_particle(square(), 16, complexd(u(rng), u(rng)),
                                                      1.0, 1e-3);
    m.atoms.push_back({base, 1.0 / 6.0, std::move(d)});
  }

  for (double t : {0.01, 0.3}) {
    const HybridMeasure lhs = push_forward_hybrid(sys, mu_t(m, t));
    const HybridMeasure rhs = mu_t(push_forward_hybrid(sys, m), t);
    CHECK(hybrid_distance(lhs, rhs) < 1e-10);
  }
}

TEST_CASE("mu_t bins particles per fiber and keeps the base marginal") {
  const auto sys = zoo::make_system("skew_l1");
  ParticleMeasure m;
  m.points.resize(3, 9);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  // three fibers with three particles each
  for (int f = 0; f < 3; ++f) {
    const complexd b1(u(rng), u(rng)), b2(u(rng), u(rng));
    for (int j = 0; j < 3; ++j) {
      m.points(0, 3 * f + j) = b1;
      m.points(1, 3 * f + j) = b2;
      m.points(2, 3 * f + j) = complexd(u(rng), u(rng));
    }
  }
  m.weights = RVec::Constant(9, 1.0 / 9.0);

  const HybridMeasure h0 = mu_t(sys, m, 0.0);
  REQUIRE(h0.atoms.size() == 3);
  double mass = 0.0;
  for (const auto& atom : h0.atoms) {
    CHECK(atom.weight == doctest::Approx(1.0 / 3.0));
    CHECK(atom.density.mass() == doctest::Approx(1.0).epsilon(1e-12));
    mass += atom.weight;
  }
  CHECK(mass == doctest::Approx(1.0));

  // at t = 0 the density stays close to the mollified spikes: mean value 1
  // with visible oscillation; for t large it flattens to the mean
  const HybridMeasure hbig = mu_t(sys, m, 10.0);
  for (const auto& atom : hbig.atoms) CHECK(atom.density.l2_distance_to_mean() < 1e-12);
  CHECK_FALSE(h0.aliasing_warning);

  // the base marginal never moves under the heat flow
  REQUIRE(hbig.atoms.size() == h0.atoms.size());
  for (size_t k = 0; k < h0.atoms.size(); ++k) {
    CHECK((h0.atoms[k].base - hbig.atoms[k].base).norm() == 0.0);
    CHECK(h0.atoms[k].weight == hbig.atoms[k].weight);
  }

  // a too-small cutoff for the mollification width is flagged
  const HybridMeasure coarse = mu_t(sys, m, 0.0, 2, 1e-3);
  CHECK(coarse.aliasing_warning);
}

TEST_CASE("gibbs estimate on the linear torus map matches the flat average") {
  const auto sys = zoo::make_system("cat2c");
  const SystemPoint x = zoo::random_point(sys, 4);
  const auto est = gibbs_u_estimate(sys, x, 0.5, 100, 1024, 12345);
  REQUIRE(est.panel.size() == 16);
  for (size_t q = 0; q < est.panel.size(); ++q) {
    CHECK(std::abs(est.panel[q]) < std::max(3.0 * est.panel_sigma[q], 0.05));
  }

  // seed reproducibility
  const auto again = gibbs_u_estimate(sys, x, 0.5, 100, 1024, 12345);
  for (size_t q = 0; q < est.panel.size(); ++q) CHECK(est.panel[q] == again.panel[q]);

  // Cesaro stability: doubling the iteration count moves the integrals by
  // less than twice the reported error
  const auto doubled = gibbs_u_estimate(sys, x, 0.5, 200, 1024, 12345);
  for (size_t q = 0; q < est.panel.size(); ++q)
    CHECK(std::abs(est.panel[q] - doubled.panel[q]) <
          2.0 * (est.panel_sigma[q] + doubled.panel_sigma[q]) + 1e-3);
}

TEST_CASE("push invariance of an already flat cloud") {
  const auto sys = zoo::make_system("cat2c");
  ParticleMeasure m;
  const int n = 4096;
  m.points.resize(2, n);
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < n; ++k)
    m.points.col(k) = CVec::NullaryExpr(2, [&](Eigen::Index) { return complexd(u(rng), u(rng)); });
  m.weights = RVec::Constant(n, 1.0 / n);

  const auto panel = test_panel(sys);
  std::vector<double> before;
  for (const auto& f : panel) before.push_back(m.integrate(f));
  for (int step = 0; step < 5; ++step) push_forward(sys, m);
  for (size_t q = 0; q < panel.size(); ++q) {
    const double after = m.integrate(panel[q]);
    CHECK(std::abs(after - before[q]) < 0.1);  // statistics preserved within noise
  }
}

TEST_CASE("fiber mass concentrates at the attractor of a loxodromic twist") {
  const auto sys = zoo::make_system("mob_lox");
  SystemPoint x = zoo::random_point(sys, 9);
  x.fiber = cxcore::SpherePoint::make(complexd(0.4, 0.3), 1.0);
  const auto est = gibbs_u_estimate(sys, x, 0.5, 200, 512, 31415);
  const auto attractor = cxcore::SpherePoint::make(1, 0);  // expanding eigendirection
  double near = 0.0;
  for (Eigen::Index k = 0; k < est.measure.size(); ++k) {
    const auto p = cxcore::SpherePoint{est.measure.points(2, k), est.measure.points(3, k)};
    if (cxcore::chordal_distance(p, attractor) < 0.1) near += est.measure.weights(k);
  }
  CHECK(near >= 0.95);
}

TEST_CASE("composite pipeline: u-state estimate followed by fiber heat flow") {
  // the cu-smoothing pipeline: estimate the empirical u-state, then evolve the
  // fiber conditionals for a long heat time and check its diagnostics
  const auto sys = zoo::make_system("skew_l1");
  const auto est = gibbs_u_estimate(sys, zoo::random_point(sys, 17), 0.5, 8, 64, 17);
  const HybridMeasure smoothed = mu_t(sys, est.measure, 5.0, 16, 1e-3);
  double mass = 0.0;
  for (const auto& atom : smoothed.atoms) {
    mass += atom.weight;
    CHECK(atom.density.mass() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(atom.density.l2_distance_to_mean() < 1e-12);  // fiberwise flat
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("measure export formats") {
  ParticleMeasure m;
  m.points.resize(2, 3);
  m.points << complexd(0.1, 0.2), complexd(0.3, 0.4), complexd(0.5, 0.6), complexd(0.7, 0.8),
      complexd(0.9, 1.0), complexd(1.1, 1.2);
  m.weights = RVec::Constant(3, 1.0 / 3.0);
  std::ostringstream csv;
  m.to_csv(csv);
  const std::string text = csv.str();
  CHECK(text.rfind("re_0,im_0,re_1,im_1,weight\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);  // header + 3 rows

  FiberDensity d(square(), 4);
  d.coeff(0, 0) = 1.0;
  d.coeff(2, -1) = complexd(0.25, -0.5);
  const auto j = d.to_json();
  CHECK(j.at("cutoff").get<int>() == 4);
  bool found = false;
  for (const auto& row : j.at("coefficients"))
    if (row.at(0).get<int>() == 2 && row.at(1).get<int>() == -1) {
      found = true;
      CHECK(row.at(2).get<double>() == doctest::Approx(0.25));
      CHECK(row.at(3).get<double>() == doctest::Approx(-0.5));
    }
  CHECK(found);
}

TEST_CASE("center growth statistics per system kind") {
  const auto skew = zoo::make_system("skew_l1");
  auto curve = center_growth_statistics(skew, 5, 30);
  for (double v : curve.sup) CHECK(v == doctest::Approx(1.0));

  const auto lox = zoo::make_system("mob_lox");
  curve = center_growth_statistics(lox, 3, 20);
  for (int k = 0; k < 20; ++k)
    CHECK(curve.sup[k] == doctest::Approx(std::pow(2.0, k + 1)).epsilon(1e-9));

  const auto ell = zoo::make_system("mob_ell");
  curve = center_growth_statistics(ell, 3, 200);
  for (double v : curve.sup) CHECK(v < 1.0 + 1e-9);  // diagonal rotations are isometries

  const auto bc = zoo::make_system("bc_n1");
  curve = center_growth_statistics(bc, 3, 20);
  for (double v : curve.sup) CHECK(v == doctest::Approx(1.0));
}
