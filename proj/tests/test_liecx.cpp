#include "holodyn/liecx.hpp"

#include <random>

#include "doctest.h"

using namespace holodyn;
using namespace holodyn::liecx;

namespace {

// 3-dimensional Heisenberg algebra [e1, e2] = e3
StructureAlgebra heisenberg3() {
  return StructureAlgebra(3, {{0, 1, {Rational(0), Rational(0), Rational(1)}}});
}

// [e1, e2] = [e3, e4] = e5 with a trailing abelian direction
std::vector<StructureAlgebra::BracketEntry> h5_brackets() {
  RatVec e5(6, Rational(0));
  e5[4] = 1;
  return {{0, 1, e5}, {2, 3, e5}};
}

RatMat block_pairing_j() {
  // J e1 = e2, J e3 = e4, J e5 = e6
  RatMat j(6, 6);
  j(1, 0) = 1; j(0, 1) = -1;
  j(3, 2) = 1; j(2, 3) = -1;
  j(5, 4) = 1; j(4, 5) = -1;
  return j;
}

bool is_zero(const RatVec& v) {
  for (const auto& x : v)
    if (x != Rational(0)) return false;
  return true;
}

}  // namespace

TEST_CASE("brackets are bilinear and antisymmetric") {
  const StructureAlgebra h3 = heisenberg3();
  const RatVec b = h3.basis_bracket(0, 1);
  CHECK(b[2] == Rational(1));
  CHECK(is_zero(h3.bracket(basis_vector(3, 0), basis_vector(3, 0))));

  const StructureAlgebra h5(6, h5_brackets());
  CHECK(h5.basis_bracket(2, 3)[4] == Rational(1));
  CHECK(h5.basis_bracket(3, 2)[4] == Rational(-1));

  std::mt19937_64 rng(9);
  std::uniform_int_distribution<long long> c(-4, 4);
  for (int trial = 0; trial < 20; ++trial) {
    RatVec x(6), y(6);
    for (int k = 0; k < 6; ++k) {
      x[k] = Rational(c(rng), 1 + (trial % 3));
      y[k] = Rational(c(rng));
    }
    const RatVec xy = h5.bracket(x, y);
    RatVec yx = h5.bracket(y, x);
    for (int k = 0; k < 6; ++k) CHECK(xy[k] == -yx[k]);
  }
}

TEST_CASE("constructing an algebra violating the Jacobi identity fails") {
  // [e1,e2] = e3, [e1,e3] = e1 breaks the cyclic sum
  RatVec e3(3, Rational(0)), e1(3, Rational(0));
  e3[2] = 1;
  e1[0] = 1;
  CHECK_THROWS_AS(StructureAlgebra(3, {{0, 1, e3}, {0, 2, e1}}), ContractViolation);
}

TEST_CASE("J must square to minus the identity") {
  RatMat j(6, 6);
  j(0, 1) = 1;  // not a complex structure
  CHECK_THROWS_AS(StructureAlgebra(6, h5_brackets(), j), ContractViolation);
}

TEST_CASE("nijenhuis tensor on the h5 algebra") {
  const StructureAlgebra alg(6, h5_brackets(), block_pairing_j());

  // vanishes on (e1, e2) and in fact on every basis pair
  CHECK(is_zero(nijenhuis(alg, basis_vector(6, 0), basis_vector(6, 1))));
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j)
      CHECK(is_zero(nijenhuis(alg, basis_vector(6, i), basis_vector(6, j))));

  // abelian algebra: everything vanishes for any J
  const StructureAlgebra abelian(6, {}, block_pairing_j());
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j)
      CHECK(is_zero(nijenhuis(abelian, basis_vector(6, i), basis_vector(6, j))));

  // the variant J' e1 = e2, J' e3 = e5, J' e4 = e6 has N(e3, e4) = e5
  RatMat jv(6, 6);
  jv(1, 0) = 1; jv(0, 1) = -1;
  jv(4, 2) = 1; jv(2, 4) = -1;
  jv(5, 3) = 1; jv(3, 5) = -1;
  const StructureAlgebra alg2(6, h5_brackets(), jv);
  const RatVec n34 = nijenhuis(alg2, basis_vector(6, 2), basis_vector(6, 3));
  CHECK(n34[4] == Rational(1));
  for (int k = 0; k < 6; ++k)
    if (k != 4) CHECK(n34[k] == Rational(0));
}

TEST_CASE("nijenhuis is bilinear and antisymmetric") {
  const auto entry = load_algebra("h5_plus_center");
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<long long> c(-3, 3);
  for (int trial = 0; trial < 15; ++trial) {
    RatVec x(6), y(6);
    for (int k = 0; k < 6; ++k) {
      x[k] = Rational(c(rng));
      y[k] = Rational(c(rng), 2);
    }
    const RatVec nxy = nijenhuis(entry.algebra, x, y);
    RatVec nyx = nijenhuis(entry.algebra, y, x);
    for (int k = 0; k < 6; ++k) CHECK(nxy[k] == -nyx[k]);
    // additivity in the first slot
    RatVec xs = x;
    xs[trial % 6] += Rational(2);
    const RatVec lhs = nijenhuis(entry.algebra, xs, y);
    RatVec delta(6, Rational(0));
    delta[trial % 6] = 2;
    const RatVec rhs = nijenhuis(entry.algebra, delta, y);
    for (int k = 0; k < 6; ++k) CHECK(lhs[k] == nxy[k] + rhs[k]);
  }
}

TEST_CASE("automorphism checks on the shipped catalog") {
  const auto h5 = load_algebra("h5_plus_center");
  const auto check = automorphism_check(h5.algebra, h5.f);
  CHECK(check.is_automorphism);
  CHECK(check.commutes_with_j);
  CHECK(check.preserves_lattice);

  const auto id_check = automorphism_check(h5.algebra, RatMat::identity(6));
  CHECK(id_check.is_automorphism);
  CHECK(id_check.commutes_with_j);
  CHECK(id_check.preserves_lattice);

  // scaling the bracket target while fixing e1..e4 cannot be an automorphism
  RatMat bad = RatMat::identity(6);
  bad(4, 4) = 2;
  CHECK_FALSE(automorphism_check(h5.algebra, bad).is_automorphism);

  const auto h3 = load_algebra("h3_complex");
  const auto c3 = automorphism_check(h3.algebra, h3.f);
  CHECK(c3.is_automorphism);
  CHECK(c3.commutes_with_j);
  CHECK(c3.preserves_lattice);
}

TEST_CASE("catalog nijenhuis tensors vanish on every basis pair") {
  for (const char* name : {"h3_complex", "h5_plus_center"}) {
    const auto entry = load_algebra(name);
    const int d = entry.algebra.dim();
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j)
        CHECK(is_zero(nijenhuis(entry.algebra, basis_vector(d, i), basis_vector(d, j))));
  }
}

TEST_CASE("hyperbolic splittings of the catalog automorphisms") {
  const auto h5 = load_algebra("h5_plus_center");
  const auto split = hyperbolic_splitting(h5.algebra, h5.f);
  CHECK(split.stable.cols() == 2);
  CHECK(split.center.cols() == 2);
  CHECK(split.unstable.cols() == 2);
  CHECK_FALSE(split.ambiguous);
  CHECK(split.invariance_residual < 1e-10);
  // the center is exactly span{e5, e6}
  for (int col = 0; col < 2; ++col)
    for (int row = 0; row < 4; ++row) CHECK(std::abs(split.center(row, col)) < 1e-10);

  const auto id_split = hyperbolic_splitting(h5.algebra, RatMat::identity(6));
  CHECK(id_split.center.cols() == 6);
  CHECK(id_split.stable.cols() == 0);

  const auto h3 = load_algebra("h3_complex");
  const auto s3 = hyperbolic_splitting(h3.algebra, h3.f);
  CHECK(s3.unstable.cols() == 2);  // one complex dimension
  CHECK(s3.stable.cols() == 2);
  CHECK(s3.center.cols() == 2);
  // expanding rate (3 + sqrt 5)/2 on the unstable block
  const RMat fu = h3.f.to_double() * s3.unstable;
  CHECK(fu.norm() / s3.unstable.norm() ==
        doctest::Approx((3.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-9));
}

TEST_CASE("subspaces of the splitting are f-invariant") {
  for (const char* name : {"h3_complex", "h5_plus_center"}) {
    const auto entry = load_algebra(name);
    const auto split = hyperbolic_splitting(entry.algebra, entry.f);
    const RMat f = entry.f.to_double();
    for (const RMat* sub : {&split.stable, &split.center, &split.unstable}) {
      if (sub->cols() == 0) continue;
      const RMat img = f * (*sub);
      const RMat back = (*sub) * ((*sub).transpose() * img);
      CHECK((img - back).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("near-unimodular eigenvalues raise the ambiguity warning") {
  // |lambda| - 1 = 5e-10 falls inside the warning band (1e-14, 1e-9]
  const StructureAlgebra abelian(2, {});
  RatMat f(2, 2);
  f(0, 0) = Rational(2000000001LL, 2000000000LL);
  f(1, 1) = 1;
  const auto split = hyperbolic_splitting(abelian, f);
  CHECK(split.ambiguous);
  CHECK(split.center.cols() == 2);  // grouped as center at the 1e-9 tolerance

  RatMat g(2, 2);
  g(0, 0) = 2;
  g(1, 1) = 1;
  CHECK_FALSE(hyperbolic_splitting(abelian, g).ambiguous);
}

TEST_CASE("accessibility dimensions") {
  const auto h3 = load_algebra("h3_complex");
  const auto acc3 = accessibility_dimension(h3.algebra, h3.f);
  CHECK(acc3.dim == 6);  // brackets of the hyperbolic part fill the center
  CHECK(acc3.exact);
  CHECK(static_cast<int>(acc3.growth.size()) <= h3.algebra.dim() + 1);

  const auto h5 = load_algebra("h5_plus_center");
  const auto acc5 = accessibility_dimension(h5.algebra, h5.f);
  CHECK(acc5.dim == 5);
  CHECK(acc5.exact);
  REQUIRE(acc5.j_invariant.has_value());
  CHECK_FALSE(*acc5.j_invariant);  // the span misses J e5 = e6, so it is not complex

  // abelian control: no brackets, the dimension is just dim E^s + dim E^u
  RatMat f(4, 4);
  f(0, 0) = 2; f(0, 1) = 1; f(1, 0) = 1; f(1, 1) = 1;  // hyperbolic block
  f(2, 2) = 1; f(3, 3) = 1;
  const StructureAlgebra abelian(4, {});
  const auto acc = accessibility_dimension(abelian, f);
  CHECK(acc.dim == 2);

  // growth is monotone and stabilizes within dim sweeps
  for (const auto* a : {&acc3, &acc5}) {
    for (size_t k = 1; k < a->growth.size(); ++k) CHECK(a->growth[k] >= a->growth[k - 1]);
  }
}
