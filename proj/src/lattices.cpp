#include "holodyn/lattices.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

namespace holodyn::lattices {

Lattice::Lattice(int ambient_dim, std::vector<CVec> basis)
    : ambient_dim_(ambient_dim), basis_(std::move(basis)) {
  const int n = ambient_dim_;
  if (static_cast<int>(basis_.size()) != 2 * n)
    throw ContractViolation("Lattice: need 2n generators in C^n");
  period_.resize(2 * n, 2 * n);
  for (int k = 0; k < 2 * n; ++k) {
    if (basis_[k].size() != n)
      throw ContractViolation("Lattice: generator has wrong dimension");
    period_.col(k) = realify(basis_[k]);
  }
  Eigen::FullPivLU<RMat> lu(period_);
  if (std::abs(lu.determinant()) < 1e-10)
    throw ContractViolation("Lattice: generators are not R-linearly independent");
  period_inv_ = lu.inverse();
}

RVec Lattice::coordinates(const CVec& z) const { return period_inv_ * realify(z); }

CVec Lattice::reduce(const CVec& z) const {
  RVec a = coordinates(z);
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    a(k) -= std::floor(a(k));
    if (a(k) >= 1.0) a(k) -= 1.0;  // guards floor(x) == x - 1 rounding
  }
  return complexify(period_ * a);
}

bool Lattice::contains(const CVec& z, double tol) const {
  const RVec a = coordinates(z);
  for (Eigen::Index k = 0; k < a.size(); ++k)
    if (std::abs(a(k) - std::round(a(k))) > tol) return false;
  return true;
}

double Lattice::torus_distance(const CVec& a, const CVec& b) const {
  RVec d = coordinates(a) - coordinates(b);
  for (Eigen::Index k = 0; k < d.size(); ++k) d(k) -= std::round(d(k));
  // one ring of neighbours is enough once coordinates are centered
  double best = std::numeric_limits<double>::infinity();
  const int n2 = static_cast<int>(d.size());
  std::vector<int> offs(n2, -1);
  while (true) {
    RVec shift = d;
    for (int k = 0; k < n2; ++k) shift(k) += offs[k];
    best = std::min(best, (period_ * shift).norm());
    int k = 0;
    for (; k < n2; ++k) {
      if (++offs[k] <= 1) break;
      offs[k] = -1;
    }
    if (k == n2) break;
  }
  return best;
}

nlohmann::json Lattice::to_json() const {
  nlohmann::json j;
  j["ambient_dim"] = ambient_dim_;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& v : basis_) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k)
      row.push_back({v(k).real(), v(k).imag()});
    rows.push_back(row);
  }
  j["basis"] = rows;
  return j;
}

Lattice Lattice::from_json(const nlohmann::json& j) {
  const int n = j.at("ambient_dim").get<int>();
  std::vector<CVec> basis;
  for (const auto& row : j.at("basis")) {
    CVec v(n);
    for (int k = 0; k < n; ++k)
      v(k) = complexd(row.at(k).at(0).get<double>(), row.at(k).at(1).get<double>());
    basis.push_back(v);
  }
  return Lattice(n, std::move(basis));
}

Lattice Lattice::gaussian(int n) {
  std::vector<CVec> basis;
  for (int k = 0; k < n; ++k) {
    CVec e = CVec::Zero(n);
    e(k) = 1.0;
    basis.push_back(e);
    e(k) = complexd(0, 1);
    basis.push_back(e);
  }
  return Lattice(n, std::move(basis));
}

//------------------------------------------------------------------------------
// Modulus reduction
//------------------------------------------------------------------------------

ModulusReduction modulus_reduce(complexd w1, complexd w2, double tol) {
  if (std::abs(w1) < 1e-300)
    throw ContractViolation("modulus_reduce: first period vanishes");
  complexd tau = w2 / w1;
  if (std::abs(tau.imag()) < tol * std::max(1.0, std::abs(tau)))
    throw ContractViolation("modulus_reduce: periods are R-linearly dependent");

  ModulusReduction out;
  if (tau.imag() < 0) tau = -tau;

  for (int iter = 0; iter < 1000; ++iter) {
    const double shift = std::round(tau.real());
    if (shift != 0.0) {
      tau -= shift;
      const long s = static_cast<long>(shift);
      for (long r = 0; r < std::labs(s); ++r) out.word.push_back(s > 0 ? "T^-1" : "T");
    }
    if (std::abs(tau) < 1.0 - tol) {
      tau = -1.0 / tau;
      out.word.push_back("S");
    } else {
      break;
    }
  }
  // Canonical boundary representative.
  if (std::abs(tau.real() + 0.5) < tol) {
    tau += 1.0;
    out.word.push_back("T");
  }
  if (std::abs(std::abs(tau) - 1.0) < tol && tau.real() < -tol) {
    tau = -1.0 / tau;
    out.word.push_back("S");
  }
  out.modulus = Modulus{tau};
  return out;
}

bool moduli_equal(complexd t1, complexd t2, double tol) {
  if (std::abs(t1 - t2) < tol) return true;
  // boundary identifications: Re = +-1/2 glued by T, |tau| = 1 glued by S
  if (std::abs(std::abs(t1.real()) - 0.5) < 2 * tol || std::abs(std::abs(t2.real()) - 0.5) < 2 * tol)
    if (std::abs(t1 - (t2 + 1.0)) < tol || std::abs(t1 - (t2 - 1.0)) < tol) return true;
  if (std::abs(std::abs(t1) - 1.0) < 2 * tol || std::abs(std::abs(t2) - 1.0) < 2 * tol)
    if (std::abs(t1 + 1.0 / t2) < tol) return true;
  return false;
}

bool torus_equivalent_1d(const Lattice& l1, const Lattice& l2, double tol) {
  if (l1.ambient_dim() != 1 || l2.ambient_dim() != 1)
    throw ContractViolation("torus_equivalent_1d: lattices must live in C");
  const complexd t1 = modulus_reduce(l1.basis()[0](0), l1.basis()[1](0)).modulus.tau;
  const complexd t2 = modulus_reduce(l2.basis()[0](0), l2.basis()[1](0)).modulus.tau;
  return moduli_equal(t1, t2, tol);
}

//------------------------------------------------------------------------------
// Real-linear correspondences
//------------------------------------------------------------------------------

ExtensionResidual clinear_extension_residual(const Lattice& l1, const Lattice& l2,
                                             const std::vector<int>& pairing) {
  const int m = 2 * l1.ambient_dim();
  if (static_cast<int>(pairing.size()) != m)
    throw ContractViolation("clinear_extension_residual: pairing must cover all generators");
  std::vector<cxcore::ActionSample> samples;
  samples.reserve(m);
  for (int k = 0; k < m; ++k)
    samples.emplace_back(l1.basis()[k], l2.basis()[pairing[k]]);
  cxcore::RLinearMap t = cxcore::antilinear_split(samples);
  return {t.antilinear_norm(), std::move(t)};
}

BundleDegree det_degree(const std::vector<long>& summand_degrees) {
  long sum = 0;
  bool all_trivial = true;
  for (long d : summand_degrees) {
    sum += d;
    if (d != 0) all_trivial = false;
  }
  return {sum, all_trivial};
}

long involution_fixed_fibers(int negated_factors, std::optional<int> half_translation_axis) {
  if (negated_factors < 0)
    throw ContractViolation("involution_fixed_fibers: negative factor count");
  if (negated_factors == 0) {
    if (!half_translation_axis)
      throw ContractViolation(
          "involution_fixed_fibers: identity involution is neither free nor has isolated fixed fibers");
    return 0;  // a pure half translation acts freely
  }
  long count = 1;
  for (int k = 0; k < negated_factors; ++k) count *= 4;
  return count;
}

}  // namespace holodyn::lattices
