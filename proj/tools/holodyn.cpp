// holodyn: deterministic command-line front end for the analysis engines.
// Reports are JSON on stdout or --out; identical (config, seed) runs produce
// byte-identical documents.  Wall time goes to stderr only.

#include <chrono>
#include <fstream>
#include <iostream>
#include <random>
#include <regex>
#include <string>

#include <CLI11.hpp>

#include "holodyn/dynamics.hpp"
#include "holodyn/measures.hpp"
#include "holodyn/report.hpp"
#include "holodyn/zoo.hpp"

using namespace holodyn;
using report::Report;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitContract = 2;
constexpr int kExitNonConvergence = 3;

complexd parse_complex(std::string s) {
  if (s.rfind("z=", 0) == 0) s = s.substr(2);
  static const std::regex full(R"(^([+-]?[0-9.eE+-]*?)([+-][0-9.eE]*)i$)");
  static const std::regex imag_only(R"(^([+-]?[0-9.eE]*)i$)");
  std::smatch m;
  if (std::regex_match(s, m, imag_only)) {
    const std::string im = m[1].str();
    if (im.empty() || im == "+") return complexd(0, 1);
    if (im == "-") return complexd(0, -1);
    return complexd(0, std::stod(im));
  }
  if (std::regex_match(s, m, full)) {
    std::string im = m[2].str();
    if (im == "+") im = "1";
    if (im == "-") im = "-1";
    return complexd(m[1].str().empty() ? 0.0 : std::stod(m[1].str()), std::stod(im));
  }
  return complexd(std::stod(s), 0.0);
}

nlohmann::ordered_json complex_json(complexd z) { return {z.real(), z.imag()}; }

nlohmann::ordered_json curve_json(const std::vector<double>& v) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (double x : v) j.push_back(x);
  return j;
}

void emit(const Report& rep, const std::string& out_path) {
  if (out_path.empty())
    std::cout << rep.dump();
  else
    rep.write(out_path);
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<double>>& columns) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw ContractViolation("cannot open csv path " + path);
  out << header << "\n";
  size_t rows = 0;
  for (const auto& c : columns) rows = std::max(rows, c.size());
  for (size_t r = 0; r < rows; ++r) {
    for (size_t c = 0; c < columns.size(); ++c) {
      if (c) out << ",";
      if (r < columns[c].size()) out << columns[c][r];
    }
    out << "\n";
  }
}

// Flat key=value configuration: values become arguments placed right after the
// subcommand tokens, so explicit command-line flags override them (options take
// the last occurrence).
std::vector<std::string> apply_config(const std::vector<std::string>& args) {
  std::string path;
  std::vector<std::string> kept;
  for (size_t k = 0; k < args.size(); ++k) {
    if (args[k] == "--config" && k + 1 < args.size()) {
      path = args[++k];
      continue;
    }
    if (args[k].rfind("--config=", 0) == 0) {
      path = args[k].substr(9);
      continue;
    }
    kept.push_back(args[k]);
  }
  if (path.empty()) return kept;

  std::ifstream in(path);
  if (!in) {
    std::cerr << "cannot open config file " << path << "\n";
    std::exit(kExitUsage);
  }
  std::vector<std::string> extra;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t");
      const auto b = s.find_last_not_of(" \t");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!key.empty() && !value.empty()) extra.push_back("--" + key + "=" + value);
  }

  // insert after the leading run of subcommand names
  size_t cut = 0;
  while (cut < kept.size() && !kept[cut].empty() && kept[cut][0] != '-') ++cut;
  std::vector<std::string> merged(kept.begin(), kept.begin() + cut);
  merged.insert(merged.end(), extra.begin(), extra.end());
  merged.insert(merged.end(), kept.begin() + cut, kept.end());
  return merged;
}

zoo::SystemDescriptor named_system(const std::string& name) {
  const auto names = zoo::registry_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    std::cerr << "unknown system '" << name << "'; available:";
    for (const auto& n : names) std::cerr << " " << n;
    std::cerr << "\n";
    std::exit(kExitUsage);
  }
  return zoo::make_system(name);
}

//------------------------------------------------------------------------------
// per-subcommand runners
//------------------------------------------------------------------------------

void run_splitting(const std::string& system, int n, double aperture, std::uint64_t seed,
                   const std::string& out) {
  const auto sys = named_system(system);
  const auto p = zoo::random_point(sys, seed);
  const auto est = dynamics::cone_splitting(sys, p, n, aperture, seed);
  Report rep(system, "splitting");
  rep.set_seed(seed);
  rep.set_iterations(n);
  rep.parameters()["n"] = n;
  rep.parameters()["aperture"] = aperture;
  rep.result()["dim_stable"] = est.stable.cols();
  rep.result()["dim_center"] = est.center.cols();
  rep.result()["dim_unstable"] = est.unstable.cols();
  rep.residuals()["invariance"] = est.residual;
  rep.residuals()["history"] = curve_json(est.residual_history);
  emit(rep, out);
}

void run_lyapunov(const std::string& system, int n, std::uint64_t seed, const std::string& out) {
  const auto sys = named_system(system);
  const auto spec = dynamics::lyapunov(sys, zoo::random_point(sys, seed), n);
  Report rep(system, "lyapunov");
  rep.set_seed(seed);
  rep.set_iterations(n);
  rep.parameters()["n"] = n;
  rep.result()["exponents"] = curve_json(spec.exponents);
  nlohmann::ordered_json mult = nlohmann::ordered_json::array();
  for (int m : spec.real_multiplicity) mult.push_back(m);
  rep.result()["real_multiplicity"] = mult;
  if (system == "cat2c" || system == "skew_l1" || system == "bc_n2")
    rep.add_reference("top_exponent", std::log((3.0 + std::sqrt(5.0)) / 2.0),
                      "exact_eigenvalue_log");
  emit(rep, out);
}

void run_holonomy(const std::string& system, int pairs, double tol, std::uint64_t seed,
                  const std::string& out) {
  const auto sys = named_system(system);
  const auto x = zoo::random_point(sys, seed);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  double id_resid = 0, comp_resid = 0, antilinear = 0;
  long iters = 0;
  const auto self = dynamics::unstable_holonomy(sys, x, x, tol);
  id_resid = (self.map.linear - CMat::Identity(1, 1)).norm() + self.map.antilinear_norm();
  for (int k = 0; k < pairs; ++k) {
    const complexd t1(u(rng), u(rng)), t2(u(rng), u(rng));
    const auto y = dynamics::unstable_point(sys, x, t1);
    const auto z = dynamics::unstable_point(sys, x, t1 + t2);
    const auto hxy = dynamics::unstable_holonomy(sys, x, y, tol);
    const auto hyz = dynamics::unstable_holonomy(sys, y, z, tol);
    const auto hxz = dynamics::unstable_holonomy(sys, x, z, tol);
    const auto composed = hyz.map.compose(hxy.map);
    comp_resid = std::max(comp_resid, (composed.linear - hxz.map.linear).norm() +
                                          (composed.antilinear - hxz.map.antilinear).norm());
    antilinear = std::max({antilinear, hxy.map.antilinear_norm(), hxz.map.antilinear_norm()});
    iters = std::max<long>(iters, hxy.iterations);
  }
  Report rep(system, "holonomy");
  rep.set_seed(seed);
  rep.set_iterations(iters);
  rep.parameters()["pairs"] = pairs;
  rep.parameters()["tol"] = tol;
  rep.residuals()["identity"] = id_resid;
  rep.residuals()["composition"] = comp_resid;
  rep.residuals()["antilinear"] = antilinear;
  rep.add_reference("identity", 0.0, "cocycle_identity");
  emit(rep, out);
}

void run_dbar(const std::string& system, const std::string& from, const std::string& to,
              std::uint64_t seed, const std::string& out) {
  const auto sys = named_system(system);
  zoo::SystemPoint x, y;
  if (sys.kind == zoo::SystemKind::BlanchardCalabi) {
    const int n2 = 2 * sys.bc().copies;
    x.z = CVec::Zero(n2 + 1);
    y.z = CVec::Zero(n2 + 1);
    x.z(0) = parse_complex(from.empty() ? "z=0" : from);
    y.z(0) = parse_complex(to.empty() ? "z=1" : to);
  } else {
    x = zoo::random_point(sys, seed);
    y = x;
    std::mt19937_64 rng(seed + 1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    y.z(y.z.size() - 1) += complexd(u(rng), u(rng));
    y = zoo::reduce_point(sys, y);
  }
  const double closed = dynamics::dbar_defect(sys, x, y);
  const double sampled = dynamics::dbar_defect_sampled(sys, x, y);
  Report rep(system, "dbar");
  rep.set_seed(seed);
  rep.parameters()["from"] = from;
  rep.parameters()["to"] = to;
  rep.result()["defect"] = closed;
  rep.result()["defect_sampled"] = sampled;
  rep.residuals()["path_disagreement"] = std::abs(closed - sampled);
  if (sys.kind == zoo::SystemKind::BlanchardCalabi) {
    // for the default frame the antilinear block between fibers over a and b
    // has operator norm |s2(b) s1(a) - s1(b) s2(a)| / (|s1(a)|^2 + |s2(a)|^2)
    const complexd a = parse_complex(from.empty() ? "z=0" : from);
    const complexd b = parse_complex(to.empty() ? "z=1" : to);
    rep.add_reference("defect", std::abs(b - a) / (1.0 + std::norm(a)),
                      "closed_form_frame_change");
  } else {
    rep.add_reference("defect", 0.0, "closed_form_flat_holonomy");
  }
  emit(rep, out);
}

void run_dichotomy(const std::string& system, int n, double bound_c, int pair_iters,
                   std::uint64_t seed, const std::string& out, const std::string& csv) {
  const auto sys = named_system(system);
  const auto rep_d = dynamics::dichotomy_classify(sys, n, bound_c, pair_iters, seed);
  Report rep(system, "dichotomy");
  rep.set_seed(seed);
  rep.set_iterations(n);
  rep.parameters()["n"] = n;
  rep.parameters()["bound_c"] = bound_c;
  const char* verdict = rep_d.verdict == dynamics::DichotomyVerdict::Isometry ? "isometry"
                        : rep_d.verdict == dynamics::DichotomyVerdict::Contraction
                            ? "contraction"
                            : "inconclusive";
  rep.result()["verdict"] = verdict;
  if (rep_d.exceptional_point) {
    rep.result()["exceptional_point"] = {complex_json(rep_d.exceptional_point->a),
                                         complex_json(rep_d.exceptional_point->b)};
  }
  rep.result()["growth_curve_tail"] =
      rep_d.growth_curve.empty() ? 0.0 : rep_d.growth_curve.back();
  std::vector<double> idx(rep_d.growth_curve.size());
  for (size_t k = 0; k < idx.size(); ++k) idx[k] = static_cast<double>(k + 1);
  write_csv(csv, "n,growth,pair_distance", {idx, rep_d.growth_curve, rep_d.pair_distance_curve});
  emit(rep, out);
}

void run_modscan(const std::string& system, int samples, std::uint64_t seed,
                 const std::string& out, const std::string& csv) {
  const auto sys = named_system(system);
  dynamics::ModulusScan scan;
  if (sys.kind == zoo::SystemKind::BlanchardCalabi) {
    std::vector<complexd> path;
    for (int k = 0; k < samples; ++k)
      path.push_back(complexd(0, 0.25 + 0.75 * k / std::max(1, samples - 1)));
    CVec v1 = CVec::Zero(2 * sys.bc().copies), v2 = v1;
    v1(0) = 1.0;
    v2(1) = 1.0;
    scan = dynamics::modulus_scan_bc(sys, path, v1, v2, 0);
  } else {
    scan = dynamics::modulus_scan(sys, zoo::random_point(sys, seed), samples, 1.0, complexd(0, 1),
                                  seed);
  }
  Report rep(system, "modscan");
  rep.set_seed(seed);
  rep.parameters()["samples"] = samples;
  rep.result()["total_variation"] = scan.total_variation;
  rep.result()["degenerate_samples"] = scan.degenerate_samples;
  nlohmann::ordered_json taus = nlohmann::ordered_json::array();
  for (auto t : scan.taus) taus.push_back(complex_json(t));
  rep.result()["taus"] = taus;
  std::vector<double> re, im;
  for (auto t : scan.taus) {
    re.push_back(t.real());
    im.push_back(t.imag());
  }
  write_csv(csv, "tau_re,tau_im", {re, im});
  emit(rep, out);
}

void run_gibbs(const std::string& system, double radius, int n_iter, int m_samples,
               std::uint64_t seed, const std::string& out, const std::string& csv) {
  const auto sys = named_system(system);
  const auto est = measures::gibbs_u_estimate(sys, zoo::random_point(sys, seed), radius, n_iter,
                                              m_samples, seed);
  if (!csv.empty()) {
    std::ofstream particles(csv);
    if (!particles) throw ContractViolation("cannot open csv path " + csv);
    est.measure.to_csv(particles);
  }
  Report rep(system, "gibbs");
  rep.set_seed(seed);
  rep.set_iterations(n_iter);
  rep.parameters()["radius"] = radius;
  rep.parameters()["n_iter"] = n_iter;
  rep.parameters()["m_samples"] = m_samples;
  rep.result()["panel"] = curve_json(est.panel);
  rep.result()["panel_sigma"] = curve_json(est.panel_sigma);
  rep.add_reference("panel", 0.0, "flat_average");
  emit(rep, out);
}

void run_heat(const std::string& lattice_name, int cutoff, double t_max, int t_steps,
              std::uint64_t seed, const std::string& out, const std::string& csv) {
  lattices::Lattice lat = [&] {
    CVec a(1), b(1);
    a(0) = 1.0;
    if (lattice_name == "hex") {
      b(0) = std::polar(1.0, M_PI / 3.0);
    } else if (lattice_name == "square") {
      b(0) = complexd(0, 1);
    } else {
      std::cerr << "unknown lattice '" << lattice_name << "' (square, hex)\n";
      std::exit(kExitUsage);
    }
    return lattices::Lattice(1, {a, b});
  }();

  measures::FiberDensity d(lat, cutoff);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  d.coeff(0, 0) = 1.0;
  d.coeff(1, 0) = complexd(g(rng), g(rng)) * 0.1;
  d.coeff(-1, 0) = std::conj(d.coeff(1, 0));

  std::vector<double> grid;
  for (int k = 1; k <= t_steps; ++k) grid.push_back(t_max * k / t_steps);
  const auto decay = measures::limit_average_check(d, grid);

  // semigroup law and mass conservation residuals on the same density
  const auto two = measures::heat_step(measures::heat_step(d, t_max / 3), t_max / 3);
  const auto one = measures::heat_step(d, 2 * t_max / 3);
  double law = 0.0;
  for (int m1 = -cutoff; m1 <= cutoff; ++m1)
    for (int m2 = -cutoff; m2 <= cutoff; ++m2)
      law = std::max(law, std::abs(two.coeff(m1, m2) - one.coeff(m1, m2)));

  Report rep(lattice_name, "heat");
  rep.set_seed(seed);
  rep.parameters()["cutoff"] = cutoff;
  rep.parameters()["t_max"] = t_max;
  rep.result()["fitted_rate"] = decay.fitted_rate;
  rep.result()["expected_rate"] = decay.expected_rate;
  rep.residuals()["semigroup_law"] = law;
  rep.residuals()["mass_drift"] = std::abs(one.mass() - d.mass());
  rep.add_reference("expected_rate", decay.expected_rate, "dual_lattice_shortest_vector");
  write_csv(csv, "t,l2_distance", {decay.times, decay.l2_distances});
  emit(rep, out);
}

void run_nijenhuis(const std::string& system, const std::string& out) {
  const auto sys = named_system(system);
  if (sys.kind != zoo::SystemKind::NilmanifoldAutomorphism) {
    std::cerr << "nijenhuis needs a nilmanifold system (iwasawa, h5acc)\n";
    std::exit(kExitUsage);
  }
  const auto& alg = *sys.nil().algebra;
  bool vanishes = true;
  std::string worst = "0";
  for (int i = 0; i < alg.dim(); ++i)
    for (int j = i + 1; j < alg.dim(); ++j) {
      const auto n = liecx::nijenhuis(alg, liecx::basis_vector(alg.dim(), i),
                                      liecx::basis_vector(alg.dim(), j));
      for (const auto& c : n)
        if (c != liecx::Rational(0)) {
          vanishes = false;
          worst = std::to_string(c.numerator()) + "/" + std::to_string(c.denominator());
        }
    }
  Report rep(system, "nijenhuis");
  rep.result()["vanishes_on_all_basis_pairs"] = vanishes;
  rep.result()["worst_coefficient"] = worst;
  rep.add_reference("tensor", "0", "exact_rational");
  emit(rep, out);
}

void run_accessibility(const std::string& system, const std::string& out) {
  const auto sys = named_system(system);
  if (sys.kind != zoo::SystemKind::NilmanifoldAutomorphism) {
    std::cerr << "accessibility needs a nilmanifold system (iwasawa, h5acc)\n";
    std::exit(kExitUsage);
  }
  const auto acc = liecx::accessibility_dimension(*sys.nil().algebra, sys.nil().f);
  Report rep(system, "accessibility");
  rep.result()["dimension"] = acc.dim;
  rep.result()["exact_arithmetic"] = acc.exact;
  if (acc.j_invariant) rep.result()["span_is_complex"] = *acc.j_invariant;
  nlohmann::ordered_json growth = nlohmann::ordered_json::array();
  for (int gdim : acc.growth) growth.push_back(gdim);
  rep.result()["growth"] = growth;
  emit(rep, out);
}

void run_lattice_fibers(const std::string& system, const std::string& out) {
  const auto sys = named_system(system);
  if (sys.kind != zoo::SystemKind::EllipticQuotient) {
    std::cerr << "singular-fibers needs the elliptic_quotient system\n";
    std::exit(kExitUsage);
  }
  Report rep(system, "lattice.singular-fibers");
  rep.result()["count"] = lattices::involution_fixed_fibers(2, 2);
  rep.result()["commutes"] = zoo::elliptic_quotient_commutes();
  const complexd tau = sys.elliptic().tau;
  rep.result()["generic_fiber_tau"] = complex_json(lattices::modulus_reduce(1.0, tau).modulus.tau);
  rep.result()["singular_fiber_tau"] =
      complex_json(lattices::modulus_reduce(0.5, tau).modulus.tau);
  rep.add_reference("count", 16.0, "two_torsion_count");
  emit(rep, out);
}

void run_lattice_reduce(const std::string& w1, const std::string& w2, const std::string& out) {
  const auto red = lattices::modulus_reduce(parse_complex(w1), parse_complex(w2));
  Report rep("-", "lattice.reduce");
  rep.parameters()["w1"] = w1;
  rep.parameters()["w2"] = w2;
  rep.result()["tau"] = complex_json(red.modulus.tau);
  nlohmann::ordered_json word = nlohmann::ordered_json::array();
  for (const auto& op : red.word) word.push_back(op);
  rep.result()["word"] = word;
  emit(rep, out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"holodyn: holomorphic partially hyperbolic systems laboratory"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.footer(
      "A flat key=value config file can be passed as --config FILE after the\n"
      "subcommand; explicit flags override its entries.");

  std::string system = "cat2c", out, csv, from, to, lattice_name = "square";
  std::string w1 = "1", w2 = "1+1i";
  std::uint64_t seed = 1;
  int n_split = 40, n_lyap = 10000, n_dich = 200;
  int pairs = 10, m_samples = 4096, n_iter = 500, cutoff = 32, t_steps = 8;
  int pair_iters = 40, samples = 100;
  double aperture = 0.5, tol = 1e-10, bound_c = 100.0, radius = 0.5, t_max = 0.02;

  auto add_common = [&](CLI::App* cmd, bool with_system = true) {
    if (with_system) cmd->add_option("--system", system, "registry system name");
    cmd->add_option("--out", out, "write the JSON report to this path");
    cmd->add_option("--seed", seed, "random seed (mandatory for stochastic operations)");
  };

  auto* c_split = app.add_subcommand("splitting", "cone-field invariant splitting");
  add_common(c_split);
  c_split->add_option("--n", n_split, "power iterations");
  c_split->add_option("--aperture", aperture, "seed-frame cone aperture");

  auto* c_lyap = app.add_subcommand("lyapunov", "Lyapunov exponents");
  add_common(c_lyap);
  c_lyap->add_option("--n", n_lyap, "averaging steps");

  auto* c_hol = app.add_subcommand("holonomy", "unstable holonomy limits");
  add_common(c_hol);
  c_hol->add_option("--pairs", pairs, "random unstable pairs");
  c_hol->add_option("--tol", tol, "Cauchy stopping tolerance");

  auto* c_dbar = app.add_subcommand("dbar", "d-bar defect of the center holonomy");
  add_common(c_dbar);
  c_dbar->add_option("--from", from, "source fiber, e.g. z=0");
  c_dbar->add_option("--to", to, "target fiber, e.g. z=1");

  auto* c_dich = app.add_subcommand("dichotomy", "isometry/contraction classification");
  add_common(c_dich);
  c_dich->add_option("--n", n_dich, "growth curve length");
  c_dich->add_option("--bound-c", bound_c, "isometry bound");
  c_dich->add_option("--pair-iters", pair_iters, "pair contraction iterations");
  c_dich->add_option("--csv", csv, "write curves to this CSV path");

  auto* c_mod = app.add_subcommand("modscan", "fiber modulus scan along a center leaf");
  add_common(c_mod);
  c_mod->add_option("--samples", samples, "center-leaf samples");
  c_mod->add_option("--csv", csv, "write the tau curve to this CSV path");

  auto* c_gibbs = app.add_subcommand("gibbs", "empirical u-state estimate");
  add_common(c_gibbs);
  c_gibbs->add_option("--radius", radius, "unstable disk radius");
  c_gibbs->add_option("--n-iter", n_iter, "Cesaro iterations");
  c_gibbs->add_option("--m-samples", m_samples, "quadrature points");
  c_gibbs->add_option("--csv", csv, "export the particle cloud to this CSV path");

  auto* c_heat = app.add_subcommand("heat", "fiberwise heat semigroup diagnostics");
  add_common(c_heat, false);
  c_heat->add_option("--lattice", lattice_name, "square or hex");
  c_heat->add_option("--cutoff", cutoff, "Fourier cutoff");
  c_heat->add_option("--t-max", t_max, "largest heat time");
  c_heat->add_option("--t-steps", t_steps, "grid size");
  c_heat->add_option("--csv", csv, "write the decay curve to this CSV path");

  auto* c_nij = app.add_subcommand("nijenhuis", "Nijenhuis tensor of a catalog algebra");
  add_common(c_nij);

  auto* c_acc = app.add_subcommand("accessibility", "accessibility subalgebra dimension");
  add_common(c_acc);

  auto* c_lat = app.add_subcommand("lattice", "lattice utilities");
  auto* c_fib = c_lat->add_subcommand("singular-fibers", "involution fixed-fiber count");
  add_common(c_fib);
  auto* c_red = c_lat->add_subcommand("reduce", "modulus reduction of a period pair");
  c_red->add_option("--w1", w1, "first period");
  c_red->add_option("--w2", w2, "second period");
  c_red->add_option("--out", out, "write the JSON report to this path");
  c_lat->require_subcommand(1);

  auto* c_all = app.add_subcommand("report-all", "run the full battery into a directory");
  c_all->add_option("--out", out, "output directory")->required();
  c_all->add_option("--seed", seed, "random seed");

  std::vector<std::string> args(argv + 1, argv + argc);
  args = apply_config(args);
  std::reverse(args.begin(), args.end());  // CLI11 consumes the vector back to front
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  const auto t0 = std::chrono::steady_clock::now();
  int code = 0;
  try {
    if (c_split->parsed()) run_splitting(system, n_split, aperture, seed, out);
    if (c_lyap->parsed()) run_lyapunov(system, n_lyap, seed, out);
    if (c_hol->parsed()) run_holonomy(system, pairs, tol, seed, out);
    if (c_dbar->parsed()) run_dbar(system, from, to, seed, out);
    if (c_dich->parsed()) run_dichotomy(system, n_dich, bound_c, pair_iters, seed, out, csv);
    if (c_mod->parsed()) run_modscan(system, samples, seed, out, csv);
    if (c_gibbs->parsed()) run_gibbs(system, radius, n_iter, m_samples, seed, out, csv);
    if (c_heat->parsed()) run_heat(lattice_name, cutoff, t_max, t_steps, seed, out, csv);
    if (c_nij->parsed()) run_nijenhuis(system, out);
    if (c_acc->parsed()) run_accessibility(system, out);
    if (c_fib->parsed()) run_lattice_fibers(system, out);
    if (c_red->parsed()) run_lattice_reduce(w1, w2, out);
    if (c_all->parsed()) {
      const std::string dir = out;
      run_lyapunov("cat2c", 10000, seed, dir + "/lyapunov_cat2c.json");
      run_holonomy("skew_l1", 10, 1e-10, seed, dir + "/holonomy_skew_l1.json");
      run_dbar("bc_n1", "z=0", "z=1", seed, dir + "/dbar_bc_n1.json");
      run_dbar("skew_l1", "", "", seed, dir + "/dbar_skew_l1.json");
      run_dichotomy("mob_lox", 200, 100.0, 40, seed, dir + "/dichotomy_mob_lox.json", "");
      run_dichotomy("mob_ell", 200, 100.0, 40, seed, dir + "/dichotomy_mob_ell.json", "");
      run_modscan("skew_l1", 100, seed, dir + "/modscan_skew_l1.json", "");
      run_heat("square", 32, 0.02, 8, seed, dir + "/heat_square.json", "");
      run_heat("hex", 32, 0.02, 8, seed, dir + "/heat_hex.json", "");
      run_nijenhuis("iwasawa", dir + "/nijenhuis_iwasawa.json");
      run_nijenhuis("h5acc", dir + "/nijenhuis_h5acc.json");
      run_accessibility("iwasawa", dir + "/accessibility_iwasawa.json");
      run_accessibility("h5acc", dir + "/accessibility_h5acc.json");
      run_lattice_fibers("elliptic_quotient", dir + "/singular_fibers.json");
    }
  } catch (const NonConvergence& e) {
    std::cerr << "non-convergence: " << e.what() << "\n";
    code = kExitNonConvergence;
  } catch (const ContractViolation& e) {
    std::cerr << "contract violation: " << e.what() << "\n";
    code = kExitContract;
  }
  const auto t1 = std::chrono::steady_clock::now();
  std::cerr << "wall_time_ms "
            << std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count() << "\n";
  return code;
}
