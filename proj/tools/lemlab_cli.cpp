// lemlab: exact and asymptotic free energies of lemniscate Coulomb gases.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lemlab/lemlab.hpp"

using namespace lemlab;

namespace {

// Config files: TOML through CLI11, or a JSON object whose nested objects
// are subcommand sections.
class JsonOrTomlConfig : public CLI::ConfigBase {
 public:
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    std::string text((std::istreambuf_iterator<char>(input)), std::istreambuf_iterator<char>());
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos || text[first] != '{') {
      std::istringstream is(text);
      return CLI::ConfigBase::from_config(is);
    }
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConversionError(std::string("config: ") + e.what());
    }
    std::vector<CLI::ConfigItem> out;
    walk(j, {}, out);
    return out;
  }

 private:
  static std::string scalar(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  static void walk(const nlohmann::json& obj, const std::vector<std::string>& parents,
                   std::vector<CLI::ConfigItem>& out) {
    for (const auto& [key, val] : obj.items()) {
      if (val.is_object()) {
        auto p = parents;
        p.push_back(key);
        CLI::ConfigItem open;
        open.parents = p;
        open.name = "++";
        out.push_back(open);
        walk(val, p, out);
        CLI::ConfigItem close;
        close.parents = p;
        close.name = "--";
        out.push_back(close);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (val.is_array())
        for (const auto& e : val) item.inputs.push_back(scalar(e));
      else
        item.inputs.push_back(scalar(val));
      out.push_back(item);
    }
  }
};

struct Global {
  long bits = kDefaultBits;
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "json";
};

struct ParamArgs {
  int d = 2;
  double t = 1.0;
  double c = 0.0;
  LemniscateParams get() const {
    LemniscateParams p{d, t, c};
    p.validate();
    return p;
  }
};

void add_params(CLI::App* sub, ParamArgs& pa) {
  sub->add_option("-d,--d", pa.d, "Fold number d >= 1")->capture_default_str();
  sub->add_option("-t,--t", pa.t, "Lemniscate parameter t >= 0")->capture_default_str();
  sub->add_option("-c,--c", pa.c, "Point charge c > -1")->capture_default_str();
}

// Expands "a:b:s" into a, a+s, ..., <= b.
std::vector<long> expand_range(const std::string& spec) {
  std::vector<long> parts;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ':')) parts.push_back(std::stol(tok));
  if (parts.size() < 2 || parts.size() > 3) throw DomainError("range must be start:stop[:step]");
  const long step = parts.size() == 3 ? parts[2] : 1;
  if (step <= 0) throw DomainError("range step must be positive");
  std::vector<long> out;
  for (long n = parts[0]; n <= parts[1]; n += step) out.push_back(n);
  return out;
}

std::vector<long> grid_of(std::vector<long> ns, const std::string& range) {
  if (!range.empty())
    for (long n : expand_range(range)) ns.push_back(n);
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  if (ns.empty()) throw DomainError("no particle numbers given (use --n or --range)");
  return ns;
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw DomainError("cannot open " + path);
    }
  }
  std::ostream& os() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

std::string str(const BigReal& x, int digits = 20) { return x.to_string(digits); }

void cmd_coeffs(const Global& g, const ParamArgs& pa, long n) {
  const auto p = pa.get();
  const auto bits = static_cast<mpfr_prec_t>(g.bits);
  const ExpansionCoefficients k = coefficients(p, n, bits);
  Output out(g.out);
  if (g.format == "csv") {
    out.os() << "name,value\n";
    out.os() << "C1," << str(k.C1) << "\nC2," << str(k.C2) << "\nC3," << str(k.C3) << "\nC4," << str(k.C4)
             << "\nC5," << str(k.C5) << "\nC5_oscillatory," << str(k.C5_oscillatory) << '\n';
    return;
  }
  Json j = report_envelope("coeffs");
  j["params"] = to_json(p);
  j["n"] = n;
  j["bits"] = g.bits;
  j["coefficients"] = to_json(k);
  j["expansion_value"] = str(expansion_value(k, n));
  j["euler_characteristic"] = euler_characteristic(p);
  j["conjectured_log_coefficient"] = conjectured_log_coefficient(euler_characteristic(p), p.d);
  if (p.c == 0.0) j["functionals"] = to_json(functionals(p, n, bits));
  out.os() << j.dump(2) << '\n';
}

void cmd_exact(const Global& g, const ParamArgs& pa, const std::vector<long>& ns, bool gram) {
  const auto p = pa.get();
  const auto bits = static_cast<mpfr_prec_t>(g.bits);
  Output out(g.out);
  Json rows = Json::array();
  if (g.format == "csv") out.os() << "n,log_Z,A1,A2,A3" << (gram ? ",log_Z_gram" : "") << '\n';
  for (long n : ns) {
    const LemniscateDecomposition dec = log_Z_lemniscate_parts(n, p, bits);
    std::string gram_value;
    if (gram) gram_value = str(log_Z_gram_determinant(n, p, bits), 30);
    if (g.format == "csv") {
      out.os() << n << ',' << str(dec.total, 30) << ',' << str(dec.A1, 30) << ',' << str(dec.A2, 30) << ','
               << str(dec.A3, 30);
      if (gram) out.os() << ',' << gram_value;
      out.os() << '\n';
    } else {
      Json r{{"n", n}, {"log_Z", str(dec.total, 30)}, {"A1", str(dec.A1, 30)}, {"A2", str(dec.A2, 30)},
             {"A3", str(dec.A3, 30)}};
      if (gram) r["log_Z_gram"] = gram_value;
      rows.push_back(r);
    }
  }
  if (g.format != "csv") {
    Json j = report_envelope("exact");
    j["params"] = to_json(p);
    j["bits"] = g.bits;
    j["rows"] = rows;
    out.os() << j.dump(2) << '\n';
  }
}

void cmd_moments(const Global& g, const std::vector<long>& Ns, double a, double gamma, int corrections) {
  const auto bits = static_cast<mpfr_prec_t>(g.bits);
  Output out(g.out);
  Json rows = Json::array();
  if (g.format == "csv") out.os() << "N,a,gamma,exact,asymptotic,residual\n";
  for (long N : Ns) {
    const BigReal ex = log_moment_exact({N, a, gamma}, bits);
    const BigReal as = a > 1.0 ? log_moment_asymptotic_outside(N, a, gamma, bits)
                               : log_moment_asymptotic_bulk(N, a, gamma, corrections, bits);
    const BigReal res = ex - as;
    if (g.format == "csv") {
      out.os() << N << ',' << a << ',' << gamma << ',' << str(ex) << ',' << str(as) << ',' << str(res) << '\n';
    } else {
      rows.push_back({{"N", N}, {"a", a}, {"gamma", gamma}, {"exact", str(ex)}, {"asymptotic", str(as)},
                      {"residual", str(res)}});
    }
  }
  if (g.format != "csv") {
    Json j = report_envelope("moments");
    j["corrections"] = corrections;
    j["bits"] = g.bits;
    j["rows"] = rows;
    out.os() << j.dump(2) << '\n';
  }
}

void cmd_converge(const Global& g, const ParamArgs& pa, const std::vector<long>& ns) {
  const ConvergenceReport rep = run_convergence(pa.get(), ns, static_cast<mpfr_prec_t>(g.bits));
  Output out(g.out);
  if (g.format == "csv") {
    write_convergence_csv(out.os(), rep);
    return;
  }
  out.os() << to_json(rep).dump(2) << '\n';
}

void cmd_oscillation(const Global& g, const ParamArgs& pa, const std::vector<long>& ns) {
  const OscillationReport rep = extract_oscillation(pa.get(), ns, static_cast<mpfr_prec_t>(g.bits));
  Output out(g.out);
  if (g.format == "csv") {
    out.os().precision(12);
    out.os() << "m,x,count,mean_residual,extrapolated,slope,predicted\n";
    for (const auto& c : rep.classes)
      out.os() << c.m << ',' << c.x << ',' << c.count << ',' << c.mean_residual << ',' << c.extrapolated << ','
               << c.slope << ',' << c.predicted << '\n';
    return;
  }
  out.os() << to_json(rep).dump(2) << '\n';
}

void cmd_sample(const Global& g, const ParamArgs& pa, long n, long sweeps, double step, int bins, bool direct,
                const std::string& report_path) {
  const auto p = pa.get();
  SampleCloud cloud;
  if (direct) {
    cloud.params = p;
    cloud.n = n;
    cloud.seed = g.seed;
    cloud.points = sample_equilibrium(p, n, g.seed);
    cloud.acceptance_rate = 1.0;
  } else {
    cloud = sample_gas(p, n, sweeps, step, g.seed);
    if (cloud.tuning_failed)
      std::cerr << "warning: acceptance rate " << cloud.acceptance_rate << " outside (0.05, 0.95) after tuning\n";
  }
  const EmpiricalStats st = empirical_vs_equilibrium(cloud, p, bins);
  Json rep = to_json(cloud, st);
  rep["direct"] = direct;
  Output out(g.out);
  if (g.format == "csv") {
    write_points_csv(out.os(), cloud.points);
  } else {
    Json pts = Json::array();
    for (const Complex& z : cloud.points) pts.push_back({z.real(), z.imag()});
    rep["points"] = pts;
    out.os() << rep.dump(2) << '\n';
  }
  if (!report_path.empty()) {
    std::ofstream f(report_path);
    if (!f) throw DomainError("cannot open " + report_path);
    rep.erase("points");
    f << rep.dump(2) << '\n';
  }
}

struct Check {
  std::string name;
  double error;
  double tol;
};

int cmd_verify(const Global& g) {
  const auto bits = static_cast<mpfr_prec_t>(g.bits);
  std::vector<Check> checks;
  auto diff = [](const BigReal& a, const BigReal& b) { return abs(a - b).to_double(); };
  for (const LemniscateParams p : {LemniscateParams{1, 0, 0}, LemniscateParams{2, 0, 0.5}, LemniscateParams{3, 0, -0.3}})
    for (long n : {7L, 12L})
      checks.push_back({"radial closed form d=" + std::to_string(p.d) + " n=" + std::to_string(n),
                        diff(log_Z_lemniscate(n, p, bits), log_Z_radial(n, p.d, p.c, bits)), 1e-10});
  for (const LemniscateParams p : {LemniscateParams{2, 1.0, 0}, LemniscateParams{3, 0.4, 0.7}})
    checks.push_back({"Gram determinant d=" + std::to_string(p.d),
                      diff(log_Z_lemniscate(10, p, bits), log_Z_gram_determinant(10, p, bits)), 1e-10});
  {
    // d = 1: N = n, so the translation is t itself.
    const long n = 15;
    const double t = 1.6, c = 0.5;
    const BigReal rhs = square(BigReal(t, bits)) * (n * n) + log_Z_ginibre(n, bits) + log_moment_exact({n, t, 2 * c}, bits);
    checks.push_back({"d=1 moment identity", diff(log_Z_lemniscate(n, {1, t, c}, bits), rhs), 1e-12});
  }
  for (const LemniscateParams p : {LemniscateParams{2, 1.0, 0}, LemniscateParams{3, 0.4, 0}}) {
    const ExpansionCoefficients k = coefficients(p, 60, bits);
    const EnergyReport e = equilibrium_energy(p, Method::Quadrature);
    checks.push_back({"C1 = -I[sigma] d=" + std::to_string(p.d), std::abs(k.C1.to_double() + e.energy), 1e-8});
    const double c3 = 0.5 * std::log(2 * M_PI) - 1 - 0.5 * entropy_integral(p, Method::Quadrature);
    checks.push_back({"C3 entropy d=" + std::to_string(p.d), std::abs(k.C3.to_double() - c3), 1e-8});
  }
  for (int m = 0; m < 3; ++m) {
    const OscillationTable tab = oscillation_cancellation(3, 0.8, 0.0, m, bits);
    checks.push_back({"Table 1 total m=" + std::to_string(m),
                      diff(tab.total.constant, oscillation_total_closed(3, 0.8, m, bits)) +
                          abs(tab.total.block_coefficient).to_double(),
                      1e-30});
  }
  checks.push_back({"dual potential n=1 d=2", diff(log_Z_dual_potential(1, 2, bits), log(BigReal(2, bits))), 1e-30});
  checks.push_back({"prefactor log(6/512)",
                    diff(prefactor_log_cNdm(2, 2, 0, 0.0, bits), log(BigReal(6, bits) / 512L)), 1e-30});
  Output out(g.out);
  int failed = 0;
  if (g.format == "csv") out.os() << "check,error,tolerance,status\n";
  Json arr = Json::array();
  for (const auto& c : checks) {
    const bool ok = c.error < c.tol;
    failed += !ok;
    if (g.format == "csv")
      out.os() << '"' << c.name << "\"," << c.error << ',' << c.tol << ',' << (ok ? "PASS" : "FAIL") << '\n';
    else
      arr.push_back({{"check", c.name}, {"error", c.error}, {"tolerance", c.tol}, {"pass", ok}});
  }
  if (g.format != "csv") {
    Json j = report_envelope("verify-identities");
    j["bits"] = g.bits;
    j["checks"] = arr;
    j["failed"] = failed;
    out.os() << j.dump(2) << '\n';
  }
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact and asymptotic free energies of lemniscate Coulomb gases"};
  app.require_subcommand(1);
  app.fallthrough();
  app.config_formatter(std::make_shared<JsonOrTomlConfig>());
  app.set_config("--config", "", "Config file (JSON or TOML); command-line flags take precedence");

  Global g;
  app.add_option("--bits", g.bits, "Working precision in bits")->check(CLI::Range(53L, 1L << 16))->capture_default_str();
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--out", g.out, "Output path (default stdout)");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  ParamArgs pa;
  long n_single = 100;
  std::vector<long> ns;
  std::string range;

  auto* coeffs = app.add_subcommand("coeffs", "Expansion coefficients C1..C5 and functionals");
  add_params(coeffs, pa);
  coeffs->add_option("-n,--n", n_single, "Particle number (fixes {n/d})")->capture_default_str();

  bool gram = false;
  auto* exact = app.add_subcommand("exact", "Exact log Z_n through the multi-fold decomposition");
  add_params(exact, pa);
  exact->add_option("-n,--n", ns, "Particle numbers");
  exact->add_option("--range", range, "Particle numbers start:stop[:step]");
  exact->add_flag("--gram", gram, "Also evaluate the direct Gram determinant (n <= 64)");

  double a = 0.5, gamma = 2.0;
  int corrections = 3;
  auto* moments = app.add_subcommand("moments", "Ginibre moments E|det(G_N - a)|^gamma: exact vs asymptotic");
  moments->add_option("-N,--N", ns, "Matrix sizes");
  moments->add_option("--range", range, "Matrix sizes start:stop[:step]");
  moments->add_option("-a,--a", a, "Translation |a|")->capture_default_str();
  moments->add_option("-g,--gamma", gamma, "Exponent gamma > -2")->capture_default_str();
  moments->add_option("--corrections", corrections, "Number of 1/N corrections inside the disk")
      ->check(CLI::Range(0, kMaxCorrections))
      ->capture_default_str();

  auto* converge = app.add_subcommand("converge", "Remainder of the free energy expansion and its decay rate");
  add_params(converge, pa);
  converge->add_option("-n,--n", ns, "Particle numbers");
  converge->add_option("--range", range, "Particle numbers start:stop[:step]");

  auto* osc = app.add_subcommand("oscillation", "O(1) residuals per residue class of n mod d");
  add_params(osc, pa);
  osc->add_option("-n,--n", ns, "Particle numbers");
  osc->add_option("--range", range, "Particle numbers start:stop[:step]");

  long sweeps = 10000;
  double step = 0.05;
  int bins = 40;
  bool direct = false;
  std::string report_path;
  auto* sample = app.add_subcommand("sample", "Metropolis sampling of the Coulomb gas");
  add_params(sample, pa);
  sample->add_option("-n,--n", n_single, "Number of particles")->capture_default_str();
  sample->add_option("--sweeps", sweeps, "Sweeps (first 20% tune the step)")->capture_default_str();
  sample->add_option("--step", step, "Initial proposal scale")->capture_default_str();
  sample->add_option("--bins", bins, "Radial bins for the comparison with the equilibrium law")->capture_default_str();
  sample->add_flag("--direct", direct, "Draw independent points from the equilibrium measure instead");
  sample->add_option("--report", report_path, "Also write the JSON summary here");

  auto* verify = app.add_subcommand("verify-identities", "Quick check of the exact identities");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*coeffs) cmd_coeffs(g, pa, n_single);
    else if (*exact) cmd_exact(g, pa, grid_of(ns, range), gram);
    else if (*moments) cmd_moments(g, grid_of(ns, range), a, gamma, corrections);
    else if (*converge) cmd_converge(g, pa, grid_of(ns, range));
    else if (*osc) cmd_oscillation(g, pa, grid_of(ns, range));
    else if (*sample) cmd_sample(g, pa, n_single, sweeps, step, bins, direct, report_path);
    else if (*verify) return cmd_verify(g);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
