// Command-line front end: one subcommand per experiment, JSON results with
// an embedded manifest, CSV for trajectories, sections and point lists.

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <numbers>
#include <sstream>

#include "beltrami/axisym_dynamics.hpp"
#include "beltrami/beltrami_core.hpp"
#include "beltrami/errors.hpp"
#include "beltrami/kac_rice.hpp"
#include "beltrami/melnikov.hpp"
#include "beltrami/rng.hpp"
#include "beltrami/torus_ensemble.hpp"
#include "beltrami/zero_census.hpp"
#include "io.hpp"

using namespace beltrami;
using namespace beltrami::cli;

namespace {

using Vec3 = Eigen::Vector3d;

// Typed parameters of one subcommand. Every registered value is echoed in
// the manifest and turned back into flags by `run --manifest`.
class Command {
 public:
  Command(CLI::App& parent, const std::string& name, const std::string& description)
      : app_(parent.add_subcommand(name, description)), name_(name) {
    add("seed", seed, "64-bit seed");
    add("threads", threads, "worker threads (0: BELTRAMI_THREADS or hardware)");
    app_->add_option("--output,-o", output, "output file, - for stdout")->capture_default_str();
    app_->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  }

  template <class T>
  CLI::Option* add(const std::string& key, T& var, const std::string& description) {
    getters_.emplace_back(key, [&var] { return json(var); });
    return app_->add_option("--" + key, var, description)->capture_default_str();
  }

  json config() const {
    json c = json::object();
    for (const auto& [k, g] : getters_) c[k] = g();
    c["format"] = format;
    return c;
  }

  CLI::App* app() const { return app_; }
  const std::string& name() const { return name_; }

  std::uint64_t seed = 0;
  int threads = 0;
  std::string output = "-";
  std::string format = "json";
  std::function<json()> json_result;
  std::function<CsvTable()> csv_result;  // optional

 private:
  CLI::App* app_;
  std::string name_;
  std::vector<std::pair<std::string, std::function<json()>>> getters_;
};

std::vector<Vec3> triples(const std::vector<double>& flat, const std::string& what) {
  if (flat.empty() || flat.size() % 3 != 0) throw ArgumentError(what + " needs a multiple of three numbers");
  std::vector<Vec3> out;
  for (std::size_t i = 0; i < flat.size(); i += 3) out.emplace_back(flat[i], flat[i + 1], flat[i + 2]);
  return out;
}

Vec3 triple(const std::vector<double>& flat, const std::string& what) {
  if (flat.size() != 3) throw ArgumentError(what + " needs exactly three numbers");
  return {flat[0], flat[1], flat[2]};
}

std::vector<std::uint64_t> seed_range(std::uint64_t first, int count) {
  if (count < 1) throw ArgumentError("--samples must be positive");
  std::vector<std::uint64_t> s(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) s[i] = first + static_cast<std::uint64_t>(i);
  return s;
}

std::vector<std::string> manifest_to_args(const json& m) {
  std::vector<std::string> args = {m.at("command").get<std::string>()};
  for (const auto& [key, value] : m.at("config").items()) {
    args.push_back("--" + key);
    if (value.is_array()) {
      for (const auto& v : value) args.push_back(v.is_string() ? v.get<std::string>() : v.dump());
    } else {
      args.push_back(value.is_string() ? value.get<std::string>() : value.dump());
    }
  }
  return args;
}

struct Cli {
  CLI::App app{"Gaussian random Beltrami field laboratory"};
  std::vector<std::unique_ptr<Command>> commands;
  std::string manifest_path;
  std::string manifest_output;

  Command& add(const std::string& name, const std::string& description) {
    commands.push_back(std::make_unique<Command>(app, name, description));
    return *commands.back();
  }
};

// Parameter storage for every subcommand; lives as long as the parser.
struct Params {
  int N = 25;
  std::vector<double> points = {0.0, 0.0, 0.0};
  int with_coefficients = 0;
  int samples = 2000;
  std::vector<double> x = {0.5, 0.0, 0.0}, y = {0.0, 0.0, 0.0};
  std::string method = "quadrature";
  int order = 40;
  long long mc_samples = 1000000;
  double radius = 8.0, spacing = 0.7, newton_tol = 1e-9;
  int zero_samples = 1;
  int allow_large = 0;
  std::vector<double> x0 = {2.0, 0.0, 1.0};
  double T = 100.0, flow_tol = 1e-10;
  double psi_offset = 1.0, rho = 0.0, theta1 = 0.0, poincare_tol = 1e-12;
  int iterates = 1000, twist_samples = 8;
  int branch = 1;
  double tmax = 40.0, mel_tol = 1e-12, dt = 0.01;
  double eps = 0.01, t0 = 0.0, split_tol = 1e-13;
  int periods = 2;
  int L = 7;
  int torus_L = 9;
  std::vector<double> torus_points = {0.0, 0.0, 0.0};
  int torus_coefficients = 1;
  std::vector<int> kernel_L = {9, 33, 129, 513};
  double kernel_radius = 5.0, kernel_step = 1.25;
  std::vector<double> w = {0.0, 0.0, 0.0};
  int census_L = 33, census_samples = 30;
  double census_spacing = 0.7, census_tol = 1e-10;
  std::vector<int> equi_L = {1, 9, 33, 129, 513};
  int lmax = 6;
  std::string source = "uniform";
  int count = 500;
  double ball = 10.0, big_R = 8.0, small_r = 1.0;
  long long mc_nodes = 200000;
  int sandwich_N = 25;
};

void build(Cli& cli, Params& p) {
  {
    auto& c = cli.add("sample", "sample a field on R^3 and evaluate it at points");
    c.add("N", p.N, "truncation degree");
    c.add("points", p.points, "evaluation points x y z ...")->expected(-1);
    c.add("coefficients", p.with_coefficients, "1: include the coefficients a_lm");
    auto eval = [&p, &c] {
      const auto pts = triples(p.points, "--points");
      double r = 0.0;
      for (const Vec3& x : pts) r = std::max(r, x.norm());
      const auto coeffs = field::sample_coefficients(p.N, c.seed);
      const field::BeltramiField f(coeffs, r + 1.0);
      std::vector<field::FieldJet> jets;
      for (const Vec3& x : pts) jets.push_back(f.jet(x));
      return std::pair{coeffs, jets};
    };
    c.json_result = [&p, eval] {
      const auto [coeffs, jets] = eval();
      json vals = json::array();
      for (const auto& j : jets)
        vals.push_back({{"x", to_json(j.x)}, {"u", to_json(j.u)}, {"grad", to_json(j.grad)},
                        {"divergence", j.divergence()}, {"curl_residual", (j.curl() - j.u).norm()}});
      json r = {{"truncation", p.N}, {"values", vals}};
      if (p.with_coefficients) r["coefficients"] = coeffs.a;
      return r;
    };
    c.csv_result = [eval] {
      const auto [coeffs, jets] = eval();
      CsvTable t{{"x", "y", "z", "u1", "u2", "u3"}, {}};
      for (const auto& j : jets) t.rows.push_back({j.x(0), j.x(1), j.x(2), j.u(0), j.u(1), j.u(2)});
      return t;
    };
  }
  {
    auto& c = cli.add("covariance", "empirical covariance against the kernel");
    c.add("N", p.N, "truncation degree");
    c.add("samples", p.samples, "number of fields");
    c.add("x", p.x, "first point")->expected(3);
    c.add("y", p.y, "second point")->expected(3);
    c.json_result = [&p, &c] {
      const Vec3 x = triple(p.x, "--x"), y = triple(p.y, "--y");
      const auto emp = field::empirical_covariance(p.N, p.samples, x, y, c.seed, c.threads);
      const auto ker = field::covariance_kernel(x - y);
      return json{{"empirical", to_json(emp)}, {"kernel", to_json(ker)},
                  {"max_abs_difference", (emp - ker).cwiseAbs().maxCoeff()},
                  {"tolerance", 5.0 / std::sqrt(static_cast<double>(p.samples))}};
    };
  }
  {
    auto& c = cli.add("nu-z", "Kac-Rice zero density");
    c.add("method", p.method, "quadrature or montecarlo")->check(CLI::IsMember({"quadrature", "montecarlo"}));
    c.add("order", p.order, "Gauss-Hermite nodes per axis");
    c.add("samples", p.mc_samples, "Monte Carlo samples");
    c.json_result = [&p, &c] {
      const bool quad = p.method == "quadrature";
      const auto est = kac_rice::nu_z(quad ? kac_rice::DensityMethod::quadrature : kac_rice::DensityMethod::monte_carlo,
                                      quad ? p.order : p.mc_samples, c.seed, c.threads);
      const auto sig = kac_rice::sigma_matrices();
      return json{{"nu_z", est.value},
                  {"standard_error", est.standard_error},
                  {"method", kac_rice::to_string(est.method)},
                  {"budget", est.samples_or_nodes},
                  {"seed", c.seed},
                  {"prefactor", kac_rice::density_prefactor()},
                  {"det_sigma_prime", sig.det_sigma_prime_exact}};
    };
  }
  {
    auto& c = cli.add("zeros", "zeros of sampled fields in a ball");
    c.add("N", p.N, "truncation degree");
    c.add("radius", p.radius, "ball radius");
    c.add("spacing", p.spacing, "seed lattice spacing");
    c.add("newton-tol", p.newton_tol, "Newton tolerance");
    c.add("samples", p.zero_samples, "number of fields (seeds seed, seed+1, ...)");
    c.add("allow-large-radius", p.allow_large, "1: permit radius > 10");
    auto one = [&p, &c] {
      const auto coeffs = field::sample_coefficients(p.N, c.seed);
      const field::BeltramiField f(coeffs, p.radius + 3.0 * p.spacing);
      zeros::ZeroSearchOptions opt;
      opt.threads = c.threads;
      opt.provenance = {"beltrami", p.N, c.seed};
      return zeros::find_zeros([&f](const Vec3& x) { return f.jet(x); }, zeros::Ball{Vec3::Zero(), p.radius},
                               p.spacing, p.newton_tol, opt);
    };
    c.json_result = [&p, &c, one] {
      if (p.zero_samples == 1) return to_json(one());
      const auto seeds = seed_range(c.seed, p.zero_samples);
      zeros::ZeroDensityOptions opt{p.spacing, p.newton_tol, p.allow_large != 0, c.threads};
      const auto d = zeros::empirical_zero_density(p.N, p.zero_samples, p.radius, seeds, opt);
      return json{{"mean_density", d.mean_density}, {"standard_error", d.standard_error},
                  {"counts", d.counts}, {"volume", d.volume}, {"seeds", seeds}};
    };
    c.csv_result = [one] {
      const auto zs = one();
      CsvTable t{{"x", "y", "z", "residual", "jacobian_det"}, {}};
      for (std::size_t i = 0; i < zs.size(); ++i)
        t.rows.push_back({zs.points[i](0), zs.points[i](1), zs.points[i](2), zs.residuals[i], zs.jacobian_dets[i]});
      return t;
    };
  }
  {
    auto& c = cli.add("flow", "integrate the axisymmetric field");
    c.add("x0", p.x0, "initial point")->expected(3);
    c.add("T", p.T, "integration time");
    c.add("tol", p.flow_tol, "error tolerance");
    auto run = [&p] {
      return axisym::integrate_flow(axisym::axi_field, triple(p.x0, "--x0"), p.T, p.flow_tol, axisym::axi_domain);
    };
    c.json_result = [run] {
      const auto tr = run();
      const auto c0 = axisym::to_cylindrical(tr.states.front());
      const double psi0 = axisym::stream_function(c0(0), c0(1)).value;
      double drift = 0.0;
      json states = json::array();
      for (std::size_t i = 0; i < tr.states.size(); ++i) {
        const auto c = axisym::to_cylindrical(tr.states[i]);
        drift = std::max(drift, std::abs(axisym::stream_function(c(0), c(1)).value - psi0));
        states.push_back({{"t", tr.times[i]}, {"x", to_json(tr.states[i])}});
      }
      return json{{"psi_drift", drift}, {"exited_domain", tr.exited_domain},
                  {"stats", {{"steps", tr.stats.steps}, {"rejected", tr.stats.rejected}, {"tolerance", tr.stats.tolerance}}},
                  {"trajectory", states}};
    };
    c.csv_result = [run] {
      const auto tr = run();
      CsvTable t{{"t", "x", "y", "z"}, {}};
      for (std::size_t i = 0; i < tr.states.size(); ++i)
        t.rows.push_back({tr.times[i], tr.states[i](0), tr.states[i](1), tr.states[i](2)});
      return t;
    };
  }
  {
    auto& c = cli.add("poincare", "return map, rotation number and twist on a torus level");
    c.add("psi-offset", p.psi_offset, "level psi0 minus the separatrix value, in (0, 2)");
    c.add("iterates", p.iterates, "number of returns");
    c.add("rho", p.rho, "chart coordinate rho of the start");
    c.add("theta1", p.theta1, "chart coordinate theta1 of the start");
    c.add("tol", p.poincare_tol, "error tolerance");
    c.add("twist-samples", p.twist_samples, "theta1 samples for the twist integral");
    auto section = [&p] {
      const double psi0 = axisym::separatrix_level() + p.psi_offset;
      const axisym::LevelChart chart(psi0, p.poincare_tol);
      const auto start = chart.from_chart(p.rho, p.theta1);
      const auto orbit = axisym::poincare_orbit(axisym::axi_field, start(0), start(1), p.iterates, p.poincare_tol);
      CsvTable t{{"rho", "theta1", "pi1", "pi2"}, {}};
      axisym::Vec2 prev(p.rho, p.theta1);
      for (const auto& h : orbit.hits) {
        const auto next = chart.to_chart(h.z, h.r);
        t.rows.push_back({prev(0), prev(1), next(0), next(1)});
        prev = next;
      }
      return std::pair{t, orbit.transversality_lost};
    };
    c.json_result = [&p, section] {
      const double psi0 = axisym::separatrix_level() + p.psi_offset;
      const auto rot = axisym::rotation_number(psi0, p.iterates, p.theta1, p.poincare_tol);
      const double twist = axisym::estimate_twist(psi0, 1e-4, p.twist_samples, p.poincare_tol);
      const auto [t, lost] = section();
      return json{{"level", psi0}, {"rotation_number", rot.omega}, {"convergence", rot.convergence},
                  {"converged", rot.converged}, {"period_prediction", rot.period_prediction}, {"twist", twist},
                  {"transversality_lost", lost}, {"section", t.rows}};
    };
    c.csv_result = [section] { return section().first; };
  }
  {
    auto& c = cli.add("melnikov", "separatrix and Melnikov coefficients");
    c.add("branch", p.branch, "separatrix branch 1 or 2");
    c.add("tmax", p.tmax, "half window T_max");
    c.add("tol", p.mel_tol, "error tolerance");
    c.add("dt", p.dt, "sample step");
    c.json_result = [&p] {
      const auto m = melnikov::melnikov_coefficients(p.branch, p.tmax, p.mel_tol, p.dt);
      const auto o = melnikov::separatrix_orbit(p.branch, p.tmax, p.mel_tol, p.dt);
      return json{{"k", m.branch}, {"a", m.a}, {"b", m.b}, {"T_max", m.T_max}, {"tol", m.tol},
                  {"tail_bound", m.tail_bound}, {"r_k", o.r_k}, {"hamiltonian_drift", o.hamiltonian_drift},
                  {"saddle_exponent", o.saddle_exponent}};
    };
    c.csv_result = [&p] {
      const auto o = melnikov::separatrix_orbit(p.branch, p.tmax, p.mel_tol, p.dt);
      CsvTable t{{"t", "Z", "R"}, {}};
      for (std::size_t i = 0; i < o.t.size(); ++i) t.rows.push_back({o.t[i], o.Z[i], o.R[i]});
      return t;
    };
  }
  {
    auto& c = cli.add("splitting", "measured manifold splitting against the Melnikov prediction");
    c.add("eps", p.eps, "perturbation size in [0, 0.05]");
    c.add("branch", p.branch, "separatrix branch 1 or 2");
    c.add("t0", p.t0, "section phase");
    c.add("tol", p.split_tol, "error tolerance");
    c.add("periods", p.periods, "periods between the local manifolds and the section");
    c.json_result = [&p] {
      const auto s = melnikov::splitting_check(p.eps, p.branch, p.t0, p.split_tol, p.periods);
      return json{{"measured", s.measured}, {"predicted", s.predicted}, {"ratio", s.ratio},
                  {"unstable_point", {s.unstable_point(0), s.unstable_point(1)}},
                  {"stable_point", {s.stable_point(0), s.stable_point(1)}},
                  {"source_orbit", {s.source_orbit(0), s.source_orbit(1)}},
                  {"target_orbit", {s.target_orbit(0), s.target_orbit(1)}}};
    };
  }
  {
    auto& c = cli.add("shell", "lattice points with |k|^2 = L");
    c.add("L", p.L, "shell index");
    c.json_result = [&p] {
      const auto s = torus::lattice_shell(p.L);
      json pts = json::array();
      for (const auto& k : s.points) pts.push_back({k(0), k(1), k(2)});
      return json{{"L", s.L}, {"d_L", s.d}, {"admissible", s.admissible}, {"points", pts}};
    };
    c.csv_result = [&p] {
      const auto s = torus::lattice_shell(p.L);
      CsvTable t{{"k1", "k2", "k3"}, {}};
      for (const auto& k : s.points) t.rows.push_back({double(k(0)), double(k(1)), double(k(2))});
      return t;
    };
  }
  {
    auto& c = cli.add("torus-sample", "sample a torus field and evaluate it");
    c.add("L", p.torus_L, "shell index");
    c.add("points", p.torus_points, "evaluation points x y z ...")->expected(-1);
    c.add("coefficients", p.torus_coefficients, "1: include the coefficients");
    c.json_result = [&p, &c] {
      const auto s = torus::sample_torus_field(p.torus_L, c.seed);
      const torus::TorusField f(s);
      json vals = json::array();
      for (const Vec3& x : triples(p.torus_points, "--points")) {
        const auto j = f.jet(x);
        vals.push_back({{"x", to_json(x)}, {"u", to_json(j.u)}, {"grad", to_json(j.grad)}});
      }
      json r = {{"L", s.L}, {"d_L", s.modes.size()}, {"values", vals}};
      if (p.torus_coefficients) {
        json modes = json::array();
        for (std::size_t i = 0; i < s.modes.size(); ++i)
          modes.push_back({{"k", {s.modes[i](0), s.modes[i](1), s.modes[i](2)}},
                           {"re", s.coefficients[i].real()}, {"im", s.coefficients[i].imag()}});
        r["modes"] = modes;
      }
      return r;
    };
  }
  {
    auto& c = cli.add("torus-kernel", "rescaled torus kernel against the R^3 kernel");
    c.add("L", p.kernel_L, "admissible shell indices")->expected(-1);
    c.add("radius", p.kernel_radius, "grid ball radius");
    c.add("step", p.kernel_step, "grid step");
    c.add("w", p.w, "kernel argument reported per L")->expected(3);
    c.json_result = [&p, &c] {
      const auto grid = torus::ball_grid(p.kernel_radius, p.kernel_step);
      const auto kc = torus::kernel_convergence_diagnostic(p.kernel_L, grid, c.threads);
      const Vec3 w = triple(p.w, "--w");
      json rows = json::array();
      for (std::size_t i = 0; i < kc.L.size(); ++i)
        rows.push_back({{"L", kc.L[i]}, {"sup_error", kc.sup_error[i]},
                        {"kernel_at_w", to_json(torus::rescaled_kernel(kc.L[i], w))}});
      return json{{"grid_points", grid.size()}, {"reference_at_w", to_json(field::covariance_kernel(w))},
                  {"rows", rows}};
    };
  }
  {
    auto& c = cli.add("torus-zeros", "zero counts of torus fields");
    c.add("L", p.census_L, "admissible shell index");
    c.add("samples", p.census_samples, "number of fields (seeds seed, seed+1, ...)");
    c.add("spacing", p.census_spacing, "seed spacing times sqrt(L)");
    c.add("newton-tol", p.census_tol, "Newton tolerance");
    c.json_result = [&p, &c] {
      if (p.census_samples == 1)
        return to_json(torus::torus_zeros(torus::sample_torus_field(p.census_L, c.seed), p.census_spacing,
                                          p.census_tol, c.threads));
      const auto seeds = seed_range(c.seed, p.census_samples);
      const auto r = torus::torus_zero_census(p.census_L, seeds, {p.census_spacing, p.census_tol, c.threads});
      return json{{"L", r.L}, {"seeds", r.seeds}, {"counts", r.counts}, {"mean_count", r.mean_count},
                  {"standard_error", r.standard_error}, {"scaled", r.scaled}, {"scaled_error", r.scaled_error}};
    };
  }
  {
    auto& c = cli.add("equidistribution", "harmonic discrepancy of lattice shells");
    c.add("L", p.equi_L, "shell indices")->expected(-1);
    c.add("lmax", p.lmax, "largest harmonic degree");
    c.json_result = [&p] {
      json rows = json::array();
      for (int L : p.equi_L)
        rows.push_back({{"L", L}, {"admissible", torus::is_admissible(L)},
                        {"discrepancy", torus::equidistribution_discrepancy(L, p.lmax)}});
      return json{{"rows", rows}};
    };
  }
  {
    auto& c = cli.add("sandwich", "small-ball sandwich bounds for a point set");
    c.add("source", p.source, "uniform or field")->check(CLI::IsMember({"uniform", "field"}));
    c.add("count", p.count, "number of uniform points");
    c.add("ball", p.ball, "radius of the ball holding the uniform points");
    c.add("R", p.big_R, "counting radius");
    c.add("r", p.small_r, "window radius");
    c.add("mc", p.mc_nodes, "Monte Carlo nodes");
    c.add("N", p.sandwich_N, "truncation degree for --source field");
    c.json_result = [&p, &c] {
      std::vector<Vec3> pts;
      if (p.source == "uniform") {
        NormalStream s(c.seed, kDomainSynthetic, 0);
        while (static_cast<int>(pts.size()) < p.count) {
          const Vec3 v(2 * s.uniform() - 1, 2 * s.uniform() - 1, 2 * s.uniform() - 1);
          if (v.norm() < 1.0) pts.push_back(p.ball * v);
        }
      } else {
        const double reach = p.big_R + p.small_r;
        const field::BeltramiField f(field::sample_coefficients(p.sandwich_N, c.seed), reach + 2.1);
        zeros::ZeroSearchOptions opt;
        opt.threads = c.threads;
        pts = zeros::find_zeros([&f](const Vec3& x) { return f.jet(x); }, zeros::Ball{Vec3::Zero(), reach}, 0.7,
                                1e-9, opt)
                  .points;
      }
      const auto s = zeros::sandwich_check(pts, p.big_R, p.small_r, p.mc_nodes, c.seed);
      return json{{"points", pts.size()}, {"lower", s.lower}, {"mid", s.mid}, {"upper", s.upper},
                  {"lower_error", s.lower_error}, {"upper_error", s.upper_error},
                  {"exact_lower", s.exact_lower}, {"exact_upper", s.exact_upper}, {"holds", s.holds}};
    };
  }
  auto* run = cli.app.add_subcommand("run", "re-run a saved manifest");
  run->add_option("--manifest", cli.manifest_path, "manifest JSON file")->required();
  run->add_option("--output,-o", cli.manifest_output, "output path for the re-run");
}

int execute(Command& c) {
  if (c.format == "csv") {
    if (!c.csv_result) throw ArgumentError(c.name() + " has no CSV output");
    write_output(c.output, c.csv_result().str());
    // the manifest goes next to the table
    const json m = manifest(c.name(), c.config());
    if (c.output == "-")
      std::cerr << m.dump(2) << '\n';
    else
      write_output(c.output + ".manifest.json", m.dump(2) + "\n");
    return 0;
  }
  json doc = manifest(c.name(), c.config());
  doc["result"] = c.json_result();
  write_output(c.output, doc.dump(2) + "\n");
  return 0;
}

int parse_and_run(const std::vector<std::string>& args);

int dispatch(Cli& cli) {
  for (auto& c : cli.commands)
    if (c->app()->parsed()) return execute(*c);
  if (cli.app.get_subcommand("run")->parsed()) {
    std::ifstream f(cli.manifest_path);
    if (!f) throw ArgumentError("cannot read manifest " + cli.manifest_path);
    const json m = json::parse(f);
    std::vector<std::string> args = manifest_to_args(m);
    if (!cli.manifest_output.empty()) {
      args.push_back("--output");
      args.push_back(cli.manifest_output);
    }
    return parse_and_run(args);
  }
  std::cerr << cli.app.help();
  return 2;
}

int parse_and_run(const std::vector<std::string>& args) {
  Cli cli;
  Params p;
  build(cli, p);
  cli.app.require_subcommand(1);
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    cli.app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return cli.app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return cli.app.exit(e);
  } catch (const CLI::ParseError& e) {
    cli.app.exit(e);
    return 2;
  }
  try {
    return dispatch(cli);
  } catch (const ArgumentError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return parse_and_run(args);
}
