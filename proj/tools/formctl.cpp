// formctl: command-line front end for the formation library. Subcommands
// validate systems, simulate the gradient flow, compute partitions and
// spectral reports, enumerate stable target orbits, and run seeded Monte
// Carlo basin studies. Machine-readable JSON goes to stdout; domain errors
// are serialized as {"error": {...}} with exit code 1; usage errors exit 2.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "formation/dynamics.hpp"
#include "formation/errors.hpp"
#include "formation/io.hpp"
#include "formation/spectral.hpp"

#include "plot.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace formation;

namespace {

struct CommonOptions {
  std::string system_path;
  std::string config_path;
  double align_tol = kDefaultAlignTol;
  double zero_tol = kDefaultZeroTol;
  double eq_tol = kDefaultEquilibriumTol;
  std::string out_dir;
};

FormationSystem load_system(const std::string& path) {
  return system_from_json(load_json_file(path));
}

Configuration load_config(const std::string& path) {
  return configuration_from_json(load_json_file(path));
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) raise(errc::io_error, "cannot create output directory " + dir);
}

void write_svg_file(const std::string& path, const FormationSystem& sys,
                    const Configuration& p,
                    const std::optional<IndependentPartition>& part = std::nullopt) {
  std::ofstream out(path);
  if (!out) raise(errc::io_error, "cannot write " + path);
  plot::write_svg(out, sys, p, part);
}

EdgeBias parse_bias(const std::string& spec) {
  EdgeBias bias;
  if (spec.empty()) return bias;
  std::size_t pos = 0;
  while (pos < spec.size()) {
    const std::size_t comma = spec.find(',', pos);
    const std::string item = spec.substr(pos, comma == std::string::npos
                                                  ? std::string::npos
                                                  : comma - pos);
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos)
      raise(errc::io_error, "bias entries look like \"1-2=0.05\": " + item);
    bias[edge_from_key(item.substr(0, eq))] = std::stod(item.substr(eq + 1));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return bias;
}

int threads_from_env() {
  if (const char* env = std::getenv("FORMCTL_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 0;  // auto
}

int run_validate(const CommonOptions& opt) {
  const auto sys = load_system(opt.system_path);
  json report = {{"valid", true},
                 {"n", sys.vertex_count()},
                 {"edges", sys.graph.edges().size()},
                 {"stable_orbit_count", 1L << (sys.vertex_count() - 2)}};
  if (!opt.config_path.empty()) {
    const auto p = load_config(opt.config_path);
    const auto pred = framework_predicates(sys.graph, p, opt.align_tol);
    report["predicates"] = {{"strongly_rigid", pred.strongly_rigid},
                            {"line_configuration", pred.line_configuration},
                            {"rigidity_rank", pred.rigidity_rank},
                            {"infinitesimally_rigid", pred.infinitesimally_rigid}};
  }
  std::cout << report.dump(2) << "\n";
  return 0;
}

int run_simulate(const CommonOptions& opt, const std::string& init_path,
                 bool random_init, std::uint64_t seed, double box,
                 const IntegratorSettings& settings) {
  const auto sys = load_system(opt.system_path);
  Configuration p0;
  if (random_init) {
    auto rng = trial_generator(seed, 0);
    p0 = sample_admissible_configuration(sys, rng, box);
  } else {
    p0 = load_config(init_path);
  }

  ensure_out_dir(opt.out_dir);
  const auto traj = integrate(sys, p0, settings);
  {
    std::ofstream csv(fs::path(opt.out_dir) / "trajectory.csv");
    if (!csv) raise(errc::io_error, "cannot write trajectory.csv");
    write_trajectory_csv(csv, traj);
  }
  write_svg_file(fs::path(opt.out_dir) / "initial.svg", sys, p0);
  write_svg_file(fs::path(opt.out_dir) / "terminal.svg", sys, traj.terminal());

  const auto orbits = enumerate_target_orbits(sys);
  const auto outcome = classify_outcome(
      sys, orbits, traj.terminal(),
      traj.stop_reason == StopReason::gradient_threshold, opt.align_tol);

  json report = {
      {"steps", traj.times.size() - 1},
      {"t_final", traj.times.back()},
      {"grad_norm", traj.gradient_norms.back()},
      {"terminal_class", to_string(outcome.cls)},
      {"terminal", configuration_to_json(traj.terminal())},
  };
  if (outcome.orbit_index) report["orbit_index"] = *outcome.orbit_index;
  save_json_file(fs::path(opt.out_dir) / "outcome.json", report);
  std::cout << report.dump(2) << "\n";
  return 0;
}

int run_partition(const CommonOptions& opt) {
  const auto sys = load_system(opt.system_path);
  const auto p = load_config(opt.config_path);
  const auto part = independent_partition(sys.graph, p, opt.align_tol);
  const json report = partition_report(part);
  if (!opt.out_dir.empty()) {
    ensure_out_dir(opt.out_dir);
    save_json_file(fs::path(opt.out_dir) / "partition.json", report);
    write_svg_file(fs::path(opt.out_dir) / "partition.svg", sys, p, part);
  }
  std::cout << report.dump(2) << "\n";
  return 0;
}

int run_signature(const CommonOptions& opt) {
  const auto sys = load_system(opt.system_path);
  const auto p = load_config(opt.config_path);
  const auto direct = signature_of(hessian(sys, p), opt.zero_tol);
  const auto mbif = mbif_signature(sys, p, opt.align_tol, opt.zero_tol);
  json report = {
      {"signature", json::array({direct.n_plus, direct.n_minus, direct.n_zero})},
      {"mbif", json::array({mbif.total.n_plus, mbif.total.n_minus, mbif.total.n_zero})},
      {"mbif_consistent", mbif.total.n_plus == direct.n_plus &&
                              mbif.total.n_minus == direct.n_minus},
      {"partition", partition_report(mbif.partition)}};
  std::cout << report.dump(2) << "\n";
  return 0;
}

int run_classify(const CommonOptions& opt) {
  const auto sys = load_system(opt.system_path);
  const auto p = load_config(opt.config_path);
  const auto cls = classify_orbit(sys, p, opt.zero_tol, opt.align_tol, opt.eq_tol);
  const auto mbif = mbif_signature(sys, p, opt.align_tol, opt.zero_tol);
  std::cout << spectral_report(cls.signature, cls.stability, mbif).dump(2) << "\n";
  return 0;
}

int run_mbif_check(const CommonOptions& opt, long samples, std::uint64_t seed,
                   double box, bool from_equilibria) {
  const auto sys = load_system(opt.system_path);
  json rows = json::array();
  long agree = 0;
  for (long s = 0; s < samples; ++s) {
    auto rng = trial_generator(seed, static_cast<std::uint64_t>(s));
    Configuration p = sample_admissible_configuration(sys, rng, box);
    if (from_equilibria) p = find_equilibrium(sys, p);
    const auto direct = signature_of(hessian(sys, p), opt.zero_tol);
    const auto mbif = mbif_signature(sys, p, opt.align_tol, opt.zero_tol);
    const bool ok = mbif.total.n_plus == direct.n_plus &&
                    mbif.total.n_minus == direct.n_minus;
    if (ok) ++agree;
    rows.push_back(
        {{"sample", s},
         {"direct", json::array({direct.n_plus, direct.n_minus, direct.n_zero})},
         {"mbif", json::array({mbif.total.n_plus, mbif.total.n_minus,
                               mbif.total.n_zero})},
         {"agree", ok}});
  }
  const std::string summary = "mbif-check: " + std::to_string(agree) + "/" +
                              std::to_string(samples) + " samples agree";
  json report = {{"samples", rows},
                 {"agree", agree},
                 {"total", samples},
                 {"mode", from_equilibria ? "equilibria" : "random"},
                 {"summary", summary}};
  std::cout << report.dump(2) << "\n";
  std::cerr << summary << "\n";
  return 0;
}

int run_stable_orbits(const CommonOptions& opt) {
  const auto sys = load_system(opt.system_path);
  const auto orbits = enumerate_target_orbits(sys);
  json list = json::array();
  for (std::size_t i = 0; i < orbits.size(); ++i) {
    const auto cls = classify_orbit(sys, orbits[i], opt.zero_tol, opt.align_tol);
    list.push_back({{"index", i},
                    {"configuration", configuration_to_json(orbits[i])},
                    {"class", to_string(cls.stability)},
                    {"signature",
                     json::array({cls.signature.n_plus, cls.signature.n_minus,
                                  cls.signature.n_zero})}});
  }
  json report = {{"count", orbits.size()}, {"orbits", list}};
  if (!opt.out_dir.empty()) {
    ensure_out_dir(opt.out_dir);
    save_json_file(fs::path(opt.out_dir) / "stable_orbits.json", report);
    for (std::size_t i = 0; i < orbits.size(); ++i)
      write_svg_file(fs::path(opt.out_dir) / ("orbit_" + std::to_string(i) + ".svg"),
                     sys, orbits[i]);
  }
  std::cout << report.dump(2) << "\n";
  return 0;
}

int run_montecarlo(const CommonOptions& opt, long trials, std::uint64_t seed,
                   double box, const IntegratorSettings& settings) {
  const auto sys = load_system(opt.system_path);
  const auto stats = monte_carlo(sys, trials, seed, box, settings, threads_from_env());
  const json report = monte_carlo_report(stats);
  if (!opt.out_dir.empty()) {
    ensure_out_dir(opt.out_dir);
    save_json_file(fs::path(opt.out_dir) / "montecarlo.json", report);
  }
  std::cout << report.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"formation control on triangulated Laman graphs"};
  app.require_subcommand(1);

  CommonOptions opt;
  std::string init_path, bias_spec, method = "rk45";
  bool random_init = false, from_equilibria = false;
  std::uint64_t seed = 0;
  double box = 3.0;
  long trials = 100, samples = 100;
  IntegratorSettings settings;

  auto add_system = [&](CLI::App* cmd) {
    cmd->add_option("--system", opt.system_path, "system JSON file")
        ->required()
        ->check(CLI::ExistingFile);
  };
  auto add_tolerances = [&](CLI::App* cmd) {
    cmd->add_option("--align-tol", opt.align_tol,
                    "collinearity tolerance (default 1e-9)");
    cmd->add_option("--zero-tol", opt.zero_tol,
                    "eigenvalue zero threshold (default 1e-8)");
    cmd->add_option("--eq-tol", opt.eq_tol,
                    "equilibrium gradient tolerance (default 1e-8)");
  };
  auto add_integrator = [&](CLI::App* cmd) {
    cmd->add_option("--method", method, "integrator: rk45 or rk4 (default rk45)");
    cmd->add_option("--dt", settings.dt, "fixed step size for rk4 (default 1e-2)");
    cmd->add_option("--rtol", settings.rel_tol,
                    "rk45 relative tolerance (default 1e-8)");
    cmd->add_option("--atol", settings.abs_tol,
                    "rk45 absolute tolerance (default 1e-10)");
    cmd->add_option("--tmax", settings.t_max, "time horizon (default 1e4)");
    cmd->add_option("--gradstop", settings.grad_stop,
                    "stop when the field norm drops below (default 1e-6)");
    cmd->add_option("--max-steps", settings.max_steps,
                    "accepted step limit (default 1e6)");
    cmd->add_option("--stride", settings.record_stride,
                    "sampling stride (default 1)");
    cmd->add_option("--bias", bias_spec,
                    "per-edge distance bias, e.g. \"1-2=0.05,2-3=-0.01\"");
  };

  auto* validate = app.add_subcommand("validate", "validate a system file");
  add_system(validate);
  validate->add_option("--config", opt.config_path, "optional configuration")
      ->check(CLI::ExistingFile);
  add_tolerances(validate);

  auto* simulate = app.add_subcommand("simulate", "integrate the gradient flow");
  add_system(simulate);
  simulate->add_option("--init", init_path, "initial configuration JSON")
      ->check(CLI::ExistingFile);
  simulate->add_flag("--random", random_init, "sample the initial configuration");
  simulate->add_option("--seed", seed, "seed for --random");
  simulate->add_option("--box", box, "sampling box extent");
  simulate->add_option("--out", opt.out_dir, "output directory")->required();
  add_integrator(simulate);
  add_tolerances(simulate);

  auto* partition = app.add_subcommand("partition", "independent edge partition");
  add_system(partition);
  partition->add_option("--config", opt.config_path, "configuration JSON")
      ->required()
      ->check(CLI::ExistingFile);
  partition->add_option("--out", opt.out_dir, "output directory for SVG/JSON");
  add_tolerances(partition);

  auto* signature = app.add_subcommand("signature", "Hessian signature report");
  add_system(signature);
  signature->add_option("--config", opt.config_path, "configuration JSON")
      ->required()
      ->check(CLI::ExistingFile);
  add_tolerances(signature);

  auto* classify = app.add_subcommand("classify", "stability of a critical orbit");
  add_system(classify);
  classify->add_option("--config", opt.config_path, "equilibrium configuration")
      ->required()
      ->check(CLI::ExistingFile);
  add_tolerances(classify);

  auto* mbif = app.add_subcommand("mbif-check",
                                  "compare block and direct signatures");
  add_system(mbif);
  mbif->add_option("--random", samples, "number of sampled configurations");
  mbif->add_option("--seed", seed, "sampling seed");
  mbif->add_option("--box", box, "sampling box extent");
  mbif->add_flag("--equilibria", from_equilibria,
                 "flow each sample to an equilibrium first");
  add_tolerances(mbif);

  auto* stable = app.add_subcommand("stable-orbits",
                                    "enumerate the 2^(n-2) target orbits");
  add_system(stable);
  stable->add_option("--out", opt.out_dir, "output directory for SVG/JSON");
  add_tolerances(stable);

  auto* mc = app.add_subcommand("montecarlo", "seeded basin-of-attraction study");
  add_system(mc);
  mc->add_option("--trials", trials, "number of trials")->required();
  mc->add_option("--seed", seed, "master seed");
  mc->add_option("--box", box, "sampling box extent");
  mc->add_option("--out", opt.out_dir, "output directory");
  add_integrator(mc);
  add_tolerances(mc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    if (method == "rk4")
      settings.method = IntegratorMethod::rk4_fixed;
    else if (method == "rk45")
      settings.method = IntegratorMethod::rk45_adaptive;
    else
      raise(errc::invalid_argument, "unknown integrator method: " + method);
    settings.bias = parse_bias(bias_spec);

    if (validate->parsed()) return run_validate(opt);
    if (simulate->parsed()) {
      if (random_init ? !init_path.empty() : init_path.empty())
        raise(errc::invalid_argument, "exactly one of --init or --random required");
      return run_simulate(opt, init_path, random_init, seed, box, settings);
    }
    if (partition->parsed()) return run_partition(opt);
    if (signature->parsed()) return run_signature(opt);
    if (classify->parsed()) return run_classify(opt);
    if (mbif->parsed())
      return run_mbif_check(opt, samples, seed, box, from_equilibria);
    if (stable->parsed()) return run_stable_orbits(opt);
    if (mc->parsed()) return run_montecarlo(opt, trials, seed, box, settings);
  } catch (const Error& e) {
    const json err = {{"error", {{"code", to_string(e.code())}, {"message", e.what()}}}};
    std::cout << err.dump(2) << "\n";
    return 1;
  } catch (const std::exception& e) {
    const json err = {{"error", {{"code", "internal"}, {"message", e.what()}}}};
    std::cout << err.dump(2) << "\n";
    return 1;
  }
  return 2;
}
