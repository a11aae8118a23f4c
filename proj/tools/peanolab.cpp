#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "peanolab/beads.h"
#include "peanolab/conescan.h"
#include "peanolab/corrpath.h"
#include "peanolab/errors.h"
#include "peanolab/exponents.h"
#include "peanolab/mating.h"
#include "peanolab/parallel.h"
#include "peanolab/svg.h"
#include "peanolab/verify.h"

namespace fs = std::filesystem;
using namespace peanolab;

namespace {

enum ExitCode { kPass = 0, kRuntime = 1, kUsage = 2, kClaimFailure = 3 };

// Raised for bad option values found after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::map<std::string, PathKind> kKinds{{"brownian", PathKind::brownian}, {"lattice", PathKind::lattice}};

struct SimulateOpts {
  double kappa_prime = 6.0;
  Index steps = Index{1} << 20;
  double dt = 1.0;
  std::uint64_t seed = 1;
  std::uint64_t trial = 0;
  PathKind kind = PathKind::lattice;
  std::string output;
};

struct WindowOpts {
  double a = 0.0;
  double b = 1.0;

  Window resolve(const PathPair& p) const {
    const auto at = [&](double f) { return static_cast<Index>(std::llround(f * static_cast<double>(p.steps()))); };
    return {at(a), at(b)};
  }
};

struct ConescanOpts {
  std::string input;
  WindowOpts window;
  int eps_min_exp = -12;
  int eps_max_exp = -3;
  std::string output_dir = ".";
};

struct BeadsOpts {
  std::string input;
  Index origin = 0;
  std::size_t bead = 0;
  std::string output_dir = ".";
};

struct MateOpts {
  std::string input;
  WindowOpts window;
  bool coarsen = false;
  std::string output_dir = ".";
};

struct ExponentsOpts {
  PathEnsemble ensemble;
  std::string output_dir = ".";
  std::string report = "exponents.json";
  bool plots = false;
};

struct VerifyOpts {
  VerifyConfig config;
  std::string output_dir = ".";
  std::string report = "report.json";
  bool plots = false;
};

void add_window(CLI::App* sub, WindowOpts& w) {
  sub->add_option("--window-a", w.a, "Window start as a fraction of the path")->check(CLI::Range(0.0, 1.0));
  sub->add_option("--window-b", w.b, "Window end as a fraction of the path")->check(CLI::Range(0.0, 1.0));
}

void check_window_fractions(const WindowOpts& w) {
  if (!(w.a < w.b)) throw UsageError("--window-a must be below --window-b");
}

fs::path prepare_dir(const std::string& dir) {
  const fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw FormatError("cannot create output directory " + dir + ": " + ec.message());
  return p;
}

std::ofstream open_out(const fs::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw FormatError("cannot open " + file.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const fs::path& file) {
  out.close();
  if (!out) throw FormatError("failed writing " + file.string());
  std::cerr << "wrote " << file.string() << '\n';
}

PlotLabels labels_for(const ClaimResult& r) {
  PlotLabels l;
  l.title = r.claim_id;
  switch (r.criterion) {
    case 2:
    case 3:
      l.x_axis = "log(1/eps)";
      l.y_axis = "log N_eps";
      break;
    case 4:
      l.x_axis = "log eps";
      l.y_axis = "log P(eps)";
      break;
    default:
      l.x_axis = "log x";
      l.y_axis = "log P[X >= x]";
  }
  return l;
}

void write_outputs(const VerificationReport& report, const fs::path& dir, const std::string& name, bool plots) {
  const fs::path file = dir / name;
  std::ofstream out = open_out(file);
  write_report_json(report, out);
  finish(out, file);
  if (!plots) return;
  for (const ClaimResult& r : report.claims) {
    if (!r.fit) continue;
    const fs::path svg = dir / (r.claim_id + ".svg");
    std::ofstream s = open_out(svg);
    write_loglog_svg(*r.fit, r.theoretical_value, labels_for(r), s);
    finish(s, svg);
  }
}

void print_claims(const VerificationReport& report) {
  for (const ClaimResult& r : report.claims) {
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.claim_id << " estimate=" << r.estimate
              << " theory=" << r.theoretical_value << " stderr=" << r.stderr_estimate << " tol=" << r.tolerance
              << '\n';
  }
}

int run_simulate(const SimulateOpts& o) {
  const CovSpec spec = build_cov_spec(o.kappa_prime);
  const PathPair p = o.kind == PathKind::lattice ? sample_lattice_pair(spec, o.steps, o.seed, o.trial)
                                                 : sample_brownian_pair(spec, o.steps, o.dt, o.seed, o.trial);
  save_path(p, fs::path(o.output));
  std::cerr << "wrote " << o.output << '\n';
  return kPass;
}

int run_conescan(const ConescanOpts& o) {
  const PathPair p = load_path(fs::path(o.input));
  const Window w = o.window.resolve(p);
  if (w.length() < 1) throw UsageError("window is empty for a path of " + std::to_string(p.steps()) + " steps");
  const fs::path dir = prepare_dir(o.output_dir);
  const std::vector<ConeInterval> maximal = maximal_cone_intervals(p, w);
  const std::vector<double> eps = dyadic_epsilons(w, p.dt, o.eps_min_exp, o.eps_max_exp);

  fs::path file = dir / "intervals.csv";
  std::ofstream out = open_out(file);
  write_intervals_csv(maximal, p.dt, out);
  finish(out, file);

  file = dir / "covering_ancestor_free.csv";
  out = open_out(file);
  write_covering_csv(covering_count(non_cone_set(w, maximal), eps, p.dt), out);
  finish(out, file);

  file = dir / "covering_infima.csv";
  out = open_out(file);
  write_covering_csv(covering_count(simultaneous_infima(p, w.a, w.b), eps, p.dt), out);
  finish(out, file);
  std::cout << maximal.size() << " maximal cone intervals in [" << w.a << ", " << w.b << "]\n";
  return kPass;
}

int run_beads(const BeadsOpts& o) {
  const PathPair p = load_path(fs::path(o.input));
  const BeadLedger ledger = bead_ledger(p, o.origin);
  const fs::path dir = prepare_dir(o.output_dir);
  fs::path file = dir / "ledger.csv";
  std::ofstream out = open_out(file);
  write_ledger_csv(ledger, out);
  finish(out, file);
  if (o.bead >= ledger.records.size()) {
    throw IncompleteError("bead " + std::to_string(o.bead) + " requested but the ledger has " +
                          std::to_string(ledger.records.size()) + " complete beads");
  }
  file = dir / "chordal.csv";
  out = open_out(file);
  write_chordal_csv(chordal_boundary_process(p, ledger.records[o.bead]), out);
  finish(out, file);
  std::cout << ledger.records.size() << " complete beads after index " << o.origin << '\n';
  return kPass;
}

int run_mate(const MateOpts& o) {
  PathPair p = load_path(fs::path(o.input));
  if (o.coarsen && p.kind == PathKind::brownian) p = coarsen_to_lattice(p);
  const Window w = o.window.resolve(p);
  const PlanarMap map = mate_path(p, w);
  const EulerSummary summary = euler_genus(map);
  const fs::path dir = prepare_dir(o.output_dir);
  fs::path file = dir / "map.csv";
  std::ofstream out = open_out(file);
  write_map_csv(map, out);
  finish(out, file);
  file = dir / "map_summary.json";
  out = open_out(file);
  write_map_summary_json(summary, out);
  finish(out, file);
  std::cout << "V=" << summary.V << " E=" << summary.E << " F=" << summary.F << " genus=" << summary.genus << '\n';
  return kPass;
}

int run_exponents(const ExponentsOpts& o) {
  const auto start = std::chrono::steady_clock::now();
  VerificationReport report;
  report.version = library_version();
  report.seed = o.ensemble.seed;
  report.workers = worker_count();
  report.claims = ensemble_claims(o.ensemble);
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  print_claims(report);
  write_outputs(report, prepare_dir(o.output_dir), o.report, o.plots);
  return report.all_pass() ? kPass : kClaimFailure;
}

int run_verify(const VerifyOpts& o) {
  const VerificationReport report =
      verify_all(o.config, [](const std::string& msg) { std::cerr << msg << std::endl; });
  print_claims(report);
  write_outputs(report, prepare_dir(o.output_dir), o.report, o.plots);
  return report.all_pass() ? kPass : kClaimFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"peanolab: correlated path pairs, cone times, beads, mated maps and exponent estimates"};
  app.set_config("--config", "", "INI file with one [section] per subcommand; command-line flags win");
  app.require_subcommand(1);

  SimulateOpts sim;
  CLI::App* simulate = app.add_subcommand("simulate", "Sample a correlated path pair and save it");
  simulate->add_option("--kappa-prime", sim.kappa_prime, "kappa' in (4, 8]");
  simulate->add_option("--steps", sim.steps, "Number of steps")->check(CLI::PositiveNumber);
  simulate->add_option("--dt", sim.dt, "Time step of Brownian paths")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim.seed);
  simulate->add_option("--trial", sim.trial);
  simulate->add_option("--kind", sim.kind)->transform(CLI::CheckedTransformer(kKinds, CLI::ignore_case));
  simulate->add_option("--output", sim.output, "Path file to write")->required();

  ConescanOpts scan;
  CLI::App* conescan = app.add_subcommand("conescan", "Maximal cone intervals and covering counts of a path file");
  conescan->add_option("--input", scan.input, "Path file")->required();
  add_window(conescan, scan.window);
  conescan->add_option("--eps-min-exp", scan.eps_min_exp, "Smallest epsilon is (b-a) dt 2^k");
  conescan->add_option("--eps-max-exp", scan.eps_max_exp, "Largest epsilon is (b-a) dt 2^k");
  conescan->add_option("--output-dir", scan.output_dir);

  BeadsOpts bo;
  CLI::App* beads = app.add_subcommand("beads", "Bead ledger and chordal boundary process of a path file");
  beads->add_option("--input", bo.input, "Path file")->required();
  beads->add_option("--origin", bo.origin, "Index the ledger starts from")->check(CLI::NonNegativeNumber);
  beads->add_option("--bead", bo.bead, "Ledger record to explore");
  beads->add_option("--output-dir", bo.output_dir);

  MateOpts mo;
  CLI::App* mate_cmd = app.add_subcommand("mate", "Mate the two contour trees of a lattice path file");
  mate_cmd->add_option("--input", mo.input, "Path file")->required();
  add_window(mate_cmd, mo.window);
  mate_cmd->add_flag("--coarsen", mo.coarsen, "Coarsen a Brownian path onto the lattice first");
  mate_cmd->add_option("--output-dir", mo.output_dir);

  ExponentsOpts eo;
  PathEnsemble& e = eo.ensemble;
  CLI::App* exponents = app.add_subcommand("exponents", "Covering dimensions and tail exponents of a path ensemble");
  exponents->add_option("--kappa-prime", e.kappa_prime, "kappa' in (4, 8)");
  exponents->add_option("--kind", e.kind)->transform(CLI::CheckedTransformer(kKinds, CLI::ignore_case));
  exponents->add_option("--steps", e.n_steps)->check(CLI::PositiveNumber);
  exponents->add_option("--dt", e.dt)->check(CLI::PositiveNumber);
  exponents->add_option("--seed", e.seed);
  exponents->add_option("--trials", e.paths, "Number of paths")->check(CLI::PositiveNumber);
  exponents->add_option("--window-a", e.window_a)->check(CLI::Range(0.0, 1.0));
  exponents->add_option("--window-b", e.window_b)->check(CLI::Range(0.0, 1.0));
  exponents->add_option("--eps-min-exp", e.eps_min_exponent);
  exponents->add_option("--eps-max-exp", e.eps_max_exponent);
  exponents->add_option("--gap-segment", e.gap_segment, "Steps between infimum restarts")->check(CLI::PositiveNumber);
  exponents->add_option("--gap-x-min", e.gap_x_min, "Lower cutoff of the gap tail fit");
  exponents->add_option("--bootstrap", e.bootstrap_resamples);
  exponents->add_option("--output-dir", eo.output_dir);
  exponents->add_option("--report", eo.report, "Report file name inside the output directory");
  exponents->add_flag("--plots", eo.plots, "Also write one SVG log-log plot per fit");

  VerifyOpts vo;
  VerifyConfig& v = vo.config;
  CLI::App* verify = app.add_subcommand("verify-all", "Run the acceptance suite and write a verification report");
  verify->add_option("--seed", v.seed);
  verify->add_option("--bootstrap", v.bootstrap_resamples);
  verify->add_option("--covariance-kappas", v.covariance_kappas);
  verify->add_option("--covariance-steps", v.covariance_steps)->check(CLI::PositiveNumber);
  verify->add_option("--kappa-prime", v.kappa_prime);
  verify->add_option("--second-kappa-prime", v.second_kappa_prime);
  verify->add_option("--long-paths", v.long_paths)->check(CLI::PositiveNumber);
  verify->add_option("--long-log-steps", v.long_log_steps);
  verify->add_option("--eps-min-exp", v.eps_min_exponent);
  verify->add_option("--eps-max-exp", v.eps_max_exponent);
  verify->add_option("--gap-segment-log-steps", v.gap_segment_log_steps);
  verify->add_option("--gap-x-min", v.gap_x_min);
  verify->add_option("--cone-window-log-steps", v.cone_window_log_steps);
  verify->add_option("--cone-eps-min-log", v.cone_eps_min_log);
  verify->add_option("--cone-eps-max-log", v.cone_eps_max_log);
  verify->add_option("--cone-trials", v.cone_trials);
  verify->add_option("--maps", v.maps)->check(CLI::PositiveNumber);
  verify->add_option("--map-log-steps", v.map_log_steps);
  verify->add_option("--oracle-paths", v.oracle_paths)->check(CLI::PositiveNumber);
  verify->add_option("--oracle-log-steps", v.oracle_log_steps);
  verify->add_option("--beads", v.beads)->check(CLI::PositiveNumber);
  verify->add_option("--bead-path-log-steps", v.bead_path_log_steps);
  verify->add_option("--boltzmann-samples", v.boltzmann_samples);
  verify->add_option("--boltzmann-ell", v.boltzmann_ell);
  verify->add_option("--output-dir", vo.output_dir);
  verify->add_option("--report", vo.report, "Report file name inside the output directory");
  verify->add_flag("--plots", vo.plots, "Also write one SVG log-log plot per fit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& ok) {
    return app.exit(ok);
  } catch (const CLI::FileError& err) {
    app.exit(err);
    return kRuntime;
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return kUsage;
  }

  // range checks the parser cannot express
  try {
    if (*simulate) {
      build_cov_spec(sim.kappa_prime);
    } else if (*conescan) {
      check_window_fractions(scan.window);
      if (scan.eps_min_exp > scan.eps_max_exp) throw UsageError("--eps-min-exp exceeds --eps-max-exp");
    } else if (*mate_cmd) {
      check_window_fractions(mo.window);
    } else if (*exponents) {
      e.validate();
    } else if (*verify) {
      v.validate();
    }
  } catch (const std::exception& err) {
    std::cerr << "usage error: " << err.what() << '\n';
    return kUsage;
  }

  try {
    if (*simulate) return run_simulate(sim);
    if (*conescan) return run_conescan(scan);
    if (*beads) return run_beads(bo);
    if (*mate_cmd) return run_mate(mo);
    if (*exponents) return run_exponents(eo);
    if (*verify) return run_verify(vo);
  } catch (const UsageError& err) {
    std::cerr << "usage error: " << err.what() << '\n';
    return kUsage;
  } catch (const FormatError& err) {
    std::cerr << "format error: " << err.what() << '\n';
    return kRuntime;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kRuntime;
  }
  return kUsage;
}
