// crnldp: command-line front end for network analysis, simulation and action estimates.

#include "crnldp/crnldp.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace crnldp;

namespace {

enum Exit { kOk = 0, kUsage = 1, kInput = 2, kNegative = 3, kNumerical = 4 };

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
}

State parse_state(const std::string& csv, std::size_t d, const char* what) {
  auto x = parse_double_list(csv);
  if (x.size() != d)
    throw Error(std::string(what) + " has " + std::to_string(x.size()) + " entries, network has " +
                std::to_string(d) + " species");
  return x;
}

std::string csv_row(double t, const State& x) {
  std::string s = format_double(t);
  for (double xi : x) s += "," + format_double(xi);
  return s + "\n";
}

std::string csv_header(const Network& net, const char* first) {
  std::string s = first;
  for (const auto& sp : net.species()) s += "," + sp;
  return s + "\n";
}

// Reads "t,x1,...,xd" rows; a leading non-numeric row is taken as a header.
Trajectory read_path_csv(const std::string& path, std::size_t d) {
  std::istringstream in(read_file(path));
  Trajectory tr;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    try {
      row = parse_double_list(line);
    } catch (const Error&) {
      if (tr.size() == 0 && lineno == 1) continue;
      throw ParseError(lineno, 1, "bad path row");
    }
    if (row.size() != d + 1) throw ParseError(lineno, 1, "path row needs t plus one value per species");
    tr.times.push_back(row[0]);
    tr.states.emplace_back(row.begin() + 1, row.end());
  }
  return tr;
}

struct Common {
  std::string file;
  unsigned threads = 0;
};

int cmd_validate(const Common& c) {
  const auto net = load_network(c.file);
  std::cout << "ok: " << net.dimension() << " species, " << net.size() << " reactions, hash "
            << network_hash(net) << "\n";
  return kOk;
}

struct AnalyzeArgs {
  std::string a, json;
  bool require_ase = false;
  std::size_t samples = 200;
  std::uint64_t seed = 1;
  std::optional<double> K2, K3, zeta, c_star, K0;
};

int cmd_analyze(const Common& c, const AnalyzeArgs& args) {
  const auto net = load_network(c.file);
  AnalyzeOptions opt;
  if (!args.a.empty()) {
    auto a = parse_rational_list(args.a);
    if (a.size() != net.dimension()) throw Error("--a needs one entry per species");
    opt.a = WeightVector(std::move(a));
  }
  opt.overrides = {args.K2, args.K3, args.zeta, args.c_star, args.K0};
  opt.empirical_samples = args.samples;
  opt.seed = args.seed;
  const auto an = analyze(net, opt);
  const std::string text = analysis_json(net, an).dump(2) + "\n";
  if (args.json.empty()) {
    std::cout << text;
  } else {
    write_text(args.json, text);
    std::cout << "asiphonic " << (an.ase.siphons.asiphonic ? "yes" : "no") << ", strongly endotactic "
              << (an.ase.verdict.holds ? "yes" : "no") << ", ASE " << (an.ase.ase ? "yes" : "no") << "\n";
  }
  if (args.require_ase && !an.ase.ase) {
    std::cerr << "network is not ASE\n";
    return kNegative;
  }
  return kOk;
}

struct OdeArgs {
  std::string x0, csv;
  double T = 1, tol = 1e-8, max_step = 0;
  double every = 0;
};

int cmd_simulate_ode(const Common& c, const OdeArgs& args) {
  const auto net = load_network(c.file);
  OdeOptions opt;
  opt.rel_tol = args.tol;
  opt.abs_tol = args.tol * 1e-2;
  if (args.max_step > 0) opt.max_step = args.max_step;
  const auto sol = integrate_ode(net, parse_state(args.x0, net.dimension(), "--x0"), args.T, opt);
  if (sol.stiffness_warning) std::cerr << "warning: step size hit the floor; the system may be stiff\n";
  std::string out = csv_header(net, "t");
  if (args.every > 0) {
    for (double t = 0; t <= args.T + 1e-12 * args.T; t += args.every) out += csv_row(t, sol.trajectory.at(t));
  } else {
    for (std::size_t k = 0; k < sol.trajectory.size(); ++k)
      out += csv_row(sol.trajectory.times[k], sol.trajectory.states[k]);
  }
  write_text(args.csv, out);
  return kOk;
}

struct SsaArgs {
  std::string x0, out;
  double v = 100, T = 1, dt = 0;
  std::uint64_t seed = 1;
  std::size_t trials = 1;
};

int cmd_simulate_ssa(const Common& c, const SsaArgs& args) {
  const auto net = load_network(c.file);
  const auto x0 = parse_state(args.x0, net.dimension(), "--x0");
  const double dt = args.dt > 0 ? args.dt : args.T / 1000;
  std::vector<std::string> lines(args.trials);
  parallel_for(args.trials, c.threads, [&](std::size_t trial) {
    Rng rng(args.seed, trial);
    const auto n0 = counts_from_concentration(x0, args.v);
    std::string text;
    double next = 0;
    Counts current = n0;
    auto emit = [&](double t, const Counts& n) {
      Json j{{"trial", trial}, {"t", t}, {"n", n}};
      State x(n.size());
      for (std::size_t i = 0; i < n.size(); ++i) x[i] = static_cast<double>(n[i]) / args.v;
      j["x"] = x;
      text += j.dump() + "\n";
    };
    const auto stop = ssa_run(net, args.v, n0, args.T, rng, [&](double t, const Counts& n, std::size_t) {
      while (next <= t && next <= args.T) {
        emit(next, current);
        next += dt;
      }
      current = n;
      return true;
    });
    while (next <= args.T * (1 + 1e-12)) {
      emit(next, current);
      next += dt;
    }
    if (stop == SsaStop::Absorbed) text += Json{{"trial", trial}, {"absorbed", true}}.dump() + "\n";
    lines[trial] = std::move(text);
  });
  std::string all;
  for (auto& l : lines) all += l;
  write_text(args.out, all);
  return kOk;
}

struct LyapunovArgs {
  std::string a, csv;
  double log_radius = 10;
  std::size_t grid = 1000;
  std::uint64_t seed = 1;
  bool generator = false;
};

int cmd_lyapunov(const Common& c, const LyapunovArgs& args) {
  const auto net = load_network(c.file);
  const std::size_t d = net.dimension();
  std::vector<double> a(d, 1.0);
  if (!args.a.empty()) a = WeightVector(parse_rational_list(args.a)).as_double();
  if (a.size() != d) throw Error("--a needs one entry per species");
  std::vector<std::vector<double>> dirs(args.grid);
  Rng rng(args.seed);
  for (std::size_t k = 0; k < args.grid; ++k) {
    std::vector<double> w(d);
    if (d == 2) {
      const double phi = 2 * M_PI * static_cast<double>(k) / static_cast<double>(args.grid);
      w = {std::cos(phi), std::sin(phi)};
    } else if (d == 1) {
      w = {k % 2 == 0 ? 1.0 : -1.0};
    } else {
      for (auto& wi : w) wi = rng.normal();
    }
    dirs[k] = w;
  }
  std::vector<SignedLog> res(args.grid);
  parallel_for(args.grid, c.threads, [&](std::size_t k) {
    const auto tp = toric_point(dirs[k], args.log_radius);
    if (!args.generator) {
      res[k] = ode_drift_of_U(net, a, tp);
      return;
    }
    const auto x = toric_compose(tp);
    double l1 = 0;
    for (double xi : x) l1 += xi;
    res[k] = generator_drift_sign(net, a, l1, x);
  });
  std::string out;
  for (std::size_t i = 0; i < d; ++i) out += "w" + std::to_string(i) + ",";
  out += "sign,log_magnitude\n";
  std::size_t nonneg = 0;
  for (std::size_t k = 0; k < args.grid; ++k) {
    for (double wi : toric_point(dirs[k], 1).w) out += format_double(wi) + ",";
    out += std::to_string(res[k].sign) + "," + format_double(res[k].log_magnitude) + "\n";
    if (res[k].sign >= 0) ++nonneg;
  }
  write_text(args.csv, out);
  std::cerr << nonneg << " of " << args.grid << " directions with nonnegative drift\n";
  return kOk;
}

struct ActionArgs {
  std::string path;
  double jump_bound = 1;
};

int cmd_action(const Common& c, const ActionArgs& args) {
  const auto net = load_network(c.file);
  const auto tr = read_path_csv(args.path, net.dimension());
  ActionOptions opt;
  opt.jump_bound = args.jump_bound;
  const auto I = action(net, tr, opt);
  Json j{{"value", json_number(I.value)},
         {"finite", I.finite},
         {"not_absolutely_continuous", I.not_absolutely_continuous},
         {"segments", json_numbers(I.segment_values)}};
  std::cout << j.dump(2) << "\n";
  if (I.not_absolutely_continuous) std::cerr << "warning: path jumps exceed the step bound\n";
  return kOk;
}

struct QpArgs {
  std::string from, to, domain, T_grid, json, csv;
  std::size_t n_points = 32, restarts = 2;
  std::uint64_t seed = 1;
  bool oracle = false;
};

int cmd_quasipotential(const Common& c, const QpArgs& args) {
  const auto net = load_network(c.file);
  const std::size_t d = net.dimension();
  PathOptimizationProblem p;
  p.from = parse_state(args.from, d, "--from");
  p.to = parse_state(args.to, d, "--to");
  if (!args.domain.empty()) {
    const auto colon = args.domain.find(':');
    if (colon == std::string::npos) throw Error("--domain expects lo1,..,lod:hi1,..,hid");
    p.domain_lo = parse_state(args.domain.substr(0, colon), d, "--domain lower corner");
    p.domain_hi = parse_state(args.domain.substr(colon + 1), d, "--domain upper corner");
  }
  if (!args.T_grid.empty()) p.T_grid = parse_double_list(args.T_grid);
  p.n_points = args.n_points;
  p.restarts = args.restarts;
  p.seed = args.seed;
  p.threads = c.threads;
  const auto est = minimize_action(net, p);
  auto j = quasipotential_json(est);
  if (args.oracle) {
    const auto rates = birth_death_rates(net);
    j["birth_death_oracle"] = birth_death_quasipotential(rates.birth, rates.death, p.from[0], p.to[0]);
  }
  if (!args.csv.empty()) {
    std::string out = csv_header(net, "t");
    for (std::size_t k = 0; k < est.path.size(); ++k) out += csv_row(est.path.times[k], est.path.states[k]);
    write_text(args.csv, out);
  }
  write_text(args.json, j.dump(2) + "\n");
  if (est.boundary_grazing) std::cerr << "warning: the optimized path touches the domain boundary\n";
  if (est.no_descent) std::cerr << "warning: no restart improved on its starting path\n";
  if (!std::isfinite(est.value)) return kNumerical;
  return kOk;
}

int cmd_examples(const std::string& write_dir) {
  for (const auto& b : builtin_networks()) {
    std::cout << b.name << "\t" << b.description << "\n";
    if (!write_dir.empty()) {
      std::filesystem::create_directories(write_dir);
      write_text((std::filesystem::path(write_dir) / (std::string(b.name) + ".crn")).string(), b.text);
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Analysis of mass-action reaction networks: endotacticity, stability and large deviations"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--threads", common.threads, "worker threads (default: CRNLDP_THREADS or hardware)");
  auto add_file = [&](CLI::App* sub) {
    sub->add_option("file", common.file, "network file or builtin:<name>")->required();
  };

  std::function<int()> run;

  auto* validate = app.add_subcommand("validate", "parse and validate a network file");
  add_file(validate);
  validate->callback([&] { run = [&] { return cmd_validate(common); }; });

  AnalyzeArgs an;
  auto* analyze_cmd = app.add_subcommand("analyze", "siphons, endotacticity, ASE, positive span and constants");
  add_file(analyze_cmd);
  analyze_cmd->add_option("--a", an.a, "weight vector as comma-separated rationals (p/q)");
  analyze_cmd->add_option("--json", an.json, "write the JSON report here instead of standard output");
  analyze_cmd->add_flag("--require-ase", an.require_ase, "exit 3 unless the network is ASE");
  analyze_cmd->add_option("--samples", an.samples, "samples for the empirical rho0 and zeta* searches (0 skips)");
  analyze_cmd->add_option("--seed", an.seed, "seed for the empirical searches");
  analyze_cmd->add_option("--K2", an.K2, "override K2");
  analyze_cmd->add_option("--K3", an.K3, "override K3");
  analyze_cmd->add_option("--zeta-star", an.zeta, "override zeta*");
  analyze_cmd->add_option("--c-star", an.c_star, "override c*");
  analyze_cmd->add_option("--K0", an.K0, "override K0");
  analyze_cmd->callback([&] { run = [&] { return cmd_analyze(common, an); }; });

  OdeArgs ode;
  auto* ode_cmd = app.add_subcommand("simulate-ode", "integrate the mass-action ODE; CSV output");
  add_file(ode_cmd);
  ode_cmd->add_option("--x0", ode.x0, "initial concentrations")->required();
  ode_cmd->add_option("--T", ode.T, "time horizon")->required();
  ode_cmd->add_option("--tol", ode.tol, "relative tolerance");
  ode_cmd->add_option("--max-step", ode.max_step, "largest step");
  ode_cmd->add_option("--every", ode.every, "resample the output on this time grid");
  ode_cmd->add_option("--csv", ode.csv, "output file (default standard output)");
  ode_cmd->callback([&] { run = [&] { return cmd_simulate_ode(common, ode); }; });

  SsaArgs ssa;
  auto* ssa_cmd = app.add_subcommand("simulate-ssa", "Gillespie simulation at volume v; JSONL output");
  add_file(ssa_cmd);
  ssa_cmd->add_option("--v", ssa.v, "volume")->required();
  ssa_cmd->add_option("--x0", ssa.x0, "initial concentrations")->required();
  ssa_cmd->add_option("--T", ssa.T, "time horizon")->required();
  ssa_cmd->add_option("--seed", ssa.seed, "seed")->required();
  ssa_cmd->add_option("--trials", ssa.trials, "independent paths");
  ssa_cmd->add_option("--dt", ssa.dt, "sampling interval (default T/1000)");
  ssa_cmd->add_option("--out", ssa.out, "output file (default standard output)");
  ssa_cmd->callback([&] { run = [&] { return cmd_simulate_ssa(common, ssa); }; });

  LyapunovArgs ly;
  auto* ly_cmd = app.add_subcommand("lyapunov", "sign of the Lyapunov drift over toric directions; CSV output");
  add_file(ly_cmd);
  ly_cmd->add_option("--a", ly.a, "weight vector (default all ones)");
  ly_cmd->add_option("--log-radius", ly.log_radius, "log theta")->required();
  ly_cmd->add_option("--grid", ly.grid, "number of directions (uniform on the circle when d = 2)");
  ly_cmd->add_option("--seed", ly.seed, "seed for random directions when d > 2");
  ly_cmd->add_flag("--generator", ly.generator, "use the jump-process generator with v = exp(|x|_1)");
  ly_cmd->add_option("--csv", ly.csv, "output file (default standard output)");
  ly_cmd->callback([&] { run = [&] { return cmd_lyapunov(common, ly); }; });

  ActionArgs act;
  auto* act_cmd = app.add_subcommand("action", "discretized action of a path given as CSV rows t,x1,..,xd");
  add_file(act_cmd);
  act_cmd->add_option("--path", act.path, "path CSV")->required();
  act_cmd->add_option("--jump-bound", act.jump_bound, "largest |dz|_1 per step before flagging");
  act_cmd->callback([&] { run = [&] { return cmd_action(common, act); }; });

  QpArgs qp;
  auto* qp_cmd = app.add_subcommand("quasipotential", "minimize the action between two points");
  add_file(qp_cmd);
  qp_cmd->add_option("--from", qp.from, "start point")->required();
  qp_cmd->add_option("--to", qp.to, "end point")->required();
  qp_cmd->add_option("--domain", qp.domain, "box lo1,..,lod:hi1,..,hid");
  qp_cmd->add_option("--n-points", qp.n_points, "path nodes");
  qp_cmd->add_option("--restarts", qp.restarts, "perturbed restarts per duration");
  qp_cmd->add_option("--T-grid", qp.T_grid, "starting durations");
  qp_cmd->add_option("--seed", qp.seed, "seed");
  qp_cmd->add_flag("--oracle", qp.oracle, "also report the one-dimensional birth-death integral");
  qp_cmd->add_option("--json", qp.json, "output file (default standard output)");
  qp_cmd->add_option("--csv", qp.csv, "write the optimized path here");
  qp_cmd->callback([&] { run = [&] { return cmd_quasipotential(common, qp); }; });

  std::string write_dir;
  auto* ex_cmd = app.add_subcommand("examples", "list the built-in networks");
  ex_cmd->add_option("--write", write_dir, "also write each network as <dir>/<name>.crn");
  ex_cmd->callback([&] { run = [&] { return cmd_examples(write_dir); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }
  try {
    return run();
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kInput;
  } catch (const ValidationError& e) {
    std::cerr << "invalid network: " << e.what() << "\n";
    return kInput;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const BlowUp& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const RateVanishes& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  }
}
