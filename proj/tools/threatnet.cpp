// Command-line front end: generate, propagate, detect, experiment, validate, plot.

#include "threatnet/absorbing_chain.hpp"
#include "threatnet/error.hpp"
#include "threatnet/evaluation.hpp"
#include "threatnet/experiment.hpp"
#include "threatnet/generators.hpp"
#include "threatnet/harmonic.hpp"
#include "threatnet/io.hpp"
#include "threatnet/plot.hpp"
#include "threatnet/priors.hpp"
#include "threatnet/spacetime.hpp"
#include "threatnet/spectral.hpp"
#include "threatnet/validate.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>
#include <omp.h>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace threatnet;

namespace {

struct Globals {
  int threads = 0;
  std::string log_level = "info";
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed) {
  if (seed) return *seed;
  std::random_device rd;
  const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  spdlog::warn("no --seed given; using seed {}", s);
  return s;
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return json::parse(in, nullptr, true, true);
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const json& j) {
  auto out = io::open_output(path);
  out << j.dump(2) << '\n';
  if (!out) throw InputError("failed writing " + path.string());
}

/// Comment line embedded in every output: version, command, hash of the
/// resolved parameters and seed.
std::string metadata(const std::string& command, const json& resolved) {
  return fmt::format("threatnet {} {} config_hash={:016x} {}", THREATNET_VERSION, command,
                     config_hash(resolved), resolved.dump());
}

struct Loaded {
  Graph graph;
  io::SymbolTable symbols;
};

Loaded load_graph(const fs::path& path, bool directed) {
  io::EdgeList list = io::read_edge_csv(path);
  Loaded out;
  out.graph = build_graph(list.symbols.size(), list.records, {directed, false});
  out.symbols = std::move(list.symbols);
  return out;
}

// ---------------------------------------------------------------------------
// generate

struct GenerateArgs {
  std::string kind;
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> r_fg;
  std::optional<double> gamma_fg;
  bool serial = false;
};

int run_generate(const GenerateArgs& a) {
  const std::uint64_t seed = resolve_seed(a.seed);
  json params = a.config.empty() ? json::object() : read_json(a.config);
  GeneratedNetwork net;
  json resolved;
  if (a.kind == "sbm") {
    if (a.r_fg) params["r_fg"] = *a.r_fg;
    const SbmParams p = sbm_from_json(params);
    net = generate_sbm(p, seed, !a.serial);
    resolved = to_json(p);
  } else {
    if (a.gamma_fg) params["gamma_fg"] = *a.gamma_fg;
    const HmmbParams p = hmmb_from_json(params);
    net = generate_hmmb(p, seed, !a.serial);
    resolved = to_json(p);
  }
  const json record = {{"generator", a.kind}, {"params", resolved}, {"seed", seed}};
  const std::string meta = metadata("generate", record);
  const fs::path dir = a.out;
  const auto symbols = io::SymbolTable::identity(net.graph.order());
  io::write_edge_csv(dir / "edges.csv", net.graph, symbols, meta);
  std::vector<double> truth(net.truth.begin(), net.truth.end());
  io::write_vertex_values(dir / "truth.csv", "theta", truth, symbols, meta);
  json m = net.meta;
  m["version"] = THREATNET_VERSION;
  m["config_hash"] = fmt::format("{:016x}", config_hash(record));
  write_json(dir / "meta.json", m);
  spdlog::info("{} vertices, {} interactions, {} foreground -> {}", net.graph.order(), net.graph.links().size(),
               std::count(net.truth.begin(), net.truth.end(), 1), dir.string());
  return 0;
}

// ---------------------------------------------------------------------------
// propagate

struct PropagateArgs {
  std::string graph;
  std::string obs;
  std::string out;
  bool directed = false;
  std::string prior = "dwtp";
  double tol = 1e-10;
  std::size_t max_iter = 0;
  std::string method = "harmonic";
  std::size_t walks = 10000;
  std::optional<std::uint64_t> seed;
  // space-time
  std::optional<double> lambda;
  std::optional<double> dt;
  std::string variant = "coord";
  std::string mode = "kernel";
  std::string reducer = "max";
  double truncation = 1e-4;
  std::string st_out;
  bool serial = false;
};

SolverOptions solver_options(const PropagateArgs& a, SolveMethod method) {
  SolverOptions s;
  s.method = method;
  s.tol = a.tol;
  s.max_iter = a.max_iter;
  s.parallel = !a.serial;
  return s;
}

int run_propagate_spatial(const PropagateArgs& a) {
  const Loaded in = load_graph(a.graph, a.directed);
  const ObservationSet obs = io::read_observations_csv(a.obs, in.symbols);
  const PriorSpec spec = parse_prior(a.prior);
  const Prior prior = compute_prior(in.graph, spec, obs);
  json resolved = {{"graph", fs::path(a.graph).filename().string()},
                   {"observations", fs::path(a.obs).filename().string()},
                   {"prior", to_string(spec)},
                   {"method", a.method}};
  std::vector<double> theta;
  if (a.method == "mc") {
    const std::uint64_t seed = resolve_seed(a.seed);
    resolved["seed"] = seed;
    resolved["walks"] = a.walks;
    const AbsorbingChain chain = build_absorbing_chain(in.graph, prior.psi, obs);
    MonteCarloOptions mc;
    mc.walks_per_vertex = a.walks;
    mc.seed = seed;
    mc.parallel = !a.serial;
    const MonteCarloThreat est = monte_carlo_threat(chain, mc);
    if (est.capped > 0) spdlog::warn("{} walks hit the step cap and counted as non-threat", est.capped);
    theta = est.theta;
  } else {
    resolved["tol"] = a.tol;
    const ThreatVector t = solve_harmonic(in.graph, prior.psi, obs, solver_options(a, parse_solve_method(a.method)));
    spdlog::info("converged in {} iterations, residual {:.3e}", t.report.iterations, t.report.residual);
    theta = t.theta;
  }
  if (prior.approximate_path_length) resolved["path_length_closed_form"] = prior.path_length;
  io::write_vertex_values(a.out, "theta", theta, in.symbols, metadata("propagate spatial", resolved));
  return 0;
}

int run_propagate_spacetime(const PropagateArgs& a) {
  const Loaded in = load_graph(a.graph, a.directed);
  const ObservationSet obs = io::read_observations_csv(a.obs, in.symbols);
  const double rate = a.lambda ? *a.lambda : default_rate(in.graph);
  if (!(rate > 0.0)) throw InputError("--lambda must be positive");
  TimeGrid grid = default_grid(in.graph, rate);
  if (a.dt) {
    if (!(*a.dt > 0.0)) throw InputError("--dt must be positive");
    double hi = grid.t0;
    for (const Link& l : in.graph.links()) {
      if (l.timed()) hi = std::max({hi, l.times->first, l.times->second});
    }
    grid = make_grid(grid.t0, hi, *a.dt);
  }
  SpaceTimeOptions so;
  so.default_mode = parse_temporal_mode(a.mode);
  so.truncation = a.truncation;
  so.parallel = !a.serial;
  const SpaceTimeSystem sys = assemble_spacetime(in.graph, grid, std::vector<double>{rate}, so);
  SpaceTimeSolveOptions opts;
  opts.variant = parse_spacetime_variant(a.variant);
  opts.solver = solver_options(a, parse_solve_method(a.method));
  const PriorSpec spec = parse_prior(a.prior);
  if (opts.variant != SpaceTimeVariant::coordinated) {
    std::vector<Observation> spatial;
    for (const auto& o : obs.entries()) {
      const bool seen = std::any_of(spatial.begin(), spatial.end(), [&](const Observation& s) { return s.vertex == o.vertex; });
      if (!seen) spatial.push_back({o.vertex, std::nullopt, o.probability});
    }
    opts.psi = compute_prior(in.graph, spec, ObservationSet(spatial)).psi;
  }
  spdlog::info("space-time system: {} vertices x {} bins, lambda {}, dt {}", sys.vertices, sys.bins(), rate,
               grid.dt);
  const SpaceTimeThreat st = solve_spacetime(sys, obs, opts);
  spdlog::info("converged in {} iterations, residual {:.3e}", st.report.iterations, st.report.residual);
  const json resolved = {{"graph", fs::path(a.graph).filename().string()},
                         {"observations", fs::path(a.obs).filename().string()},
                         {"lambda", rate},
                         {"t0", grid.t0},
                         {"dt", grid.dt},
                         {"bins", grid.bins},
                         {"variant", a.variant},
                         {"mode_default", a.mode},
                         {"prior", to_string(spec)},
                         {"reducer", a.reducer},
                         {"truncation", a.truncation},
                         {"tol", a.tol}};
  const std::string meta = metadata("propagate spacetime", resolved);
  const auto scores = reduce_to_vertex_scores(st, parse_reducer(a.reducer));
  io::write_vertex_values(a.out, "theta", scores, in.symbols, meta);
  if (!a.st_out.empty()) {
    auto out = io::open_output(a.st_out);
    out << "# " << meta << '\n' << "vertex,bin,t,theta\n";
    for (std::size_t v = 0; v < st.vertices; ++v) {
      for (std::size_t k = 0; k < st.bins; ++k) {
        out << in.symbols.name(v) << ',' << k << ','
            << io::format_double(grid.center(k)) << ',' << io::format_double(st.at(v, k)) << '\n';
      }
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// detect

struct DetectArgs {
  std::string graph;
  std::string out;
  std::string which = "modularity";
  bool directed = false;
};

int run_detect_spec(const DetectArgs& a) {
  const Loaded in = load_graph(a.graph, a.directed);
  const SpectralSpec spec = parse_spectral(a.which);
  const auto scores = spectral_scores(in.graph, spec);
  const json resolved = {{"graph", fs::path(a.graph).filename().string()}, {"which", a.which}};
  io::write_vertex_values(a.out, "score", scores, in.symbols, metadata("detect spec", resolved));
  return 0;
}

// ---------------------------------------------------------------------------
// experiment

struct ExperimentArgs {
  std::string config;
  std::string out;
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> seed;
  bool serial = false;
};

int run_experiment_cmd(const ExperimentArgs& a) {
  json doc = read_json(a.config);
  if (a.trials) doc["trials"] = *a.trials;
  if (!doc.contains("seed") || a.seed) doc["seed"] = resolve_seed(a.seed);
  const auto points = expand_sweep(doc);
  const fs::path dir = a.out;
  json sweep = json::array();
  for (const auto& point : points) {
    const fs::path sub = point.label.empty() ? dir : dir / point.label;
    spdlog::info("running '{}'{} with {} trials", point.config.name,
                 point.label.empty() ? "" : " [" + point.label + "]", point.config.trials);
    const ExperimentResult result = run_experiment(point.config, !a.serial);
    write_experiment(sub, point.config, result);
    for (const auto& d : result.detectors) {
      spdlog::info("  {:<10} AUC {:.4f} +- {:.4f}  convexity defect {:.4f}", d.name, d.curve.auc, d.curve.auc_se,
                   d.convexity);
    }
    if (!point.label.empty()) {
      json s = summary_json(point.config, result);
      s.erase("config");
      sweep.push_back({{"label", point.label}, {"value", point.value}, {"summary", s}});
    }
  }
  if (!sweep.empty()) {
    write_json(dir / "sweep.json", {{"pointer", doc["sweep"]["pointer"]}, {"points", sweep}});
    // One chart per detector across sweep values.
    const auto& first = points.front().config;
    for (const auto& det : first.detectors) {
      std::vector<PlotSeries> series;
      for (const auto& point : points) {
        series.push_back({point.label, read_roc_csv(dir / point.label / fmt::format("roc_{}.csv", det.name))});
      }
      write_roc_svg(dir / fmt::format("sweep_{}.svg", det.name), series, first.name + " " + det.name);
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// validate

struct ValidateArgs {
  std::string level = "fast";
  std::string fault;
  std::string report;
  std::uint64_t seed = 1;
  bool serial = false;
};

int run_validate(const ValidateArgs& a) {
  ValidationOptions o;
  o.level = parse_validation_level(a.level);
  o.seed = a.seed;
  o.fault = a.fault;
  o.parallel = !a.serial;
  const ValidationReport report = validate_suite(o);
  const json j = report.to_json();
  if (a.report.empty()) std::cout << j.dump(2) << '\n';
  else write_json(a.report, j);
  if (!report.passed()) {
    spdlog::error("validation failed: {}", j["failed"].dump());
    return static_cast<int>(ErrorKind::validation);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// plot

struct PlotArgs {
  std::vector<std::string> curves;
  std::string out;
  std::string title;
};

int run_plot(const PlotArgs& a) {
  std::vector<PlotSeries> series;
  for (const auto& spec : a.curves) {
    const auto eq = spec.find('=');
    const fs::path path = spec.substr(0, eq);
    const std::string label = eq == std::string::npos ? path.stem().string() : spec.substr(eq + 1);
    series.push_back({label, read_roc_csv(path)});
  }
  write_roc_svg(a.out, series, a.title);
  return 0;
}

spdlog::level::level_enum parse_level(const std::string& s) {
  const auto level = spdlog::level::from_str(s);
  if (level == spdlog::level::off && s != "off") throw InputError("unknown log level: " + s);
  return level;
}

}  // namespace

int main(int argc, char** argv) {
  auto logger = spdlog::stderr_logger_st("threatnet");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");

  CLI::App app{"Threat propagation on graphs: generators, detectors and ROC experiments"};
  app.set_version_flag("--version", THREATNET_VERSION);
  app.require_subcommand(1);
  Globals globals;
  app.add_option("--threads", globals.threads, "Worker threads (default: all logical cores)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--log-level", globals.log_level, "trace, debug, info, warn, error, off");

  // generate
  auto* gen = app.add_subcommand("generate", "Sample a synthetic network");
  gen->require_subcommand(1);
  GenerateArgs ga;
  for (const char* kind : {"sbm", "hmmb"}) {
    auto* sub = gen->add_subcommand(kind, std::string(kind) == "sbm" ? "Stochastic blockmodel"
                                                                     : "Hybrid mixed-membership blockmodel");
    sub->add_option("--config", ga.config, "JSON parameter file (missing keys take reference values)");
    sub->add_option("--out", ga.out, "Output directory")->required();
    sub->add_option("--seed", ga.seed, "Master seed");
    sub->add_flag("--serial", ga.serial, "Disable OpenMP kernels");
    if (std::string(kind) == "sbm") sub->add_option("--r-fg", ga.r_fg, "Foreground activity r_fg");
    else sub->add_option("--gamma-fg", ga.gamma_fg, "Foreground coordination gamma_fg");
    sub->callback([&ga, kind] { ga.kind = kind; });
  }

  // propagate
  auto* prop = app.add_subcommand("propagate", "Compute threat from cues");
  prop->require_subcommand(1);
  PropagateArgs pa;
  auto* spatial = prop->add_subcommand("spatial", "Harmonic threat propagation");
  auto* spacetime = prop->add_subcommand("spacetime", "Space-time threat propagation");
  for (auto* sub : {spatial, spacetime}) {
    sub->add_option("--graph", pa.graph, "Edge CSV")->required()->check(CLI::ExistingFile);
    sub->add_option("--obs", pa.obs, "Observation CSV")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", pa.out, "Output vertex,theta CSV")->required();
    sub->add_flag("--directed", pa.directed, "Treat edges as directed");
    sub->add_option("--prior", pa.prior, "dwtp, lwtp, bfs, uniform[:psi0]");
    sub->add_option("--tol", pa.tol, "Residual tolerance");
    sub->add_option("--max-iter", pa.max_iter, "Iteration limit (0: automatic)");
    sub->add_flag("--serial", pa.serial, "Disable OpenMP kernels");
  }
  spatial->add_option("--method", pa.method, "harmonic, bicgstab, direct or mc")
      ->check(CLI::IsMember({"harmonic", "iteration", "bicgstab", "direct", "mc"}));
  spatial->add_option("--walks", pa.walks, "Monte Carlo walks per vertex")->check(CLI::PositiveNumber);
  spatial->add_option("--seed", pa.seed, "Monte Carlo seed");
  spacetime->add_option("--method", pa.method, "harmonic, bicgstab or direct")
      ->check(CLI::IsMember({"harmonic", "iteration", "bicgstab", "direct"}));
  spacetime->add_option("--lambda", pa.lambda, "Kernel rate (default ln 2 / median gap)");
  spacetime->add_option("--dt", pa.dt, "Bin width (default 0.02 / lambda)");
  spacetime->add_option("--variant", pa.variant, "weighted, coord or coord-prior");
  spacetime->add_option("--mode-default", pa.mode, "kernel, instant or clique");
  spacetime->add_option("--reducer", pa.reducer, "max or mean");
  spacetime->add_option("--truncation", pa.truncation, "Drop kernel entries below this value");
  spacetime->add_option("--st-out", pa.st_out, "Also write vertex,bin,t,theta");

  // detect
  auto* det = app.add_subcommand("detect", "Uncued detectors");
  det->require_subcommand(1);
  DetectArgs da;
  auto* spec = det->add_subcommand("spec", "Spectral (modularity or Fiedler) scores");
  spec->add_option("--graph", da.graph, "Edge CSV")->required()->check(CLI::ExistingFile);
  spec->add_option("--out", da.out, "Output vertex,score CSV")->required();
  spec->add_option("--which", da.which, "modularity, fiedler or modularity:<k>");
  spec->add_flag("--directed", da.directed, "Treat edges as directed");

  // experiment
  auto* exp = app.add_subcommand("experiment", "Monte Carlo ROC experiment");
  ExperimentArgs ea;
  exp->add_option("--config", ea.config, "Experiment JSON")->required()->check(CLI::ExistingFile);
  exp->add_option("--out", ea.out, "Output directory")->required();
  exp->add_option("--trials", ea.trials, "Override the trial count")->check(CLI::PositiveNumber);
  exp->add_option("--seed", ea.seed, "Override the master seed");
  exp->add_flag("--serial", ea.serial, "Run trials sequentially");

  // validate
  auto* val = app.add_subcommand("validate", "Run the invariant suite");
  ValidateArgs va;
  val->add_option("--level", va.level, "fast or full")->check(CLI::IsMember({"fast", "full"}));
  val->add_option("--fault", va.fault, "Inject a fault (laplacian-sign)");
  val->add_option("--report", va.report, "Write the JSON report here instead of stdout");
  val->add_option("--seed", va.seed, "Seed of the random test cases");
  val->add_flag("--serial", va.serial, "Disable OpenMP kernels");

  // plot
  auto* plot = app.add_subcommand("plot", "Render ROC CSV files as SVG");
  PlotArgs pl;
  plot->add_option("--roc", pl.curves, "roc.csv[=label], repeatable")->required();
  plot->add_option("--out", pl.out, "Output SVG")->required();
  plot->add_option("--title", pl.title, "Chart title");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ErrorKind::usage);
  }

  try {
    spdlog::set_level(parse_level(globals.log_level));
    if (globals.threads > 0) omp_set_num_threads(globals.threads);

    if (gen->parsed()) return run_generate(ga);
    if (spatial->parsed()) return run_propagate_spatial(pa);
    if (spacetime->parsed()) return run_propagate_spacetime(pa);
    if (spec->parsed()) return run_detect_spec(da);
    if (exp->parsed()) return run_experiment_cmd(ea);
    if (val->parsed()) return run_validate(va);
    if (plot->parsed()) return run_plot(pl);
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return e.exit_code();
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return static_cast<int>(ErrorKind::usage);
  }
  return static_cast<int>(ErrorKind::usage);
}
