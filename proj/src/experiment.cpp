#include "threatnet/experiment.hpp"

#include "threatnet/error.hpp"
#include "threatnet/io.hpp"
#include "threatnet/kernels.hpp"
#include "threatnet/plot.hpp"
#include "threatnet/rng.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

namespace threatnet {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw InputError(where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) throw InputError(fmt::format("unknown key '{}' in {}", key, where));
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InputError(fmt::format("bad value for '{}': {}", key, e.what()));
  }
}

DetectorType parse_detector_type(const std::string& s) {
  if (s == "spatial") return DetectorType::spatial;
  if (s == "sttp") return DetectorType::sttp;
  if (s == "spectral") return DetectorType::spectral;
  throw InputError("unknown detector type: " + s);
}

const char* to_string(DetectorType t) {
  switch (t) {
    case DetectorType::spatial: return "spatial";
    case DetectorType::sttp: return "sttp";
    case DetectorType::spectral: return "spectral";
  }
  return "?";
}

const char* to_string(SpaceTimeVariant v) {
  switch (v) {
    case SpaceTimeVariant::weighted: return "weighted";
    case SpaceTimeVariant::coordinated: return "coord";
    case SpaceTimeVariant::coordinated_prior: return "coord-prior";
  }
  return "?";
}

const char* to_string(TemporalMode m) {
  switch (m) {
    case TemporalMode::kernel: return "kernel";
    case TemporalMode::instant: return "instant";
    case TemporalMode::clique: return "clique";
  }
  return "?";
}

const char* to_string(SolveMethod m) {
  switch (m) {
    case SolveMethod::iteration: return "iteration";
    case SolveMethod::bicgstab: return "bicgstab";
    case SolveMethod::direct: return "direct";
  }
  return "?";
}

std::string spectral_name(const SpectralSpec& s) {
  switch (s.kind) {
    case SpectralKind::principal_modularity: return "modularity";
    case SpectralKind::fiedler: return "fiedler";
    case SpectralKind::modularity_eigvec: return fmt::format("modularity:{}", s.index);
  }
  return "?";
}

DetectorConfig parse_detector(const json& j, std::size_t index) {
  const std::string where = fmt::format("detectors[{}]", index);
  check_keys(j,
             {"name", "type", "prior", "bins", "rate", "variant", "mode", "reducer", "which", "method",
              "tol", "max_iter"},
             where);
  DetectorConfig d;
  if (!j.contains("type")) throw InputError(where + " needs a type");
  d.type = parse_detector_type(j.at("type").get<std::string>());
  d.name = get_or<std::string>(j, "name", to_string(d.type));
  if (d.name.empty() || d.name.find_first_of("/\\ ") != std::string::npos) {
    throw InputError(where + ": detector name must be a nonempty file-safe token");
  }
  d.prior = parse_prior(get_or<std::string>(j, "prior", "dwtp"));
  d.bins = get_or<std::size_t>(j, "bins", 100);
  if (j.contains("rate")) {
    d.rate = get_or<double>(j, "rate", 0.0);
    if (!(*d.rate > 0.0) || !std::isfinite(*d.rate)) throw InputError(where + ": rate must be positive");
  }
  d.variant = parse_spacetime_variant(get_or<std::string>(j, "variant", "coord"));
  d.mode = parse_temporal_mode(get_or<std::string>(j, "mode", "kernel"));
  d.reducer = parse_reducer(get_or<std::string>(j, "reducer", "max"));
  d.spectral = parse_spectral(get_or<std::string>(j, "which", "modularity"));
  d.solver.method = parse_solve_method(get_or<std::string>(j, "method", "iteration"));
  d.solver.tol = get_or<double>(j, "tol", 1e-10);
  d.solver.max_iter = get_or<std::size_t>(j, "max_iter", 0);
  if (!(d.solver.tol > 0.0)) throw InputError(where + ": tol must be positive");
  return d;
}

json detector_json(const DetectorConfig& d) {
  json j = {{"name", d.name}, {"type", to_string(d.type)}};
  switch (d.type) {
    case DetectorType::spatial:
      j["prior"] = to_string(d.prior);
      break;
    case DetectorType::sttp:
      j["prior"] = to_string(d.prior);
      j["bins"] = d.bins;
      if (d.rate) j["rate"] = *d.rate;
      j["variant"] = to_string(d.variant);
      j["mode"] = to_string(d.mode);
      j["reducer"] = d.reducer == Reducer::max ? "max" : "mean";
      break;
    case DetectorType::spectral:
      j["which"] = spectral_name(d.spectral);
      return j;
  }
  j["method"] = to_string(d.solver.method);
  j["tol"] = d.solver.tol;
  j["max_iter"] = d.solver.max_iter;
  return j;
}

GeneratedNetwork generate(const ExperimentConfig& c, std::uint64_t seed, bool parallel) {
  if (c.generator == "sbm") return generate_sbm(sbm_from_json(c.generator_params), seed, parallel);
  return generate_hmmb(hmmb_from_json(c.generator_params), seed, parallel);
}

/// Time of a link at the endpoint `v` (original indices).
double time_at(const Link& l, Vertex v) { return l.u == v ? l.times->first : l.times->second; }

/// Cue time: one of the cue's foreground interaction times, else any of its
/// interaction times; none when the network is untimed.
std::optional<double> cue_time(const GeneratedNetwork& net, Vertex v, Xoshiro256& re) {
  std::vector<double> fg;
  std::vector<double> any;
  const auto& links = net.graph.links();
  for (std::size_t i = 0; i < links.size(); ++i) {
    const Link& l = links[i];
    if ((l.u != v && l.v != v) || !l.timed()) continue;
    any.push_back(time_at(l, v));
    if (net.foreground_link(i)) fg.push_back(time_at(l, v));
  }
  const auto& pool = fg.empty() ? any : fg;
  if (pool.empty()) return std::nullopt;
  const auto k = static_cast<std::size_t>(re.uniform() * static_cast<double>(pool.size()));
  return pool[std::min(k, pool.size() - 1)];
}

std::vector<double> run_sttp(const DetectorConfig& d, const Graph& g, const ObservationSet& obs,
                             bool parallel) {
  if (!g.has_timestamps()) throw InputError("sttp detector needs time-stamped links");
  const double rate = d.rate ? *d.rate : default_rate(g);
  TimeGrid grid;
  if (d.bins == 0) {
    grid = default_grid(g, rate);
  } else {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const Link& l : g.links()) {
      if (!l.timed()) continue;
      lo = std::min({lo, l.times->first, l.times->second});
      hi = std::max({hi, l.times->first, l.times->second});
    }
    const double span = hi - lo;
    grid = span > 0.0 ? TimeGrid{lo, span / static_cast<double>(d.bins), d.bins} : TimeGrid{lo, 1.0, 1};
  }
  SpaceTimeOptions so;
  so.default_mode = d.mode;
  so.parallel = parallel;
  const std::vector<double> rates{rate};
  const SpaceTimeSystem sys = assemble_spacetime(g, grid, rates, so);

  SpaceTimeSolveOptions opts;
  opts.variant = d.variant;
  opts.solver = d.solver;
  opts.solver.parallel = parallel;
  if (d.variant != SpaceTimeVariant::coordinated) {
    std::vector<Observation> spatial;
    for (const auto& o : obs.entries()) spatial.push_back({o.vertex, std::nullopt, o.probability});
    opts.psi = compute_prior(g, d.prior, ObservationSet(std::move(spatial))).psi;
  }
  return reduce_to_vertex_scores(solve_spacetime(sys, obs, opts), d.reducer);
}

std::vector<double> run_detector(const DetectorConfig& d, const Graph& g, const ObservationSet& obs,
                                 bool parallel) {
  switch (d.type) {
    case DetectorType::spatial: {
      std::vector<Observation> spatial;
      for (const auto& o : obs.entries()) spatial.push_back({o.vertex, std::nullopt, o.probability});
      const ObservationSet cues(std::move(spatial));
      const Prior prior = compute_prior(g, d.prior, cues);
      SolverOptions opts = d.solver;
      opts.parallel = parallel;
      return solve_harmonic(g, prior.psi, cues, opts).theta;
    }
    case DetectorType::sttp:
      return run_sttp(d, g, obs, parallel);
    case DetectorType::spectral:
      return spectral_scores(g, d.spectral);
  }
  throw InputError("unknown detector");
}

}  // namespace

ExperimentConfig parse_experiment(const json& j) {
  check_keys(j,
             {"schema", "name", "generator", "detectors", "trials", "seed", "observation", "aggregation",
              "restrict_to_lcc", "exclude_cues", "pfa_grid", "max_abort_fraction", "sweep"},
             "experiment config");
  ExperimentConfig c;
  const int schema = get_or<int>(j, "schema", kExperimentSchema);
  if (schema != kExperimentSchema) throw InputError(fmt::format("unsupported config schema {}", schema));
  c.name = get_or<std::string>(j, "name", c.name);

  if (!j.contains("generator")) throw InputError("config needs a generator");
  const json& gen = j.at("generator");
  check_keys(gen, {"type", "params"}, "generator");
  c.generator = get_or<std::string>(gen, "type", "sbm");
  c.generator_params = get_or<json>(gen, "params", json::object());
  if (c.generator == "sbm") {
    validate(sbm_from_json(c.generator_params));
  } else if (c.generator == "hmmb") {
    validate(hmmb_from_json(c.generator_params));
  } else {
    throw InputError("unknown generator type: " + c.generator);
  }

  if (!j.contains("detectors") || !j.at("detectors").is_array() || j.at("detectors").empty()) {
    throw InputError("config needs a nonempty detectors list");
  }
  std::set<std::string> names;
  for (const auto& d : j.at("detectors")) {
    c.detectors.push_back(parse_detector(d, c.detectors.size()));
    if (!names.insert(c.detectors.back().name).second) {
      throw InputError("duplicate detector name: " + c.detectors.back().name);
    }
  }

  c.trials = get_or<std::size_t>(j, "trials", c.trials);
  if (c.trials == 0) throw InputError("trials must be positive");
  c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
  if (j.contains("observation")) {
    const json& o = j.at("observation");
    check_keys(o, {"cues", "p"}, "observation");
    c.cues = get_or<std::size_t>(o, "cues", c.cues);
    c.cue_probability = get_or<double>(o, "p", c.cue_probability);
    if (c.cues == 0) throw InputError("observation.cues must be positive");
    if (!(c.cue_probability >= 0.0 && c.cue_probability <= 1.0)) throw InputError("observation.p must lie in [0,1]");
  }
  c.aggregation = parse_aggregation(get_or<std::string>(j, "aggregation", "pool"));
  c.restrict_to_lcc = get_or<bool>(j, "restrict_to_lcc", c.restrict_to_lcc);
  c.exclude_cues = get_or<bool>(j, "exclude_cues", c.exclude_cues);
  c.pfa_grid = get_or<std::vector<double>>(j, "pfa_grid", c.pfa_grid);
  for (double x : c.pfa_grid) {
    if (!(x >= 0.0 && x <= 1.0)) throw InputError("pfa_grid entries must lie in [0,1]");
  }
  c.max_abort_fraction = get_or<double>(j, "max_abort_fraction", c.max_abort_fraction);
  c.source = to_json(c);
  return c;
}

json to_json(const ExperimentConfig& c) {
  json dets = json::array();
  for (const auto& d : c.detectors) dets.push_back(detector_json(d));
  json params = c.generator == "sbm" ? to_json(sbm_from_json(c.generator_params))
                                     : to_json(hmmb_from_json(c.generator_params));
  return {{"schema", kExperimentSchema},
          {"name", c.name},
          {"generator", {{"type", c.generator}, {"params", params}}},
          {"detectors", dets},
          {"trials", c.trials},
          {"seed", c.seed},
          {"observation", {{"cues", c.cues}, {"p", c.cue_probability}}},
          {"aggregation", c.aggregation == Aggregation::pool ? "pool" : "vertical"},
          {"restrict_to_lcc", c.restrict_to_lcc},
          {"exclude_cues", c.exclude_cues},
          {"pfa_grid", c.pfa_grid},
          {"max_abort_fraction", c.max_abort_fraction}};
}

std::uint64_t config_hash(const json& j) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<SweepPoint> expand_sweep(const json& j) {
  if (!j.is_object()) throw InputError("experiment config must be an object");
  if (!j.contains("sweep")) return {{"", json(), parse_experiment(j)}};
  const json& sw = j.at("sweep");
  check_keys(sw, {"pointer", "values"}, "sweep");
  const auto pointer_text = get_or<std::string>(sw, "pointer", "");
  if (!sw.contains("values") || !sw.at("values").is_array() || sw.at("values").empty()) {
    throw InputError("sweep needs a nonempty values list");
  }
  json::json_pointer pointer;
  try {
    pointer = json::json_pointer(pointer_text);
  } catch (const json::exception& e) {
    throw InputError(fmt::format("bad sweep pointer '{}': {}", pointer_text, e.what()));
  }
  const std::string key = pointer.empty() ? "value" : pointer.back();
  std::vector<SweepPoint> out;
  for (const auto& v : sw.at("values")) {
    json doc = j;
    doc.erase("sweep");
    doc[pointer] = v;
    std::string label = key + "_" + (v.is_string() ? v.get<std::string>() : v.dump());
    std::replace_if(label.begin(), label.end(), [](char ch) { return ch == '/' || ch == ' ' || ch == '"'; }, '_');
    out.push_back({label, v, parse_experiment(doc)});
  }
  return out;
}

TrialOutcome run_trial(const ExperimentConfig& config, std::size_t trial, bool parallel) {
  TrialOutcome out;
  try {
    const std::uint64_t seed = derive_seed(config.seed, Stream::trial, trial);
    const GeneratedNetwork net = generate(config, seed, parallel);

    std::vector<Vertex> keep;
    if (config.restrict_to_lcc) {
      keep = largest_component(net.graph);
    } else {
      keep.resize(net.graph.order());
      for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = i;
    }
    const Graph h = config.restrict_to_lcc ? induced_subgraph(net.graph, keep) : net.graph;
    std::vector<int> truth(keep.size());
    std::vector<Vertex> fg;
    for (std::size_t i = 0; i < keep.size(); ++i) {
      truth[i] = net.truth[keep[i]];
      if (truth[i] == 1) fg.push_back(i);
    }
    if (fg.size() < config.cues) throw InputError("too few foreground vertices in the component");
    if (fg.size() == keep.size() && config.exclude_cues) throw InputError("no background vertex in the component");

    // Cues: distinct foreground vertices by partial Fisher-Yates.
    auto re = stream(seed, Stream::cue);
    std::vector<Observation> cues;
    for (std::size_t q = 0; q < config.cues; ++q) {
      const auto span = fg.size() - q;
      const auto k = q + std::min(static_cast<std::size_t>(re.uniform() * static_cast<double>(span)), span - 1);
      std::swap(fg[q], fg[k]);
      auto tre = stream(seed, Stream::cue, 1, q);
      cues.push_back({fg[q], cue_time(net, keep[fg[q]], tre), config.cue_probability});
    }
    const ObservationSet obs(cues);

    std::vector<bool> is_cue(keep.size(), false);
    for (const auto& o : cues) is_cue[o.vertex] = true;

    for (const auto& d : config.detectors) {
      const std::vector<double> scores = run_detector(d, h, obs, parallel);
      TrialScores ts;
      for (std::size_t i = 0; i < keep.size(); ++i) {
        if (config.exclude_cues && is_cue[i]) continue;
        ts.scores.push_back(scores[i]);
        ts.truth.push_back(truth[i]);
      }
      out.scores.push_back(std::move(ts));
    }
  } catch (const std::exception& e) {
    out.ok = false;
    out.reason = e.what();
    out.scores.clear();
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config, bool parallel) {
  std::vector<TrialOutcome> outcomes(config.trials);
  const auto count = static_cast<std::ptrdiff_t>(config.trials);
  if (parallel && !kernels::in_parallel_region()) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t t = 0; t < count; ++t) {
      outcomes[static_cast<std::size_t>(t)] = run_trial(config, static_cast<std::size_t>(t), false);
    }
  } else {
    for (std::ptrdiff_t t = 0; t < count; ++t) {
      outcomes[static_cast<std::size_t>(t)] = run_trial(config, static_cast<std::size_t>(t), false);
    }
  }

  ExperimentResult result;
  result.trials = config.trials;
  result.hash = config_hash(config.source);
  result.detectors.resize(config.detectors.size());
  for (std::size_t d = 0; d < config.detectors.size(); ++d) result.detectors[d].name = config.detectors[d].name;
  for (std::size_t t = 0; t < outcomes.size(); ++t) {
    auto& o = outcomes[t];
    if (!o.ok) {
      ++result.aborted;
      result.abort_reasons.push_back(fmt::format("trial {}: {}", t, o.reason));
      spdlog::warn("trial {} aborted: {}", t, o.reason);
      continue;
    }
    for (std::size_t d = 0; d < o.scores.size(); ++d) result.detectors[d].trials.push_back(std::move(o.scores[d]));
  }
  const double fraction = static_cast<double>(result.aborted) / static_cast<double>(config.trials);
  if (fraction > config.max_abort_fraction) {
    throw NumericalError(fmt::format("{} of {} trials aborted (first: {})", result.aborted, config.trials,
                                     result.abort_reasons.front()),
                         fraction);
  }
  for (auto& det : result.detectors) {
    det.curve = aggregate(det.trials, config.aggregation);
    det.convexity = convexity_defect(det.curve);
  }
  return result;
}

json summary_json(const ExperimentConfig& config, const ExperimentResult& result) {
  json dets = json::object();
  for (const auto& d : result.detectors) {
    json grid = json::array();
    for (double x : config.pfa_grid) {
      grid.push_back({{"pfa", x}, {"pd", pd_at_pfa(d.curve, x)}, {"se", se_at_pfa(d.curve, x)}});
    }
    dets[d.name] = {{"auc", d.curve.auc},
                    {"auc_se", d.curve.auc_se},
                    {"convexity_defect", d.convexity},
                    {"foreground", d.curve.foreground},
                    {"background", d.curve.background},
                    {"pd_at_pfa", grid}};
  }
  return {{"name", config.name},
          {"version", THREATNET_VERSION},
          {"seed", config.seed},
          {"config_hash", fmt::format("{:016x}", result.hash)},
          {"trials", result.trials},
          {"completed", result.trials - result.aborted},
          {"aborted", result.aborted},
          {"abort_reasons", result.abort_reasons},
          {"detectors", dets},
          {"config", config.source}};
}

void write_experiment(const std::filesystem::path& dir, const ExperimentConfig& config,
                      const ExperimentResult& result) {
  const std::string meta =
      fmt::format("threatnet {} config_hash={:016x} seed={}", THREATNET_VERSION, result.hash, config.seed);
  std::vector<PlotSeries> series;
  for (const auto& d : result.detectors) {
    write_roc_csv(dir / fmt::format("roc_{}.csv", d.name), d.curve, meta + " detector=" + d.name);
    series.push_back({fmt::format("{} (AUC {:.3f})", d.name, d.curve.auc), d.curve});
  }
  {
    auto out = io::open_output(dir / "summary.json");
    out << summary_json(config, result).dump(2) << '\n';
    if (!out) throw InputError("failed writing " + (dir / "summary.json").string());
  }
  write_roc_svg(dir / "roc.svg", series, config.name);
}

}  // namespace threatnet
