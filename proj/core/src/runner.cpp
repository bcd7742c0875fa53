#include "angio/runner.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#ifndef ANGIO_VERSION
#define ANGIO_VERSION "0.0.0"
#endif

namespace angio {

namespace {

using nlohmann::json;

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    parts.emplace_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double to_double(const std::string& s, std::string_view what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("initial: cannot read " + std::string(what) +
                                " from '" + s + "'");
  }
}

bool is_preset_name(std::string_view name) {
  for (const auto& p : preset_names()) {
    if (p == name) return true;
  }
  return false;
}

std::string format_time(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", t);
  return buf;
}

void write_snapshot(const std::filesystem::path& dir, const SimState& state) {
  const RealField p = backward(state.primary());
  std::ofstream out(dir / ("snapshot_" + format_time(state.time) + ".csv"));
  if (!out) throw std::runtime_error("cannot write snapshot in " + dir.string());
  out << "x,p\n";
  char buf[80];
  const auto& grid = p.grid();
  for (int j = 0; j < grid.n_nodes(); ++j) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", grid.node(j), p[j]);
    out << buf;
  }
}

json config_json(const RunConfig& c) {
  return json{
      {"model", std::string(to_string(c.params.model))},
      {"alpha", c.params.alpha},
      {"beta", c.params.beta},
      {"epsilon", c.params.epsilon},
      {"chi", c.params.chi},
      {"n_modes", c.n_nodes},
      {"t_final", c.integrator.t_final},
      {"rtol", c.integrator.rtol},
      {"atol", c.integrator.atol},
      {"dt_init", c.integrator.dt_init},
      {"dt_max", c.integrator.dt_max},
      {"initial", c.initial.text},
      {"preset", c.preset},
      {"output_every", c.integrator.output_every},
      {"output_dir", c.output_dir.string()},
      {"no_dealias", !c.params.dealias},
      {"seed", c.seed},
  };
}

}  // namespace

std::string_view library_version() { return ANGIO_VERSION; }

InitialCondition InitialCondition::parse(std::string_view text) {
  InitialCondition ic;
  ic.text = std::string(text);
  if (text.empty()) throw std::invalid_argument("initial: empty profile");

  if (is_preset_name(text)) {
    InitialCondition p = preset(text).initial;
    p.text = std::string(text);
    return p;
  }

  const auto terms = split(text, '+');
  const auto head = split(terms.front(), ':');
  if (head.front() == "chirp" || head.front() == "random") {
    if (terms.size() != 1 || head.size() != 3) {
      throw std::invalid_argument("initial: expected '" + head.front() +
                                  ":A:" +
                                  (head.front() == "chirp" ? "B" : "KMAX") +
                                  "', got '" + std::string(text) + "'");
    }
    ic.amplitude = to_double(head[1], "amplitude");
    if (head.front() == "chirp") {
      ic.kind = Kind::chirp;
      ic.rate = to_double(head[2], "chirp rate");
    } else {
      ic.kind = Kind::random;
      const double kmax = to_double(head[2], "KMAX");
      if (kmax < 1 || kmax != std::floor(kmax)) {
        throw std::invalid_argument("initial: KMAX must be a positive integer");
      }
      ic.k_max = static_cast<int>(kmax);
    }
    return ic;
  }

  ic.kind = Kind::sines;
  for (const auto& term : terms) {
    const auto f = split(term, ':');
    if (f.front() != "sine" || f.size() < 3 || f.size() > 4) {
      throw std::invalid_argument("initial: cannot parse term '" + term +
                                  "' (expected sine:A:K[:PHI], chirp:A:B, "
                                  "random:A:KMAX or a preset name)");
    }
    SineTerm s;
    s.amplitude = to_double(f[1], "amplitude");
    s.wavenumber = to_double(f[2], "wavenumber");
    if (f.size() == 4) s.phase = to_double(f[3], "phase");
    ic.sines.push_back(s);
  }
  return ic;
}

RealField InitialCondition::sample(const SpectralGrid& grid,
                                   std::uint64_t seed) const {
  std::vector<double> v(grid.n_nodes(), 0.0);
  switch (kind) {
    case Kind::sines:
      for (int j = 0; j < grid.n_nodes(); ++j) {
        const double x = grid.node(j);
        for (const auto& s : sines) {
          v[j] += s.amplitude * std::sin(s.wavenumber * x + s.phase);
        }
      }
      break;
    case Kind::chirp:
      // Not periodic: sampled as-is, the seam at x = 2*pi becomes a jump.
      for (int j = 0; j < grid.n_nodes(); ++j) {
        const double x = grid.node(j);
        v[j] = amplitude * std::sin(rate * x * x);
      }
      break;
    case Kind::random: {
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      for (int k = 1; k <= k_max; ++k) {
        const double a = amplitude * unit(rng) / k;
        const double phi = kTwoPi * unit(rng);
        for (int j = 0; j < grid.n_nodes(); ++j) {
          v[j] += a * std::sin(k * grid.node(j) + phi);
        }
      }
      break;
    }
  }
  return RealField(grid, std::move(v));
}

void RunConfig::validate() const {
  try {
    params.validate();
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  if (n_nodes < 8 || n_nodes % 2 != 0) {
    throw std::invalid_argument(
        "config: n_modes must be an even integer >= 8, got " +
        std::to_string(n_nodes));
  }
  try {
    integrator.validate();
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  if (!std::isfinite(initial_scale)) {
    throw std::invalid_argument("config: initial scale must be finite");
  }
  if (params.model == ModelKind::general && !(params.alpha > 0.0)) {
    throw std::invalid_argument(
        "config: alpha = 0 requires model 'alpha0' (the general model needs "
        "alpha > 0)");
  }
  if (initial.kind == InitialCondition::Kind::random &&
      initial.k_max > n_nodes / 2 - 1) {
    throw std::invalid_argument("config: random initial KMAX exceeds grid");
  }
}

std::vector<std::string> preset_names() {
  return {"fig_alpha0", "fig_alpha1", "fig_alpha2"};
}

RunConfig preset(std::string_view name) {
  RunConfig c;
  c.preset = std::string(name);
  c.params.beta = 2.0;
  c.params.epsilon = 1.0;
  c.params.chi = 2.0 * c.params.beta + 1.0;
  c.integrator.rtol = 1e-8;
  c.integrator.atol = 1e-10;
  c.integrator.dt_init = 1e-4;
  c.integrator.dt_max = 1e-2;
  c.output_dir = std::string(name);

  if (name == "fig_alpha0") {
    c.params.model = ModelKind::alpha0;
    c.params.alpha = 0.0;
    c.n_nodes = 4096;
    c.initial.kind = InitialCondition::Kind::sines;
    c.initial.sines = {{-2.0, 4.0, 0.0}};
    c.integrator.t_final = 2.0;
    c.integrator.output_every = 0.01;
  } else if (name == "fig_alpha1") {
    c.params.model = ModelKind::alpha1;
    c.params.alpha = 1.0;
    c.n_nodes = 1024;
    c.initial.kind = InitialCondition::Kind::sines;
    c.initial.sines = {{-4.0, 10.0, 0.0}};
    // 90% amplitude decay by t ~ 0.2.
    c.integrator.t_final = 0.5;
    c.integrator.output_every = 0.01;
  } else if (name == "fig_alpha2") {
    c.params.model = ModelKind::alpha2;
    c.params.alpha = 2.0;
    c.n_nodes = 4096;
    c.initial.kind = InitialCondition::Kind::chirp;
    c.initial.amplitude = -6.0;
    c.initial.rate = 4.0;
    // 90% amplitude decay by t ~ 0.8.
    c.integrator.t_final = 2.0;
    c.integrator.output_every = 0.02;
  } else {
    throw std::invalid_argument("unknown preset '" + std::string(name) +
                                "' (expected fig_alpha0, fig_alpha1 or "
                                "fig_alpha2)");
  }
  c.initial.text = std::string(name);
  return c;
}

SimState make_initial_state(const RunConfig& config) {
  const SpectralGrid grid(config.n_nodes);
  RealField p0 = config.initial.sample(grid, config.seed);
  for (double& v : p0.values()) v *= config.initial_scale;
  Spectrum p = forward(p0);
  p[0] = Complex{};
  p[grid.nyquist()] = Complex{};
  if (config.params.dealias) truncate_to_dealiased_band(p);

  if (config.params.model != ModelKind::full_system) {
    return SimState::reduced(0.0, std::move(p));
  }
  const double c = config.params.epsilon / config.params.chi;
  Spectrum q(grid), v(grid);
  for (std::size_t k = 0; k < p.size(); ++k) {
    q[k] = c * p[k];
    v[k] = -c * p[k];
  }
  return SimState::full(0.0, std::move(v), std::move(q));
}

RunConfig apply_json_config(const std::string& json_text, RunConfig base) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: malformed JSON: ") +
                                e.what());
  }
  if (!doc.is_object()) {
    throw std::invalid_argument("config: top level must be a JSON object");
  }
  static const std::set<std::string> known{
      "model",   "alpha",   "beta",    "epsilon", "chi",
      "n_modes", "t_final", "rtol",    "atol",    "dt_init",
      "dt_max",  "initial", "preset",  "output_every",
      "output_dir", "no_dealias", "seed"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.contains(key)) {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }

  auto get = [&](const char* key, auto& target) {
    if (!doc.contains(key)) return;
    try {
      doc.at(key).get_to(target);
    } catch (const json::exception&) {
      throw std::invalid_argument(std::string("config: bad value for '") +
                                  key + "'");
    }
  };

  RunConfig c = std::move(base);
  if (doc.contains("preset")) {
    std::string name;
    get("preset", name);
    c = preset(name);
  }
  if (doc.contains("model")) {
    std::string m;
    get("model", m);
    c.params.model = parse_model_kind(m);
  }
  get("alpha", c.params.alpha);
  get("beta", c.params.beta);
  get("epsilon", c.params.epsilon);
  if (doc.contains("beta") && !doc.contains("chi")) {
    c.params.chi = 2.0 * c.params.beta + 1.0;
  }
  get("chi", c.params.chi);
  get("n_modes", c.n_nodes);
  get("t_final", c.integrator.t_final);
  get("rtol", c.integrator.rtol);
  get("atol", c.integrator.atol);
  get("dt_init", c.integrator.dt_init);
  get("dt_max", c.integrator.dt_max);
  get("output_every", c.integrator.output_every);
  if (doc.contains("initial")) {
    std::string text;
    get("initial", text);
    c.initial = InitialCondition::parse(text);
  }
  if (doc.contains("output_dir")) {
    std::string dir;
    get("output_dir", dir);
    c.output_dir = dir;
  }
  if (doc.contains("no_dealias")) {
    bool off = false;
    get("no_dealias", off);
    c.params.dealias = !off;
  }
  get("seed", c.seed);
  c.validate();
  return c;
}

RunConfig parse_config(std::span<const std::string> args) {
  CLI::App app{"angio run"};
  app.allow_extras(false);

  std::string model, initial, preset_name, output_dir, config_path;
  double alpha = 0, beta = 0, epsilon = 0, chi = 0, t_final = 0, rtol = 0,
         atol = 0, dt_init = 0, dt_max = 0, output_every = 0;
  int n_modes = 0;
  std::uint64_t seed = 0;

  auto* o_model = app.add_option("--model", model, "general|alpha0|alpha1|alpha2|full_system");
  auto* o_alpha = app.add_option("--alpha", alpha, "nonlocality order in [0, 2]");
  auto* o_beta = app.add_option("--beta", beta, "drift/diffusion weight, > -1");
  auto* o_eps = app.add_option("--epsilon", epsilon, "asymptotic parameter, > 0");
  auto* o_chi = app.add_option("--chi", chi, "chemotactic sensitivity (full system)");
  auto* o_n = app.add_option("--n-modes", n_modes, "number of grid nodes (even, >= 8)");
  auto* o_tf = app.add_option("--t-final", t_final, "final time");
  auto* o_rtol = app.add_option("--rtol", rtol, "relative tolerance");
  auto* o_atol = app.add_option("--atol", atol, "absolute tolerance");
  auto* o_dti = app.add_option("--dt-init", dt_init, "initial step");
  auto* o_dtm = app.add_option("--dt-max", dt_max, "largest step");
  auto* o_init = app.add_option("--initial", initial, "initial profile");
  auto* o_preset = app.add_option("--preset", preset_name, "fig_alpha0|fig_alpha1|fig_alpha2");
  auto* o_every = app.add_option("--output-every", output_every, "output spacing in time");
  auto* o_dir = app.add_option("--output-dir", output_dir, "output directory");
  auto* o_nodeal = app.add_flag("--no-dealias", "disable the 2/3 rule");
  auto* o_seed = app.add_option("--seed", seed, "seed for random profiles");
  auto* o_config = app.add_option("--config", config_path, "JSON config file");

  std::vector<const char*> argv{"angio"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    throw std::invalid_argument(std::string("flags: ") + e.what());
  }

  RunConfig c;
  if (o_preset->count() > 0) c = preset(preset_name);
  if (o_config->count() > 0) {
    std::ifstream in(config_path);
    if (!in) {
      throw std::invalid_argument("config: cannot open '" + config_path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    c = apply_json_config(ss.str(), std::move(c));
    // An explicit --preset wins over a preset named in the file, but the
    // file's other keys still apply on top of it.
    if (o_preset->count() > 0 && c.preset != preset_name) {
      json doc = json::parse(ss.str());
      doc.erase("preset");
      c = apply_json_config(doc.dump(), preset(preset_name));
    }
  }

  if (o_model->count() > 0) c.params.model = parse_model_kind(model);
  if (o_alpha->count() > 0) c.params.alpha = alpha;
  if (o_beta->count() > 0) {
    c.params.beta = beta;
    if (o_chi->count() == 0) c.params.chi = 2.0 * beta + 1.0;
  }
  if (o_eps->count() > 0) c.params.epsilon = epsilon;
  if (o_chi->count() > 0) c.params.chi = chi;
  if (o_n->count() > 0) c.n_nodes = n_modes;
  if (o_tf->count() > 0) c.integrator.t_final = t_final;
  if (o_rtol->count() > 0) c.integrator.rtol = rtol;
  if (o_atol->count() > 0) c.integrator.atol = atol;
  if (o_dti->count() > 0) c.integrator.dt_init = dt_init;
  if (o_dtm->count() > 0) c.integrator.dt_max = dt_max;
  if (o_init->count() > 0) c.initial = InitialCondition::parse(initial);
  if (o_every->count() > 0) c.integrator.output_every = output_every;
  if (o_dir->count() > 0) c.output_dir = output_dir;
  if (o_nodeal->count() > 0) c.params.dealias = false;
  if (o_seed->count() > 0) c.seed = seed;

  if (c.integrator.dt_init > c.integrator.dt_max) {
    c.integrator.dt_init = c.integrator.dt_max;
  }
  c.validate();
  return c;
}

std::string to_json(const RunConfig& config) {
  return config_json(config).dump(2);
}

RunResult run(const RunConfig& config, bool write_files) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();

  if (write_files) std::filesystem::create_directories(config.output_dir);

  RunResult result;
  const SimState initial = make_initial_state(config);

  const bool snapshots = write_files && config.write_snapshots;
  auto observer = [&](const SimState& s, const StepInfo& info) {
    if (!info.output_instant) return;
    result.records.push_back(
        compute_diagnostics(s.primary(), config.params, s.time, info.dt));
    if (snapshots) write_snapshot(config.output_dir, s);
  };

  json report_json;
  try {
    IntegrationResult ir = integrate(initial, config.params,
                                     config.integrator, observer,
                                     config.monitors);
    result.report = ir.report;
    result.final_state = std::move(ir.final_state);
    result.exit_code = exit_code(ir.report.status);
    if (result.records.empty() ||
        result.records.back().time != result.final_state.time) {
      result.records.push_back(
          compute_diagnostics(result.final_state.primary(), config.params,
                              result.final_state.time, ir.report.last_dt));
      if (snapshots) write_snapshot(config.output_dir, result.final_state);
    }
    const auto& r = result.report;
    report_json = {{"status", std::string(to_string(r.status))},
                   {"time", r.time},
                   {"accepted_steps", r.accepted_steps},
                   {"rejected_steps", r.rejected_steps},
                   {"last_dt", r.last_dt},
                   {"smallest_dt", r.smallest_dt},
                   {"gradient_growth", r.gradient_growth},
                   {"tail_fraction", r.tail_fraction},
                   {"detail", r.detail}};
  } catch (const IntegrationError& e) {
    result.exit_code = 1;
    report_json = {{"status", "error"}, {"detail", e.what()}};
    if (write_files) {
      std::ofstream(config.output_dir / "run.json")
          << json{{"config", config_json(config)},
                  {"termination", report_json},
                  {"version", std::string(library_version())}}
                 .dump(2)
          << "\n";
    }
    throw std::runtime_error(std::string("run failed: ") + e.what());
  }

  result.wall_seconds = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();

  if (write_files) {
    std::ofstream ts(config.output_dir / "timeseries.csv");
    if (!ts) {
      throw std::runtime_error("cannot write timeseries.csv in " +
                               config.output_dir.string());
    }
    ts << diagnostics_csv_header() << "\n";
    for (const auto& rec : result.records) ts << to_csv_row(rec) << "\n";

    std::ofstream meta(config.output_dir / "run.json");
    meta << json{{"config", config_json(config)},
                 {"termination", report_json},
                 {"wall_seconds", result.wall_seconds},
                 {"version", std::string(library_version())}}
                .dump(2)
         << "\n";
  }
  return result;
}

}  // namespace angio
