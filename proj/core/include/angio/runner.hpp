#pragma once

// Run configuration, the figure presets, config parsing and the output
// writer behind the `angio run` command.
//
// Output directory layout:
//   timeseries.csv        one DiagnosticsRecord per output instant
//   snapshot_<t>.csv      x,p samples at each output instant
//   run.json              config, termination report, wall time, version

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "angio/diagnostics.hpp"
#include "angio/integrator.hpp"
#include "angio/model.hpp"

namespace angio {

std::string_view library_version();

struct SineTerm {
  double amplitude = 0.0;
  double wavenumber = 0.0;
  double phase = 0.0;
};

/// Initial profile p0(x). Text forms:
///   "sine:A:K[:PHI]" terms joined by '+'   sum A sin(K x + PHI)
///   "chirp:A:B"                             A sin(B x^2), sampled pointwise
///   "random:A:KMAX"                         seeded random modes 1..KMAX
///   "fig_alpha0" | "fig_alpha1" | "fig_alpha2"  the preset profiles
struct InitialCondition {
  enum class Kind { sines, chirp, random };
  Kind kind = Kind::sines;
  std::vector<SineTerm> sines;
  double amplitude = 0.0;  ///< chirp and random
  double rate = 0.0;       ///< chirp B
  int k_max = 0;           ///< random
  std::string text;

  static InitialCondition parse(std::string_view text);
  /// Samples the profile at the grid nodes (no projection).
  RealField sample(const SpectralGrid& grid, std::uint64_t seed) const;
};

struct RunConfig {
  ModelParams params;
  int n_nodes = 512;
  IntegratorConfig integrator;
  MonitorConfig monitors;
  InitialCondition initial;
  /// Multiplies the initial profile.
  double initial_scale = 1.0;
  std::string preset;
  std::filesystem::path output_dir = "angio_out";
  std::uint64_t seed = 0;
  bool write_snapshots = true;

  /// Throws std::invalid_argument naming the offending key.
  void validate() const;
};

/// fig_alpha0, fig_alpha1 or fig_alpha2; throws std::invalid_argument
/// otherwise.
RunConfig preset(std::string_view name);
std::vector<std::string> preset_names();

/// Projected initial state: mean and Nyquist removed, and restricted to the
/// dealiased band when dealiasing is on. For the full system the profile
/// p0 is mapped to u - 1 = -eps p0 / chi, q = eps p0 / chi.
SimState make_initial_state(const RunConfig& config);

/// Applies a JSON config document on top of `base`. Keys are the long flag
/// names with '-' replaced by '_'; unknown keys are rejected.
RunConfig apply_json_config(const std::string& json_text, RunConfig base);

/// Parses command-line flags (without the program/subcommand name):
///   --model --alpha --beta --epsilon --chi --n-modes --t-final --rtol
///   --atol --dt-init --dt-max --initial --preset --output-every
///   --output-dir --no-dealias --seed --config
/// Precedence: preset < config file < explicit flags.
RunConfig parse_config(std::span<const std::string> args);

struct RunResult {
  TerminationReport report;
  int exit_code = 0;
  double wall_seconds = 0.0;
  std::vector<DiagnosticsRecord> records;
  SimState final_state;
};

/// Runs the scenario. Writes output files when `write_files` is set.
RunResult run(const RunConfig& config, bool write_files = true);

/// Configuration as a JSON document (the "config" block of run.json).
std::string to_json(const RunConfig& config);

}  // namespace angio
