// angio: command-line front end.
//
//   angio run [flags]            one integration, files under --output-dir
//   angio validate <suite>       JSON report on stdout
//   angio presets                list preset names
//   angio version

#include <cmath>
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "angio/runner.hpp"
#include "angio/validation.hpp"

namespace {

constexpr const char* kUsage =
    "usage: angio run [--preset NAME] [--config FILE] [flags]\n"
    "       angio validate linear|cross_check|asymptotic|fixed_step|"
    "self_convergence\n"
    "       angio presets\n"
    "       angio version\n"
    "run 'angio run --help' for the flag list\n";

constexpr const char* kRunFlags =
    "flags (later sources win: preset < --config file < flags):\n"
    "  --preset NAME        fig_alpha0 | fig_alpha1 | fig_alpha2\n"
    "  --config FILE        JSON document, keys as below with '-' -> '_'\n"
    "  --model KIND         general | alpha0 | alpha1 | alpha2 | full_system\n"
    "  --alpha A            nonlocality order in [0, 2]\n"
    "  --beta B             > -1\n"
    "  --epsilon E          > 0\n"
    "  --chi C              chemotactic sensitivity (full_system only)\n"
    "  --n-modes N          grid nodes, even and >= 8\n"
    "  --t-final T\n"
    "  --rtol R  --atol A  --dt-init DT  --dt-max DT\n"
    "  --initial SPEC       sine:A:K[:PHI][+...] | chirp:A:B | random:A:KMAX\n"
    "  --output-every DT    0 writes only the initial and final states\n"
    "  --output-dir DIR\n"
    "  --no-dealias\n"
    "  --seed S\n";

int cmd_run(const std::vector<std::string>& args) {
  for (const auto& a : args) {
    if (a == "-h" || a == "--help") {
      std::cout << kRunFlags;
      return 0;
    }
  }
  const angio::RunConfig config = angio::parse_config(args);
  const angio::RunResult r = angio::run(config);
  std::fprintf(stderr, "%s at t = %.6g after %lld steps (%.2f s), output in %s\n",
               std::string(angio::to_string(r.report.status)).c_str(),
               r.report.time, static_cast<long long>(r.report.accepted_steps),
               r.wall_seconds, config.output_dir.string().c_str());
  return r.exit_code;
}

std::vector<angio::ConvergenceReport> suite(const std::string& name) {
  using namespace angio;
  std::vector<ConvergenceReport> out;
  if (name == "linear") {
    ConvergenceReport rep;
    rep.name = "linear_oracle";
    rep.parameter = "k";
    IntegratorConfig cfg;
    rep.threshold = 10.0 * cfg.rtol;
    rep.passed = true;
    for (int alpha : {0, 1, 2}) {
      ModelParams p;
      p.alpha = alpha;
      p.model = alpha == 0 ? ModelKind::alpha0 : ModelKind::general;
      for (int k : {1, 2, 4, 10}) {
        const double e = linear_oracle_error(k, p, 1.0, cfg);
        rep.values.push_back(k);
        rep.errors.push_back(e);
        rep.metadata.emplace_back(
            "alpha" + std::to_string(alpha) + "_k" + std::to_string(k), e);
        if (!(e <= rep.threshold)) rep.passed = false;
      }
    }
    rep.verdict = rep.passed ? "within tolerance" : "exceeds tolerance";
    out.push_back(rep);
  } else if (name == "cross_check") {
    for (int alpha : {0, 1, 2}) out.push_back(cross_check_rhs(alpha, 100));
  } else if (name == "asymptotic") {
    const SpectralGrid grid(512);
    std::vector<double> v(grid.n_nodes());
    for (int j = 0; j < grid.n_nodes(); ++j) v[j] = 0.5 * std::sin(grid.node(j));
    ModelParams p;
    p.alpha = 2.0;
    p.beta = 2.0;
    p.chi = 5.0;
    const std::vector<double> eps{0.1, 0.05, 0.025};
    out.push_back(asymptotic_consistency(eps, 0.5, RealField(grid, v), p));
  } else if (name == "fixed_step") {
    ModelParams p;
    const std::vector<double> dts{0.1, 0.05, 0.025};
    out.push_back(fixed_step_order(4, p, 1.0, dts));
  } else if (name == "self_convergence") {
    const std::vector<RefinementLevel> levels{{256, 1e-10}, {512, 1e-10},
                                              {1024, 1e-10}};
    out.push_back(self_convergence(preset("fig_alpha1"), levels, 0.2));
  } else {
    throw std::invalid_argument("unknown validation suite '" + name + "'");
  }
  return out;
}

int cmd_validate(const std::vector<std::string>& args) {
  if (args.size() != 1) {
    std::cerr << kUsage;
    return 1;
  }
  bool ok = true;
  for (const auto& rep : suite(args[0])) {
    std::cout << angio::to_json(rep) << '\n';
    ok = ok && rep.passed;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << kUsage;
    return 1;
  }
  const std::string cmd = argv[1];
  const std::vector<std::string> rest(argv + 2, argv + argc);
  try {
    if (cmd == "run") return cmd_run(rest);
    if (cmd == "validate") return cmd_validate(rest);
    if (cmd == "presets") {
      for (const auto& n : angio::preset_names()) std::cout << n << '\n';
      return 0;
    }
    if (cmd == "version") {
      std::cout << angio::library_version() << '\n';
      return 0;
    }
    if (cmd == "-h" || cmd == "--help") {
      std::cout << kUsage;
      return 0;
    }
    std::cerr << "angio: unknown command '" << cmd << "'\n" << kUsage;
  } catch (const std::exception& e) {
    std::cerr << "angio: " << e.what() << '\n';
  }
  return 1;
}
