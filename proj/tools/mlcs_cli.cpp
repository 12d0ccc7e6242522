// Command-line front end for the experiment runners.
//
// Exit codes: 0 success, 1 runtime failure, 2 configuration error,
// 3 solver non-convergence with --strict.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mlcs/experiments.hpp"
#include "mlcs/image_io.hpp"
#include "mlcs/phantom.hpp"

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> threads;
  bool strict = false;
  bool quiet = false;
};

void add_common(CLI::App* sub, CommonFlags& f) {
  sub->add_option("--config", f.config, "JSON experiment config")->check(CLI::ExistingFile);
  sub->add_option("--seed", f.seed, "Root seed (overrides the config)");
  sub->add_option("--out-dir", f.out_dir, "Output directory (overrides the config)");
  sub->add_option("--threads", f.threads, "Concurrent cases (overrides the config)")->check(CLI::PositiveNumber);
  sub->add_flag("--strict", f.strict, "Exit with status 3 if any solve did not converge");
  sub->add_flag("-q,--quiet", f.quiet, "Only print the report path");
}

int run(const std::string& experiment, const CommonFlags& f) {
  mlcs::ExperimentConfig cfg = f.config.empty() ? mlcs::ExperimentConfig{} : mlcs::ExperimentConfig::load(f.config);
  cfg.experiment = experiment;
  if (f.seed) cfg.seed = *f.seed;
  if (f.out_dir) cfg.out_dir = *f.out_dir;
  if (f.threads) cfg.threads = *f.threads;

  const mlcs::RunReport report = mlcs::run_experiment(cfg);
  const std::string path = (std::filesystem::path(cfg.out_dir) / "report.json").string();
  if (f.quiet) {
    std::cout << path << "\n";
  } else {
    for (const auto& c : report.cases) {
      std::cout << c.name << "  err=" << c.error_percent << "%  iters=" << c.iterations
                << (c.converged ? "" : " (not converged)") << "  " << c.seconds << "s\n";
    }
    std::cout << report.summary.dump(2) << "\n" << "report: " << path << "\n";
  }
  if (f.strict && !report.all_converged()) {
    std::cerr << "error: solver did not converge in every case\n";
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multilevel compressed sensing experiments"};
  app.require_subcommand(1);

  const std::pair<const char*, const char*> experiments[] = {
      {"flip-test", "Recover an image and its flipped-coefficient twin"},
      {"flip-test-levels", "Flip test with reversal inside every wavelet level"},
      {"compare", "Random versus multilevel sampling across resolutions"},
      {"sparsity-curves", "Per-level relative effective sparsity of an image"},
      {"coherence-map", "Block coherence tables and |U| heat maps"},
      {"riplevels", "Estimate the RIP-in-levels constant of a random matrix"},
      {"allocate", "Per-level measurement counts for a sparsity pattern"},
      {"recover", "Single image recovery"},
  };
  CommonFlags flags;
  std::string chosen;
  for (const auto& [name, help] : experiments) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, flags);
    sub->callback([&chosen, n = std::string(name)] { chosen = n; });
  }

  std::string kind = "glpu", out;
  mlcs::Index side = 512;
  CLI::App* ph = app.add_subcommand("phantom", "Render a synthetic test image as PGM");
  ph->add_option("--kind", kind, "glpu or scene");
  ph->add_option("--side", side, "Image side (pixels)");
  ph->add_option("-o,--out", out, "Output PGM path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (ph->parsed()) {
      mlcs::save_pgm(mlcs::make_phantom(mlcs::phantom_kind_from_string(kind), side), out, 65535);
      return 0;
    }
    return run(chosen, flags);
  } catch (const mlcs::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::length_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
