#include "commands.hpp"

#include "sphpart/errors.hpp"
#include "sphpart/io.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>

namespace {

using nlohmann::json;
namespace cli = sphpart::cli;

void emit_error(const std::string& kind, const std::string& message, int code) {
  const json err{{"error", {{"kind", kind}, {"message", message}, {"exit_code", code}}}};
  std::cerr << err.dump() << '\n';
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int exit_code_for(const sphpart::Error& e) {
  const std::string& k = e.kind();
  return (k == "domain" || k == "capacity") ? 1 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral minimal partitions of the sphere: spectra, energies, bounds and validators."};
  app.require_subcommand(1);
  app.set_config("--config", "", "key = value file; command-line flags take precedence");

  std::optional<std::string> out_dir;
  app.add_option("--out", out_dir, "Directory for report, metadata and mesh files (env SPHPART_OUT_DIR)");

  cli::SpectrumConfig spectrum;
  auto* sp = app.add_subcommand("spectrum", "FEM eigenvalues next to the exact spectrum");
  sp->add_option("--mode", spectrum.mode, "sphere | covering | antisymmetric")
      ->check(CLI::IsMember({"sphere", "covering", "antisymmetric"}))
      ->capture_default_str();
  sp->add_option("--count", spectrum.count, "Number of eigenvalues (1..30)")
      ->check(CLI::Range(1, 30))
      ->capture_default_str();
  sp->add_option("--level", spectrum.level, "Icosphere level (sphere, covering; default 5) or seamed level "
                                            "(antisymmetric; default 3)");
  sp->add_option("--seamed-level", spectrum.seamed_level, "Seamed level used by covering mode")
      ->capture_default_str();
  sp->add_option("--cluster-gap", spectrum.cluster_gap, "Relative gap separating eigenvalue clusters")
      ->capture_default_str();
  sp->add_option("--tol", spectrum.tol, "Eigensolver residual tolerance")->capture_default_str();

  cli::EvaluateConfig evaluate;
  auto* ev = app.add_subcommand("evaluate", "Energies and validators of a named partition");
  ev->add_option("partition", evaluate.partition, "hemispheres | y | lunes:k | tetra")->required();
  ev->add_option("--mesh", evaluate.mesh, "auto (conforming grid or tetra-sphere) | icosphere")
      ->check(CLI::IsMember({"auto", "icosphere"}))
      ->capture_default_str();
  ev->add_option("--level", evaluate.level, "Mesh level")->capture_default_str();
  ev->add_option("--p", evaluate.p, "Exponents of the power means")->delimiter(',')->capture_default_str();
  ev->add_option("--tol", evaluate.tol, "Eigensolver residual tolerance")->capture_default_str();

  std::string k_range = "2..5";
  auto* bd = app.add_subcommand("bounds", "Lower-bound constants per k");
  bd->add_option("--k", k_range, "k or a range a..b")->capture_default_str();

  cli::CapConfig cap;
  auto* cp = app.add_subcommand("cap", "Characteristic constant of a spherical cap");
  cp->add_option("--S", cap.S, "Area fraction in (0, 1)")->required();
  cp->add_option("--fem-level", cap.fem_level, "Icosphere level for an FEM cross-check");
  cp->add_option("--tol", cap.tol, "Eigensolver residual tolerance")->capture_default_str();

  cli::OptimizeConfig optimize;
  auto* op = app.add_subcommand("optimize", "Relaxation search for minimal k-partitions");
  op->add_option("--k", optimize.k, "Number of domains (2..8)")->capture_default_str();
  op->add_option("--seeds", optimize.seeds, "Number of seeds")->capture_default_str();
  op->add_option("--first-seed", optimize.first_seed, "First seed")->capture_default_str();
  op->add_option("--level", optimize.level, "Icosphere level")->capture_default_str();
  op->add_option("--p-schedule", optimize.p_schedule, "Exponents annealed in order")
      ->delimiter(',')
      ->capture_default_str();
  op->add_option("--max-iters", optimize.max_iters, "Outer iterations per exponent")->capture_default_str();
  op->add_option("--polish-sweeps", optimize.polish_sweeps, "Boundary-vertex sweeps")->capture_default_str();
  op->add_option("--penalty-scale", optimize.penalty_scale, "Penalty scale of the relaxed problems")
      ->capture_default_str();
  op->add_option("--tol", optimize.tol, "Eigensolver residual tolerance")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit_error("usage", e.what(), 1);
    return 1;
  }
  // Precedence: command line, then environment, then config file.
  if (const char* env = std::getenv("SPHPART_OUT_DIR"); env && *env) {
    bool on_command_line = false;
    for (int i = 1; i < argc; ++i) {
      const std::string_view a(argv[i]);
      if (a == "--out" || a.starts_with("--out=")) on_command_line = true;
    }
    if (!on_command_line) out_dir = env;
  }

  json report;
  std::string name;
  try {
    if (*sp) {
      name = "spectrum";
      report = cli::run_spectrum(spectrum);
    } else if (*ev) {
      name = "evaluate";
      report = cli::run_evaluate(evaluate);
    } else if (*bd) {
      name = "bounds";
      const auto [lo, hi] = cli::parse_k_range(k_range);
      report = cli::run_bounds({lo, hi});
    } else if (*cp) {
      name = "cap";
      report = cli::run_cap(cap);
    } else {
      name = "optimize";
      report = cli::run_optimize(optimize, out_dir);
    }
  } catch (const cli::UsageError& e) {
    emit_error("usage", e.what(), 1);
    return 1;
  } catch (const sphpart::Error& e) {
    const int code = exit_code_for(e);
    emit_error(e.kind(), e.what(), code);
    return code;
  } catch (const std::exception& e) {
    emit_error("internal", e.what(), 2);
    return 2;
  }

  std::cout << report.dump(2) << '\n';
  if (out_dir) {
    try {
      const std::filesystem::path dir(*out_dir);
      sphpart::write_json(report, dir / (name + ".json"));
      std::vector<std::string> args(argv + 1, argv + argc);
      sphpart::write_json({{"command", name}, {"arguments", args}, {"created", utc_timestamp()},
                           {"schema_version", cli::kSchemaVersion}},
                          dir / (name + ".meta.json"));
    } catch (const std::exception& e) {
      emit_error("io", e.what(), 2);
      return 2;
    }
  }
  return 0;
}
