#pragma once

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sphpart::cli {

inline constexpr int kSchemaVersion = 1;

// Usage problems detected after parsing (exit code 1).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SpectrumConfig {
  std::string mode = "sphere";  // sphere | covering | antisymmetric
  int count = 9;
  std::optional<int> level;     // icosphere level (sphere, covering) or seamed level (antisymmetric)
  int seamed_level = 3;         // covering mode only
  double cluster_gap = 0.05;
  double tol = 1e-8;
};

struct EvaluateConfig {
  std::string partition;  // hemispheres | y | lunes:k | tetra
  std::string mesh = "auto";  // auto | icosphere
  int level = 5;
  std::vector<double> p{1.0, 2.0};
  double tol = 1e-8;
};

struct BoundsConfig {
  int k_min = 2;
  int k_max = 5;
};

struct CapConfig {
  double S = 0.5;
  std::optional<int> fem_level;  // icosphere cross-check when set
  double tol = 1e-8;
};

struct OptimizeConfig {
  int k = 3;
  int seeds = 10;
  std::uint64_t first_seed = 0;
  int level = 4;
  std::vector<double> p_schedule{1.0, 2.0, 4.0, 8.0};
  int max_iters = 30;
  int polish_sweeps = 8;
  double penalty_scale = 1.0;
  double tol = 1e-8;
};

/// Parses "a..b" or "a" into an inclusive range.
std::pair<int, int> parse_k_range(const std::string& text);

nlohmann::json run_spectrum(const SpectrumConfig& c);
nlohmann::json run_evaluate(const EvaluateConfig& c);
nlohmann::json run_bounds(const BoundsConfig& c);
nlohmann::json run_cap(const CapConfig& c);
/// With `out_dir`, the best labeling is written as OBJ plus sidecar JSON.
nlohmann::json run_optimize(const OptimizeConfig& c, const std::optional<std::string>& out_dir);

}  // namespace sphpart::cli
