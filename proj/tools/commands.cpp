#include "commands.hpp"

#include "sphpart/analysis.hpp"
#include "sphpart/bounds.hpp"
#include "sphpart/exact.hpp"
#include "sphpart/fem.hpp"
#include "sphpart/geom.hpp"
#include "sphpart/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>

namespace sphpart::cli {

using nlohmann::json;

namespace {

std::string p_key(double p) {
  if (std::isinf(p)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", p);
  return buf;
}

std::vector<double> expand(const std::vector<SpectralLevel>& levels) {
  std::vector<double> out;
  for (const auto& l : levels) out.insert(out.end(), l.multiplicity, l.eigenvalue);
  return out;
}

std::vector<double> sphere_values(int count) {
  std::vector<double> out;
  for (int n = 1; static_cast<int>(out.size()) < count; ++n) out = expand(sphere_spectrum(n));
  out.resize(count);
  return out;
}

std::vector<double> antisymmetric_values(int count) {
  std::vector<double> out;
  for (int n = 1; n <= count; ++n) out.push_back(nth_antisymmetric_eigenvalue(n));
  return out;
}

std::vector<double> covering_values(int count) {
  std::vector<double> out;
  const auto levels = covering_spectrum(count);
  for (int n = 1; n <= count; ++n) out.push_back(nth_eigenvalue(levels, n));
  return out;
}

std::vector<double> eigenvalues(const EigenSolution& s) {
  std::vector<double> out;
  for (const auto& p : s.pairs) out.push_back(p.eigenvalue);
  return out;
}

json clusters_json(const std::vector<double>& values, double gap) {
  json out = json::array();
  for (auto [v, m] : cluster_eigenvalues(values, gap)) out.push_back({{"value", v}, {"multiplicity", m}});
  return out;
}

json bound_value_json(const BoundValue& b) {
  json j{{"value", b.value}};
  if (b.exact) j["exact"] = std::to_string(b.exact->num) + "/" + std::to_string(b.exact->den);
  return j;
}

struct NamedPartition {
  TriangleMesh mesh;
  PartitionLabeling labeling;
  std::string mesh_kind;
};

NamedPartition build_named(const EvaluateConfig& c) {
  const std::string& name = c.partition;
  int k = 0;
  if (name == "hemispheres") {
    k = 2;
  } else if (name == "y") {
    k = 3;
  } else if (name.rfind("lunes:", 0) == 0) {
    const std::string digits = name.substr(6);
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || k < 2 || k > 12) {
      throw UsageError("partition lunes:k needs an integer k in 2..12");
    }
  } else if (name != "tetra") {
    throw UsageError("unknown partition '" + name + "' (hemispheres, y, lunes:k, tetra)");
  }
  if (c.level < 0 || c.level > 7) throw UsageError("--level must be in 0..7");

  if (c.mesh == "icosphere") {
    TriangleMesh mesh = build_icosphere(c.level);
    PartitionLabeling l = k > 0 ? make_lune_partition(mesh, k) : make_tetrahedral_partition(mesh);
    return {std::move(mesh), std::move(l), "icosphere"};
  }
  if (c.mesh != "auto") throw UsageError("--mesh must be auto or icosphere");
  if (k == 0) {
    TriangleMesh mesh = build_tetra_sphere(c.level + 1);
    PartitionLabeling l = make_tetrahedral_partition(mesh);
    return {std::move(mesh), std::move(l), "tetra-sphere"};
  }
  // Lat-long grid whose meridians carry the lune boundaries.
  const int n_theta = 3 << c.level;
  int n_phi = 2 * n_theta;
  while (n_phi % (2 * k) != 0) ++n_phi;
  TriangleMesh mesh = build_latlong_sphere(n_theta, n_phi);
  PartitionLabeling l = make_lune_partition(mesh, k);
  return {std::move(mesh), std::move(l), "latlong"};
}

json trace_json(const std::vector<TraceEntry>& trace) {
  json out = json::array();
  for (const auto& t : trace) {
    out.push_back({{"stage", t.stage},
                   {"p", t.p},
                   {"iteration", t.iteration},
                   {"Lambda_p", t.Lambda_p},
                   {"Lambda", t.Lambda},
                   {"moved", t.moved},
                   {"accepted", t.accepted}});
  }
  return out;
}

json partition_report(const TriangleMesh& mesh, const PartitionLabeling& labeling, const PartitionEnergy& e,
                      const std::vector<TraceEntry>& trace) {
  const int k = labeling.k();
  const BoundaryGraph graph = extract_boundary(mesh, labeling);
  const EulerCheck euler = euler_check(graph, labeling);
  const AntipodalResult anti = antipodal_test(mesh, graph);
  json lp = json::object();
  for (const auto& [p, v] : e.Lambda_p) lp[p_key(p)] = v;
  json witness = nullptr;
  if (anti.witness) witness = {anti.witness->first, anti.witness->second};
  std::vector<double> sphere = sphere_values(k);
  json critical = json::array();
  for (const auto& c : graph.critical_points) critical.push_back({{"vertex", c.vertex}, {"valence", c.valence}});
  return {{"k", k},
          {"lambdas", e.lambdas},
          {"Lambda", e.Lambda},
          {"Lambda_p", lp},
          {"euler", {{"predicted", euler.predicted}, {"actual", euler.actual}, {"consistent", euler.consistent}}},
          {"admissible", is_admissible(neighbor_graph(mesh, labeling))},
          {"antipodal", {{"found", anti.found}, {"witness", witness}, {"distance", anti.distance},
                         {"tolerance", anti.tolerance}}},
          {"bounds", {{"gamma", bound_value_json(gamma_k(k))},
                      {"delta", delta_k(k)},
                      {"fermionic", fermionic_bound(sphere, k)}}},
          {"boundary", {{"edges", graph.edges.size()}, {"b1", graph.b1}, {"critical_points", critical}}},
          {"residuals", e.residuals},
          {"trace", trace_json(trace)},
          {"schema_version", kSchemaVersion}};
}

json mesh_json(const TriangleMesh& mesh, const std::string& kind) {
  return {{"kind", kind},
          {"vertices", mesh.num_vertices()},
          {"triangles", mesh.num_triangles()},
          {"max_edge", mesh.max_edge_length()}};
}

}  // namespace

std::pair<int, int> parse_k_range(const std::string& text) {
  auto parse = [&](std::string_view s) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw UsageError("bad k range '" + text + "'");
    return v;
  };
  const std::string_view sv(text);
  const auto dots = sv.find("..");
  std::pair<int, int> r;
  if (dots == std::string_view::npos) {
    r = {parse(sv), parse(sv)};
  } else {
    r = {parse(sv.substr(0, dots)), parse(sv.substr(dots + 2))};
  }
  if (r.first < 2 || r.second < r.first || r.second > 1000) throw UsageError("k range must satisfy 2 <= a <= b <= 1000");
  return r;
}

json run_spectrum(const SpectrumConfig& c) {
  if (c.count < 1 || c.count > 30) throw UsageError("--count must be in 1..30");
  if (!(c.cluster_gap > 0.0)) throw UsageError("--cluster-gap must be positive");
  json rows = json::array();
  std::vector<double> fem;
  std::vector<double> exact;
  json meshes = json::array();
  if (c.mode == "sphere" || c.mode == "covering") {
    const int level = c.level.value_or(5);
    if (level < 0 || level > 6) throw UsageError("--level must be in 0..6");
    const TriangleMesh mesh = build_icosphere(level);
    fem = eigenvalues(solve_mesh_spectrum(mesh, c.count, c.tol));
    meshes.push_back(mesh_json(mesh, "icosphere"));
    if (c.mode == "covering") {
      if (c.seamed_level < 2 || c.seamed_level > 5) throw UsageError("--seamed-level must be in 2..5");
      const TriangleMesh seamed = build_seamed_mesh(c.seamed_level);
      const auto anti = eigenvalues(solve_mesh_spectrum(seamed, c.count, c.tol));
      fem.insert(fem.end(), anti.begin(), anti.end());
      std::sort(fem.begin(), fem.end());
      fem.resize(c.count);
      meshes.push_back(mesh_json(seamed, "seamed"));
      exact = covering_values(c.count);
    } else {
      exact = sphere_values(c.count);
    }
  } else if (c.mode == "antisymmetric") {
    const int level = c.level.value_or(3);
    if (level < 2 || level > 5) throw UsageError("--level must be in 2..5 for the seamed mesh");
    const TriangleMesh mesh = build_seamed_mesh(level);
    fem = eigenvalues(solve_mesh_spectrum(mesh, c.count, c.tol));
    meshes.push_back(mesh_json(mesh, "seamed"));
    exact = antisymmetric_values(c.count);
  } else {
    throw UsageError("--mode must be sphere, covering or antisymmetric");
  }
  double worst = 0.0;
  for (int i = 0; i < c.count; ++i) {
    const double err = std::abs(fem[i] - exact[i]) / std::max(std::abs(exact[i]), 1.0);
    worst = std::max(worst, err);
    rows.push_back({{"index", i + 1}, {"fem", fem[i]}, {"exact", exact[i]}, {"rel_error", err}});
  }
  return {{"command", "spectrum"},
          {"mode", c.mode},
          {"count", c.count},
          {"meshes", meshes},
          {"rows", rows},
          {"clusters", clusters_json(fem, c.cluster_gap)},
          {"exact_clusters", clusters_json(exact, 1e-9)},
          {"max_rel_error", worst},
          {"schema_version", kSchemaVersion}};
}

json run_evaluate(const EvaluateConfig& c) {
  for (double p : c.p) {
    if (!(p > 0.0)) throw UsageError("--p values must be positive");
  }
  const NamedPartition np = build_named(c);
  const PartitionEnergy e = evaluate_partition(np.mesh, np.labeling, c.p, c.tol);
  json report = partition_report(np.mesh, np.labeling, e, {});
  report["command"] = "evaluate";
  report["partition"] = c.partition;
  report["mesh"] = mesh_json(np.mesh, np.mesh_kind);
  return report;
}

json run_bounds(const BoundsConfig& c) {
  if (c.k_min < 2 || c.k_max < c.k_min) throw UsageError("k range must satisfy 2 <= a <= b");
  json rows = json::array();
  for (int k = c.k_min; k <= c.k_max; ++k) {
    const BoundReport r = make_bound_report(k);
    json row{{"k", k},
             {"phi_infty", r.phi_infty},
             {"phi_hat3", r.phi_hat3},
             {"phi3", r.phi3},
             {"gamma", bound_value_json(r.gamma)},
             {"delta", r.delta},
             {"fermionic", r.fermionic},
             {"large_k", r.large_k ? json(*r.large_k) : json(nullptr)},
             {"formulas", {{"phi_infty", r.formulas.phi_infty},
                           {"phi_hat3", r.formulas.phi_hat3},
                           {"gamma", r.formulas.gamma},
                           {"delta", r.formulas.delta},
                           {"large_k", r.formulas.large_k},
                           {"fermionic", r.formulas.fermionic}}}};
    rows.push_back(std::move(row));
  }
  return {{"command", "bounds"},
          {"rows", rows},
          {"faber_krahn", faber_krahn_constant()},
          {"wendel_phi_tilde_one_third", {{"value", kWendelPhiTildeOneThird},
                                          {"note", "literature value, table not reproduced"}}},
          {"schema_version", kSchemaVersion}};
}

json run_cap(const CapConfig& c) {
  if (!(c.S > 0.0 && c.S < 1.0)) throw UsageError("--S must lie in (0, 1)");
  const double alpha = cap_alpha(c.S);
  json report{{"command", "cap"},
              {"S", c.S},
              {"alpha", alpha},
              {"lambda", alpha_to_lambda(alpha)},
              {"theta0", cap_radius(c.S)},
              {"schema_version", kSchemaVersion}};
  if (c.fem_level) {
    if (*c.fem_level < 2 || *c.fem_level > 6) throw UsageError("--fem-level must be in 2..6");
    const TriangleMesh mesh = build_icosphere(*c.fem_level);
    const DomainMask mask = make_cap_mask(mesh, Vec3::UnitZ(), c.S);
    const EigenPair gs = domain_ground_state(mesh, mask, c.tol);
    const double exact = alpha_to_lambda(alpha);
    report["fem"] = {{"lambda", gs.eigenvalue},
                     {"rel_error", std::abs(gs.eigenvalue - exact) / exact},
                     {"mesh", mesh_json(mesh, "icosphere")}};
  }
  return report;
}

json run_optimize(const OptimizeConfig& c, const std::optional<std::string>& out_dir) {
  if (c.k < 2 || c.k > 8) throw UsageError("--k must be in 2..8");
  if (c.seeds < 1 || c.seeds > 1000) throw UsageError("--seeds must be in 1..1000");
  if (c.level < 1 || c.level > 6) throw UsageError("--level must be in 1..6");
  if (c.p_schedule.empty()) throw UsageError("--p-schedule must not be empty");
  for (double p : c.p_schedule) {
    if (!(p >= 1.0)) throw UsageError("--p-schedule values must be at least 1");
  }
  const TriangleMesh mesh = build_icosphere(c.level);
  OptimizerOptions opt;
  opt.p_schedule = c.p_schedule;
  opt.max_outer_iters = c.max_iters;
  opt.polish_sweeps = c.polish_sweeps;
  opt.penalty_scale = c.penalty_scale;
  opt.tol = c.tol;

  json runs = json::array();
  std::optional<OptimizationResult> best;
  std::uint64_t best_seed = 0;
  for (int i = 0; i < c.seeds; ++i) {
    opt.seed = c.first_seed + static_cast<std::uint64_t>(i);
    OptimizationResult r = optimize_partition(mesh, c.k, opt);
    json lp = json::object();
    for (const auto& [p, v] : r.energy.Lambda_p) lp[p_key(p)] = v;
    runs.push_back({{"seed", opt.seed}, {"Lambda", r.energy.Lambda}, {"Lambda_p", lp}});
    if (!best || r.energy.Lambda < best->energy.Lambda) {
      best = std::move(r);
      best_seed = opt.seed;
    }
  }
  json report = partition_report(mesh, best->labeling, best->energy, best->trace);
  report["command"] = "optimize";
  report["best_seed"] = best_seed;
  report["runs"] = runs;
  report["mesh"] = mesh_json(mesh, "icosphere");
  if (out_dir) {
    const std::filesystem::path dir(*out_dir);
    const std::string stem = "optimize_k" + std::to_string(c.k);
    write_obj(mesh, dir / (stem + ".obj"));
    json sidecar = labeling_json(best->labeling);
    sidecar["seed"] = best_seed;
    write_json(sidecar, dir / (stem + ".labels.json"));
    report["files"] = {stem + ".obj", stem + ".labels.json"};
  }
  return report;
}

}  // namespace sphpart::cli
