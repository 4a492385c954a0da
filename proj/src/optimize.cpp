#include "sphpart/analysis.hpp"

#include "sphpart/errors.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <random>

namespace sphpart {

namespace {

// Edge-connected components of each label; returns a component id per triangle.
std::vector<int> label_components(const TriangleMesh& mesh, const Eigen::VectorXi& labels, int& count) {
  const auto& topo = mesh.topology();
  std::vector<int> comp(mesh.num_triangles(), -1);
  std::vector<int> stack;
  count = 0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (comp[t] >= 0 || labels(t) <= 0) continue;
    comp[t] = count;
    stack.push_back(t);
    while (!stack.empty()) {
      const int a = stack.back();
      stack.pop_back();
      for (int c = 0; c < 3; ++c) {
        const int e = topo.triangle_edges(a, c);
        const int b = topo.edge_triangles(e, 0) == a ? topo.edge_triangles(e, 1) : topo.edge_triangles(e, 0);
        if (comp[b] < 0 && labels(b) == labels(a)) {
          comp[b] = count;
          stack.push_back(b);
        }
      }
    }
    ++count;
  }
  return comp;
}

int other_triangle(const MeshTopology& topo, int e, int t) {
  return topo.edge_triangles(e, 0) == t ? topo.edge_triangles(e, 1) : topo.edge_triangles(e, 0);
}

// Triangles around v in cyclic order.
std::vector<int> vertex_fan(const TriangleMesh& mesh, int v) {
  const auto& topo = mesh.topology();
  const auto& tris = mesh.triangles();
  const auto& around = topo.vertex_triangles[v];
  std::vector<int> fan{around.front()};
  int prev_edge = -1;
  while (fan.size() < around.size()) {
    const int t = fan.back();
    int next = -1;
    for (int c = 0; c < 3; ++c) {
      const int e = topo.triangle_edges(t, c);
      if (e == prev_edge) continue;
      if (tris(t, c) != v && tris(t, (c + 1) % 3) != v) continue;
      next = other_triangle(topo, e, t);
      prev_edge = e;
      break;
    }
    if (next < 0 || next == fan.front()) break;
    fan.push_back(next);
  }
  return fan;
}

// Keeps the largest component per label, hands orphans to adjacent labels.
bool reattach_orphans(const TriangleMesh& mesh, Eigen::VectorXi& labels, int k,
                      const std::function<double(int, int)>& score) {
  const auto& topo = mesh.topology();
  int count = 0;
  const std::vector<int> comp = label_components(mesh, labels, count);
  std::vector<int> size(count, 0);
  for (int t = 0; t < mesh.num_triangles(); ++t) ++size[comp[t]];
  std::vector<int> keep(k + 1, -1);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const int l = labels(t);
    if (keep[l] < 0 || size[comp[t]] > size[keep[l]]) keep[l] = comp[t];
  }
  bool changed = false;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (comp[t] != keep[labels(t)]) {
      labels(t) = 0;
      changed = true;
    }
  }
  while (changed) {
    std::vector<std::pair<int, int>> moves;
    bool pending = false;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
      if (labels(t) != 0) continue;
      pending = true;
      int best = 0;
      double best_score = -std::numeric_limits<double>::infinity();
      for (int c = 0; c < 3; ++c) {
        const int l = labels(other_triangle(topo, topo.triangle_edges(t, c), t));
        if (l == 0 || l == best) continue;
        const double s = score(t, l);
        if (s > best_score || (s == best_score && l < best)) {
          best_score = s;
          best = l;
        }
      }
      if (best > 0) moves.emplace_back(t, best);
    }
    if (!pending) break;
    for (auto [t, l] : moves) labels(t) = l;
  }
  return changed;
}

// Reassigns the smaller fan of a label meeting a vertex in several fans.
bool remove_pinches(const TriangleMesh& mesh, Eigen::VectorXi& labels,
                    const std::function<double(int, int)>& score) {
  bool changed = false;
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const std::vector<int> fan = vertex_fan(mesh, v);
    const int n = static_cast<int>(fan.size());
    int start = -1;
    for (int i = 0; i < n; ++i) {
      if (labels(fan[i]) != labels(fan[(i + n - 1) % n])) {
        start = i;
        break;
      }
    }
    if (start < 0) continue;
    // Runs of equal labels in cyclic order, beginning at a label change.
    struct Run {
      int label, first, length;
    };
    std::vector<Run> runs;
    for (int i = 0; i < n; ++i) {
      const int idx = (start + i) % n;
      const int l = labels(fan[idx]);
      if (runs.empty() || runs.back().label != l) {
        runs.push_back({l, idx, 1});
      } else {
        ++runs.back().length;
      }
    }
    const int nr = static_cast<int>(runs.size());
    int worst = -1;
    for (int r = 0; r < nr; ++r) {
      for (int q = 0; q < nr; ++q) {
        if (q == r || runs[q].label != runs[r].label) continue;
        if (runs[r].length < runs[q].length || (runs[r].length == runs[q].length && r > q)) {
          if (worst < 0 || runs[r].length < runs[worst].length) worst = r;
        }
      }
    }
    if (worst < 0) continue;
    const int left = runs[(worst + nr - 1) % nr].label;
    const int right = runs[(worst + 1) % nr].label;
    for (int i = 0; i < runs[worst].length; ++i) {
      const int t = fan[(runs[worst].first + i) % n];
      const double sl = score(t, left);
      const double sr = score(t, right);
      labels(t) = (sl > sr || (sl == sr && left < right)) ? left : right;
    }
    changed = true;
  }
  return changed;
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Vec3 random_point(std::mt19937_64& rng) {
  // Box-Muller from raw bits keeps the sequence identical across standard libraries.
  Vec3 g;
  for (int i = 0; i < 3; ++i) {
    const double u1 = 1.0 - uniform01(rng);
    const double u2 = uniform01(rng);
    g(i) = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }
  return g.normalized();
}

bool all_labels_used(const Eigen::VectorXi& labels, int k) {
  std::vector<char> used(k + 1, 0);
  for (int i = 0; i < labels.size(); ++i) used[labels(i)] = 1;
  return std::all_of(used.begin() + 1, used.end(), [](char c) { return c != 0; });
}

// Dirichlet ground state started from a nearby zero-extended state.
EigenPair warm_ground_state(const TriangleMesh& mesh, const Assembly& assembly, const DomainMask& mask,
                            const Eigen::VectorXd& guess, double tol) {
  const std::vector<int> dofs = interior_vertices(mesh, mask);
  if (dofs.size() < 4) return domain_ground_state(mesh, assembly, mask, tol);
  SolverOptions opt;
  opt.tol = tol;
  opt.block_size = 3;
  opt.start.resize(static_cast<Eigen::Index>(dofs.size()), 1);
  for (std::size_t i = 0; i < dofs.size(); ++i) opt.start(i, 0) = guess(dofs[i]) + 1e-3;
  EigenPair p = solve_smallest(restrict_to(assembly.stiffness, dofs), restrict_to(assembly.mass, dofs), opt).pairs.front();
  Eigen::VectorXd full = Eigen::VectorXd::Zero(mesh.num_vertices());
  for (std::size_t i = 0; i < dofs.size(); ++i) full(dofs[i]) = p.eigenvector(i);
  if (full.sum() < 0.0) full = -full;
  p.eigenvector = std::move(full);
  return p;
}

class Relaxation {
 public:
  Relaxation(const TriangleMesh& mesh, int k, const OptimizerOptions& opt)
      : mesh_(mesh), k_(k), opt_(opt), assembly_(assemble(mesh)) {
    const double h = mesh.max_edge_length();
    penalty_ = (opt.penalty_scale / h) * (opt.penalty_scale / h);
    all_p_ = opt.p_schedule;
  }

  const Assembly& assembly() const { return assembly_; }

  PartitionEnergy energy(const Eigen::VectorXi& labels) const {
    return evaluate_partition(mesh_, assembly_, PartitionLabeling(labels, k_), all_p_, opt_.tol);
  }

  // Ground states of the penalized whole-sphere problems, one column per label.
  Eigen::MatrixXd extensions(const Eigen::VectorXi& labels) const {
    const int nv = mesh_.num_vertices();
    const auto& tris = mesh_.triangles();
    const auto& areas = mesh_.triangle_areas();
    Eigen::MatrixXd u(nv, k_);
    std::vector<std::future<Eigen::VectorXd>> tasks;
    for (int j = 1; j <= k_; ++j) {
      tasks.push_back(std::async(std::launch::async, [&, j] {
        Eigen::VectorXd outside = Eigen::VectorXd::Zero(nv);
        for (int t = 0; t < mesh_.num_triangles(); ++t) {
          if (labels(t) == j) continue;
          for (int c = 0; c < 3; ++c) outside(tris(t, c)) += areas(t) / 3.0;
        }
        SparseMatrix a = assembly_.stiffness;
        for (int v = 0; v < nv; ++v) a.coeffRef(v, v) += penalty_ * outside(v);
        SolverOptions so;
        so.count = 1;
        so.tol = 1e-6;
        so.block_size = 4;
        Eigen::VectorXd x = solve_smallest(a, assembly_.mass, so).pairs.front().eigenvector;
        if (x.sum() < 0.0) x = -x;
        return x;
      }));
    }
    for (int j = 0; j < k_; ++j) u.col(j) = tasks[j].get();
    return u;
  }

  // Reassignment of every triangle by weighted extension values at its centroid.
  Eigen::VectorXi propose(const Eigen::VectorXi& labels, const PartitionEnergy& e, double p) const {
    const Eigen::MatrixXd u = extensions(labels);
    const auto& tris = mesh_.triangles();
    const int nt = mesh_.num_triangles();
    Eigen::MatrixXd score(nt, k_);
    for (int j = 0; j < k_; ++j) {
      const double w = std::pow(e.lambdas[j], 0.5 * (p - 1.0));
      for (int t = 0; t < nt; ++t) {
        score(t, j) = w * (u(tris(t, 0), j) + u(tris(t, 1), j) + u(tris(t, 2), j)) / 3.0;
      }
    }
    Eigen::VectorXi next(nt);
    for (int t = 0; t < nt; ++t) {
      Eigen::Index best = 0;
      score.row(t).maxCoeff(&best);
      next(t) = static_cast<int>(best) + 1;
    }
    if (!all_labels_used(next, k_)) return labels;
    auto s = [&](int t, int l) { return score(t, l - 1); };
    return repair_connectivity(mesh_, next, k_, s);
  }

 private:
  const TriangleMesh& mesh_;
  int k_;
  OptimizerOptions opt_;
  Assembly assembly_;
  double penalty_ = 0.0;
  std::vector<double> all_p_;
};

int count_moved(const Eigen::VectorXi& a, const Eigen::VectorXi& b) { return static_cast<int>((a.array() != b.array()).count()); }

// Keeps only the moves of triangles touching the current boundary.
Eigen::VectorXi damp(const TriangleMesh& mesh, const Eigen::VectorXi& from, const Eigen::VectorXi& to) {
  const auto& tris = mesh.triangles();
  std::vector<char> on_boundary(mesh.num_vertices(), 0);
  const auto& topo = mesh.topology();
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (from(topo.edge_triangles(e, 0)) != from(topo.edge_triangles(e, 1))) {
      on_boundary[topo.edges(e, 0)] = on_boundary[topo.edges(e, 1)] = 1;
    }
  }
  Eigen::VectorXi out = from;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (on_boundary[tris(t, 0)] || on_boundary[tris(t, 1)] || on_boundary[tris(t, 2)]) out(t) = to(t);
  }
  return out;
}

}  // namespace

Eigen::VectorXi repair_connectivity(const TriangleMesh& mesh, Eigen::VectorXi labels, int k,
                                    const std::function<double(int, int)>& score) {
  if (labels.size() != mesh.num_triangles()) throw DomainError("repair_connectivity: labeling size mismatch");
  if (labels.minCoeff() < 1 || labels.maxCoeff() > k) throw DomainError("repair_connectivity: label out of range");
  for (int pass = 0; pass < 20; ++pass) {
    const bool a = reattach_orphans(mesh, labels, k, score);
    const bool b = remove_pinches(mesh, labels, score);
    if (!a && !b) break;
  }
  reattach_orphans(mesh, labels, k, score);
  return labels;
}

OptimizationResult optimize_partition(const TriangleMesh& mesh, int k, const OptimizerOptions& options) {
  if (k < 2 || k > 8) throw DomainError("optimize_partition: k must be in 2..8");
  if (mesh.seam()) throw DomainError("optimize_partition: seamed meshes are not supported");
  if (options.p_schedule.empty()) throw DomainError("optimize_partition: empty p schedule");
  for (double p : options.p_schedule) {
    if (!(p >= 1.0)) throw DomainError("optimize_partition: p values must be at least 1");
  }

  std::mt19937_64 rng(options.seed);
  Relaxation relax(mesh, k, options);
  const auto flat = [](int, int) { return 0.0; };

  Eigen::VectorXi labels;
  for (int attempt = 0;; ++attempt) {
    if (attempt == 16) throw DegeneratePartitionError("optimize_partition: could not seed k nonempty labels");
    std::vector<Vec3> sites;
    for (int j = 0; j < k; ++j) sites.push_back(random_point(rng));
    labels = repair_connectivity(mesh, voronoi_labels(mesh, sites), k, flat);
    if (all_labels_used(labels, k)) break;
  }

  OptimizationResult result{PartitionLabeling(labels, k), relax.energy(labels), {}};
  const double p0 = options.p_schedule.front();
  result.trace.push_back({"init", p0, 0, result.energy.Lambda_p.at(p0), result.energy.Lambda, 0, true});

  for (double p : options.p_schedule) {
    for (int it = 1; it <= options.max_outer_iters; ++it) {
      const Eigen::VectorXi& current = result.labeling.labels();
      Eigen::VectorXi next = relax.propose(current, result.energy, p);
      int moved = count_moved(current, next);
      if (moved == 0) break;
      const double before = result.energy.Lambda_p.at(p);
      auto try_candidate = [&](const Eigen::VectorXi& cand) -> std::optional<PartitionEnergy> {
        if (!all_labels_used(cand, k)) return std::nullopt;
        try {
          PartitionEnergy e = relax.energy(cand);
          if (e.Lambda_p.at(p) < before) return e;
        } catch (const DomainTooThinError&) {
        }
        return std::nullopt;
      };
      std::optional<PartitionEnergy> accepted = try_candidate(next);
      if (!accepted) {
        next = repair_connectivity(mesh, damp(mesh, current, next), k, flat);
        moved = count_moved(current, next);
        if (moved > 0) accepted = try_candidate(next);
      }
      if (!accepted) {
        result.trace.push_back({"relax", p, it, before, result.energy.Lambda, moved, false});
        break;
      }
      result.labeling = PartitionLabeling(next, k);
      result.energy = std::move(*accepted);
      result.trace.push_back({"relax", p, it, result.energy.Lambda_p.at(p), result.energy.Lambda, moved, true});
    }
  }

  // Greedy boundary-vertex moves: all triangles around a vertex join one label.
  // Only the labels touched by a move are re-solved, warm-started from their
  // current ground states; a vertex only moves towards a label whose energy
  // exceeds that of another label present there.
  const double p_last = options.p_schedule.back();
  const double polish_tol = std::max(options.tol, 1e-6);
  const auto& topo = mesh.topology();
  Eigen::VectorXi current = result.labeling.labels();
  std::vector<double> lambdas = result.energy.lambdas;
  std::vector<Eigen::VectorXd> states = result.energy.ground_states;
  double current_value = power_mean(lambdas, p_last);
  int total_moves = 0;
  for (int sweep = 1; sweep <= options.polish_sweeps; ++sweep) {
    int moves = 0;
    for (int v = 0; v < mesh.num_vertices(); ++v) {
      const auto& around = topo.vertex_triangles[v];
      std::vector<int> present;
      for (int t : around) present.push_back(current(t));
      std::sort(present.begin(), present.end());
      present.erase(std::unique(present.begin(), present.end()), present.end());
      if (present.size() < 2) continue;
      double lowest = std::numeric_limits<double>::infinity();
      for (int l : present) lowest = std::min(lowest, lambdas[l - 1]);
      for (int l : present) {
        if (!(lambdas[l - 1] > lowest)) continue;
        Eigen::VectorXi cand = current;
        for (int t : around) cand(t) = l;
        cand = repair_connectivity(mesh, cand, k, flat);
        if (!all_labels_used(cand, k) || cand == current) continue;
        std::vector<char> touched(k + 1, 0);
        for (int t = 0; t < cand.size(); ++t) {
          if (cand(t) != current(t)) touched[cand(t)] = touched[current(t)] = 1;
        }
        std::vector<double> trial = lambdas;
        std::vector<Eigen::VectorXd> trial_states = states;
        try {
          for (int j = 1; j <= k; ++j) {
            if (!touched[j]) continue;
            EigenPair gs = warm_ground_state(mesh, relax.assembly(), cand.array() == j, states[j - 1], polish_tol);
            trial[j - 1] = gs.eigenvalue;
            trial_states[j - 1] = std::move(gs.eigenvector);
          }
        } catch (const DomainTooThinError&) {
          continue;
        }
        const double value = power_mean(trial, p_last);
        if (value < current_value * (1.0 - 1e-10)) {
          current = std::move(cand);
          lambdas = std::move(trial);
          states = std::move(trial_states);
          current_value = value;
          ++moves;
          break;
        }
      }
    }
    total_moves += moves;
    result.trace.push_back({"polish", p_last, sweep, current_value, *std::max_element(lambdas.begin(), lambdas.end()),
                            moves, moves > 0});
    if (moves == 0) break;
  }
  if (total_moves > 0) {
    result.labeling = PartitionLabeling(current, k);
    result.energy = relax.energy(current);
    result.trace.back().Lambda_p = result.energy.Lambda_p.at(p_last);
    result.trace.back().Lambda = result.energy.Lambda;
  }
  return result;
}

}  // namespace sphpart
