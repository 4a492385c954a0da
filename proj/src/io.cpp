#include "sphpart/io.hpp"

#include "sphpart/errors.hpp"

#include <cstdio>
#include <fstream>

namespace sphpart {

namespace {

std::ofstream open_for_writing(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace

void write_obj(const TriangleMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out = open_for_writing(path);
  char line[128];
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const auto p = mesh.vertices().row(v);
    std::snprintf(line, sizeof line, "v %.17g %.17g %.17g\n", p(0), p(1), p(2));
    out << line;
  }
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto f = mesh.triangles().row(t);
    out << "f " << f(0) + 1 << ' ' << f(1) + 1 << ' ' << f(2) + 1 << '\n';
  }
}

nlohmann::json labeling_json(const PartitionLabeling& labeling) {
  const auto& l = labeling.labels();
  return {{"k", labeling.k()},
          {"triangles", labeling.size()},
          {"labels", std::vector<int>(l.data(), l.data() + l.size())}};
}

nlohmann::json mask_json(const DomainMask& mask) {
  std::vector<int> members(mask.size());
  for (Eigen::Index i = 0; i < mask.size(); ++i) members[i] = mask(i) ? 1 : 0;
  return {{"triangles", mask.size()}, {"members", members}};
}

nlohmann::json vertex_field_json(const Eigen::VectorXd& values) {
  return {{"vertices", values.size()},
          {"values", std::vector<double>(values.data(), values.data() + values.size())}};
}

PartitionLabeling labeling_from_json(const nlohmann::json& j) {
  const auto labels = j.at("labels").get<std::vector<int>>();
  Eigen::VectorXi l(static_cast<Eigen::Index>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) l(i) = labels[i];
  return PartitionLabeling(l, j.at("k").get<int>());
}

void write_json(const nlohmann::json& j, const std::filesystem::path& path) {
  std::ofstream out = open_for_writing(path);
  out << j.dump(2) << '\n';
}

}  // namespace sphpart
