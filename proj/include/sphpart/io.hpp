#pragma once

#include "sphpart/geom.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace sphpart {

/// ASCII OBJ with `v x y z` lines (17 significant digits) and 1-based faces,
/// in mesh order.
void write_obj(const TriangleMesh& mesh, const std::filesystem::path& path);

/// Sidecar object keyed by triangle index: {"k", "triangles", "labels"}.
nlohmann::json labeling_json(const PartitionLabeling& labeling);
/// Sidecar object for a mask: {"triangles", "members"} (0/1 per triangle).
nlohmann::json mask_json(const DomainMask& mask);
/// Per-vertex field: {"vertices", "values"}.
nlohmann::json vertex_field_json(const Eigen::VectorXd& values);

PartitionLabeling labeling_from_json(const nlohmann::json& j);

/// Pretty-printed (2 spaces) with a trailing newline; keys are sorted.
void write_json(const nlohmann::json& j, const std::filesystem::path& path);

}  // namespace sphpart
