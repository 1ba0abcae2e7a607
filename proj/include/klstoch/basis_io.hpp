#pragma once

#include <filesystem>

#include <json.hpp>

#include "klstoch/spectral.hpp"

namespace klstoch {

/// JSON document: interval, rule (kind, nodes, weights), eigenvalues,
/// row-major eigenfunction samples, optional analytic descriptor.
nlohmann::json basis_to_json(const KLBasis& basis);
KLBasis basis_from_json(const nlohmann::json& doc);

void save_basis(const KLBasis& basis, const std::filesystem::path& path);
KLBasis load_basis(const std::filesystem::path& path);

}  // namespace klstoch
