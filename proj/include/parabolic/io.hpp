#pragma once

// Output formatting and file writing shared by the command-line tools.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "parabolic/fieldeval.hpp"

namespace parabolic::io {

/// Shortest decimal string that parses back to the same double.
std::string format_double(double x);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view data, std::uint64_t seed = 14695981039346656037ULL);
std::string hex64(std::uint64_t v);

/// Writes to a temporary sibling file and renames it into place.
void write_atomic(const std::filesystem::path& path, std::string_view content);

/// CSV of an intensity map. The first line is "# config_hash: <hex>"; columns
///   rho|x, z, Ex_re, Ex_im, Ey_re, Ey_im, Ez_re, Ez_im, intensity, relative, valid
std::string field_map_csv(const field::IntensityMap& map, const std::string& config_hash);

/// Little-endian float64 grid plus a JSON descriptor written next to it
/// (`<path>.json`) holding shape, axis bounds and units.
void write_binary_grid(const std::filesystem::path& path, const std::vector<double>& values,
                       const nlohmann::json& descriptor);

}  // namespace parabolic::io
