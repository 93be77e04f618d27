#pragma once

// GridFunction files.
//
// JSON:   {"N": <int>, "coefficients": [<2 N^2 reals>]}
// binary: N as a little-endian uint64, then the 2 N^2 coefficients as
//         little-endian IEEE-754 binary64, nothing else.
//
// Coefficients use the real coefficient layout of torus.hpp (row-major over
// (m, n), real part then imaginary part).

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "burkholder/torus.hpp"

namespace burkholder {

enum class GridFormat { json, binary };

std::string grid_to_json(const GridFunction& f);
GridFunction grid_from_json(std::string_view text);

std::vector<std::byte> grid_to_binary(const GridFunction& f);
GridFunction grid_from_binary(std::span<const std::byte> bytes);

void save_grid(const std::filesystem::path& path, const GridFunction& f, GridFormat format);
/// Binary when the header and the file size agree, JSON otherwise.
GridFunction load_grid(const std::filesystem::path& path);

}  // namespace burkholder
