#include "burkholder/grid_io.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <stdexcept>

#include "json.hpp"

namespace burkholder {

namespace {

void put_u64(std::vector<std::byte>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xFF));
}

std::uint64_t get_u64(std::span<const std::byte> in, std::size_t offset) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v |= static_cast<std::uint64_t>(std::to_integer<unsigned>(in[offset + i])) << (8 * i);
  }
  return v;
}

std::vector<char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

std::string grid_to_json(const GridFunction& f) {
  nlohmann::json j;
  j["N"] = f.grid().N();
  j["coefficients"] = f.coefficients();
  return j.dump();
}

GridFunction grid_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(std::string("grid JSON: ") + e.what());
  }
  if (!j.contains("N") || !j.contains("coefficients")) {
    throw std::runtime_error("grid JSON: expected fields \"N\" and \"coefficients\"");
  }
  const TorusGrid grid(j.at("N").get<int>());
  const auto x = j.at("coefficients").get<std::vector<double>>();
  return GridFunction::from_coefficients(grid, x);
}

std::vector<std::byte> grid_to_binary(const GridFunction& f) {
  const auto x = f.coefficients();
  std::vector<std::byte> out;
  out.reserve(8 * (1 + x.size()));
  put_u64(out, static_cast<std::uint64_t>(f.grid().N()));
  for (double v : x) put_u64(out, std::bit_cast<std::uint64_t>(v));
  return out;
}

GridFunction grid_from_binary(std::span<const std::byte> bytes) {
  if (bytes.size() < 8) throw std::runtime_error("grid binary: truncated header");
  const std::uint64_t n = get_u64(bytes, 0);
  if (n < 2 || n > (1u << 15)) throw std::runtime_error("grid binary: implausible N");
  const TorusGrid grid(static_cast<int>(n));
  if (bytes.size() != 8 * (1 + grid.dimension())) {
    throw std::runtime_error("grid binary: expected " + std::to_string(8 * (1 + grid.dimension())) +
                             " bytes, got " + std::to_string(bytes.size()));
  }
  std::vector<double> x(grid.dimension());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::bit_cast<double>(get_u64(bytes, 8 * (i + 1)));
  return GridFunction::from_coefficients(grid, x);
}

void save_grid(const std::filesystem::path& path, const GridFunction& f, GridFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  if (format == GridFormat::json) {
    out << grid_to_json(f) << '\n';
  } else {
    const auto bytes = grid_to_binary(f);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

GridFunction load_grid(const std::filesystem::path& path) {
  const auto data = read_file(path);
  const auto bytes = std::as_bytes(std::span(data));
  if (bytes.size() >= 8) {
    const std::uint64_t n = get_u64(bytes, 0);
    if (n >= 2 && n <= (1u << 15) && bytes.size() == 8 * (1 + 2 * n * n)) {
      return grid_from_binary(bytes);
    }
  }
  return grid_from_json(std::string_view(data.data(), data.size()));
}

}  // namespace burkholder
