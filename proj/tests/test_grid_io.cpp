#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "burkholder/grid_io.hpp"
#include "burkholder/optimizer.hpp"
#include "burkholder/rng.hpp"

using namespace burkholder;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const char* dir = std::getenv("BURKLAB_TEST_TMP");
  return std::filesystem::path(dir ? dir : std::filesystem::temp_directory_path().string()) / name;
}

GridFunction random_function(int N, std::uint64_t seed) {
  const TorusGrid grid(N);
  return GridFunction::from_coefficients(grid, random_start(grid, seed, 1e3));
}

}  // namespace

TEST(GridIo, RoundTripProperty) {
  Rng rng(12);
  for (int trial = 0; trial < 40; ++trial) {
    const int N = rng.integer(2, 20);
    auto f = random_function(N, rng.next());
    // Awkward doubles must survive both formats bit for bit.
    f.at(0, 0) = Complex(0.1, -0.0);
    f.at(1, 0) = Complex(5e-324, 1.7976931348623157e308);
    const auto x = f.coefficients();
    EXPECT_EQ(grid_from_json(grid_to_json(f)).coefficients(), x);
    EXPECT_EQ(grid_from_binary(grid_to_binary(f)).coefficients(), x);
    EXPECT_EQ(grid_from_json(grid_to_json(f)).grid().N(), N);
  }
}

TEST(GridIo, BinaryLayout) {
  const TorusGrid grid(3);
  GridFunction f(grid);
  f.at(0, 0) = Complex(1.0, -2.0);
  const auto bytes = grid_to_binary(f);
  ASSERT_EQ(bytes.size(), 8u * (1 + 18));
  EXPECT_EQ(std::to_integer<int>(bytes[0]), 3);
  for (int k = 1; k < 8; ++k) EXPECT_EQ(std::to_integer<int>(bytes[k]), 0);
  // 1.0 = 0x3FF0000000000000 little-endian.
  EXPECT_EQ(std::to_integer<int>(bytes[15]), 0x3F);
  EXPECT_EQ(std::to_integer<int>(bytes[14]), 0xF0);
  // -2.0 = 0xC000000000000000.
  EXPECT_EQ(std::to_integer<int>(bytes[23]), 0xC0);
}

TEST(GridIo, FilesInBothFormats) {
  const auto f = random_function(123, 5);
  const auto bin = scratch("grid_123.bin");
  const auto json = scratch("grid_123.json");
  save_grid(bin, f, GridFormat::binary);
  save_grid(json, f, GridFormat::json);
  // The first byte of the binary file is '{'; detection must still pick binary.
  EXPECT_EQ(load_grid(bin).coefficients(), f.coefficients());
  EXPECT_EQ(load_grid(json).coefficients(), f.coefficients());
}

TEST(GridIo, RejectsMalformedInput) {
  EXPECT_THROW(grid_from_json("{\"N\": 2}"), std::runtime_error);
  EXPECT_THROW(grid_from_json("not json"), std::runtime_error);
  EXPECT_THROW(grid_from_json("{\"N\": 2, \"coefficients\": [1, 2, 3]}"), std::exception);
  std::vector<std::byte> bytes(8 + 8 * 7, std::byte{0});
  bytes[0] = std::byte{2};
  EXPECT_THROW(grid_from_binary(bytes), std::runtime_error);
  EXPECT_THROW(load_grid(scratch("does_not_exist.bin")), std::runtime_error);
}
