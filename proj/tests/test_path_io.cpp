#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "sparsediff/path_io.hpp"
#include "sparsediff/simulate.hpp"
#include "test_util.hpp"

using namespace sparsediff;

namespace {

std::string temp_file(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

std::string slurp(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void spit(const std::string& file, const std::string& data) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  out << data;
}

}  // namespace

TEST_CASE("path file round-trip is exact") {
  ObservedPath path = test_util::synthetic_path(37, 5, 99);
  path.cov_seed = 111;
  path.path_seed = 222;
  const std::string file = temp_file("sdiff_roundtrip.bin");
  save_path(path, file, 50, 0xfeedbeef);

  PathFileHeader header;
  const ObservedPath back = load_path(file, &header);
  REQUIRE(back.n == path.n);
  REQUIRE(back.cov_seed == 111);
  REQUIRE(back.path_seed == 222);
  REQUIRE(header.substeps == 50);
  REQUIRE(header.spec_digest == 0xfeedbeef);
  REQUIRE(back.x.isApprox(path.x, 0.0));
  REQUIRE(back.z.isApprox(path.z, 0.0));
  REQUIRE((back.x.array() == path.x.array()).all());
  REQUIRE((back.z.array() == path.z.array()).all());
  std::remove(file.c_str());
}

TEST_CASE("wrong magic string is a format error") {
  const std::string file = temp_file("sdiff_magic.bin");
  spit(file, "NOTAPATH99\nn 1\nend_header\n");
  REQUIRE_THROWS_AS(load_path(file), format_error);
  std::remove(file.c_str());
}

TEST_CASE("truncated file is a corruption error, not a partial path") {
  ObservedPath path = test_util::synthetic_path(20, 3, 7);
  const std::string file = temp_file("sdiff_trunc.bin");
  save_path(path, file);
  const std::string full = slurp(file);
  spit(file, full.substr(0, full.size() - 13));
  REQUIRE_THROWS_AS(load_path(file), format_error);
  std::remove(file.c_str());
}

TEST_CASE("payload corruption fails the checksum") {
  ObservedPath path = test_util::synthetic_path(20, 3, 7);
  const std::string file = temp_file("sdiff_corrupt.bin");
  save_path(path, file);
  std::string full = slurp(file);
  full[full.size() / 2] ^= 0x40;
  spit(file, full);
  REQUIRE_THROWS_AS(load_path(file), format_error);
  std::remove(file.c_str());
}

TEST_CASE("missing header fields are format errors") {
  const std::string file = temp_file("sdiff_header.bin");
  spit(file, std::string(kPathMagic) + "\nn 5\nend_header\n");
  REQUIRE_THROWS_AS(load_path(file), format_error);
  std::remove(file.c_str());
}

TEST_CASE("missing file is an io error") {
  REQUIRE_THROWS_AS(load_path("/nonexistent/nowhere.bin"), io_error);
}
