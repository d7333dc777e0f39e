#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "sparsediff/common.hpp"
#include "sparsediff/simulate.hpp"

namespace sparsediff {

// Path container layout:
//   "SDIFFPATH1\n"
//   header: one "key value" pair per line, closed by "end_header\n"
//           (keys: n, p, substeps, cov_seed, path_seed, spec_digest)
//   payload: little-endian float64, row-major: x (n+1), then z (p x (n+1))
//   trailer: FNV-1a 64-bit checksum of the payload, little-endian
inline constexpr char kPathMagic[] = "SDIFFPATH1";

namespace detail {

inline std::uint64_t fnv1a(const unsigned char* data, std::size_t len) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= data[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline void put_u64_le(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline std::uint64_t get_u64_le(const unsigned char* b) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

}  // namespace detail

struct PathFileHeader {
  int n = 0;
  int p = 0;
  int substeps = 0;
  std::uint64_t cov_seed = 0;
  std::uint64_t path_seed = 0;
  std::uint64_t spec_digest = 0;
};

inline void save_path(const ObservedPath& path, const std::string& dest,
                      int substeps = 0, std::uint64_t spec_digest = 0) {
  path.validate();
  std::ostringstream head;
  head << kPathMagic << "\n"
       << "n " << path.n << "\n"
       << "p " << path.p() << "\n"
       << "substeps " << substeps << "\n"
       << "cov_seed " << path.cov_seed << "\n"
       << "path_seed " << path.path_seed << "\n"
       << "spec_digest " << std::hex << spec_digest << std::dec << "\n"
       << "end_header\n";

  std::string payload;
  payload.reserve(sizeof(double) * (path.x.size() + path.z.size()));
  auto put_d = [&payload](double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    detail::put_u64_le(payload, bits);
  };
  for (int k = 0; k < path.x.size(); ++k) put_d(path.x[k]);
  for (int i = 0; i < path.z.rows(); ++i)
    for (int k = 0; k < path.z.cols(); ++k) put_d(path.z(i, k));

  std::string trailer;
  detail::put_u64_le(trailer,
                     detail::fnv1a(reinterpret_cast<const unsigned char*>(payload.data()),
                                   payload.size()));

  std::ofstream out(dest, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("save_path: cannot open " + dest);
  out << head.str();
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  out.write(trailer.data(), static_cast<std::streamsize>(trailer.size()));
  if (!out) throw io_error("save_path: write failed for " + dest);
}

inline ObservedPath load_path(const std::string& src, PathFileHeader* header_out = nullptr) {
  std::ifstream in(src, std::ios::binary);
  if (!in) throw io_error("load_path: cannot open " + src);
  std::string contents((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw io_error("load_path: read failed for " + src);

  std::istringstream text(contents);
  std::string line;
  if (!std::getline(text, line) || line != kPathMagic)
    throw format_error("load_path: bad magic string");

  PathFileHeader h;
  std::map<std::string, std::string> kv;
  bool closed = false;
  while (std::getline(text, line)) {
    if (line == "end_header") {
      closed = true;
      break;
    }
    const auto sp = line.find(' ');
    if (sp == std::string::npos) throw format_error("load_path: malformed header line");
    kv[line.substr(0, sp)] = line.substr(sp + 1);
  }
  if (!closed) throw format_error("load_path: header not terminated");
  try {
    h.n = std::stoi(kv.at("n"));
    h.p = std::stoi(kv.at("p"));
    h.substeps = std::stoi(kv.at("substeps"));
    h.cov_seed = std::stoull(kv.at("cov_seed"));
    h.path_seed = std::stoull(kv.at("path_seed"));
    h.spec_digest = std::stoull(kv.at("spec_digest"), nullptr, 16);
  } catch (const std::exception&) {
    throw format_error("load_path: missing or malformed header field");
  }
  if (h.n <= 0 || h.p <= 0) throw format_error("load_path: nonpositive dimensions");

  const std::size_t header_bytes = static_cast<std::size_t>(text.tellg());
  const std::size_t count = static_cast<std::size_t>(h.n + 1) * (1 + h.p);
  const std::size_t need = header_bytes + 8 * count + 8;
  if (contents.size() < need) throw format_error("load_path: truncated file");
  if (contents.size() > need) throw format_error("load_path: trailing garbage");

  const auto* bytes = reinterpret_cast<const unsigned char*>(contents.data()) + header_bytes;
  const std::uint64_t sum = detail::fnv1a(bytes, 8 * count);
  if (sum != detail::get_u64_le(bytes + 8 * count))
    throw format_error("load_path: checksum mismatch");

  auto get_d = [&bytes](std::size_t i) {
    const std::uint64_t v = detail::get_u64_le(bytes + 8 * i);
    double d;
    std::memcpy(&d, &v, sizeof d);
    return d;
  };

  ObservedPath path;
  path.n = h.n;
  path.cov_seed = h.cov_seed;
  path.path_seed = h.path_seed;
  path.x.resize(h.n + 1);
  path.z.resize(h.p, h.n + 1);
  std::size_t idx = 0;
  for (int k = 0; k <= h.n; ++k) path.x[k] = get_d(idx++);
  for (int i = 0; i < h.p; ++i)
    for (int k = 0; k <= h.n; ++k) path.z(i, k) = get_d(idx++);
  if (header_out) *header_out = h;
  return path;
}

}  // namespace sparsediff
