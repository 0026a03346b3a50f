#include "thinfb/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace thinfb {

namespace {

std::uint64_t to_little(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) return __builtin_bswap64(v);
  return v;
}

}  // namespace

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
  auto p = path;
  p += ".json";
  return p;
}

void write_f64(const std::filesystem::path& path, const double* data, std::size_t count) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot open " + path.string() + " for writing");
  std::vector<std::uint64_t> buf(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t bits;
    std::memcpy(&bits, data + i, sizeof bits);
    buf[i] = to_little(bits);
  }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(count * sizeof(std::uint64_t)));
  if (!out) throw Error(ErrorKind::io, "short write to " + path.string());
}

Eigen::ArrayXd read_f64(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  const auto bytes = static_cast<std::size_t>(in.tellg());
  if (bytes % 8 != 0) throw Error(ErrorKind::io, path.string() + ": size is not a multiple of 8 bytes");
  in.seekg(0);
  std::vector<std::uint64_t> buf(bytes / 8);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(bytes));
  Eigen::ArrayXd v(static_cast<Eigen::Index>(buf.size()));
  for (std::size_t i = 0; i < buf.size(); ++i) {
    const std::uint64_t bits = to_little(buf[i]);
    std::memcpy(&v[static_cast<Eigen::Index>(i)], &bits, sizeof bits);
  }
  return v;
}

void write_snapshot(const std::filesystem::path& path, const GridField& f, const std::string& description) {
  write_f64(path, f.values().data(), static_cast<std::size_t>(f.values().size()));
  nlohmann::json meta = {{"n", f.grid().n()},
                         {"h", f.grid().h()},
                         {"parity_tag", to_string(f.parity())},
                         {"description", description}};
  std::ofstream out(sidecar_path(path));
  if (!out) throw Error(ErrorKind::io, "cannot write " + sidecar_path(path).string());
  out << meta.dump(2) << "\n";
}

GridField read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(sidecar_path(path));
  if (!in) throw Error(ErrorKind::io, "missing sidecar " + sidecar_path(path).string());
  nlohmann::json meta;
  try {
    in >> meta;
    const Grid grid(meta.at("n").get<int>(), meta.at("h").get<double>());
    return GridField(grid, read_f64(path), parity_from_string(meta.value("parity_tag", "none")));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::io, sidecar_path(path).string() + ": " + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::io) throw;
    throw Error(ErrorKind::io, path.string() + ": " + e.what());
  }
}

}  // namespace thinfb
