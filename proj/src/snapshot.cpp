#include "nslog/snapshot.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "nslog/error.hpp"

namespace nslog {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
void put(std::vector<unsigned char>& out, T v) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  out.insert(out.end(), b, b + sizeof(T));
}

template <class T>
T get(const std::vector<unsigned char>& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw DataError("snapshot: truncated");
  unsigned char b[sizeof(T)];
  std::memcpy(b, in.data() + pos, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  pos += sizeof(T);
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

}  // namespace

std::vector<unsigned char> encode_snapshot(const PhysField& f) {
  std::vector<unsigned char> out;
  out.reserve(32 + f.data.size() * 8);
  for (char c : {'N', 'S', 'L', '1'}) out.push_back(static_cast<unsigned char>(c));
  put<std::uint32_t>(out, kSnapshotVersion);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(f.grid.rank()));
  put<std::uint8_t>(out, static_cast<std::uint8_t>(f.ncomp));
  for (int a = 0; a < f.grid.rank(); ++a) put<std::uint64_t>(out, f.grid.n(a));
  for (int a = 0; a < f.grid.rank(); ++a) put<double>(out, f.grid.box(a));
  for (double v : f.data) put<double>(out, v);
  return out;
}

PhysField decode_snapshot(const std::vector<unsigned char>& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), "NSL1", 4) != 0)
    throw DataError("snapshot: bad magic");
  std::size_t pos = 4;
  const auto version = get<std::uint32_t>(bytes, pos);
  if (version != kSnapshotVersion) throw DataError("snapshot: unsupported version " + std::to_string(version));
  const int rank = get<std::uint8_t>(bytes, pos);
  const int ncomp = get<std::uint8_t>(bytes, pos);
  if (rank != 2 && rank != 3) throw DataError("snapshot: rank must be 2 or 3");
  if (ncomp < 1) throw DataError("snapshot: ncomp must be positive");
  std::vector<std::size_t> npts(rank);
  std::vector<double> box(rank);
  for (auto& n : npts) n = static_cast<std::size_t>(get<std::uint64_t>(bytes, pos));
  for (auto& b : box) b = get<double>(bytes, pos);
  Grid g;
  try {
    g = Grid(npts, box);
  } catch (const ConfigError& e) {
    throw DataError(std::string("snapshot: ") + e.what());
  }
  const std::size_t count = g.npoints() * static_cast<std::size_t>(ncomp);
  if (bytes.size() - pos != count * 8) throw DataError("snapshot: payload length mismatch");
  PhysField f(g, ncomp);
  for (std::size_t i = 0; i < count; ++i) f.data[i] = get<double>(bytes, pos);
  return f;
}

void write_snapshot(const std::string& path, const PhysField& f) {
  const auto bytes = encode_snapshot(f);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + tmp + " for writing");
    os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw IoError("write failed: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("rename " + tmp + " -> " + path + ": " + ec.message());
}

PhysField read_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return decode_snapshot(bytes);
}

}  // namespace nslog
