#pragma once

// Output plumbing: shortest round-trip number formatting, CSV tables,
// atomic file writes, SHA-256 digests and the run manifest.

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace nslog::cli {

/// Shortest representation that parses back to the same double ("inf", "-inf", "nan" for specials).
std::string format_double(double x);

class Csv {
 public:
  using Cell = std::variant<double, std::int64_t, std::string>;

  explicit Csv(std::vector<std::string> header);
  void add(std::vector<Cell> row);
  std::size_t rows() const { return rows_.size(); }
  /// RFC 4180 text with CRLF-free "\n" line ends and a header row.
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<Cell>> rows_;
};

/// Writes to path.tmp then renames; IoError with the path on failure.
void atomic_write(const std::string& path, const std::string& bytes);
std::string read_file(const std::string& path);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

}  // namespace nslog::cli
