#pragma once

// NSL1 binary field snapshots.
//
// Layout: "NSL1", u32 version (1), u8 rank, u8 ncomp, rank x u64 npts,
// rank x f64 box, then f64 samples (component-major, last axis fastest).
// All integers and floats little-endian.

#include <cstdint>
#include <string>
#include <vector>

#include "nslog/field.hpp"

namespace nslog {

inline constexpr std::uint32_t kSnapshotVersion = 1;

std::vector<unsigned char> encode_snapshot(const PhysField& f);
/// Throws DataError on bad magic, version, header or payload length.
PhysField decode_snapshot(const std::vector<unsigned char>& bytes);

/// Atomic write (temp file + rename); IoError on failure.
void write_snapshot(const std::string& path, const PhysField& f);
PhysField read_snapshot(const std::string& path);

}  // namespace nslog
