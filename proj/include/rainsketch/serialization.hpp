#pragma once

// Little-endian snapshot format shared by every sketch kind:
//
//   offset  size  field
//   0       4     magic "FMRK"
//   4       1     format version (1)
//   5       1     kind (0 = FM ensemble, 1 = rank ensemble, 2 = window state)
//   6       4     K, rows per ensemble
//   10      4     W, positions per row
//   14      ...   kind-specific body
//
// FM body:     K seeds (8 bytes each), then K rows of ceil(W/8) bytes,
//              bit p of a row stored in byte p/8 at bit p%8.
// Rank body:   K seeds, then K rows of W 8-byte timestamp cells. Empty slots
//              are written as the sentinel value.
// Window body: window index (8), now (8), then the completed ensemble and the
//              current ensemble, each as K seeds followed by K*W cells.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rainsketch/fm_sketch.hpp"
#include "rainsketch/rank_sketch.hpp"

namespace rainsketch {

using Bytes = std::vector<std::uint8_t>;

inline constexpr char kSnapshotMagic[4] = {'F', 'M', 'R', 'K'};
inline constexpr std::uint8_t kSnapshotVersion = 1;
inline constexpr std::size_t kSnapshotHeaderSize = 14;

enum class SketchKind : std::uint8_t {
  kFm = 0,
  kRank = 1,
  kWindow = 2,
};

struct SnapshotHeader {
  std::uint8_t version = kSnapshotVersion;
  SketchKind kind = SketchKind::kFm;
  std::uint32_t rows = 0;
  std::uint32_t width = 0;
};

/// Parses and validates the fixed header. Throws FormatError.
SnapshotHeader read_header(std::span<const std::uint8_t> bytes);

Bytes serialize(const FmEnsemble& ensemble);
Bytes serialize(const RankEnsemble& ensemble);

FmEnsemble deserialize_fm(std::span<const std::uint8_t> bytes);
RankEnsemble deserialize_rank(std::span<const std::uint8_t> bytes);

/// Expected total size of a snapshot with the given header.
std::size_t snapshot_size(const SnapshotHeader& header);

void write_file(const std::string& path, std::span<const std::uint8_t> bytes);
Bytes read_file(const std::string& path);

namespace detail {

class ByteWriter {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void header(SketchKind kind, std::uint32_t rows, std::uint32_t width);
  /// Seeds followed by K*W cells.
  void rank_body(const RankEnsemble& ensemble);
  Bytes take() && { return std::move(out_); }

 private:
  Bytes out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}
  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  RankEnsemble rank_body(std::uint32_t rows, std::uint32_t width);
  void skip(std::size_t n);
  void expect_end() const;

 private:
  void need(std::size_t n) const;

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace detail
}  // namespace rainsketch
