#include "rainsketch/serialization.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>

#include "rainsketch/errors.hpp"

namespace rainsketch {
namespace detail {

void ByteWriter::u32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::u64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::header(SketchKind kind, std::uint32_t rows,
                        std::uint32_t width) {
  for (const char c : kSnapshotMagic) u8(static_cast<std::uint8_t>(c));
  u8(kSnapshotVersion);
  u8(static_cast<std::uint8_t>(kind));
  u32(rows);
  u32(width);
}

void ByteWriter::rank_body(const RankEnsemble& ensemble) {
  for (const auto& row : ensemble.rows()) u64(row.seed().value);
  for (const auto& row : ensemble.rows()) {
    for (const auto cell : row.slots()) u64(cell);
  }
}

void ByteReader::need(std::size_t n) const {
  if (bytes_.size() - pos_ < n) throw FormatError("snapshot truncated");
}

std::uint8_t ByteReader::u8() {
  need(1);
  return bytes_[pos_++];
}

std::uint32_t ByteReader::u32() {
  need(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_++]) << (8 * i);
  return v;
}

std::uint64_t ByteReader::u64() {
  need(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * i);
  return v;
}

void ByteReader::skip(std::size_t n) {
  need(n);
  pos_ += n;
}

void ByteReader::expect_end() const {
  if (pos_ != bytes_.size()) throw FormatError("trailing bytes after snapshot");
}

RankEnsemble ByteReader::rank_body(std::uint32_t rows, std::uint32_t width) {
  std::vector<HashSeed> seeds(rows);
  for (auto& seed : seeds) seed.value = u64();
  RankEnsemble ensemble = [&] {
    try {
      return RankEnsemble(std::move(seeds), width);
    } catch (const InvalidArgument& e) {
      throw FormatError(e.what());
    }
  }();
  std::vector<std::uint64_t> cells(width);
  for (auto& row : ensemble.mutable_rows()) {
    for (auto& cell : cells) cell = u64();
    row.assign_slots(cells);
  }
  return ensemble;
}

}  // namespace detail

SnapshotHeader read_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kSnapshotHeaderSize) throw FormatError("snapshot truncated");
  if (!std::equal(std::begin(kSnapshotMagic), std::end(kSnapshotMagic),
                  bytes.begin(),
                  [](char a, std::uint8_t b) { return static_cast<std::uint8_t>(a) == b; })) {
    throw FormatError("bad snapshot magic");
  }
  detail::ByteReader reader(bytes);
  reader.skip(4);
  SnapshotHeader header;
  header.version = reader.u8();
  if (header.version != kSnapshotVersion) {
    throw FormatError("unsupported snapshot version " + std::to_string(header.version));
  }
  const auto kind = reader.u8();
  if (kind > static_cast<std::uint8_t>(SketchKind::kWindow)) {
    throw FormatError("unknown sketch kind " + std::to_string(kind));
  }
  header.kind = static_cast<SketchKind>(kind);
  header.rows = reader.u32();
  header.width = reader.u32();
  if (header.rows == 0) throw FormatError("snapshot has zero rows");
  if (header.width == 0 || header.width > kMaxWidth) {
    throw FormatError("snapshot width out of range");
  }
  return header;
}

std::size_t snapshot_size(const SnapshotHeader& h) {
  const std::size_t k = h.rows;
  const std::size_t w = h.width;
  switch (h.kind) {
    case SketchKind::kFm:
      return kSnapshotHeaderSize + 8 * k + k * ((w + 7) / 8);
    case SketchKind::kRank:
      return kSnapshotHeaderSize + 8 * k + 8 * k * w;
    case SketchKind::kWindow:
      return kSnapshotHeaderSize + 16 + 2 * (8 * k + 8 * k * w);
  }
  return 0;
}

Bytes serialize(const FmEnsemble& ensemble) {
  detail::ByteWriter writer;
  const auto width = ensemble.width();
  writer.header(SketchKind::kFm, static_cast<std::uint32_t>(ensemble.size()), width);
  for (const auto seed : ensemble.seeds()) writer.u64(seed.value);
  const std::uint32_t row_bytes = (width + 7) / 8;
  for (const auto& row : ensemble.rows()) {
    for (std::uint32_t b = 0; b < row_bytes; ++b) {
      writer.u8(static_cast<std::uint8_t>(row.bits() >> (8 * b)));
    }
  }
  return std::move(writer).take();
}

Bytes serialize(const RankEnsemble& ensemble) {
  detail::ByteWriter writer;
  writer.header(SketchKind::kRank, static_cast<std::uint32_t>(ensemble.size()),
                ensemble.width());
  writer.rank_body(ensemble);
  return std::move(writer).take();
}

FmEnsemble deserialize_fm(std::span<const std::uint8_t> bytes) {
  const auto header = read_header(bytes);
  if (header.kind != SketchKind::kFm) throw FormatError("snapshot is not an FM ensemble");
  detail::ByteReader reader(bytes);
  reader.skip(kSnapshotHeaderSize);
  std::vector<HashSeed> seeds(header.rows);
  for (auto& seed : seeds) seed.value = reader.u64();
  FmEnsemble ensemble = [&] {
    try {
      return FmEnsemble(std::move(seeds), header.width);
    } catch (const InvalidArgument& e) {
      throw FormatError(e.what());
    }
  }();
  const std::uint32_t row_bytes = (header.width + 7) / 8;
  for (auto& row : ensemble.mutable_rows()) {
    std::uint64_t bits = 0;
    for (std::uint32_t b = 0; b < row_bytes; ++b) {
      bits |= static_cast<std::uint64_t>(reader.u8()) << (8 * b);
    }
    try {
      row = FmSketch::from_bits(bits, header.width);
    } catch (const InvalidArgument& e) {
      throw FormatError(e.what());
    }
  }
  reader.expect_end();
  return ensemble;
}

RankEnsemble deserialize_rank(std::span<const std::uint8_t> bytes) {
  const auto header = read_header(bytes);
  if (header.kind != SketchKind::kRank) throw FormatError("snapshot is not a rank ensemble");
  detail::ByteReader reader(bytes);
  reader.skip(kSnapshotHeaderSize);
  auto ensemble = reader.rank_body(header.rows, header.width);
  reader.expect_end();
  return ensemble;
}

void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing " + path);
}

Bytes read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace rainsketch
