#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "rainsketch/fm_sketch.hpp"
#include "rainsketch/types.hpp"

namespace rainsketch {

/// FM-shaped row that keeps, per position, the smallest timestamp of any
/// client hashed there. Thresholding the slots at x yields exactly the FM
/// sketch of the clients whose timestamp is <= x.
class RankSketchRow {
 public:
  explicit RankSketchRow(HashSeed seed, std::uint32_t width = kDefaultWidth);

  /// slot[position_of(client_id)] = min(slot, ts). Positions depend on the
  /// client id only, so repeated rainchecks from one client share a slot.
  void insert(std::string_view client_id, Timestamp ts);

  /// Bit p is set iff slot p is occupied and holds a value <= x.
  FmSketch to_fm(Timestamp x) const;

  /// Slot-wise minimum. Throws IncompatibleSketch on seed/width mismatch.
  void merge(const RankSketchRow& other);
  void reset() noexcept;

  /// Loads raw slot values; used by deserialization.
  void assign_slots(std::span<const std::uint64_t> slots);

  HashSeed seed() const noexcept { return seed_; }
  std::uint32_t width() const noexcept {
    return static_cast<std::uint32_t>(slots_.size());
  }
  std::span<const std::uint64_t> slots() const noexcept { return slots_; }
  Timestamp slot(std::uint32_t index) const { return Timestamp{slots_.at(index)}; }

  friend bool operator==(const RankSketchRow&, const RankSketchRow&) = default;

 private:
  HashSeed seed_;
  std::vector<std::uint64_t> slots_;
};

/// K rank-sketch rows with distinct seeds; answers "how many distinct clients
/// hold a timestamp <= x" for any x.
class RankEnsemble {
 public:
  RankEnsemble(std::vector<HashSeed> seeds, std::uint32_t width = kDefaultWidth);

  static RankEnsemble seeded(std::uint64_t base_seed, std::size_t rows,
                             std::uint32_t width = kDefaultWidth);

  /// Throws InvalidArgument for an empty client id or the sentinel timestamp.
  void insert(const RainCheckEvent& event);
  void insert(std::string_view client_id, Timestamp ts);

  /// Thresholded FM view of every row.
  std::vector<FmSketch> to_fm(Timestamp x) const;

  /// Ensemble estimate of |{clients with minimum timestamp <= x}|.
  double count_at_most(Timestamp x,
                       Averaging averaging = Averaging::kMeanIndex) const;

  void merge(const RankEnsemble& other);
  void reset() noexcept;

  /// Same seeds and width, every slot empty.
  RankEnsemble empty_copy() const;

  std::span<const RankSketchRow> rows() const noexcept { return rows_; }
  std::span<RankSketchRow> mutable_rows() noexcept { return rows_; }
  std::vector<HashSeed> seeds() const;
  std::size_t size() const noexcept { return rows_.size(); }
  std::uint32_t width() const noexcept { return width_; }

  /// Number of timestamp cells held: size() * width().
  std::size_t cell_count() const noexcept { return rows_.size() * width_; }

  friend bool operator==(const RankEnsemble&, const RankEnsemble&) = default;

 private:
  std::vector<RankSketchRow> rows_;
  std::uint32_t width_;
};

}  // namespace rainsketch
