#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "rainsketch/types.hpp"

namespace rainsketch {

/// Flajolet-Martin correction factor: E[lsb0] ~ log2(0.77351 n).
inline constexpr double kFmCorrection = 0.77351;

/// Flajolet-Martin bit vector of up to 64 positions. Bit p is set once some
/// inserted item hashed to p; bits are only cleared by reset().
class FmSketch {
 public:
  explicit FmSketch(std::uint32_t width = kDefaultWidth);

  /// Builds a sketch from raw bits; bits at or above `width` must be zero.
  static FmSketch from_bits(std::uint64_t bits, std::uint32_t width);

  void insert(std::string_view client_id, HashSeed seed);
  void set(Position position);
  bool test(std::uint32_t index) const;

  /// Lowest unset position, or width() when every bit is set.
  std::uint32_t lsb0() const noexcept;

  /// 2^lsb0 / 0.77351, or exactly 0 for a sketch that has never been written.
  double estimate() const noexcept;

  /// Bitwise union. Throws IncompatibleSketch on width mismatch.
  void merge(const FmSketch& other);
  void reset() noexcept { bits_ = 0; }

  bool empty() const noexcept { return bits_ == 0; }
  std::uint32_t width() const noexcept { return width_; }
  std::uint64_t bits() const noexcept { return bits_; }

  friend bool operator==(const FmSketch&, const FmSketch&) = default;

 private:
  std::uint64_t bits_ = 0;
  std::uint32_t width_;
};

/// How an ensemble combines its rows.
enum class Averaging {
  kMeanIndex,     // 2^(mean lsb0) / 0.77351, the original FM construction
  kMeanEstimate,  // arithmetic mean of per-row estimates
};

/// Combined estimate over rows that share one width. Returns 0 when every row
/// is empty.
double ensemble_estimate(std::span<const FmSketch> rows,
                         Averaging averaging = Averaging::kMeanIndex);

struct AccuracyParams {
  double epsilon = 0.3;
  double delta = 0.1;
  double constant_c = 1.0;

  void validate() const;
};

/// ceil(c * ln(2/delta) / epsilon^2), at least 1.
std::size_t required_sketch_count(const AccuracyParams& params);

/// K independently seeded FM sketches of the same width.
class FmEnsemble {
 public:
  /// Throws InvalidArgument for an empty or non-distinct seed list.
  FmEnsemble(std::vector<HashSeed> seeds, std::uint32_t width = kDefaultWidth);

  /// K rows seeded by derive_seeds(base_seed, K).
  static FmEnsemble seeded(std::uint64_t base_seed, std::size_t rows,
                           std::uint32_t width = kDefaultWidth);

  void insert(std::string_view client_id);
  double estimate(Averaging averaging = Averaging::kMeanIndex) const;

  /// Row-wise union. Throws IncompatibleSketch unless K, W and seeds match.
  void merge(const FmEnsemble& other);
  void reset() noexcept;

  std::span<const FmSketch> rows() const noexcept { return rows_; }
  std::span<FmSketch> mutable_rows() noexcept { return rows_; }
  std::span<const HashSeed> seeds() const noexcept { return seeds_; }
  std::size_t size() const noexcept { return rows_.size(); }
  std::uint32_t width() const noexcept { return width_; }

  friend bool operator==(const FmEnsemble&, const FmEnsemble&) = default;

 private:
  std::vector<HashSeed> seeds_;
  std::vector<FmSketch> rows_;
  std::uint32_t width_;
};

/// Shared seed-list validation for ensembles: non-empty and pairwise distinct.
void validate_seeds(std::span<const HashSeed> seeds);

}  // namespace rainsketch
