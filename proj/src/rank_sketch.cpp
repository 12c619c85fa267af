#include "rainsketch/rank_sketch.hpp"

#include <algorithm>

#include "rainsketch/errors.hpp"
#include "rainsketch/hashing.hpp"

namespace rainsketch {

RankSketchRow::RankSketchRow(HashSeed seed, std::uint32_t width) : seed_(seed) {
  validate_width(width);
  slots_.assign(width, Timestamp::kEmptyTick);
}

void RankSketchRow::insert(std::string_view client_id, Timestamp ts) {
  if (ts.is_empty()) {
    throw InvalidArgument("the empty-slot sentinel is not a valid timestamp");
  }
  const auto p = position_of(client_id, seed_, width()).index;
  slots_[p] = std::min(slots_[p], ts.tick);
}

FmSketch RankSketchRow::to_fm(Timestamp x) const {
  std::uint64_t bits = 0;
  for (std::uint32_t p = 0; p < slots_.size(); ++p) {
    if (slots_[p] != Timestamp::kEmptyTick && slots_[p] <= x.tick) {
      bits |= std::uint64_t{1} << p;
    }
  }
  return FmSketch::from_bits(bits, width());
}

void RankSketchRow::merge(const RankSketchRow& other) {
  if (other.seed_ != seed_ || other.slots_.size() != slots_.size()) {
    throw IncompatibleSketch("rank rows differ in seed or width");
  }
  for (std::size_t p = 0; p < slots_.size(); ++p) {
    slots_[p] = std::min(slots_[p], other.slots_[p]);
  }
}

void RankSketchRow::reset() noexcept {
  std::fill(slots_.begin(), slots_.end(), Timestamp::kEmptyTick);
}

void RankSketchRow::assign_slots(std::span<const std::uint64_t> slots) {
  if (slots.size() != slots_.size()) {
    throw InvalidArgument("slot count does not match row width");
  }
  std::copy(slots.begin(), slots.end(), slots_.begin());
}

RankEnsemble::RankEnsemble(std::vector<HashSeed> seeds, std::uint32_t width)
    : width_(width) {
  validate_width(width);
  validate_seeds(seeds);
  rows_.reserve(seeds.size());
  for (const auto seed : seeds) rows_.emplace_back(seed, width);
}

RankEnsemble RankEnsemble::seeded(std::uint64_t base_seed, std::size_t rows,
                                  std::uint32_t width) {
  return RankEnsemble(derive_seeds(base_seed, rows), width);
}

void RankEnsemble::insert(const RainCheckEvent& event) {
  insert(event.client_id, event.ts);
}

void RankEnsemble::insert(std::string_view client_id, Timestamp ts) {
  if (client_id.empty()) {
    throw InvalidArgument("client id must be non-empty");
  }
  if (ts.is_empty()) {
    throw InvalidArgument("the empty-slot sentinel is not a valid timestamp");
  }
  for (auto& row : rows_) row.insert(client_id, ts);
}

std::vector<FmSketch> RankEnsemble::to_fm(Timestamp x) const {
  std::vector<FmSketch> out;
  out.reserve(rows_.size());
  for (const auto& row : rows_) out.push_back(row.to_fm(x));
  return out;
}

double RankEnsemble::count_at_most(Timestamp x, Averaging averaging) const {
  return ensemble_estimate(to_fm(x), averaging);
}

void RankEnsemble::merge(const RankEnsemble& other) {
  if (other.width_ != width_ || other.rows_.size() != rows_.size()) {
    throw IncompatibleSketch("rank ensembles differ in width or row count");
  }
  for (std::size_t k = 0; k < rows_.size(); ++k) rows_[k].merge(other.rows_[k]);
}

void RankEnsemble::reset() noexcept {
  for (auto& row : rows_) row.reset();
}

RankEnsemble RankEnsemble::empty_copy() const {
  return RankEnsemble(seeds(), width_);
}

std::vector<HashSeed> RankEnsemble::seeds() const {
  std::vector<HashSeed> out;
  out.reserve(rows_.size());
  for (const auto& row : rows_) out.push_back(row.seed());
  return out;
}

}  // namespace rainsketch
