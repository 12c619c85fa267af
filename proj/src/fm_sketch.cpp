#include "rainsketch/fm_sketch.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "rainsketch/errors.hpp"
#include "rainsketch/hashing.hpp"

namespace rainsketch {
namespace {

std::uint64_t width_mask(std::uint32_t width) noexcept {
  return width >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1;
}

}  // namespace

FmSketch::FmSketch(std::uint32_t width) : width_(width) {
  validate_width(width);
}

FmSketch FmSketch::from_bits(std::uint64_t bits, std::uint32_t width) {
  FmSketch sketch(width);
  if ((bits & ~width_mask(width)) != 0) {
    throw InvalidArgument("bits set beyond sketch width");
  }
  sketch.bits_ = bits;
  return sketch;
}

void FmSketch::insert(std::string_view client_id, HashSeed seed) {
  set(position_of(client_id, seed, width_));
}

void FmSketch::set(Position position) {
  if (position.index >= width_) {
    throw InvalidArgument("position " + std::to_string(position.index) +
                          " outside width " + std::to_string(width_));
  }
  bits_ |= std::uint64_t{1} << position.index;
}

bool FmSketch::test(std::uint32_t index) const {
  return index < width_ && ((bits_ >> index) & 1U) != 0;
}

std::uint32_t FmSketch::lsb0() const noexcept {
  const auto ones = static_cast<std::uint32_t>(std::countr_one(bits_));
  return std::min(ones, width_);
}

double FmSketch::estimate() const noexcept {
  if (empty()) return 0.0;
  return std::ldexp(1.0, static_cast<int>(lsb0())) / kFmCorrection;
}

void FmSketch::merge(const FmSketch& other) {
  if (other.width_ != width_) {
    throw IncompatibleSketch("cannot merge FM sketches of width " +
                             std::to_string(width_) + " and " +
                             std::to_string(other.width_));
  }
  bits_ |= other.bits_;
}

double ensemble_estimate(std::span<const FmSketch> rows, Averaging averaging) {
  if (rows.empty()) {
    throw InvalidArgument("ensemble must contain at least one row");
  }
  if (std::all_of(rows.begin(), rows.end(),
                  [](const FmSketch& r) { return r.empty(); })) {
    return 0.0;
  }
  const auto k = static_cast<double>(rows.size());
  if (averaging == Averaging::kMeanEstimate) {
    double sum = 0.0;
    for (const auto& row : rows) sum += row.estimate();
    return sum / k;
  }
  double index_sum = 0.0;
  for (const auto& row : rows) index_sum += row.lsb0();
  return std::exp2(index_sum / k) / kFmCorrection;
}

void AccuracyParams::validate() const {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    throw InvalidArgument("epsilon must be in (0, 1]");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InvalidArgument("delta must be in (0, 1)");
  }
  if (!(constant_c > 0.0) || !std::isfinite(constant_c)) {
    throw InvalidArgument("constant_c must be a positive finite number");
  }
}

std::size_t required_sketch_count(const AccuracyParams& params) {
  params.validate();
  const double raw =
      params.constant_c * std::log(2.0 / params.delta) /
      (params.epsilon * params.epsilon);
  // Absorb rounding noise so exact products (e.g. c=1, ln term 1, eps 1)
  // do not tip over to the next integer.
  const double k = std::ceil(raw - 1e-9);
  return k < 1.0 ? 1 : static_cast<std::size_t>(k);
}

void validate_seeds(std::span<const HashSeed> seeds) {
  if (seeds.empty()) {
    throw InvalidArgument("ensemble needs at least one seed");
  }
  std::vector<HashSeed> sorted(seeds.begin(), seeds.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InvalidArgument("ensemble seeds must be pairwise distinct");
  }
}

FmEnsemble::FmEnsemble(std::vector<HashSeed> seeds, std::uint32_t width)
    : seeds_(std::move(seeds)), width_(width) {
  validate_width(width);
  validate_seeds(seeds_);
  rows_.assign(seeds_.size(), FmSketch(width));
}

FmEnsemble FmEnsemble::seeded(std::uint64_t base_seed, std::size_t rows,
                              std::uint32_t width) {
  return FmEnsemble(derive_seeds(base_seed, rows), width);
}

void FmEnsemble::insert(std::string_view client_id) {
  for (std::size_t k = 0; k < rows_.size(); ++k) {
    rows_[k].insert(client_id, seeds_[k]);
  }
}

double FmEnsemble::estimate(Averaging averaging) const {
  return ensemble_estimate(rows_, averaging);
}

void FmEnsemble::merge(const FmEnsemble& other) {
  if (other.width_ != width_ || other.seeds_ != seeds_) {
    throw IncompatibleSketch(
        "FM ensembles differ in width, row count or seeds");
  }
  for (std::size_t k = 0; k < rows_.size(); ++k) rows_[k].merge(other.rows_[k]);
}

void FmEnsemble::reset() noexcept {
  for (auto& row : rows_) row.reset();
}

}  // namespace rainsketch
