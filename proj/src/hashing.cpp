#include "rainsketch/hashing.hpp"

#include <bit>
#include <string>

#include "rainsketch/errors.hpp"

namespace rainsketch {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t fmix(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

std::uint64_t load_le(const char* p, std::size_t n) noexcept {
  std::uint64_t word = 0;
  for (std::size_t i = 0; i < n; ++i) {
    word |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i]))
            << (8 * i);
  }
  return word;
}

}  // namespace

std::uint64_t hash_bytes(std::string_view bytes, HashSeed seed) noexcept {
  const std::size_t len = bytes.size();
  std::uint64_t h = fmix(seed.value + kGolden * (len + 1));

  std::size_t offset = 0;
  for (; offset + 8 <= len; offset += 8) {
    h = fmix(h ^ fmix(load_le(bytes.data() + offset, 8) + kGolden));
  }
  const std::size_t tail = len - offset;
  if (tail != 0) {
    const std::uint64_t word = load_le(bytes.data() + offset, tail) |
                               (static_cast<std::uint64_t>(tail) << 56);
    h = fmix(h ^ fmix(word + kGolden));
  }
  return fmix(h ^ static_cast<std::uint64_t>(len));
}

void validate_width(std::uint32_t width) {
  if (width < 1 || width > kMaxWidth) {
    throw InvalidArgument("sketch width must be in [1, 64], got " +
                          std::to_string(width));
  }
}

Position position_from_hash(std::uint64_t word, std::uint32_t width) {
  validate_width(width);
  const auto zeros = static_cast<std::uint32_t>(std::countr_zero(word));
  return Position{zeros < width ? zeros : width - 1};
}

Position position_of(std::string_view client_id, HashSeed seed,
                     std::uint32_t width) {
  if (client_id.empty()) {
    throw InvalidArgument("client id must be non-empty");
  }
  return position_from_hash(hash_bytes(client_id, seed), width);
}

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  state += kGolden;
  return fmix(state);
}

std::vector<HashSeed> derive_seeds(std::uint64_t base, std::size_t count) {
  // fmix is a bijection and the state steps by an odd constant, so the first
  // 2^64 outputs are pairwise distinct.
  std::vector<HashSeed> seeds;
  seeds.reserve(count);
  std::uint64_t state = base;
  for (std::size_t i = 0; i < count; ++i) {
    seeds.push_back(HashSeed{splitmix64(state)});
  }
  return seeds;
}

}  // namespace rainsketch
