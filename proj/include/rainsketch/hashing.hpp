#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "rainsketch/types.hpp"

namespace rainsketch {

/// Seeded 64-bit hash of a byte string. The output depends only on the byte
/// values, their count and the seed, so it is identical on every platform.
///
/// Not cryptographic: a client that can choose its identity can also choose
/// its position. Deployments facing adversarial clients should key the seed
/// with a server secret.
std::uint64_t hash_bytes(std::string_view bytes, HashSeed seed) noexcept;

/// Trailing-zero count of `word`, clamped to `width - 1`. A word of zero
/// lands on the last position.
Position position_from_hash(std::uint64_t word, std::uint32_t width);

/// Maps a client identity to a sketch position; position k is chosen with
/// probability 2^-(k+1), residual mass goes to `width - 1`.
///
/// Throws InvalidArgument for an empty id or a width outside [1, 64].
Position position_of(std::string_view client_id, HashSeed seed,
                     std::uint32_t width);

/// SplitMix64 step: advances `state` and returns the next output.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// `count` pairwise distinct seeds derived from `base`.
std::vector<HashSeed> derive_seeds(std::uint64_t base, std::size_t count);

void validate_width(std::uint32_t width);

}  // namespace rainsketch
