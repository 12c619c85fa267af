#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <string>

namespace rainsketch {

/// Widest supported sketch row. A row is one 64-bit word of FM bits, and
/// positions come from the trailing-zero count of a 64-bit hash.
inline constexpr std::uint32_t kMaxWidth = 64;
inline constexpr std::uint32_t kDefaultWidth = 64;

struct HashSeed {
  std::uint64_t value = 0;

  friend constexpr auto operator<=>(HashSeed, HashSeed) = default;
};

/// Zero-based index of a sketch position, always below the row width.
struct Position {
  std::uint32_t index = 0;

  friend constexpr auto operator<=>(Position, Position) = default;
};

/// Discrete time tick. The all-ones value is reserved as the empty-slot
/// sentinel and compares greater than every valid timestamp.
struct Timestamp {
  static constexpr std::uint64_t kEmptyTick =
      std::numeric_limits<std::uint64_t>::max();
  static constexpr std::uint64_t kMaxValidTick = kEmptyTick - 1;

  std::uint64_t tick = 0;

  static constexpr Timestamp empty() noexcept { return Timestamp{kEmptyTick}; }
  static constexpr Timestamp max_valid() noexcept {
    return Timestamp{kMaxValidTick};
  }

  constexpr bool is_empty() const noexcept { return tick == kEmptyTick; }

  friend constexpr auto operator<=>(Timestamp, Timestamp) = default;
};

/// One raincheck as seen by the server: identity is the client, value is the
/// timestamp carried by the token.
struct RainCheckEvent {
  std::string client_id;
  Timestamp ts;
};

}  // namespace rainsketch
