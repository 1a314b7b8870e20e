#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

#include "cnhaven/bytes.hpp"

namespace cnhaven {

using Digest = std::array<std::uint8_t, 32>;

/// Finalization hash selected by the two low bits of the final state.
enum class FinalHashFamily : std::uint8_t {
    Blake256 = 0,
    Groestl256 = 1,
    Jh256 = 2,
    Skein256 = 3,
};

inline FinalHashFamily family_from_code(std::uint8_t code) { return static_cast<FinalHashFamily>(code & 3); }
inline std::uint8_t family_code(FinalHashFamily f) { return static_cast<std::uint8_t>(f); }
std::string_view to_string(FinalHashFamily family);
std::optional<FinalHashFamily> parse_family(std::string_view name);

// Round-3 SHA-3 candidates as used by CryptoNote.
Digest blake256(ByteSpan data);    // BLAKE-256, 14 rounds
Digest groestl256(ByteSpan data);  // Groestl-256 (tweaked)
Digest jh256(ByteSpan data);       // JH-256, 42 rounds
Digest skein512_256(ByteSpan data);  // Skein-512 with 256-bit output

Digest hash_final(FinalHashFamily family, ByteSpan data);

} // namespace cnhaven
