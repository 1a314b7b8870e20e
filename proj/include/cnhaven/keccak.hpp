#pragma once

#include <array>
#include <cstdint>

#include "cnhaven/block128.hpp"
#include "cnhaven/bytes.hpp"

namespace cnhaven {

inline constexpr std::size_t kKeccakStateBytes = 200;
/// Absorb rate used by CryptoNight (200 - 2 * 32).
inline constexpr std::size_t kKeccakRate = 136;

/// The 1600-bit Keccak state. Lane i occupies bytes [8i, 8i+8) little-endian.
struct KeccakState {
    std::array<std::uint64_t, 25> lanes{};

    static KeccakState from_bytes(ByteSpan bytes);
    std::array<std::uint8_t, kKeccakStateBytes> to_bytes() const;

    std::uint8_t byte(std::size_t i) const { return static_cast<std::uint8_t>(lanes[i / 8] >> (8 * (i % 8))); }

    /// 16-byte chunk i (0..11) of the byte view.
    Block128 block(std::size_t i) const { return Block128::from_words(lanes[2 * i], lanes[2 * i + 1]); }
    void set_block(std::size_t i, const Block128& b)
    {
        lanes[2 * i] = b.lo();
        lanes[2 * i + 1] = b.hi();
    }

    friend bool operator==(const KeccakState&, const KeccakState&) = default;
};

void keccak_f1600_inplace(std::array<std::uint64_t, 25>& lanes);

/// 24-round Keccak-f[1600]. Takes its argument by value; the caller's state is untouched.
KeccakState keccak_f1600(KeccakState state);

/// CryptoNight-style absorb: rate 136, pad 0x01 .. 0x80, returns the whole
/// 200-byte state rather than a truncated digest. Throws InputTooShort below
/// the Haven minimum input length.
KeccakState keccak_absorb(ByteSpan input);

/// Same sponge without the minimum-length guard.
KeccakState keccak_absorb_unchecked(ByteSpan input);

} // namespace cnhaven
