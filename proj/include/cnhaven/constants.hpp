#pragma once

#include <cstddef>
#include <cstdint>

namespace cnhaven {

struct ByteRange {
    std::size_t begin;
    std::size_t end;
    constexpr std::size_t size() const { return end - begin; }
};

/// CryptoNight-Haven parameters, fixed by the reference miner's cn-heavy/xhv variant.
struct AlgoConstants {
    std::uint32_t iterations = 0x40000;
    std::uint32_t address_mask = 0x3FFFF0;
    std::size_t scratchpad_bytes = std::size_t{1} << 22;
    ByteRange explode_key_bytes{0, 32};
    ByteRange explode_init_bytes{64, 192};
    ByteRange implode_key_bytes{32, 64};
    ByteRange implode_xor_bytes{64, 192};
    /// 10-round + mix passes applied to the working blocks before the first write.
    unsigned explode_premix_rounds = 16;
    unsigned implode_passes = 2;
    unsigned implode_extra_rounds = 16;
    /// Default nonce offset (39) plus the 4 nonce bytes.
    std::size_t min_input_len = 43;
    std::size_t default_nonce_offset = 39;
};

inline constexpr AlgoConstants kHaven{};

inline constexpr std::size_t kScratchpadBytes = kHaven.scratchpad_bytes;
inline constexpr std::size_t kGroupBytes = 128;
inline constexpr std::size_t kGroupCount = kScratchpadBytes / kGroupBytes;
/// Scratchpad accesses issued by one Shuffle iteration (three read/write pairs).
inline constexpr std::size_t kShuffleAccessesPerIteration = 6;

static_assert((kHaven.address_mask & 0xF) == 0);
static_assert(kHaven.address_mask < kScratchpadBytes);
static_assert(kHaven.implode_extra_rounds == 16);

} // namespace cnhaven
