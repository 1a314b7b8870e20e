#pragma once

#include <array>
#include <cstdint>

#include "cnhaven/bytes.hpp"

namespace cnhaven {

/// A 16-byte AES block / scratchpad cell. Word views are little-endian:
/// lo() covers bytes 0..7, hi() bytes 8..15.
struct alignas(16) Block128 {
    std::array<std::uint8_t, 16> bytes{};

    static Block128 from_words(std::uint64_t lo, std::uint64_t hi)
    {
        Block128 b;
        store_le64(b.bytes.data(), lo);
        store_le64(b.bytes.data() + 8, hi);
        return b;
    }

    static Block128 from_bytes(const std::uint8_t* p)
    {
        Block128 b;
        std::memcpy(b.bytes.data(), p, 16);
        return b;
    }

    std::uint64_t lo() const { return load_le64(bytes.data()); }
    std::uint64_t hi() const { return load_le64(bytes.data() + 8); }

    Block128& operator^=(const Block128& other)
    {
        for (int i = 0; i < 16; ++i) bytes[i] ^= other.bytes[i];
        return *this;
    }

    friend Block128 operator^(Block128 a, const Block128& b) { return a ^= b; }
    friend bool operator==(const Block128&, const Block128&) = default;
};

static_assert(sizeof(Block128) == 16);

} // namespace cnhaven
