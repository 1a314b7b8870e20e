#include "cnhaven/final_hash.hpp"

#include <array>

namespace cnhaven {

namespace {

using u64 = std::uint64_t;

constexpr const char* kRoundConstantHex[42] = {
#include "jh_constants.inc"
};

constexpr u64 hex_word(const char* s)
{
    // 8 bytes, little-endian
    u64 v = 0;
    for (int i = 7; i >= 0; --i) {
        auto nib = [](char c) -> u64 { return c <= '9' ? c - '0' : c - 'a' + 10; };
        v = (v << 8) | (nib(s[2 * i]) << 4) | nib(s[2 * i + 1]);
    }
    return v;
}

constexpr auto kRoundConstants = [] {
    std::array<std::array<u64, 4>, 42> rc{};
    for (int r = 0; r < 42; ++r)
        for (int w = 0; w < 4; ++w) rc[r][w] = hex_word(kRoundConstantHex[r] + 16 * w);
    return rc;
}();

template <int R>
constexpr u64 swap_bits(u64 x)
{
    constexpr u64 kMask[5] = {0x5555555555555555ULL, 0x3333333333333333ULL, 0x0f0f0f0f0f0f0f0fULL, 0x00ff00ff00ff00ffULL, 0x0000ffff0000ffffULL};
    if constexpr (R == 5) {
        return (x << 32) | (x >> 32);
    } else if constexpr (R < 5) {
        constexpr int n = 1 << R;
        return ((x & kMask[R]) << n) | ((x >> n) & kMask[R]);
    } else {
        return x;
    }
}

// S-box layer (S0/S1 picked per bit by the constant) on one bitsliced nibble lane.
constexpr void sbox(u64& m0, u64& m1, u64& m2, u64& m3, u64 cc)
{
    m3 = ~m3;
    m0 ^= ~m2 & cc;
    const u64 t = cc ^ (m0 & m1);
    m0 ^= m2 & m3;
    m3 ^= ~m1 & m2;
    m1 ^= m0 & m2;
    m2 ^= m0 & ~m3;
    m0 ^= m1 | m3;
    m3 ^= m1 & m2;
    m1 ^= t & m0;
    m2 ^= t;
}

constexpr void mds(u64& m0, u64& m1, u64& m2, u64& m3, u64& m4, u64& m5, u64& m6, u64& m7)
{
    m4 ^= m1;
    m5 ^= m2;
    m6 ^= m0 ^ m3;
    m7 ^= m0;
    m0 ^= m5;
    m1 ^= m6;
    m2 ^= m4 ^ m7;
    m3 ^= m4;
}

struct JhState {
    u64 x[8][2];

    template <int R>
    constexpr void round(int r)
    {
        const auto& rc = kRoundConstants[r];
        for (int i = 0; i < 2; ++i) {
            u64 a0 = x[0][i], a1 = x[1][i], a2 = x[2][i], a3 = x[3][i];
            u64 a4 = x[4][i], a5 = x[5][i], a6 = x[6][i], a7 = x[7][i];
            sbox(a0, a2, a4, a6, rc[i]);
            sbox(a1, a3, a5, a7, rc[i + 2]);
            mds(a0, a2, a4, a6, a1, a3, a5, a7);
            x[0][i] = a0;
            x[1][i] = swap_bits<R>(a1);
            x[2][i] = a2;
            x[3][i] = swap_bits<R>(a3);
            x[4][i] = a4;
            x[5][i] = swap_bits<R>(a5);
            x[6][i] = a6;
            x[7][i] = swap_bits<R>(a7);
        }
    }

    constexpr void e8()
    {
        for (int r = 0; r < 42; r += 7) {
            round<0>(r);
            round<1>(r + 1);
            round<2>(r + 2);
            round<3>(r + 3);
            round<4>(r + 4);
            round<5>(r + 5);
            round<6>(r + 6);
            for (int k = 1; k < 8; k += 2) {
                const u64 t = x[k][0];
                x[k][0] = x[k][1];
                x[k][1] = t;
            }
        }
    }

    constexpr void f8(const std::uint8_t* block)
    {
        u64 m[8];
        for (int i = 0; i < 8; ++i) m[i] = load_le64(block + 8 * i);
        for (int i = 0; i < 8; ++i) x[i >> 1][i & 1] ^= m[i];
        e8();
        for (int i = 0; i < 8; ++i) x[(8 + i) >> 1][(8 + i) & 1] ^= m[i];
    }
};

constexpr JhState initial_state()
{
    // H0 = F8(H(-1), 0) where H(-1) holds the digest size as a big-endian 16-bit value.
    JhState s{};
    s.x[0][0] = 0x0001; // bytes 00 01 -> 256 big-endian
    const std::uint8_t zero[64] = {};
    s.f8(zero);
    return s;
}

constexpr JhState kH0 = initial_state();

} // namespace

Digest jh256(ByteSpan data)
{
    JhState s = kH0;

    const std::uint8_t* p = data.data();
    std::size_t len = data.size();
    const u64 bits = static_cast<u64>(len) * 8;
    for (; len >= 64; len -= 64, p += 64) s.f8(p);

    std::uint8_t block[64] = {};
    if (len != 0) {
        std::memcpy(block, p, len);
        block[len] = 0x80;
        s.f8(block);
        std::memset(block, 0, sizeof block);
    } else {
        block[0] = 0x80;
    }
    store_be64(block + 56, bits);
    s.f8(block);

    std::uint8_t raw[128];
    for (int i = 0; i < 16; ++i) store_le64(raw + 8 * i, s.x[i >> 1][i & 1]);
    Digest out;
    std::memcpy(out.data(), raw + 96, 32);
    return out;
}

} // namespace cnhaven
