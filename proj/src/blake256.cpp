#include "cnhaven/final_hash.hpp"

#include <bit>

namespace cnhaven {

namespace {

using u32 = std::uint32_t;

constexpr u32 kIv[8] = {0x6A09E667, 0xBB67AE85, 0x3C6EF372, 0xA54FF53A, 0x510E527F, 0x9B05688C, 0x1F83D9AB, 0x5BE0CD19};

constexpr u32 kU[16] = {
    0x243F6A88, 0x85A308D3, 0x13198A2E, 0x03707344, 0xA4093822, 0x299F31D0, 0x082EFA98, 0xEC4E6C89,
    0x452821E6, 0x38D01377, 0xBE5466CF, 0x34E90C6C, 0xC0AC29B7, 0xC97C50DD, 0x3F84D5B5, 0xB5470917,
};

constexpr std::uint8_t kSigma[10][16] = {
    {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15},
    {14, 10, 4, 8, 9, 15, 13, 6, 1, 12, 0, 2, 11, 7, 5, 3},
    {11, 8, 12, 0, 5, 2, 15, 13, 10, 14, 3, 6, 7, 1, 9, 4},
    {7, 9, 3, 1, 13, 12, 11, 14, 2, 6, 5, 10, 4, 0, 15, 8},
    {9, 0, 5, 7, 2, 4, 10, 15, 14, 1, 11, 12, 6, 8, 3, 13},
    {2, 12, 6, 10, 0, 11, 8, 3, 4, 13, 7, 5, 15, 14, 1, 9},
    {12, 5, 1, 15, 14, 13, 4, 10, 0, 7, 6, 3, 9, 2, 8, 11},
    {13, 11, 7, 14, 12, 1, 3, 9, 5, 0, 15, 4, 8, 6, 2, 10},
    {6, 15, 14, 9, 11, 3, 0, 8, 12, 2, 13, 7, 1, 4, 10, 5},
    {10, 2, 8, 4, 7, 6, 1, 5, 15, 11, 9, 14, 3, 12, 13, 0},
};

constexpr int kRounds = 14;

void compress(u32 h[8], const std::uint8_t* block, std::uint64_t counter)
{
    u32 m[16], v[16];
    for (int i = 0; i < 16; ++i) m[i] = load_be32(block + 4 * i);
    for (int i = 0; i < 8; ++i) v[i] = h[i];
    for (int i = 0; i < 4; ++i) v[8 + i] = kU[i];
    v[12] = kU[4] ^ static_cast<u32>(counter);
    v[13] = kU[5] ^ static_cast<u32>(counter);
    v[14] = kU[6] ^ static_cast<u32>(counter >> 32);
    v[15] = kU[7] ^ static_cast<u32>(counter >> 32);

    auto g = [&](const std::uint8_t* s, int a, int b, int c, int d, int i) {
        v[a] += v[b] + (m[s[2 * i]] ^ kU[s[2 * i + 1]]);
        v[d] = std::rotr(v[d] ^ v[a], 16);
        v[c] += v[d];
        v[b] = std::rotr(v[b] ^ v[c], 12);
        v[a] += v[b] + (m[s[2 * i + 1]] ^ kU[s[2 * i]]);
        v[d] = std::rotr(v[d] ^ v[a], 8);
        v[c] += v[d];
        v[b] = std::rotr(v[b] ^ v[c], 7);
    };

    for (int r = 0; r < kRounds; ++r) {
        const std::uint8_t* s = kSigma[r % 10];
        g(s, 0, 4, 8, 12, 0);
        g(s, 1, 5, 9, 13, 1);
        g(s, 2, 6, 10, 14, 2);
        g(s, 3, 7, 11, 15, 3);
        g(s, 0, 5, 10, 15, 4);
        g(s, 1, 6, 11, 12, 5);
        g(s, 2, 7, 8, 13, 6);
        g(s, 3, 4, 9, 14, 7);
    }
    for (int i = 0; i < 8; ++i) h[i] ^= v[i] ^ v[i + 8];
}

} // namespace

Digest blake256(ByteSpan data)
{
    u32 h[8];
    std::memcpy(h, kIv, sizeof h);

    const std::uint8_t* p = data.data();
    std::size_t len = data.size();
    const std::uint64_t bits = static_cast<std::uint64_t>(len) * 8;
    std::uint64_t counted = 0;
    for (; len >= 64; len -= 64, p += 64) {
        counted += 512;
        compress(h, p, counted);
    }

    // The counter of a block that carries no message bits is zero.
    std::uint8_t tail[128] = {};
    std::memcpy(tail, p, len);
    tail[len] = 0x80;
    const std::size_t tail_len = len <= 55 ? 64 : 128;
    tail[tail_len - 9] |= 0x01;
    store_be64(tail + tail_len - 8, bits);

    compress(h, tail, len ? bits : 0);
    if (tail_len == 128) compress(h, tail + 64, 0);

    Digest out;
    for (int i = 0; i < 8; ++i) store_be32(out.data() + 4 * i, h[i]);
    return out;
}

} // namespace cnhaven
