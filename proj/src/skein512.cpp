#include "cnhaven/final_hash.hpp"

#include <bit>

namespace cnhaven {

namespace {

using u64 = std::uint64_t;

constexpr int kRot[8][4] = {
    {46, 36, 19, 37}, {33, 27, 14, 42}, {17, 49, 36, 39}, {44, 9, 54, 56},
    {39, 30, 34, 24}, {13, 50, 10, 17}, {25, 29, 39, 43}, {8, 35, 56, 22},
};
constexpr int kPerm[8] = {2, 1, 4, 7, 6, 5, 0, 3};
constexpr u64 kParity = 0x1BD11BDAA9FC1A22ULL;

constexpr u64 kTypeConfig = 4;
constexpr u64 kTypeMessage = 48;
constexpr u64 kTypeOutput = 63;
constexpr u64 kFirst = u64{1} << 62;
constexpr u64 kFinal = u64{1} << 63;

void threefish512(const u64 key[8], const u64 tweak[2], const u64 in[8], u64 out[8])
{
    u64 k[9], t[3] = {tweak[0], tweak[1], tweak[0] ^ tweak[1]};
    k[8] = kParity;
    for (int i = 0; i < 8; ++i) {
        k[i] = key[i];
        k[8] ^= key[i];
    }

    u64 v[8];
    auto inject = [&](int s) {
        for (int i = 0; i < 8; ++i) v[i] += k[(s + i) % 9];
        v[5] += t[s % 3];
        v[6] += t[(s + 1) % 3];
        v[7] += static_cast<u64>(s);
    };

    for (int i = 0; i < 8; ++i) v[i] = in[i];
    inject(0);
    for (int d = 0; d < 72; ++d) {
        for (int j = 0; j < 4; ++j) {
            v[2 * j] += v[2 * j + 1];
            v[2 * j + 1] = std::rotl(v[2 * j + 1], kRot[d % 8][j]) ^ v[2 * j];
        }
        u64 p[8];
        for (int i = 0; i < 8; ++i) p[i] = v[kPerm[i]];
        std::memcpy(v, p, sizeof v);
        if (d % 4 == 3) inject(d / 4 + 1);
    }
    std::memcpy(out, v, sizeof v);
}

// One UBI chain step: h = E_h(block) ^ block.
void ubi_block(u64 h[8], const std::uint8_t* block, u64 position, u64 flags)
{
    u64 m[8], out[8];
    for (int i = 0; i < 8; ++i) m[i] = load_le64(block + 8 * i);
    const u64 tweak[2] = {position, flags};
    threefish512(h, tweak, m, out);
    for (int i = 0; i < 8; ++i) h[i] = out[i] ^ m[i];
}

void ubi(u64 h[8], ByteSpan data, u64 type)
{
    const u64 base = type << 56;
    std::size_t len = data.size();
    const std::uint8_t* p = data.data();
    u64 position = 0;
    u64 first = kFirst;
    while (len > 64) {
        position += 64;
        ubi_block(h, p, position, base | first);
        first = 0;
        p += 64;
        len -= 64;
    }
    std::uint8_t last[64] = {};
    std::memcpy(last, p, len);
    ubi_block(h, last, position + len, base | first | kFinal);
}

} // namespace

Digest skein512_256(ByteSpan data)
{
    u64 h[8] = {};

    std::uint8_t config[32] = {};
    store_le32(config, 0x33414853); // "SHA3"
    config[4] = 1;                  // version
    store_le64(config + 8, 256);    // output bits
    ubi(h, ByteSpan(config, sizeof config), kTypeConfig);

    ubi(h, data, kTypeMessage);

    const std::uint8_t counter[8] = {};
    ubi(h, ByteSpan(counter, sizeof counter), kTypeOutput);

    Digest out;
    for (int i = 0; i < 4; ++i) store_le64(out.data() + 8 * i, h[i]);
    return out;
}

} // namespace cnhaven
