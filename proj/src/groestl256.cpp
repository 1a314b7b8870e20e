#include "cnhaven/final_hash.hpp"

#include "cnhaven/aes.hpp"

namespace cnhaven {

namespace {

// 8x8 byte matrix, column-major: s[8 * col + row].
using Matrix = std::array<std::uint8_t, 64>;

constexpr int kRounds = 10;
constexpr int kShiftP[8] = {0, 1, 2, 3, 4, 5, 6, 7};
constexpr int kShiftQ[8] = {1, 3, 5, 7, 0, 2, 4, 6};
constexpr std::uint8_t kMix[8] = {2, 2, 3, 4, 5, 3, 5, 7};

std::uint8_t gmul(std::uint8_t a, std::uint8_t b)
{
    std::uint8_t r = 0;
    while (b) {
        if (b & 1) r ^= a;
        a = static_cast<std::uint8_t>((a << 1) ^ ((a & 0x80) ? 0x1b : 0));
        b >>= 1;
    }
    return r;
}

struct MulTable {
    std::uint8_t t[8][256];
    MulTable()
    {
        for (int k = 0; k < 8; ++k)
            for (int x = 0; x < 256; ++x) t[k][x] = gmul(static_cast<std::uint8_t>(x), kMix[k]);
    }
};

const MulTable& mul_table()
{
    static const MulTable table;
    return table;
}

void permute(Matrix& s, bool q)
{
    const auto& mt = mul_table();
    const int* shift = q ? kShiftQ : kShiftP;
    Matrix t;
    for (int r = 0; r < kRounds; ++r) {
        // AddRoundConstant
        for (int c = 0; c < 8; ++c) {
            const std::uint8_t k = static_cast<std::uint8_t>((c << 4) ^ r);
            if (q) {
                for (int row = 0; row < 7; ++row) s[8 * c + row] ^= 0xff;
                s[8 * c + 7] ^= static_cast<std::uint8_t>(0xff ^ k);
            } else {
                s[8 * c] ^= k;
            }
        }
        // SubBytes + ShiftBytes
        for (int c = 0; c < 8; ++c)
            for (int row = 0; row < 8; ++row) t[8 * c + row] = aes_sbox(s[8 * ((c + shift[row]) & 7) + row]);
        // MixBytes
        for (int c = 0; c < 8; ++c) {
            const std::uint8_t* a = &t[8 * c];
            for (int row = 0; row < 8; ++row) {
                std::uint8_t acc = 0;
                for (int j = 0; j < 8; ++j) acc ^= mt.t[j][a[(row + j) & 7]];
                s[8 * c + row] = acc;
            }
        }
    }
}

void compress(Matrix& h, const std::uint8_t* block)
{
    Matrix p, q;
    for (int i = 0; i < 64; ++i) {
        p[i] = h[i] ^ block[i];
        q[i] = block[i];
    }
    permute(p, false);
    permute(q, true);
    for (int i = 0; i < 64; ++i) h[i] ^= p[i] ^ q[i];
}

} // namespace

Digest groestl256(ByteSpan data)
{
    Matrix h{};
    h[62] = 0x01; // 256-bit output length, big-endian in the last bytes

    const std::uint8_t* p = data.data();
    std::size_t len = data.size();
    std::uint64_t blocks = 0;
    for (; len >= 64; len -= 64, p += 64, ++blocks) compress(h, p);

    std::uint8_t tail[128] = {};
    std::memcpy(tail, p, len);
    tail[len] = 0x80;
    const std::size_t tail_len = len <= 55 ? 64 : 128;
    blocks += tail_len / 64;
    store_be64(tail + tail_len - 8, blocks);
    compress(h, tail);
    if (tail_len == 128) compress(h, tail + 64);

    Matrix x = h;
    permute(x, false);
    Digest out;
    for (int i = 0; i < 32; ++i) out[i] = x[32 + i] ^ h[32 + i];
    return out;
}

} // namespace cnhaven
