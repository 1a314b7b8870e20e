#include "cnhaven/keccak.hpp"

#include "cnhaven/constants.hpp"
#include "cnhaven/error.hpp"

#include <bit>

namespace cnhaven {

namespace {

constexpr std::uint64_t kRoundConstants[24] = {
    0x0000000000000001ULL, 0x0000000000008082ULL, 0x800000000000808aULL, 0x8000000080008000ULL,
    0x000000000000808bULL, 0x0000000080000001ULL, 0x8000000080008081ULL, 0x8000000000008009ULL,
    0x000000000000008aULL, 0x0000000000000088ULL, 0x0000000080008009ULL, 0x000000008000000aULL,
    0x000000008000808bULL, 0x800000000000008bULL, 0x8000000000008089ULL, 0x8000000000008003ULL,
    0x8000000000008002ULL, 0x8000000000000080ULL, 0x000000000000800aULL, 0x800000008000000aULL,
    0x8000000080008081ULL, 0x8000000000008080ULL, 0x0000000080000001ULL, 0x8000000080008008ULL,
};

// rho offsets and pi destinations, walked along the pi cycle starting at lane 1
constexpr int kRho[24] = {1, 3, 6, 10, 15, 21, 28, 36, 45, 55, 2, 14, 27, 41, 56, 8, 25, 43, 62, 18, 39, 61, 20, 44};
constexpr int kPi[24] = {10, 7, 11, 17, 18, 3, 5, 16, 8, 21, 24, 4, 15, 23, 19, 13, 12, 2, 20, 14, 22, 9, 6, 1};

} // namespace

void keccak_f1600_inplace(std::array<std::uint64_t, 25>& a)
{
    std::uint64_t c[5];
    for (int round = 0; round < 24; ++round) {
        // theta
        for (int x = 0; x < 5; ++x) c[x] = a[x] ^ a[x + 5] ^ a[x + 10] ^ a[x + 15] ^ a[x + 20];
        for (int x = 0; x < 5; ++x) {
            const std::uint64_t d = c[(x + 4) % 5] ^ std::rotl(c[(x + 1) % 5], 1);
            for (int y = 0; y < 25; y += 5) a[y + x] ^= d;
        }
        // rho + pi
        std::uint64_t t = a[1];
        for (int i = 0; i < 24; ++i) {
            const int j = kPi[i];
            const std::uint64_t next = a[j];
            a[j] = std::rotl(t, kRho[i]);
            t = next;
        }
        // chi
        for (int y = 0; y < 25; y += 5) {
            for (int x = 0; x < 5; ++x) c[x] = a[y + x];
            for (int x = 0; x < 5; ++x) a[y + x] = c[x] ^ (~c[(x + 1) % 5] & c[(x + 2) % 5]);
        }
        // iota
        a[0] ^= kRoundConstants[round];
    }
}

KeccakState keccak_f1600(KeccakState state)
{
    keccak_f1600_inplace(state.lanes);
    return state;
}

KeccakState KeccakState::from_bytes(ByteSpan bytes)
{
    KeccakState s;
    const std::size_t n = bytes.size() < kKeccakStateBytes ? bytes.size() : kKeccakStateBytes;
    std::uint8_t buf[kKeccakStateBytes] = {};
    std::memcpy(buf, bytes.data(), n);
    for (int i = 0; i < 25; ++i) s.lanes[i] = load_le64(buf + 8 * i);
    return s;
}

std::array<std::uint8_t, kKeccakStateBytes> KeccakState::to_bytes() const
{
    std::array<std::uint8_t, kKeccakStateBytes> out{};
    for (int i = 0; i < 25; ++i) store_le64(out.data() + 8 * i, lanes[i]);
    return out;
}

KeccakState keccak_absorb_unchecked(ByteSpan input)
{
    KeccakState st;
    const std::uint8_t* p = input.data();
    std::size_t len = input.size();

    for (; len >= kKeccakRate; len -= kKeccakRate, p += kKeccakRate) {
        for (std::size_t i = 0; i < kKeccakRate / 8; ++i) st.lanes[i] ^= load_le64(p + 8 * i);
        keccak_f1600_inplace(st.lanes);
    }

    std::uint8_t tail[kKeccakRate] = {};
    std::memcpy(tail, p, len);
    tail[len] = 0x01;
    tail[kKeccakRate - 1] |= 0x80;
    for (std::size_t i = 0; i < kKeccakRate / 8; ++i) st.lanes[i] ^= load_le64(tail + 8 * i);
    keccak_f1600_inplace(st.lanes);
    return st;
}

KeccakState keccak_absorb(ByteSpan input)
{
    if (input.size() < kHaven.min_input_len)
        throw Error(ErrorCode::InputTooShort,
            "input is " + std::to_string(input.size()) + " bytes, minimum is " + std::to_string(kHaven.min_input_len));
    return keccak_absorb_unchecked(input);
}

} // namespace cnhaven
