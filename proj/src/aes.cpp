#include "cnhaven/aes.hpp"

#include "cnhaven/error.hpp"

#include <atomic>

namespace cnhaven {

namespace {

constexpr std::uint8_t xtime(std::uint8_t x) { return static_cast<std::uint8_t>((x << 1) ^ ((x & 0x80) ? 0x1b : 0)); }

constexpr std::uint8_t gmul(std::uint8_t a, std::uint8_t b)
{
    std::uint8_t r = 0;
    while (b) {
        if (b & 1) r ^= a;
        a = xtime(a);
        b >>= 1;
    }
    return r;
}

constexpr std::uint8_t ginv(std::uint8_t x)
{
    if (x == 0) return 0;
    // x^254 = x^-1 in GF(2^8)
    std::uint8_t r = 1, base = x;
    for (int e = 254; e; e >>= 1) {
        if (e & 1) r = gmul(r, base);
        base = gmul(base, base);
    }
    return r;
}

constexpr std::uint8_t rotl8(std::uint8_t x, int n) { return static_cast<std::uint8_t>((x << n) | (x >> (8 - n))); }

constexpr std::array<std::uint8_t, 256> make_sbox()
{
    std::array<std::uint8_t, 256> s{};
    for (int i = 0; i < 256; ++i) {
        const std::uint8_t b = ginv(static_cast<std::uint8_t>(i));
        s[i] = static_cast<std::uint8_t>(b ^ rotl8(b, 1) ^ rotl8(b, 2) ^ rotl8(b, 3) ^ rotl8(b, 4) ^ 0x63);
    }
    return s;
}

constexpr auto kSbox = make_sbox();
static_assert(kSbox[0x00] == 0x63 && kSbox[0x01] == 0x7c && kSbox[0x53] == 0xed);

// Column tables: T[r][x] is the MixColumns contribution of S(x) entering row r,
// packed little-endian so byte k of the word lands in row k of the column.
constexpr std::array<std::array<std::uint32_t, 256>, 4> make_ttables()
{
    std::array<std::array<std::uint32_t, 256>, 4> t{};
    for (int i = 0; i < 256; ++i) {
        const std::uint8_t s = kSbox[i];
        const std::uint32_t w = std::uint32_t(gmul(s, 2)) | (std::uint32_t(s) << 8) | (std::uint32_t(s) << 16) | (std::uint32_t(gmul(s, 3)) << 24);
        for (int r = 0; r < 4; ++r) t[r][i] = (w << (8 * r)) | (r ? (w >> (32 - 8 * r)) : 0);
    }
    return t;
}

constexpr auto kT = make_ttables();

std::uint32_t sub_word(std::uint32_t w)
{
    return std::uint32_t(kSbox[w & 0xff]) | (std::uint32_t(kSbox[(w >> 8) & 0xff]) << 8) |
        (std::uint32_t(kSbox[(w >> 16) & 0xff]) << 16) | (std::uint32_t(kSbox[w >> 24]) << 24);
}

std::atomic<AesBackend> g_backend{AesBackend::Auto};

} // namespace

std::uint8_t aes_sbox(std::uint8_t x) { return kSbox[x]; }

Block128 aes_round(const Block128& block, const Block128& key)
{
    const std::uint8_t* s = block.bytes.data();
    Block128 out;
    for (int c = 0; c < 4; ++c) {
        const std::uint32_t col = kT[0][s[4 * c]] ^ kT[1][s[4 * ((c + 1) & 3) + 1]] ^
            kT[2][s[4 * ((c + 2) & 3) + 2]] ^ kT[3][s[4 * ((c + 3) & 3) + 3]] ^ load_le32(key.bytes.data() + 4 * c);
        store_le32(out.bytes.data() + 4 * c, col);
    }
    return out;
}

AesRoundKeys aes_expand_keys(ByteSpan seed)
{
    if (seed.size() != 32) throw Error(ErrorCode::BadSeedLength, "key seed must be 32 bytes, got " + std::to_string(seed.size()));

    std::uint32_t w[40];
    for (int i = 0; i < 8; ++i) w[i] = load_le32(seed.data() + 4 * i);
    std::uint32_t rcon = 1;
    for (int i = 8; i < 40; ++i) {
        std::uint32_t t = w[i - 1];
        if (i % 8 == 0) {
            t = sub_word((t >> 8) | (t << 24)) ^ rcon;
            rcon = xtime(static_cast<std::uint8_t>(rcon));
        } else if (i % 8 == 4) {
            t = sub_word(t);
        }
        w[i] = w[i - 8] ^ t;
    }

    AesRoundKeys keys;
    for (int k = 0; k < 10; ++k)
        for (int j = 0; j < 4; ++j) store_le32(keys[k].bytes.data() + 4 * j, w[4 * k + j]);
    return keys;
}

bool hardware_aes_available()
{
#if defined(CNHAVEN_HAVE_AESNI) && (defined(__GNUC__) || defined(__clang__))
    static const bool ok = __builtin_cpu_supports("aes");
    return ok;
#else
    return false;
#endif
}

AesBackend active_aes_backend()
{
    const AesBackend b = g_backend.load(std::memory_order_relaxed);
    if (b == AesBackend::Table) return AesBackend::Table;
    return hardware_aes_available() ? AesBackend::Hardware : AesBackend::Table;
}

void set_aes_backend(AesBackend backend) { g_backend.store(backend, std::memory_order_relaxed); }

} // namespace cnhaven
