// Golden-vector generator. Compiled by make_corpus.sh against a patched copy of
// the reference miner sources; not part of the regular build.
//
// Uses the reference's AES-NI path: its table-based fallback does not reproduce
// the reference package's own published Haven vector.

#include <array>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>
#include <string>
#include <vector>

struct cryptonight_ctx;
static void golden_hook_absorb(cryptonight_ctx* ctx);
static void golden_hook_explode(cryptonight_ctx* ctx);
static void golden_hook_shuffle(cryptonight_ctx* ctx);
static void golden_hook_implode(cryptonight_ctx* ctx);

#include "crypto/CryptoNight_x86.h"

namespace {

std::vector<uint8_t> g_absorb, g_explode_head, g_shuffle_head, g_implode;

std::string hex(const uint8_t* p, size_t n)
{
    static const char* digits = "0123456789abcdef";
    std::string s;
    s.reserve(2 * n);
    for (size_t i = 0; i < n; ++i) {
        s.push_back(digits[p[i] >> 4]);
        s.push_back(digits[p[i] & 15]);
    }
    return s;
}

std::string hex(const std::vector<uint8_t>& v) { return hex(v.data(), v.size()); }

cryptonight_ctx* make_ctx()
{
    auto* ctx = static_cast<cryptonight_ctx*>(_mm_malloc(sizeof(cryptonight_ctx), 16));
    ctx->memory = static_cast<uint8_t*>(_mm_malloc(xmrig::CRYPTONIGHT_HEAVY_MEMORY, 4096));
    return ctx;
}

void haven(const std::vector<uint8_t>& blob, uint8_t* out, cryptonight_ctx* ctx)
{
    cryptonight_single_hash<xmrig::CRYPTONIGHT_HEAVY, false, xmrig::VARIANT_XHV>(blob.data(), blob.size(), out, &ctx);
}

void patch_nonce(std::vector<uint8_t>& blob, size_t off, uint32_t nonce)
{
    for (int i = 0; i < 4; ++i) blob[off + i] = static_cast<uint8_t>(nonce >> (8 * i));
}

bool meets(const uint8_t* digest, uint64_t difficulty)
{
    uint64_t v = 0;
    std::memcpy(&v, digest + 24, 8);
    unsigned __int128 target = (static_cast<unsigned __int128>(1) << 64) / difficulty;
    return static_cast<unsigned __int128>(v) < target;
}

} // namespace

static void golden_hook_absorb(cryptonight_ctx* ctx) { g_absorb.assign(ctx->state, ctx->state + 200); }
static void golden_hook_explode(cryptonight_ctx* ctx) { g_explode_head.assign(ctx->memory, ctx->memory + 1024); }
static void golden_hook_shuffle(cryptonight_ctx* ctx) { g_shuffle_head.assign(ctx->memory, ctx->memory + 1024); }
static void golden_hook_implode(cryptonight_ctx* ctx) { g_implode.assign(ctx->state, ctx->state + 200); }

int main(int argc, char** argv)
{
    const std::string outdir = argc > 1 ? argv[1] : ".";
    cryptonight_ctx* ctx = make_ctx();
    std::mt19937_64 rng(0x48415645ULL);

    // Sanity check against the reference package's own Haven test vector.
    {
        const char* in = "0305a0dbd6bf05cf16e503f3a66f78007cbf34144332ecbfc22ed95c8700383b309ace1923a0964b00000008ba939a62724c0d7581fce5761e9d8a0e6a1c3f924fdd8493d1115649c05eb601";
        std::vector<uint8_t> blob;
        for (size_t i = 0; in[i]; i += 2) blob.push_back(static_cast<uint8_t>(std::stoi(std::string(in + i, 2), nullptr, 16)));
        uint8_t digest[32];
        haven(blob, digest, ctx);
        if (hex(digest, 32) != "5ac3f785c490c58550ec95d2726563577e7c1c212d0cde591273201e44fdd5b6") {
            std::fprintf(stderr, "reference self-check failed: %s\n", hex(digest, 32).c_str());
            return 1;
        }
    }

    // Hash corpus: 100 random jobs, lengths spread over [43, 128].
    {
        std::ofstream os(outdir + "/golden_corpus.jsonl");
        for (int i = 0; i < 100; ++i) {
            const size_t len = 43 + static_cast<size_t>(i) * 85 / 99;
            std::vector<uint8_t> blob(len);
            for (auto& b : blob) b = static_cast<uint8_t>(rng());
            const uint32_t nonce = static_cast<uint32_t>(rng());
            std::vector<uint8_t> patched = blob;
            patch_nonce(patched, 39, nonce);
            uint8_t digest[32];
            haven(patched, digest, ctx);
            os << "{\"blob_hex\":\"" << hex(blob) << "\",\"nonce\":" << nonce
               << ",\"digest_hex\":\"" << hex(digest, 32) << "\",\"checkpoints\":{"
               << "\"absorb_hex\":\"" << hex(g_absorb) << "\","
               << "\"explode_head_hex\":\"" << hex(g_explode_head) << "\","
               << "\"shuffle_head_hex\":\"" << hex(g_shuffle_head) << "\","
               << "\"implode_state_hex\":\"" << hex(g_implode) << "\"}}\n";
        }
    }

    // Primitive vectors.
    {
        std::ofstream os(outdir + "/primitive_vectors.json");
        os << "{\n";

        uint64_t st[25] = {};
        xmrig::keccakf(st, 24);
        os << "  \"keccakf_zero\": \"" << hex(reinterpret_cast<uint8_t*>(st), 200) << "\",\n";
        xmrig::keccakf(st, 24);
        os << "  \"keccakf_zero_twice\": \"" << hex(reinterpret_cast<uint8_t*>(st), 200) << "\",\n";

        uint8_t zeros[64] = {};
        uint8_t state[200];
        xmrig::keccak(zeros, 64, state);
        os << "  \"absorb_zero64\": \"" << hex(state, 200) << "\",\n";
        std::vector<uint8_t> msg136(136, 0xA5);
        xmrig::keccak(msg136.data(), 136, state);
        os << "  \"absorb_a5x136\": \"" << hex(state, 200) << "\",\n";

        os << "  \"key_schedules\": [\n";
        for (int i = 0; i < 4; ++i) {
            alignas(16) uint8_t seed[32] = {};
            if (i > 0) for (auto& b : seed) b = static_cast<uint8_t>(rng());
            __m128i k[10];
            aes_genkey<false>(reinterpret_cast<const __m128i*>(seed), &k[0], &k[1], &k[2], &k[3], &k[4], &k[5], &k[6], &k[7], &k[8], &k[9]);
            os << "    {\"seed\": \"" << hex(seed, 32) << "\", \"keys\": \"" << hex(reinterpret_cast<uint8_t*>(k), 160) << "\"}" << (i < 3 ? "," : "") << "\n";
        }
        os << "  ],\n";

        os << "  \"aes_rounds\": [\n";
        for (int i = 0; i < 4; ++i) {
            alignas(16) uint8_t block[16], key[16];
            for (auto& b : block) b = static_cast<uint8_t>(rng());
            for (auto& b : key) b = static_cast<uint8_t>(rng());
            __m128i out = _mm_aesenc_si128(_mm_load_si128(reinterpret_cast<__m128i*>(block)), _mm_load_si128(reinterpret_cast<__m128i*>(key)));
            os << "    {\"block\": \"" << hex(block, 16) << "\", \"key\": \"" << hex(key, 16) << "\", \"out\": \""
               << hex(reinterpret_cast<uint8_t*>(&out), 16) << "\"}" << (i < 3 ? "," : "") << "\n";
        }
        os << "  ],\n";

        // Finalization hashes: empty input (general-length entry points) plus
        // the 200-byte path the miner actually uses.
        uint8_t out[32];
        os << "  \"final_empty\": {";
        blake256_hash(out, zeros, 0);
        os << "\"blake256\": \"" << hex(out, 32) << "\", ";
        groestl(zeros, 0, out);
        os << "\"groestl256\": \"" << hex(out, 32) << "\", ";
        jh_hash(256, zeros, 0, out);
        os << "\"jh256\": \"" << hex(out, 32) << "\", ";
        skein_hash(256, zeros, 0, out);
        os << "\"skein256\": \"" << hex(out, 32) << "\"},\n";

        std::vector<uint8_t> abc = {'a', 'b', 'c'};
        os << "  \"final_abc\": {";
        blake256_hash(out, abc.data(), 3);
        os << "\"blake256\": \"" << hex(out, 32) << "\", ";
        groestl(abc.data(), 24, out);
        os << "\"groestl256\": \"" << hex(out, 32) << "\", ";
        jh_hash(256, abc.data(), 24, out);
        os << "\"jh256\": \"" << hex(out, 32) << "\", ";
        skein_hash(256, abc.data(), 24, out);
        os << "\"skein256\": \"" << hex(out, 32) << "\"},\n";

        os << "  \"final_200\": [\n";
        for (int i = 0; i < 4; ++i) {
            uint8_t data[200];
            for (auto& b : data) b = static_cast<uint8_t>(rng());
            os << "    {\"data\": \"" << hex(data, 200) << "\", ";
            for (int f = 0; f < 4; ++f) {
                extra_hashes[f](data, 200, out);
                os << "\"" << f << "\": \"" << hex(out, 32) << "\"" << (f < 3 ? ", " : "");
            }
            os << "}" << (i < 3 ? "," : "") << "\n";
        }
        os << "  ]\n}\n";
    }

    // Mining vectors: brute-forced share positions over a small nonce range.
    {
        std::ofstream os(outdir + "/mining_vectors.json");
        std::vector<uint8_t> blob(76);
        for (auto& b : blob) b = static_cast<uint8_t>(rng());
        const uint32_t start = 1000, end = 1256;
        const uint64_t difficulty = 40;
        std::vector<uint32_t> shares;
        for (uint32_t n = start; n < end; ++n) {
            std::vector<uint8_t> patched = blob;
            patch_nonce(patched, 39, n);
            uint8_t digest[32];
            haven(patched, digest, ctx);
            if (meets(digest, difficulty)) shares.push_back(n);
        }
        os << "{\"blob_hex\": \"" << hex(blob) << "\", \"nonce_offset\": 39, \"difficulty\": " << difficulty
           << ", \"nonce_start\": " << start << ", \"nonce_end\": " << end << ", \"shares\": [";
        for (size_t i = 0; i < shares.size(); ++i) os << (i ? ", " : "") << shares[i];
        os << "]}\n";
    }

    std::printf("wrote %s/{golden_corpus.jsonl,primitive_vectors.json,mining_vectors.json}\n", outdir.c_str());
    return 0;
}
