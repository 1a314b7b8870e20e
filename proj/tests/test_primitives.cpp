#include <doctest.h>

#include "cnhaven/aes.hpp"
#include "cnhaven/error.hpp"
#include "cnhaven/final_hash.hpp"
#include "cnhaven/keccak.hpp"
#include "test_support.hpp"

using namespace cnhaven;

namespace {

const nlohmann::json& vectors()
{
    static const nlohmann::json j = testing::load_json("primitive_vectors.json");
    return j;
}

Block128 block_hex(const std::string& hex) { return Block128::from_bytes(from_hex(hex).data()); }

std::string state_hex(const KeccakState& s)
{
    const auto b = s.to_bytes();
    return to_hex(b);
}

} // namespace

TEST_CASE("hex round trip and errors")
{
    const Bytes b{0x00, 0x7f, 0x80, 0xff};
    CHECK(to_hex(b) == "007f80ff");
    CHECK(from_hex("007F80FF") == b);
    CHECK(from_hex("").empty());
    CHECK_THROWS_AS(from_hex("abc"), Error);
    try {
        from_hex("zz");
        FAIL("expected BadHex");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BadHex);
    }
}

TEST_CASE("keccak-f1600 on the zero state")
{
    const KeccakState zero{};
    const KeccakState once = keccak_f1600(zero);
    CHECK(state_hex(once) == vectors()["keccakf_zero"].get<std::string>());
    CHECK(state_hex(keccak_f1600(once)) == vectors()["keccakf_zero_twice"].get<std::string>());
    // Published first lane of the permuted zero state.
    CHECK(once.lanes[0] == 0xF1258F7940E1DDE7ULL);
}

TEST_CASE("keccak absorb with CryptoNight padding keeps the full state")
{
    CHECK(state_hex(keccak_absorb(Bytes(64, 0))) == vectors()["absorb_zero64"].get<std::string>());
    CHECK(state_hex(keccak_absorb(Bytes(136, 0xa5))) == vectors()["absorb_a5x136"].get<std::string>());

    try {
        keccak_absorb(Bytes(42, 0));
        FAIL("expected InputTooShort");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InputTooShort);
    }
    CHECK_NOTHROW(keccak_absorb_unchecked(Bytes(1, 0)));
    CHECK(keccak_absorb(Bytes(43, 1)) == keccak_absorb_unchecked(Bytes(43, 1)));
}

TEST_CASE("keccak state byte view")
{
    std::mt19937_64 rng(5);
    const Bytes raw = testing::random_bytes(rng, kKeccakStateBytes);
    const KeccakState s = KeccakState::from_bytes(raw);
    const auto back = s.to_bytes();
    CHECK(Bytes(back.begin(), back.end()) == raw);
    for (std::size_t i = 0; i < kKeccakStateBytes; ++i) CHECK(s.byte(i) == raw[i]);
    CHECK(s.block(4) == Block128::from_bytes(raw.data() + 64));
}

TEST_CASE("AES-256 key schedule")
{
    for (const auto& v : vectors()["key_schedules"]) {
        const auto keys = aes_expand_keys(from_hex(v["seed"].get<std::string>()));
        std::string hex;
        for (const auto& k : keys) hex += to_hex(k.bytes);
        CHECK(hex == v["keys"].get<std::string>());
    }
    CHECK(aes_sbox(0x00) == 0x63);
    CHECK(aes_sbox(0x53) == 0xed);

    try {
        aes_expand_keys(Bytes(31, 0));
        FAIL("expected BadSeedLength");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BadSeedLength);
    }
}

TEST_CASE("single AES round vectors")
{
    for (const auto& v : vectors()["aes_rounds"]) {
        const Block128 out = aes_round(block_hex(v["block"].get<std::string>()), block_hex(v["key"].get<std::string>()));
        CHECK(to_hex(out.bytes) == v["out"].get<std::string>());
    }
}

TEST_CASE("AES round is affine in the key")
{
    std::mt19937_64 rng(11);
    const Block128 zero{};
    for (int i = 0; i < 1000; ++i) {
        const Block128 x = Block128::from_words(rng(), rng());
        const Block128 k1 = Block128::from_words(rng(), rng());
        const Block128 k2 = Block128::from_words(rng(), rng());
        CHECK((aes_round(x, k1) ^ aes_round(x, k2)) == (k1 ^ k2));
        CHECK(aes_round(x, k1) == (aes_round(x, zero) ^ k1));
    }
}

TEST_CASE("finalization hashes: published vectors")
{
    const Bytes abc{'a', 'b', 'c'};
    for (int code = 0; code < 4; ++code) {
        const FinalHashFamily f = family_from_code(static_cast<std::uint8_t>(code));
        const std::string name(to_string(f));
        CAPTURE(name);
        CHECK(to_hex(hash_final(f, {})) == vectors()["final_empty"][name].get<std::string>());
        CHECK(to_hex(hash_final(f, abc)) == vectors()["final_abc"][name].get<std::string>());
    }
}

TEST_CASE("finalization hashes: 200-byte states from the reference miner")
{
    for (const auto& v : vectors()["final_200"]) {
        const Bytes data = from_hex(v["data"].get<std::string>());
        REQUIRE(data.size() == 200);
        for (int code = 0; code < 4; ++code)
            CHECK(to_hex(hash_final(family_from_code(static_cast<std::uint8_t>(code)), data)) ==
                v[std::to_string(code)].get<std::string>());
    }
}

TEST_CASE("finalization hashes: multi-block inputs are consistent")
{
    // Lengths straddling every block and padding boundary must not crash and
    // must differ from their neighbours.
    std::mt19937_64 rng(3);
    const Bytes buf = testing::random_bytes(rng, 300);
    for (int code = 0; code < 4; ++code) {
        const FinalHashFamily f = family_from_code(static_cast<std::uint8_t>(code));
        Digest prev{};
        for (std::size_t n : {0, 1, 31, 32, 55, 56, 63, 64, 65, 127, 128, 129, 200, 256, 300}) {
            const Digest d = hash_final(f, ByteSpan(buf.data(), n));
            CHECK(d != prev);
            CHECK(d == hash_final(f, ByteSpan(buf.data(), n)));
            prev = d;
        }
    }
}

TEST_CASE("family names and codes")
{
    for (int code = 0; code < 8; ++code) {
        const FinalHashFamily f = family_from_code(static_cast<std::uint8_t>(code));
        CHECK(family_code(f) == (code & 3));
        CHECK(parse_family(to_string(f)) == f);
    }
    CHECK_FALSE(parse_family("sha256").has_value());
}
