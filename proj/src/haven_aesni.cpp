#include "haven_kernel.hpp"

#include <immintrin.h>

namespace cnhaven::detail {

namespace {

struct HardwareAes {
    using V = __m128i;

    static V load(const std::uint8_t* p) { return _mm_load_si128(reinterpret_cast<const __m128i*>(p)); }
    static void store(std::uint8_t* p, V v) { _mm_store_si128(reinterpret_cast<__m128i*>(p), v); }
    static V enc(V b, V k) { return _mm_aesenc_si128(b, k); }
    static V xor_(V a, V b) { return _mm_xor_si128(a, b); }
    static std::uint64_t lo(V v) { return static_cast<std::uint64_t>(_mm_cvtsi128_si64(v)); }
    static std::uint64_t hi(V v) { return static_cast<std::uint64_t>(_mm_cvtsi128_si64(_mm_unpackhi_epi64(v, v))); }
    static V make(std::uint64_t lo, std::uint64_t hi)
    {
        return _mm_set_epi64x(static_cast<long long>(hi), static_cast<long long>(lo));
    }
    static V from_block(const Block128& b) { return _mm_load_si128(reinterpret_cast<const __m128i*>(b.bytes.data())); }
    static Block128 to_block(V v)
    {
        Block128 b;
        _mm_store_si128(reinterpret_cast<__m128i*>(b.bytes.data()), v);
        return b;
    }
};

} // namespace

const KernelSet& hardware_kernels() { return Kernels<HardwareAes>::set; }

} // namespace cnhaven::detail
