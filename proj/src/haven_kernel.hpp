// Stage kernels shared by the table-AES and hardware-AES translation units.
// Each unit instantiates them with its own AES policy.
#pragma once

#include "cnhaven/haven.hpp"

namespace cnhaven::detail {

struct KernelSet {
    void (*explode)(const KeccakState&, Scratchpad&);
    void (*shuffle)(const KeccakState&, Scratchpad&);
    KeccakState (*implode)(const KeccakState&, Scratchpad&);
};

const KernelSet& table_kernels();
#if defined(CNHAVEN_HAVE_AESNI)
const KernelSet& hardware_kernels();
#endif

template <class A>
struct RawMem {
    using V = typename A::V;
    std::uint8_t* base;

    V load(std::uint32_t off) const { return A::load(base + off); }
    void store(std::uint32_t off, V v) const { A::store(base + off, v); }
    void stage(Stage) const {}
};

template <class A>
struct TracedMem {
    using V = typename A::V;
    Scratchpad* pad;

    V load(std::uint32_t off) const { return A::from_block(pad->read16(off)); }
    void store(std::uint32_t off, V v) const { pad->write16(off, A::to_block(v)); }
    void stage(Stage s) const { pad->set_stage(s); }
};

template <class A>
inline void load_keys(const KeccakState& state, std::size_t first_byte, typename A::V* keys)
{
    const auto bytes = state.to_bytes();
    const AesRoundKeys k = aes_expand_keys(ByteSpan(bytes.data() + first_byte, 32));
    for (int i = 0; i < 10; ++i) keys[i] = A::from_block(k[i]);
}

template <class A>
inline void aes_rounds10(typename A::V* x, const typename A::V* k)
{
    for (int r = 0; r < 10; ++r)
        for (int i = 0; i < 8; ++i) x[i] = A::enc(x[i], k[r]);
}

template <class A>
inline void mix_blocks(typename A::V* x)
{
    const typename A::V first = x[0];
    for (int i = 0; i < 7; ++i) x[i] = A::xor_(x[i], x[i + 1]);
    x[7] = A::xor_(x[7], first);
}

template <class A, class M>
void explode_impl(const KeccakState& state, const M& mem)
{
    using V = typename A::V;
    V k[10], x[8];
    load_keys<A>(state, kHaven.explode_key_bytes.begin, k);
    for (int i = 0; i < 8; ++i) x[i] = A::from_block(state.block(kHaven.explode_init_bytes.begin / 16 + i));

    mem.stage(Stage::Explode);
    for (unsigned r = 0; r < kHaven.explode_premix_rounds; ++r) {
        aes_rounds10<A>(x, k);
        mix_blocks<A>(x);
    }
    for (std::uint32_t off = 0; off < kScratchpadBytes; off += kGroupBytes) {
        aes_rounds10<A>(x, k);
        for (int i = 0; i < 8; ++i) mem.store(off + 16 * i, x[i]);
    }
}

template <class A, class M>
void shuffle_impl(const KeccakState& state, const M& mem)
{
    using V = typename A::V;
    constexpr std::uint32_t mask = kHaven.address_mask;
    const auto& h = state.lanes;

    std::uint64_t al = h[0] ^ h[4];
    std::uint64_t ah = h[1] ^ h[5];
    V bx = A::make(h[2] ^ h[6], h[3] ^ h[7]);
    std::uint64_t idx = al;

    mem.stage(Stage::Shuffle);
    for (std::uint32_t i = 0; i < kHaven.iterations; ++i) {
        // AES step
        std::uint32_t off = static_cast<std::uint32_t>(idx) & mask;
        const V cx = A::enc(mem.load(off), A::make(al, ah));
        mem.store(off, A::xor_(bx, cx));
        idx = A::lo(cx);

        // multiply-add step
        off = static_cast<std::uint32_t>(idx) & mask;
        const V c = mem.load(off);
        const std::uint64_t cl = A::lo(c), ch = A::hi(c);
        const unsigned __int128 prod = static_cast<unsigned __int128>(idx) * cl;
        al += static_cast<std::uint64_t>(prod >> 64);
        ah += static_cast<std::uint64_t>(prod);
        mem.store(off, A::make(al, ah));
        al ^= cl;
        ah ^= ch;
        idx = al;

        // division step
        off = static_cast<std::uint32_t>(idx) & mask;
        const V dv = mem.load(off);
        const std::int64_t n = static_cast<std::int64_t>(A::lo(dv));
        std::int32_t d = static_cast<std::int32_t>(static_cast<std::uint32_t>(A::hi(dv)));
        const std::int64_t divisor = static_cast<std::int64_t>(d | 5);
        const std::int64_t q = (divisor == -1) ? static_cast<std::int64_t>(0 - static_cast<std::uint64_t>(n)) : n / divisor;
        mem.store(off, A::make(static_cast<std::uint64_t>(n ^ q), A::hi(dv)));
        d = ~d;
        idx = static_cast<std::uint64_t>(static_cast<std::int64_t>(d) ^ q);

        bx = cx;
    }
}

template <class A, class M>
KeccakState implode_impl(const KeccakState& state, const M& mem)
{
    using V = typename A::V;
    V k[10], x[8];
    load_keys<A>(state, kHaven.implode_key_bytes.begin, k);
    const std::size_t first = kHaven.implode_xor_bytes.begin / 16;
    for (int i = 0; i < 8; ++i) x[i] = A::from_block(state.block(first + i));

    mem.stage(Stage::Implode);
    for (unsigned pass = 0; pass < kHaven.implode_passes; ++pass) {
        for (std::uint32_t off = 0; off < kScratchpadBytes; off += kGroupBytes) {
            for (int i = 0; i < 8; ++i) x[i] = A::xor_(x[i], mem.load(off + 16 * i));
            aes_rounds10<A>(x, k);
            mix_blocks<A>(x);
        }
    }
    for (unsigned r = 0; r < kHaven.implode_extra_rounds; ++r) {
        aes_rounds10<A>(x, k);
        mix_blocks<A>(x);
    }

    KeccakState out = state;
    for (int i = 0; i < 8; ++i) out.set_block(first + i, A::to_block(x[i]));
    return out;
}

template <class A>
struct Kernels {
    static void explode(const KeccakState& s, Scratchpad& pad)
    {
        if (pad.tracing())
            explode_impl<A>(s, TracedMem<A>{&pad});
        else
            explode_impl<A>(s, RawMem<A>{pad.data()});
    }

    static void shuffle(const KeccakState& s, Scratchpad& pad)
    {
        if (pad.tracing())
            shuffle_impl<A>(s, TracedMem<A>{&pad});
        else
            shuffle_impl<A>(s, RawMem<A>{pad.data()});
    }

    static KeccakState implode(const KeccakState& s, Scratchpad& pad)
    {
        if (pad.tracing()) return implode_impl<A>(s, TracedMem<A>{&pad});
        return implode_impl<A>(s, RawMem<A>{pad.data()});
    }

    static constexpr KernelSet set{&explode, &shuffle, &implode};
};

} // namespace cnhaven::detail
