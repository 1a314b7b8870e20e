#include "cnhaven/haven.hpp"

#include "cnhaven/error.hpp"
#include "haven_kernel.hpp"

namespace cnhaven {

namespace detail {

namespace {

struct TableAes {
    using V = Block128;

    static V load(const std::uint8_t* p) { return Block128::from_bytes(p); }
    static void store(std::uint8_t* p, const V& v) { std::memcpy(p, v.bytes.data(), 16); }
    static V enc(const V& b, const V& k) { return aes_round(b, k); }
    static V xor_(const V& a, const V& b) { return a ^ b; }
    static std::uint64_t lo(const V& v) { return v.lo(); }
    static std::uint64_t hi(const V& v) { return v.hi(); }
    static V make(std::uint64_t lo, std::uint64_t hi) { return Block128::from_words(lo, hi); }
    static V from_block(const Block128& b) { return b; }
    static Block128 to_block(const V& v) { return v; }
};

} // namespace

const KernelSet& table_kernels() { return Kernels<TableAes>::set; }

} // namespace detail

namespace {

const detail::KernelSet& kernels()
{
#if defined(CNHAVEN_HAVE_AESNI)
    if (active_aes_backend() == AesBackend::Hardware) return detail::hardware_kernels();
#endif
    return detail::table_kernels();
}

} // namespace

void validate(const HashJob& job)
{
    if (job.blob.size() < kHaven.min_input_len)
        throw Error(ErrorCode::InputTooShort,
            "blob is " + std::to_string(job.blob.size()) + " bytes, minimum is " + std::to_string(kHaven.min_input_len));
    if (job.nonce_offset > job.blob.size() || job.blob.size() - job.nonce_offset < 4)
        throw Error(ErrorCode::BadJob,
            "nonce_offset " + std::to_string(job.nonce_offset) + " + 4 exceeds blob length " + std::to_string(job.blob.size()));
}

Bytes patched_blob(const HashJob& job)
{
    validate(job);
    Bytes out = job.blob;
    store_le32(out.data() + job.nonce_offset, job.nonce);
    return out;
}

ShuffleState ShuffleState::from_state(const KeccakState& state)
{
    const auto& h = state.lanes;
    ShuffleState s;
    s.a = Block128::from_words(h[0] ^ h[4], h[1] ^ h[5]);
    s.b = Block128::from_words(h[2] ^ h[6], h[3] ^ h[7]);
    s.idx = s.a.lo();
    return s;
}

void explode(const KeccakState& state, Scratchpad& pad) { kernels().explode(state, pad); }
void shuffle(const KeccakState& state, Scratchpad& pad) { kernels().shuffle(state, pad); }
KeccakState implode(const KeccakState& state, Scratchpad& pad) { return kernels().implode(state, pad); }

FinalHashFamily select_family(const KeccakState& final_state) { return family_from_code(final_state.byte(0)); }

namespace {

Digest finish(const KeccakState& imploded, KeccakState* final_out, FinalHashFamily* family_out)
{
    const KeccakState fin = keccak_f1600(imploded);
    const FinalHashFamily family = select_family(fin);
    const auto bytes = fin.to_bytes();
    if (final_out) *final_out = fin;
    if (family_out) *family_out = family;
    return hash_final(family, bytes);
}

} // namespace

Digest cn_haven_hash_blob(ByteSpan input, Scratchpad* pad)
{
    const KeccakState absorbed = keccak_absorb(input);
    std::unique_ptr<Scratchpad> own;
    if (!pad) {
        own = std::make_unique<Scratchpad>();
        pad = own.get();
    }
    const auto& k = kernels();
    k.explode(absorbed, *pad);
    k.shuffle(absorbed, *pad);
    const KeccakState imploded = k.implode(absorbed, *pad);
    pad->flush_trace();
    return finish(imploded, nullptr, nullptr);
}

Digest cn_haven_hash(const HashJob& job)
{
    const Bytes input = patched_blob(job);
    return cn_haven_hash_blob(input);
}

HashCheckpoints cn_haven_hash_checkpoints(ByteSpan input, Scratchpad& pad)
{
    HashCheckpoints cp;
    cp.absorbed = keccak_absorb(input);
    const auto& k = kernels();
    k.explode(cp.absorbed, pad);
    cp.explode_head.assign(pad.data(), pad.data() + kCheckpointHeadBytes);
    k.shuffle(cp.absorbed, pad);
    cp.shuffle_head.assign(pad.data(), pad.data() + kCheckpointHeadBytes);
    cp.imploded = k.implode(cp.absorbed, pad);
    pad.flush_trace();
    cp.digest = finish(cp.imploded, &cp.final_state, &cp.family);
    return cp;
}

Digest Hasher::hash(const HashJob& job)
{
    const Bytes input = patched_blob(job);
    return hash(ByteSpan(input));
}

} // namespace cnhaven
