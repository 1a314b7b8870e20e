#pragma once

#include <cstdint>

#include "cnhaven/aes.hpp"
#include "cnhaven/bytes.hpp"
#include "cnhaven/constants.hpp"
#include "cnhaven/final_hash.hpp"
#include "cnhaven/keccak.hpp"
#include "cnhaven/scratchpad.hpp"

namespace cnhaven {

struct HashJob {
    Bytes blob;
    std::size_t nonce_offset = kHaven.default_nonce_offset;
    std::uint32_t nonce = 0;
};

/// Throws InputTooShort / BadJob when the job invariants do not hold.
void validate(const HashJob& job);

/// Copy of job.blob with the nonce written little-endian at nonce_offset.
Bytes patched_blob(const HashJob& job);

/// Shuffle loop registers: a = (al, ah), b = bx, plus the address register.
struct ShuffleState {
    Block128 a;
    Block128 b;
    std::uint64_t idx = 0;

    static ShuffleState from_state(const KeccakState& state);
};

/// Fills the pad from state bytes 0..32 (keys) and 64..192 (working blocks).
void explode(const KeccakState& state, Scratchpad& pad);

/// Runs the memory-hard loop over the pad.
void shuffle(const KeccakState& state, Scratchpad& pad);

/// Folds the pad back into state bytes 64..192; bytes 0..64 and 192..200 are untouched.
KeccakState implode(const KeccakState& state, Scratchpad& pad);

FinalHashFamily select_family(const KeccakState& final_state);

struct HashCheckpoints {
    KeccakState absorbed;
    Bytes explode_head;   // first 1 KiB of the pad after explode
    Bytes shuffle_head;   // first 1 KiB after shuffle
    KeccakState imploded;
    KeccakState final_state;
    FinalHashFamily family = FinalHashFamily::Blake256;
    Digest digest{};
};

inline constexpr std::size_t kCheckpointHeadBytes = 1024;

/// Hashes an already-patched input. Uses a private scratchpad when pad is null.
Digest cn_haven_hash_blob(ByteSpan input, Scratchpad* pad = nullptr);

Digest cn_haven_hash(const HashJob& job);

HashCheckpoints cn_haven_hash_checkpoints(ByteSpan input, Scratchpad& pad);

/// Reusable hasher owning one scratchpad; one per thread.
class Hasher {
public:
    explicit Hasher(std::uint16_t hash_id = 0) : pad_(hash_id) {}

    Digest hash(ByteSpan input) { return cn_haven_hash_blob(input, &pad_); }
    Digest hash(const HashJob& job);
    Scratchpad& pad() { return pad_; }

private:
    Scratchpad pad_;
};

/// Scratchpad accesses made by one hash, by stage.
inline constexpr std::uint64_t kExplodeWrites = kScratchpadBytes / 16;
inline constexpr std::uint64_t kShuffleAccesses = std::uint64_t{kHaven.iterations} * kShuffleAccessesPerIteration;
inline constexpr std::uint64_t kImplodeReads = std::uint64_t{kHaven.implode_passes} * kScratchpadBytes / 16;
inline constexpr std::uint64_t kAccessesPerHash = kExplodeWrites + kShuffleAccesses + kImplodeReads;

} // namespace cnhaven
