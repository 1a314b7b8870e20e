#pragma once

#include <atomic>
#include <cstdint>
#include <string>

#include "cnhaven/bytes.hpp"
#include "cnhaven/constants.hpp"
#include "cnhaven/error.hpp"
#include "cnhaven/final_hash.hpp"

namespace cnhaven {

struct MiningJob {
    Bytes blob;
    std::size_t nonce_offset = kHaven.default_nonce_offset;
    std::uint64_t difficulty = 1;
    std::uint32_t nonce_start = 0;
    std::uint64_t nonce_end = std::uint64_t{1} << 32;  // exclusive
};

/// Throws BadJob (empty range, zero difficulty, nonce slot outside the blob)
/// or InputTooShort.
void validate(const MiningJob& job);

/// Reads {blob_hex, nonce_offset?, difficulty, nonce_start, nonce_end}. Other
/// keys are ignored. Throws BadJob / BadHex / InputTooShort.
MiningJob job_from_json(const std::string& text);

/// Last 8 digest bytes as a little-endian integer < floor(2^64 / difficulty).
/// Difficulty 1 accepts every digest.
bool meets_pool_target(const Digest& digest, std::uint64_t difficulty);

/// Whole digest as a 256-bit little-endian integer H with H * difficulty < 2^256.
bool meets_strict_target(const Digest& digest, std::uint64_t difficulty);

struct MineOptions {
    unsigned threads = 1;
    bool strict_target = false;
    std::uint32_t chunk = 16;
    /// Polled between hashes; when it turns true the search stops with partial stats.
    const std::atomic<bool>* cancel = nullptr;
};

struct ShareResult {
    bool found = false;
    std::uint32_t nonce = 0;
    std::string digest_hex;
    bool meets_target = false;
    std::uint64_t hashes_tried = 0;
    double elapsed_s = 0.0;
    double hash_rate = 0.0;
    bool interrupted = false;
};

/// Lowest-nonce share in [nonce_start, nonce_end), independent of thread count.
ShareResult mine(const MiningJob& job, const MineOptions& options = {});

std::string share_to_json(const ShareResult& result, int indent = -1);

} // namespace cnhaven
