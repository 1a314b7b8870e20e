#include "cnhaven/miner.hpp"

#include <algorithm>
#include <chrono>
#include <mutex>
#include <thread>
#include <vector>

#include <json.hpp>

#include "cnhaven/haven.hpp"

namespace cnhaven {

void validate(const MiningJob& job)
{
    if (job.difficulty == 0) throw Error(ErrorCode::BadJob, "difficulty must be >= 1");
    if (job.nonce_end > (std::uint64_t{1} << 32)) throw Error(ErrorCode::BadJob, "nonce_end exceeds 2^32");
    if (job.nonce_end <= job.nonce_start) throw Error(ErrorCode::BadJob, "nonce range is empty");
    validate(HashJob{job.blob, job.nonce_offset, 0});
}

MiningJob job_from_json(const std::string& text)
{
    using nlohmann::json;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::BadJob, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw Error(ErrorCode::BadJob, "job must be a JSON object");

    auto need_uint = [&](const char* key) -> std::uint64_t {
        if (!j.contains(key)) throw Error(ErrorCode::BadJob, std::string("missing '") + key + "'");
        if (!j[key].is_number_unsigned()) throw Error(ErrorCode::BadJob, std::string("'") + key + "' must be an unsigned integer");
        return j[key].get<std::uint64_t>();
    };

    MiningJob job;
    if (!j.contains("blob_hex") || !j["blob_hex"].is_string()) throw Error(ErrorCode::BadJob, "missing 'blob_hex'");
    job.blob = from_hex(j["blob_hex"].get<std::string>());
    if (j.contains("nonce_offset")) job.nonce_offset = need_uint("nonce_offset");
    job.difficulty = need_uint("difficulty");
    const std::uint64_t start = need_uint("nonce_start");
    if (start > UINT32_MAX) throw Error(ErrorCode::BadJob, "nonce_start exceeds 32 bits");
    job.nonce_start = static_cast<std::uint32_t>(start);
    job.nonce_end = need_uint("nonce_end");
    validate(job);
    return job;
}

bool meets_pool_target(const Digest& digest, std::uint64_t difficulty)
{
    if (difficulty == 0) return false;
    const unsigned __int128 target = ((static_cast<unsigned __int128>(1) << 64)) / difficulty;
    return static_cast<unsigned __int128>(load_le64(digest.data() + 24)) < target;
}

bool meets_strict_target(const Digest& digest, std::uint64_t difficulty)
{
    if (difficulty == 0) return false;
    unsigned __int128 carry = 0;
    for (int limb = 0; limb < 4; ++limb) {
        const unsigned __int128 p =
            static_cast<unsigned __int128>(load_le64(digest.data() + 8 * limb)) * difficulty + carry;
        carry = p >> 64;
    }
    return carry == 0;
}

ShareResult mine(const MiningJob& job, const MineOptions& options)
{
    validate(job);
    const std::uint64_t begin = job.nonce_start;
    const std::uint64_t end = job.nonce_end;
    const std::uint64_t chunk = std::max<std::uint32_t>(1, options.chunk);
    const unsigned threads = std::max(1u, options.threads);

    std::atomic<std::uint64_t> next_chunk{0};
    std::atomic<std::uint64_t> best{UINT64_MAX};
    std::atomic<std::uint64_t> tried{0};
    std::atomic<bool> interrupted{false};
    std::mutex mu;
    Digest best_digest{};

    auto accept = [&](const Digest& d) {
        return options.strict_target ? meets_strict_target(d, job.difficulty) : meets_pool_target(d, job.difficulty);
    };

    auto worker = [&](unsigned id) {
        Hasher hasher(static_cast<std::uint16_t>(id));
        Bytes blob = job.blob;
        std::uint64_t local = 0;
        for (;;) {
            const std::uint64_t start = begin + next_chunk.fetch_add(1) * chunk;
            // Chunks are handed out in increasing order, so nothing past here can win.
            if (start >= end || start >= best.load()) break;
            const std::uint64_t stop = std::min(end, start + chunk);
            bool done = false;
            for (std::uint64_t n = start; n < stop && n < best.load(); ++n) {
                if (options.cancel && options.cancel->load(std::memory_order_relaxed)) {
                    interrupted = true;
                    done = true;
                    break;
                }
                store_le32(blob.data() + job.nonce_offset, static_cast<std::uint32_t>(n));
                const Digest d = hasher.hash(blob);
                ++local;
                if (!accept(d)) continue;
                std::lock_guard lock(mu);
                if (n < best.load()) {
                    best.store(n);
                    best_digest = d;
                }
                break;
            }
            if (done) break;
        }
        tried += local;
    };

    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker, t);
    worker(0);
    for (auto& th : pool) th.join();
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    ShareResult r;
    r.hashes_tried = tried.load();
    r.elapsed_s = elapsed;
    r.hash_rate = elapsed > 0 ? static_cast<double>(r.hashes_tried) / elapsed : 0.0;
    r.interrupted = interrupted.load();
    if (best.load() != UINT64_MAX) {
        r.found = true;
        r.nonce = static_cast<std::uint32_t>(best.load());
        r.digest_hex = to_hex(best_digest);
        r.meets_target = accept(best_digest);
    }
    return r;
}

std::string share_to_json(const ShareResult& r, int indent)
{
    nlohmann::json j = {
        {"found", r.found},
        {"nonce", r.found ? nlohmann::json(r.nonce) : nlohmann::json(nullptr)},
        {"digest_hex", r.digest_hex},
        {"meets_target", r.meets_target},
        {"hashes_tried", r.hashes_tried},
        {"elapsed_s", r.elapsed_s},
        {"hash_rate", r.hash_rate},
        {"interrupted", r.interrupted},
    };
    return j.dump(indent);
}

} // namespace cnhaven
