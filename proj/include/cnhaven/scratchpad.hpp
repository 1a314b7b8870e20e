#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "cnhaven/block128.hpp"
#include "cnhaven/constants.hpp"
#include "cnhaven/pipeline_config.hpp"

namespace cnhaven {

enum class AccessOp : std::uint8_t { Read = 0, Write = 1 };
enum class Stage : std::uint8_t { Explode = 0, Shuffle = 1, Implode = 2 };

std::string_view to_string(AccessOp op);
std::string_view to_string(Stage stage);

struct AccessRecord {
    AccessOp op = AccessOp::Read;
    Stage stage = Stage::Explode;
    std::uint16_t hash_id = 0;
    std::uint32_t offset = 0;
    std::uint64_t seq = 0;

    friend bool operator==(const AccessRecord&, const AccessRecord&) = default;
};

struct TraceMetadata {
    std::string input_digest_hex;  // first 32 bytes of the absorbed state
    std::uint32_t nonce = 0;
    std::string config_id;
};

struct AccessTrace {
    TraceMetadata metadata;
    std::vector<AccessRecord> records;
    /// Block values, parallel to records; only filled when value capture is on.
    std::vector<Block128> values;
};

/// Destination for streamed records. Implementations must accept concurrent
/// append() calls from several scratchpads.
class TraceSink {
public:
    virtual ~TraceSink() = default;
    virtual void append(const AccessRecord* records, std::size_t count) = 0;
    virtual void flush() {}
};

/// Collects streamed records in memory.
class MemoryTraceSink final : public TraceSink {
public:
    void append(const AccessRecord* records, std::size_t count) override;
    AccessTrace take();
    std::size_t size() const;

private:
    mutable std::mutex mu_;
    AccessTrace trace_;
};

/// Abstract block store keyed by (region, offset). Used by the flat hashing
/// path's tests and by the simulator's latency model.
class MemoryBackend {
public:
    virtual ~MemoryBackend() = default;
    virtual Block128 read_block(std::uint32_t region, std::uint32_t offset) = 0;
    virtual void write_block(std::uint32_t region, std::uint32_t offset, const Block128& b) = 0;
    virtual std::uint32_t latency(AccessOp op) = 0;
};

/// Zero-latency in-memory backend; regions are allocated on first touch.
class FlatMemoryBackend final : public MemoryBackend {
public:
    Block128 read_block(std::uint32_t region, std::uint32_t offset) override;
    void write_block(std::uint32_t region, std::uint32_t offset, const Block128& b) override;
    std::uint32_t latency(AccessOp) override { return 0; }

private:
    std::vector<std::unique_ptr<Block128[]>> regions_;
    Block128* region(std::uint32_t id);
};

/// Throws Misaligned / OutOfBounds for offsets not addressing a whole block.
void check_offset(std::uint64_t offset);

/// 4 MiB per-hash working buffer.
class Scratchpad {
public:
    explicit Scratchpad(std::uint16_t hash_id = 0);
    ~Scratchpad();
    Scratchpad(const Scratchpad&) = delete;
    Scratchpad& operator=(const Scratchpad&) = delete;
    Scratchpad(Scratchpad&&) noexcept;
    Scratchpad& operator=(Scratchpad&&) noexcept;

    Block128 read16(std::uint32_t offset);
    void write16(std::uint32_t offset, const Block128& b);

    /// Starts or stops appending records. Stopping keeps what was captured.
    void trace_capture(bool enable, bool capture_values = false);
    bool tracing() const { return tracing_; }
    bool capturing_values() const { return capture_values_; }

    /// Stream records to sink instead of accumulating them in trace().
    void set_sink(std::shared_ptr<TraceSink> sink);
    void flush_trace();

    void set_stage(Stage stage) { stage_ = stage; }
    Stage stage() const { return stage_; }

    std::uint16_t hash_id() const { return hash_id_; }
    void set_hash_id(std::uint16_t id) { hash_id_ = id; }

    const AccessTrace& trace() const { return trace_; }
    AccessTrace& trace() { return trace_; }
    AccessTrace take_trace();

    void zero();
    std::uint8_t* data() { return reinterpret_cast<std::uint8_t*>(blocks_.get()); }
    const std::uint8_t* data() const { return reinterpret_cast<const std::uint8_t*>(blocks_.get()); }
    static constexpr std::size_t size() { return kScratchpadBytes; }

private:
    void record(AccessOp op, std::uint32_t offset, const Block128& value);

    std::unique_ptr<Block128[]> blocks_;
    std::uint16_t hash_id_ = 0;
    Stage stage_ = Stage::Explode;
    bool tracing_ = false;
    bool capture_values_ = false;
    std::uint64_t next_seq_ = 0;
    AccessTrace trace_;
    std::shared_ptr<TraceSink> sink_;
    std::vector<AccessRecord> pending_;
};

/// Byte base of hash_id's region in the modeled memory (contiguous layout).
/// Throws BadHashId unless hash_id < config.pipeline_depth.
std::uint64_t region_base(std::uint32_t hash_id, const PipelineConfig& config);

} // namespace cnhaven
