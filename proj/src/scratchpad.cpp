#include "cnhaven/scratchpad.hpp"

#include "cnhaven/error.hpp"

namespace cnhaven {

namespace {

constexpr std::size_t kBlocks = kScratchpadBytes / 16;
constexpr std::size_t kSinkBatch = 4096;

} // namespace

std::string_view to_string(AccessOp op) { return op == AccessOp::Read ? "R" : "W"; }

std::string_view to_string(Stage stage)
{
    switch (stage) {
    case Stage::Explode: return "explode";
    case Stage::Shuffle: return "shuffle";
    case Stage::Implode: return "implode";
    }
    return "unknown";
}

void MemoryTraceSink::append(const AccessRecord* records, std::size_t count)
{
    std::lock_guard lock(mu_);
    trace_.records.insert(trace_.records.end(), records, records + count);
}

AccessTrace MemoryTraceSink::take()
{
    std::lock_guard lock(mu_);
    AccessTrace out = std::move(trace_);
    trace_ = {};
    return out;
}

std::size_t MemoryTraceSink::size() const
{
    std::lock_guard lock(mu_);
    return trace_.records.size();
}

void check_offset(std::uint64_t offset)
{
    if (offset >= kScratchpadBytes)
        throw Error(ErrorCode::OutOfBounds, "offset " + std::to_string(offset) + " outside 4 MiB scratchpad");
    if (offset % 16 != 0)
        throw Error(ErrorCode::Misaligned, "offset " + std::to_string(offset) + " is not 16-byte aligned");
}

Block128* FlatMemoryBackend::region(std::uint32_t id)
{
    if (id >= regions_.size()) regions_.resize(id + 1);
    if (!regions_[id]) regions_[id].reset(new Block128[kBlocks]());
    return regions_[id].get();
}

Block128 FlatMemoryBackend::read_block(std::uint32_t region_id, std::uint32_t offset)
{
    check_offset(offset);
    return region(region_id)[offset / 16];
}

void FlatMemoryBackend::write_block(std::uint32_t region_id, std::uint32_t offset, const Block128& b)
{
    check_offset(offset);
    region(region_id)[offset / 16] = b;
}

Scratchpad::Scratchpad(std::uint16_t hash_id)
    : blocks_(new Block128[kBlocks]()), hash_id_(hash_id)
{
}

Scratchpad::~Scratchpad()
{
    try {
        flush_trace();
    } catch (...) {
    }
}

Scratchpad::Scratchpad(Scratchpad&&) noexcept = default;
Scratchpad& Scratchpad::operator=(Scratchpad&&) noexcept = default;

Block128 Scratchpad::read16(std::uint32_t offset)
{
    check_offset(offset);
    const Block128 b = blocks_[offset / 16];
    if (tracing_) record(AccessOp::Read, offset, b);
    return b;
}

void Scratchpad::write16(std::uint32_t offset, const Block128& b)
{
    check_offset(offset);
    blocks_[offset / 16] = b;
    if (tracing_) record(AccessOp::Write, offset, b);
}

void Scratchpad::record(AccessOp op, std::uint32_t offset, const Block128& value)
{
    const AccessRecord r{op, stage_, hash_id_, offset, next_seq_++};
    if (sink_) {
        pending_.push_back(r);
        if (pending_.size() >= kSinkBatch) flush_trace();
        return;
    }
    trace_.records.push_back(r);
    if (capture_values_) trace_.values.push_back(value);
}

void Scratchpad::trace_capture(bool enable, bool capture_values)
{
    tracing_ = enable;
    if (enable) capture_values_ = capture_values;
    if (!enable) flush_trace();
}

void Scratchpad::set_sink(std::shared_ptr<TraceSink> sink)
{
    flush_trace();
    sink_ = std::move(sink);
}

void Scratchpad::flush_trace()
{
    if (sink_ && !pending_.empty()) {
        sink_->append(pending_.data(), pending_.size());
        pending_.clear();
    }
}

AccessTrace Scratchpad::take_trace()
{
    AccessTrace out = std::move(trace_);
    trace_ = {};
    return out;
}

void Scratchpad::zero() { std::fill(blocks_.get(), blocks_.get() + kBlocks, Block128{}); }

std::uint64_t region_base(std::uint32_t hash_id, const PipelineConfig& config)
{
    if (hash_id >= config.pipeline_depth)
        throw Error(ErrorCode::BadHashId,
            "hash_id " + std::to_string(hash_id) + " >= pipeline depth " + std::to_string(config.pipeline_depth));
    return static_cast<std::uint64_t>(hash_id) * kScratchpadBytes;
}

} // namespace cnhaven
