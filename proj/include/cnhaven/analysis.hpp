#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cnhaven/error.hpp"
#include "cnhaven/pipeline_config.hpp"
#include "cnhaven/scratchpad.hpp"

namespace cnhaven {

inline constexpr double kMaxAddressEntropyBits = 18.0;

struct ReuseQuantiles {
    std::uint64_t p50 = 0;
    std::uint64_t p90 = 0;
    std::uint64_t p99 = 0;
    std::uint64_t reuses = 0;       // accesses that touched a block seen before
    std::uint64_t cold = 0;         // first touches
};

struct TraceStats {
    std::uint64_t total_accesses = 0;
    std::uint64_t reads = 0;
    std::uint64_t writes = 0;
    std::array<std::uint64_t, 3> reads_by_stage{};   // indexed by Stage
    std::array<std::uint64_t, 3> writes_by_stage{};
    /// Signed byte stride between consecutive accesses of the same hash_id.
    std::map<std::int64_t, std::uint64_t> stride_histogram;
    /// Length of maximal +16 runs (per hash_id) -> number of such runs.
    std::map<std::uint64_t, std::uint64_t> sequential_run_lengths;
    double address_entropy_bits = 0.0;
    std::uint64_t distinct_blocks = 0;
    ReuseQuantiles reuse_distance;

    /// Nearest-rank quantile over individual runs (0 when there are none).
    std::uint64_t run_length_quantile(double q) const;
};

/// One pass over the records. Throws MalformedTrace on invalid op/stage values
/// or offsets outside the scratchpad.
TraceStats trace_stats(const AccessTrace& trace);

/// Records of one stage only, order kept.
AccessTrace filter_stage(const AccessTrace& trace, Stage stage);

struct PartitionViolation {
    std::size_t trace_index = 0;
    std::size_t record_index = 0;
    std::uint64_t seq = 0;
    std::uint32_t hash_id = 0;
    std::uint64_t offset = 0;
    std::uint64_t address = 0;
    std::string reason;
};

struct PartitionReport {
    std::uint64_t records_checked = 0;
    std::vector<PartitionViolation> violations;

    bool ok() const { return violations.empty(); }
};

/// Checks every record lands inside its own hash_id's 4 MiB region, aligned.
PartitionReport partition_check(const std::vector<AccessTrace>& traces, const PipelineConfig& config);

std::string stats_to_json(const TraceStats& stats, int indent = -1);
std::string partition_to_json(const PartitionReport& report, int indent = -1);

} // namespace cnhaven
