#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cnhaven/error.hpp"
#include "cnhaven/pipeline_config.hpp"
#include "cnhaven/scratchpad.hpp"

namespace cnhaven {

enum class SimStage : std::uint8_t { Keccak = 0, Explode = 1, Shuffle = 2, Implode = 3, Finalize = 4 };
enum class ClockDomain : std::uint8_t { Shuffle, Other };

inline constexpr std::size_t kSimStages = 5;
inline constexpr std::size_t kSimFifos = 4;

std::string_view to_string(SimStage stage);
std::string_view to_string(ClockDomain domain);

/// What one stage costs per item and in which clock domain it runs.
struct StageModel {
    SimStage name;
    ClockDomain clock_domain;
    std::string item;              // "message", "group" or "iteration"
    std::uint64_t items_per_hash;
    std::uint32_t cycles_per_item;
    std::uint32_t fixed_cycles;    // per-hash cost outside the item loop
};

std::array<StageModel, kSimStages> stage_models(const PipelineConfig& config);

struct FifoStats {
    std::uint32_t capacity = 0;
    std::uint32_t min = 0;
    std::uint32_t max = 0;
    double mean = 0.0;
};

struct LatencyBucket {
    std::uint64_t lo = 0;  // inclusive, shuffle ticks
    std::uint64_t hi = 0;  // exclusive
    std::uint64_t count = 0;
};

struct MemStats {
    std::uint64_t reads = 0;
    std::uint64_t writes = 0;
    double mean_read_latency = 0.0;   // issue to completion, shuffle ticks
    double mean_write_latency = 0.0;
    std::uint64_t max_latency = 0;
    std::uint32_t peak_outstanding = 0;
    double port_utilization = 0.0;
    std::vector<LatencyBucket> latency_histogram;
};

/// Per-hash milestones in shuffle ticks (only when config.record_timeline).
struct HashTimeline {
    std::uint32_t hash = 0;
    std::uint32_t kernel = 0;
    std::uint32_t slot = 0;
    double keccak_start = 0;
    double explode_start = 0;
    double shuffle_start = 0;
    double shuffle_last_event = 0;
    double implode_first_event = 0;
    double implode_end = 0;
    double finalize_end = 0;
};

struct SimReport {
    std::string config_id;
    std::uint64_t hashes_injected = 0;
    std::uint64_t hashes_completed = 0;
    std::uint64_t base_units = 0;       // common time base, see sim_ticks
    std::uint64_t shuffle_ticks = 0;
    std::uint64_t other_ticks = 0;
    double elapsed_s = 0.0;
    double hash_rate_hs = 0.0;
    std::array<double, kSimStages> stage_utilization{};
    std::array<FifoStats, kSimFifos> fifo_occupancy{};
    MemStats mem;
    std::string bottleneck;
    std::uint32_t max_in_flight = 0;
    std::vector<HashTimeline> timeline;

    friend bool operator==(const SimReport&, const SimReport&);
};

struct TheoreticalBounds {
    double single_hash_rate = 0.0;
    double memory_bound_rate = 0.0;
    double pipeline_bound_rate = 0.0;
    double min_rate = 0.0;
    std::array<double, kSimStages> stage_latency_s{};
};

TheoreticalBounds theoretical_bounds(const PipelineConfig& config);

/// Shuffle addresses replayed from a captured trace (Shuffle-stage reads, in order).
struct AddressReplay {
    std::vector<std::uint32_t> shuffle_reads;

    static AddressReplay from_trace(const AccessTrace& trace);
};

/// Runs the event-driven model. Throws ConfigInvalid, or Deadlock if the model
/// stops with work left.
SimReport simulate(const PipelineConfig& config, std::uint64_t n_hashes, const AddressReplay* replay = nullptr);

struct SweepResult {
    PipelineConfig config;
    std::optional<SimReport> report;
    std::optional<ErrorCode> error_code;
    std::string error_message;
};

/// One result per config, in order. Errors are captured per entry.
std::vector<SweepResult> sweep(const std::vector<PipelineConfig>& grid, std::uint64_t n_hashes, unsigned threads = 1,
    const AddressReplay* replay = nullptr);

} // namespace cnhaven
