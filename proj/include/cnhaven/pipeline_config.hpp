#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "cnhaven/constants.hpp"

namespace cnhaven {

enum class JitterModel : std::uint8_t { Uniform, ExponentialTail };
enum class PcMapping : std::uint8_t { PerHash, AddressInterleaved };

/// Memory timing in shuffle-domain ticks.
struct MemLatency {
    std::uint32_t read_fixed = 100;
    std::uint32_t write_fixed = 100;
    std::uint32_t jitter_max = 0;
    std::uint64_t seed = 1;
    JitterModel model = JitterModel::Uniform;
    /// Mean of the exponential tail added on top of the uniform part (ExponentialTail only).
    double tail_mean = 0.0;
};

/// Per-item stage costs in cycles of the stage's own clock domain.
struct StageCosts {
    std::uint32_t keccak = 24;
    std::uint32_t explode_per_group = 10;
    std::uint32_t explode_premix = 160;   // 16 x 10 rounds before the first write
    std::uint32_t shuffle_per_iteration = 1;
    std::uint32_t implode_per_group = 10;
    std::uint32_t implode_extra = 160;    // 16 x 10 rounds with no memory reads
    std::uint32_t finalize = 100;
};

/// Amount of work per hash. Defaults are the real algorithm; tests shrink them.
struct Workload {
    std::uint32_t shuffle_iterations = kHaven.iterations;
    std::uint32_t groups = static_cast<std::uint32_t>(kGroupCount);
};

inline constexpr std::uint32_t kMaxPipelineDepth = 128;
inline constexpr std::uint64_t kModeledMemoryBytes = std::uint64_t{8} << 30;

struct PipelineConfig {
    std::string id;
    std::uint32_t pipeline_depth = 1;
    std::uint32_t shuffle_clock_mhz = 500;
    std::uint32_t other_clock_mhz = 200;
    /// Keccak->Explode, Explode->Shuffle, Shuffle->Implode, Implode->Finalize.
    std::array<std::uint32_t, 4> fifo_depths{2, 2, 2, 2};
    MemLatency mem;
    std::uint32_t outstanding_limit = 32;
    std::uint32_t n_kernels = 1;
    std::uint32_t pcs_per_kernel = 1;
    std::uint32_t pc_bytes_per_tick = 32;
    PcMapping pc_mapping = PcMapping::PerHash;
    StageCosts costs;
    Workload workload;
    bool record_timeline = false;
};

/// Throws Error(ConfigInvalid) naming the first offending field.
void validate(const PipelineConfig& config);

} // namespace cnhaven
