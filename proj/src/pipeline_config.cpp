#include "cnhaven/pipeline_config.hpp"

#include "cnhaven/error.hpp"

namespace cnhaven {

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::ConfigInvalid, what); }

} // namespace

void validate(const PipelineConfig& c)
{
    if (c.pipeline_depth < 1 || c.pipeline_depth > kMaxPipelineDepth)
        invalid("pipeline_depth must be in 1..128, got " + std::to_string(c.pipeline_depth));
    if (c.shuffle_clock_mhz == 0) invalid("shuffle_clock_mhz must be positive");
    if (c.other_clock_mhz == 0) invalid("other_clock_mhz must be positive");
    for (std::size_t i = 0; i < c.fifo_depths.size(); ++i)
        if (c.fifo_depths[i] == 0) invalid("fifo_depths[" + std::to_string(i) + "] must be positive");
    if (c.outstanding_limit == 0) invalid("outstanding_limit must be positive");
    if (c.n_kernels == 0) invalid("n_kernels must be at least 1");
    if (c.pcs_per_kernel == 0) invalid("pcs_per_kernel must be at least 1");
    if (c.pc_bytes_per_tick == 0) invalid("pc_bytes_per_tick must be positive");
    if (c.mem.tail_mean < 0) invalid("mem.tail_mean must be non-negative");
    if (c.costs.explode_per_group == 0 || c.costs.implode_per_group == 0 || c.costs.shuffle_per_iteration == 0)
        invalid("per-item stage costs must be positive");
    if (c.workload.shuffle_iterations == 0) invalid("workload.shuffle_iterations must be positive");
    if (c.workload.groups == 0) invalid("workload.groups must be positive");
    const std::uint64_t bytes = std::uint64_t{c.pipeline_depth} * c.n_kernels * kScratchpadBytes;
    if (bytes > kModeledMemoryBytes)
        invalid("pipeline_depth x n_kernels scratchpads (" + std::to_string(bytes >> 20) + " MiB) exceed 8 GiB of modeled memory");
}

} // namespace cnhaven
