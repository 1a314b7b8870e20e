#include <doctest.h>

#include <cmath>

#include "cnhaven/pipeline_sim.hpp"
#include "cnhaven/sim_report.hpp"
#include "test_support.hpp"

using namespace cnhaven;

namespace {

// Same shape as the real workload, scaled down so whole sweeps run in seconds.
PipelineConfig small_config(std::uint32_t depth = 1)
{
    PipelineConfig c;
    c.pipeline_depth = depth;
    c.workload.shuffle_iterations = 2048;
    c.workload.groups = 128;
    return c;
}

ErrorCode code_of(auto&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error thrown");
    return ErrorCode::Io;
}

} // namespace

TEST_CASE("stage models")
{
    const auto m = stage_models(PipelineConfig{});
    int shuffle_domain = 0;
    for (const auto& s : m) shuffle_domain += s.clock_domain == ClockDomain::Shuffle;
    CHECK(shuffle_domain == 1);
    CHECK(m[2].name == SimStage::Shuffle);
    CHECK(m[2].clock_domain == ClockDomain::Shuffle);
    CHECK(m[1].items_per_hash == 32768);
    CHECK(m[3].items_per_hash == 2 * 32768);
    CHECK(m[2].items_per_hash == 0x40000);
    CHECK(m[0].cycles_per_item == 24);
    CHECK(m[4].cycles_per_item == 100);
}

TEST_CASE("config validation")
{
    auto bad = [](auto mutate) {
        PipelineConfig c;
        mutate(c);
        return code_of([&] { validate(c); });
    };
    CHECK_NOTHROW(validate(PipelineConfig{}));
    CHECK(bad([](PipelineConfig& c) { c.pipeline_depth = 0; }) == ErrorCode::ConfigInvalid);
    CHECK(bad([](PipelineConfig& c) { c.pipeline_depth = 129; }) == ErrorCode::ConfigInvalid);
    CHECK(bad([](PipelineConfig& c) { c.shuffle_clock_mhz = 0; }) == ErrorCode::ConfigInvalid);
    CHECK(bad([](PipelineConfig& c) { c.other_clock_mhz = 0; }) == ErrorCode::ConfigInvalid);
    CHECK(bad([](PipelineConfig& c) { c.fifo_depths[2] = 0; }) == ErrorCode::ConfigInvalid);
    CHECK(bad([](PipelineConfig& c) { c.outstanding_limit = 0; }) == ErrorCode::ConfigInvalid);
    CHECK(bad([](PipelineConfig& c) { c.n_kernels = 0; }) == ErrorCode::ConfigInvalid);
    CHECK(bad([](PipelineConfig& c) { c.pcs_per_kernel = 0; }) == ErrorCode::ConfigInvalid);
    CHECK(bad([](PipelineConfig& c) { c.mem.tail_mean = -1; }) == ErrorCode::ConfigInvalid);
    CHECK(bad([](PipelineConfig& c) {
        c.pipeline_depth = 128;
        c.n_kernels = 17;
    }) == ErrorCode::ConfigInvalid);
    CHECK(code_of([] { simulate(PipelineConfig{.pipeline_depth = 0}, 1); }) == ErrorCode::ConfigInvalid);
    CHECK(code_of([] { theoretical_bounds(PipelineConfig{.pipeline_depth = 200}); }) == ErrorCode::ConfigInvalid);
}

TEST_CASE("zero hashes")
{
    const SimReport r = simulate(PipelineConfig{}, 0);
    CHECK(r.hashes_completed == 0);
    CHECK(r.hashes_injected == 0);
    CHECK(r.hash_rate_hs == 0);
    for (const auto& f : r.fifo_occupancy) {
        CHECK(f.min == 0);
        CHECK(f.max == 0);
        CHECK(f.mean == 0);
    }
    for (double u : r.stage_utilization) CHECK(u == 0);
}

TEST_CASE("depth 1, zero jitter matches the single-hash bound")
{
    for (const PipelineConfig& c : {PipelineConfig{}, small_config()}) {
        const double bound = theoretical_bounds(c).single_hash_rate;
        const SimReport r = simulate(c, 1);
        CHECK(r.hash_rate_hs == doctest::Approx(bound).epsilon(0.01));
    }
}

TEST_CASE("implode takes twice as long as explode")
{
    const auto b = theoretical_bounds(PipelineConfig{});
    const double ratio = b.stage_latency_s[3] / b.stage_latency_s[1];
    CHECK(ratio == doctest::Approx(2.0).epsilon(0.01));

    // The ratio comes from the access pattern, not from the extra rounds.
    PipelineConfig c;
    c.costs.explode_premix = 1;
    c.costs.implode_extra = 1;
    const auto b2 = theoretical_bounds(c);
    CHECK(b2.stage_latency_s[3] / b2.stage_latency_s[1] == doctest::Approx(2.0).epsilon(0.001));
}

TEST_CASE("pipeline bound scales inversely with read latency when memory dominates")
{
    PipelineConfig c;
    c.mem.read_fixed = 400;
    const double r1 = theoretical_bounds(c).pipeline_bound_rate;
    c.mem.read_fixed = 800;
    const double r2 = theoretical_bounds(c).pipeline_bound_rate;
    CHECK(r2 / r1 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("bounds are positive and min is the smallest")
{
    const auto b = theoretical_bounds(small_config(16));
    CHECK(b.single_hash_rate > 0);
    CHECK(b.memory_bound_rate > 0);
    CHECK(b.pipeline_bound_rate > 0);
    CHECK(b.min_rate == std::min({b.single_hash_rate, b.memory_bound_rate, b.pipeline_bound_rate}));
}

TEST_CASE("throughput is non-decreasing over depth and at most linear")
{
    double prev = 0, first = 0;
    for (std::uint32_t d : {1u, 2u, 3u, 4u, 6u, 8u, 12u, 16u, 24u, 32u, 48u, 64u, 96u, 128u}) {
        const SimReport r = simulate(small_config(d), 2 * d);
        CAPTURE(d);
        CHECK(r.hashes_completed == 2 * d);
        CHECK(r.hash_rate_hs >= prev);
        if (d == 1) first = r.hash_rate_hs;
        CHECK(r.hash_rate_hs <= first * d * 1.0001);
        prev = r.hash_rate_hs;
    }
    CHECK(prev > first);
}

TEST_CASE("throughput stays below the pipeline and memory bounds")
{
    for (std::uint32_t d : {1u, 4u, 32u}) {
        const PipelineConfig c = small_config(d);
        const auto b = theoretical_bounds(c);
        const SimReport r = simulate(c, 3 * d);
        CHECK(r.hash_rate_hs <= b.pipeline_bound_rate * 1.0001);
        CHECK(r.hash_rate_hs <= b.memory_bound_rate * 1.0001);
    }
}

TEST_CASE("throughput plateaus once the outstanding window is full")
{
    PipelineConfig c = small_config();
    c.outstanding_limit = 8;
    c.pipeline_depth = 16;
    const double at16 = simulate(c, 32).hash_rate_hs;
    c.pipeline_depth = 64;
    const double at64 = simulate(c, 128).hash_rate_hs;
    CHECK(at64 >= at16);
    CHECK(at64 <= at16 * 1.15);
}

TEST_CASE("conservation, FIFO bounds, causality")
{
    PipelineConfig c = small_config(8);
    c.mem.jitter_max = 40;
    c.fifo_depths = {1, 3, 1, 2};
    c.record_timeline = true;
    const SimReport r = simulate(c, 20);
    CHECK(r.hashes_completed == 20);
    CHECK(r.hashes_injected == 20);
    CHECK(r.max_in_flight <= c.pipeline_depth + 8);
    for (std::size_t i = 0; i < kSimFifos; ++i) {
        const auto& f = r.fifo_occupancy[i];
        CHECK(f.capacity == c.fifo_depths[i]);
        CHECK(f.max <= f.capacity);
        CHECK(f.min <= f.max);
        CHECK(f.mean >= 0);
        CHECK(f.mean <= f.capacity);
    }
    for (double u : r.stage_utilization) {
        CHECK(u >= 0);
        CHECK(u <= 1);
    }
    CHECK(r.mem.port_utilization >= 0);
    CHECK(r.mem.port_utilization <= 1);
    CHECK(r.mem.peak_outstanding <= c.outstanding_limit);
    REQUIRE(r.timeline.size() == 20);
    for (const auto& t : r.timeline) {
        CHECK(t.keccak_start <= t.explode_start);
        CHECK(t.explode_start <= t.shuffle_start);
        CHECK(t.shuffle_start <= t.shuffle_last_event);
        CHECK(t.shuffle_last_event <= t.implode_first_event);
        CHECK(t.implode_first_event <= t.implode_end);
        CHECK(t.implode_end <= t.finalize_end);
        CHECK(t.slot < c.pipeline_depth);
    }
    const std::uint64_t per_hash_reads = 3ull * 2048 + 2 * 128;
    CHECK(r.mem.reads == 20 * per_hash_reads);
    CHECK(r.mem.writes == 20 * (3ull * 2048 + 128));
}

TEST_CASE("seeded determinism and seed sensitivity")
{
    PipelineConfig c = small_config(4);
    c.mem.jitter_max = 64;
    c.mem.seed = 99;
    const SimReport a = simulate(c, 10);
    const SimReport b = simulate(c, 10);
    CHECK(a == b);
    CHECK(report_to_json(a) == report_to_json(b));
    c.mem.seed = 100;
    CHECK_FALSE(simulate(c, 10) == a);
}

TEST_CASE("jitter slows things down and exponential tails add latency")
{
    PipelineConfig c = small_config(2);
    const double base = simulate(c, 4).hash_rate_hs;
    c.mem.jitter_max = 100;
    const SimReport jittered = simulate(c, 4);
    CHECK(jittered.hash_rate_hs < base);
    // Observed latency includes port queueing, so only the lower bound is exact.
    CHECK(jittered.mem.max_latency >= 100);
    CHECK(jittered.mem.mean_read_latency > simulate(small_config(2), 4).mem.mean_read_latency);
    c.mem.model = JitterModel::ExponentialTail;
    c.mem.tail_mean = 50;
    CHECK(simulate(c, 4).mem.mean_read_latency > jittered.mem.mean_read_latency);
}

TEST_CASE("latency histogram buckets cover every request")
{
    PipelineConfig c = small_config(2);
    c.mem.jitter_max = 300;
    const SimReport r = simulate(c, 4);
    std::uint64_t total = 0;
    for (const auto& b : r.mem.latency_histogram) {
        CHECK(b.lo < b.hi);
        total += b.count;
    }
    CHECK(total == r.mem.reads + r.mem.writes);
}

TEST_CASE("clock ratios are exact")
{
    PipelineConfig c = small_config();
    c.shuffle_clock_mhz = 450;
    c.other_clock_mhz = 300;
    const SimReport r = simulate(c, 2);
    CHECK(r.hashes_completed == 2);
    CHECK(r.shuffle_ticks * 300 / 450 == doctest::Approx(static_cast<double>(r.other_ticks)).epsilon(1e-6));
    CHECK(r.hash_rate_hs == doctest::Approx(theoretical_bounds(c).single_hash_rate).epsilon(0.02));
}

TEST_CASE("more kernels and more channels")
{
    PipelineConfig c = small_config(4);
    const double one = simulate(c, 16).hash_rate_hs;
    c.n_kernels = 2;
    const SimReport two = simulate(c, 16);
    CHECK(two.hashes_completed == 16);
    CHECK(two.hash_rate_hs > one * 1.5);

    c.n_kernels = 1;
    c.pcs_per_kernel = 4;
    c.pc_mapping = PcMapping::AddressInterleaved;
    CHECK(simulate(c, 8).hashes_completed == 8);
}

TEST_CASE("address replay drives shuffle addresses")
{
    AccessTrace t;
    for (std::uint32_t i = 0; i < 64; ++i) {
        t.records.push_back({AccessOp::Read, Stage::Shuffle, 0, i * 256, 2 * i});
        t.records.push_back({AccessOp::Write, Stage::Shuffle, 0, i * 256, 2 * i + 1});
    }
    t.records.push_back({AccessOp::Read, Stage::Implode, 0, 0, 999});
    const AddressReplay replay = AddressReplay::from_trace(t);
    CHECK(replay.shuffle_reads.size() == 64);

    PipelineConfig c = small_config(4);
    c.pcs_per_kernel = 4;
    c.pc_mapping = PcMapping::AddressInterleaved;
    const SimReport r = simulate(c, 4, &replay);
    CHECK(r.hashes_completed == 4);
}

TEST_CASE("config JSON round trip and strictness")
{
    PipelineConfig c = small_config(7);
    c.id = "x";
    c.mem.jitter_max = 12;
    c.mem.model = JitterModel::ExponentialTail;
    c.mem.tail_mean = 2.5;
    c.pc_mapping = PcMapping::AddressInterleaved;
    c.fifo_depths = {1, 2, 3, 4};
    const std::string text = config_to_json(c);
    const PipelineConfig back = config_from_json(text);
    CHECK(config_to_json(back) == text);

    const PipelineConfig partial = config_from_json(R"({"pipeline_depth": 9, "mem_latency_ticks": {"seed": 5}})");
    CHECK(partial.pipeline_depth == 9);
    CHECK(partial.mem.seed == 5);
    CHECK(partial.mem.read_fixed == 100);

    CHECK(code_of([] { config_from_json(R"({"depth": 2})"); }) == ErrorCode::ConfigInvalid);
    CHECK(code_of([] { config_from_json(R"({"mem_latency_ticks": {"nope": 1}})"); }) == ErrorCode::ConfigInvalid);
    CHECK(code_of([] { config_from_json(R"({"pipeline_depth": -1})"); }) == ErrorCode::ConfigInvalid);
    CHECK(code_of([] { config_from_json(R"({"pipeline_depth": "4"})"); }) == ErrorCode::ConfigInvalid);
    CHECK(code_of([] { config_from_json(R"({"fifo_depths": [1, 2]})"); }) == ErrorCode::ConfigInvalid);
    CHECK(code_of([] { config_from_json(R"({"pc_mapping": "random"})"); }) == ErrorCode::ConfigInvalid);
    CHECK(code_of([] { config_from_json("{"); }) == ErrorCode::ConfigInvalid);
    CHECK(code_of([] { config_from_json(R"({"pipeline_depth": 500})"); }) == ErrorCode::ConfigInvalid);
}

TEST_CASE("grid expansion")
{
    const auto grid = grid_from_json(R"({"base": {"id": "g", "workload": {"shuffle_iterations": 64}},
        "vary": {"pipeline_depth": [1, 2, 4], "mem_latency_ticks.jitter_max": [0, 10]}})");
    REQUIRE(grid.size() == 6);
    CHECK(grid[0].pipeline_depth == 1);
    CHECK(grid[1].pipeline_depth == 1);
    CHECK(grid[1].mem.jitter_max == 10);
    CHECK(grid[5].pipeline_depth == 4);
    CHECK(grid[5].workload.shuffle_iterations == 64);
    CHECK(grid[0].id == "g/pipeline_depth=1,mem_latency_ticks.jitter_max=0");

    CHECK(grid_from_json(R"([{"pipeline_depth": 3}, {}])").size() == 2);
    CHECK(grid_from_json(R"({"base": {}})").size() == 1);
    CHECK(code_of([] { grid_from_json("[]"); }) == ErrorCode::ConfigInvalid);
    CHECK(code_of([] { grid_from_json(R"({"vary": {"bogus": [1]}})"); }) == ErrorCode::ConfigInvalid);
    CHECK(code_of([] { grid_from_json(R"({"vary": {"pipeline_depth": []}})"); }) == ErrorCode::ConfigInvalid);
}

TEST_CASE("sweep: order, per-entry errors, parity with simulate, determinism")
{
    std::vector<PipelineConfig> grid;
    for (std::uint32_t d : {1u, 2u, 4u, 8u}) grid.push_back(small_config(d));
    grid.push_back(small_config(2));
    grid.back().pipeline_depth = 0;  // invalid, must not abort the sweep
    grid.push_back(small_config(16));

    const auto a = sweep(grid, 6, 3);
    REQUIRE(a.size() == grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(a[i].config.pipeline_depth == grid[i].pipeline_depth);
    CHECK_FALSE(a[4].report.has_value());
    CHECK(a[4].error_code == ErrorCode::ConfigInvalid);
    CHECK(a[5].report.has_value());
    CHECK(*a[0].report == simulate(grid[0], 6));

    const auto b = sweep(grid, 6, 1);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(a[i].report == b[i].report);
        CHECK(a[i].error_code == b[i].error_code);
    }
    CHECK(sweep_to_json(a) == sweep_to_json(b));

    const std::string csv = sweep_to_csv(a);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + static_cast<long>(grid.size()));
    CHECK(csv.find("ConfigInvalid") != std::string::npos);

    CHECK(code_of([] { sweep({}, 1); }) == ErrorCode::ConfigInvalid);
}

TEST_CASE("single-entry sweep equals simulate")
{
    const PipelineConfig c = small_config(3);
    const auto r = sweep({c}, 5);
    REQUIRE(r.size() == 1);
    CHECK(*r[0].report == simulate(c, 5));
}

TEST_CASE("report JSON carries the stable field names")
{
    const auto j = nlohmann::json::parse(report_to_json(simulate(small_config(2), 3)));
    for (const char* key : {"hashes_completed", "sim_ticks", "hash_rate_hs", "stage_utilization", "fifo_occupancy",
             "mem_requests", "bottleneck"})
        CHECK(j.contains(key));
    CHECK(j["sim_ticks"].contains("shuffle"));
    CHECK(j["sim_ticks"].contains("other"));
    CHECK(j["stage_utilization"].size() == 5);
    CHECK(j["fifo_occupancy"].size() == 4);
    CHECK(j["mem_requests"].contains("latency_histogram"));
    const auto bj = nlohmann::json::parse(bounds_to_json(theoretical_bounds(small_config())));
    for (const char* key : {"single_hash_rate", "memory_bound_rate", "pipeline_bound_rate", "min_rate"})
        CHECK(bj.contains(key));
}
