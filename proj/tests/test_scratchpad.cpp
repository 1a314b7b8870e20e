#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <set>
#include <sstream>

#include "cnhaven/error.hpp"
#include "cnhaven/scratchpad.hpp"
#include "cnhaven/trace_io.hpp"
#include "test_support.hpp"

using namespace cnhaven;

namespace {

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

std::string temp_path(const std::string& name)
{
    return (std::filesystem::temp_directory_path() / ("cnhaven_test_" + name)).string();
}

AccessTrace sample_trace()
{
    AccessTrace t;
    t.records = {
        {AccessOp::Write, Stage::Explode, 0, 0, 0},
        {AccessOp::Read, Stage::Shuffle, 7, 0x3FFFF0, 1},
        {AccessOp::Write, Stage::Shuffle, 65535, 16, 2},
        {AccessOp::Read, Stage::Implode, 3, 4096, UINT64_MAX},
    };
    return t;
}

} // namespace

TEST_CASE("pad is exactly 4 MiB and starts zeroed")
{
    Scratchpad pad;
    CHECK(Scratchpad::size() == 4194304);
    CHECK(pad.read16(0) == Block128{});
    CHECK(pad.read16(kScratchpadBytes - 16) == Block128{});
}

TEST_CASE("read after write, last writer wins")
{
    Scratchpad pad;
    const Block128 a = Block128::from_words(1, 2);
    const Block128 b = Block128::from_words(3, 4);
    pad.write16(32, a);
    CHECK(pad.read16(32) == a);
    pad.write16(32, b);
    CHECK(pad.read16(32) == b);
    CHECK(pad.read16(16) == Block128{});
    CHECK(pad.read16(48) == Block128{});
}

TEST_CASE("1000 random round trips")
{
    Scratchpad pad;
    std::mt19937_64 rng(42);
    std::vector<std::pair<std::uint32_t, Block128>> writes;
    std::map<std::uint32_t, Block128> expect;
    for (int i = 0; i < 1000; ++i) {
        const auto off = static_cast<std::uint32_t>(rng() & kHaven.address_mask);
        const Block128 v = Block128::from_words(rng(), rng());
        pad.write16(off, v);
        expect[off] = v;
    }
    for (const auto& [off, v] : expect) CHECK(pad.read16(off) == v);
}

TEST_CASE("bounds and alignment")
{
    Scratchpad pad;
    CHECK(code_of([&] { pad.read16(kScratchpadBytes); }) == ErrorCode::OutOfBounds);
    CHECK(code_of([&] { pad.write16(kScratchpadBytes, {}); }) == ErrorCode::OutOfBounds);
    CHECK(code_of([&] { pad.read16(8); }) == ErrorCode::Misaligned);
    CHECK(code_of([&] { pad.write16(8, {}); }) == ErrorCode::Misaligned);
    CHECK(code_of([&] { pad.read16(0xFFFFFFF8u); }) == ErrorCode::OutOfBounds);
}

TEST_CASE("trace capture on and off")
{
    Scratchpad pad(5);
    pad.read16(0);
    CHECK(pad.trace().records.empty());

    pad.trace_capture(true);
    pad.set_stage(Stage::Shuffle);
    pad.read16(16);
    REQUIRE(pad.trace().records.size() == 1);
    const AccessRecord& r = pad.trace().records[0];
    CHECK(r.op == AccessOp::Read);
    CHECK(r.stage == Stage::Shuffle);
    CHECK(r.hash_id == 5);
    CHECK(r.offset == 16);

    pad.write16(32, Block128::from_words(9, 9));
    pad.trace_capture(false);
    pad.read16(48);
    CHECK(pad.trace().records.size() == 2);
    CHECK(pad.trace().records[1].seq > pad.trace().records[0].seq);

    const AccessTrace taken = pad.take_trace();
    CHECK(taken.records.size() == 2);
    CHECK(pad.trace().records.empty());
}

TEST_CASE("value capture runs parallel to records")
{
    Scratchpad pad;
    pad.trace_capture(true, true);
    const Block128 v = Block128::from_words(7, 8);
    pad.write16(64, v);
    pad.read16(64);
    REQUIRE(pad.trace().values.size() == 2);
    CHECK(pad.trace().values[0] == v);
    CHECK(pad.trace().values[1] == v);
}

TEST_CASE("failed accesses are not traced")
{
    Scratchpad pad;
    pad.trace_capture(true);
    CHECK_THROWS(pad.read16(3));
    CHECK(pad.trace().records.empty());
}

TEST_CASE("memory sink collects records from several pads")
{
    auto sink = std::make_shared<MemoryTraceSink>();
    {
        Scratchpad a(0), b(1);
        a.set_sink(sink);
        b.set_sink(sink);
        a.trace_capture(true);
        b.trace_capture(true);
        for (std::uint32_t i = 0; i < 5000; ++i) {
            a.write16(i * 16, {});
            b.read16(i * 16);
        }
        a.trace_capture(false);
        b.flush_trace();
    }
    const AccessTrace t = sink->take();
    CHECK(t.records.size() == 10000);
    std::size_t ones = 0;
    for (const auto& r : t.records) ones += r.hash_id == 1;
    CHECK(ones == 5000);
}

TEST_CASE("region_base layout")
{
    PipelineConfig c;
    c.pipeline_depth = 128;
    CHECK(region_base(0, c) == 0);
    CHECK(region_base(1, c) == 4194304);
    CHECK(region_base(127, c) + kScratchpadBytes == std::uint64_t{512} << 20);
    CHECK(region_base(127, c) + kScratchpadBytes <= kModeledMemoryBytes);
    CHECK(code_of([&] { region_base(128, c); }) == ErrorCode::BadHashId);

    c.pipeline_depth = 1;
    CHECK(code_of([&] { region_base(1, c); }) == ErrorCode::BadHashId);
}

TEST_CASE("regions are pairwise disjoint for every depth")
{
    for (std::uint32_t depth = 1; depth <= kMaxPipelineDepth; ++depth) {
        PipelineConfig c;
        c.pipeline_depth = depth;
        std::uint64_t prev_end = 0;
        for (std::uint32_t h = 0; h < depth; ++h) {
            const std::uint64_t base = region_base(h, c);
            CHECK(base >= prev_end);
            prev_end = base + kScratchpadBytes;
        }
        CHECK(prev_end <= kModeledMemoryBytes);
    }
}

TEST_CASE("flat backend keeps regions apart")
{
    FlatMemoryBackend mem;
    const Block128 a = Block128::from_words(1, 1);
    const Block128 b = Block128::from_words(2, 2);
    mem.write_block(0, 128, a);
    mem.write_block(1, 128, b);
    CHECK(mem.read_block(0, 128) == a);
    CHECK(mem.read_block(1, 128) == b);
    CHECK(mem.read_block(2, 128) == Block128{});
    CHECK(mem.latency(AccessOp::Read) == 0);
    CHECK(code_of([&] { mem.read_block(0, 4); }) == ErrorCode::Misaligned);
}

TEST_CASE("binary trace format is bit exact")
{
    AccessTrace t;
    t.records = {{AccessOp::Write, Stage::Shuffle, 0x0102, 0x0A0B0C0D, 0x1122334455667788ULL}};
    std::ostringstream os;
    write_trace_binary(os, t);
    const std::string s = os.str();
    const std::string expect = std::string("CNHT") + std::string("\x01\x00", 2) +
        std::string("\x01\x00\x00\x00\x00\x00\x00\x00", 8) + std::string("\x01\x01\x02\x01", 4) +
        std::string("\x88\x77\x66\x55\x44\x33\x22\x11", 8) + std::string("\x0D\x0C\x0B\x0A", 4);
    CHECK(s.size() == kTraceHeaderBytes + kTraceRecordBytes);
    CHECK(s == expect);
}

TEST_CASE("trace round trips through both formats")
{
    const AccessTrace t = sample_trace();
    std::stringstream bin;
    write_trace_binary(bin, t);
    CHECK(read_trace_binary(bin).records == t.records);

    std::stringstream jl;
    write_trace_jsonl(jl, t);
    CHECK(read_trace_jsonl(jl).records == t.records);

    CHECK(record_to_json_line(t.records[0]) == R"({"op":"W","stage":"explode","hash_id":0,"seq":0,"offset":0})");

    for (const std::string ext : {".bin", ".jsonl"}) {
        const std::string path = temp_path("rt" + ext);
        write_trace(path, t);
        CHECK(read_trace(path).records == t.records);
        std::filesystem::remove(path);
    }
    CHECK(trace_format_for_path("x.jsonl") == TraceFormat::JsonLines);
    CHECK(trace_format_for_path("x.cnht") == TraceFormat::Binary);
}

TEST_CASE("malformed binary traces are rejected")
{
    std::stringstream bin;
    write_trace_binary(bin, sample_trace());
    const std::string good = bin.str();

    auto read = [](const std::string& s) {
        std::istringstream is(s);
        return read_trace_binary(is);
    };
    CHECK(code_of([&] { read("XXXX" + good.substr(4)); }) == ErrorCode::MalformedTrace);
    CHECK(code_of([&] { read(good.substr(0, good.size() - 3)); }) == ErrorCode::MalformedTrace);
    CHECK(code_of([&] { read(good + "x"); }) == ErrorCode::MalformedTrace);
    std::string bad_op = good;
    bad_op[kTraceHeaderBytes] = 9;
    CHECK(code_of([&] { read(bad_op); }) == ErrorCode::MalformedTrace);
    std::string bad_version = good;
    bad_version[4] = 7;
    CHECK(code_of([&] { read(bad_version); }) == ErrorCode::MalformedTrace);

    std::istringstream jl(R"({"op":"Q","stage":"explode","hash_id":0,"seq":0,"offset":0})");
    CHECK(code_of([&] { read_trace_jsonl(jl); }) == ErrorCode::MalformedTrace);
    CHECK(code_of([&] { read_trace("/nonexistent/trace.bin"); }) == ErrorCode::Io);
}

TEST_CASE("file sink patches the record count")
{
    const std::string path = temp_path("sink.bin");
    {
        auto sink = std::make_shared<FileTraceSink>(path, TraceFormat::Binary);
        Scratchpad pad(2);
        pad.set_sink(sink);
        pad.trace_capture(true);
        for (std::uint32_t i = 0; i < 10000; ++i) pad.write16((i * 16) % kScratchpadBytes, {});
        pad.trace_capture(false);
        sink->close();
        CHECK(sink->count() == 10000);
    }
    const AccessTrace t = read_trace(path);
    CHECK(t.records.size() == 10000);
    CHECK(t.records.back().seq == 9999);
    CHECK(t.records.back().hash_id == 2);
    std::filesystem::remove(path);
}
