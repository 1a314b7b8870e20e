// cnhaven: hash, mine, verify, simulate, sweep and analyze from the command line.

#include <atomic>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "cnhaven/aes.hpp"
#include "cnhaven/analysis.hpp"
#include "cnhaven/corpus.hpp"
#include "cnhaven/haven.hpp"
#include "cnhaven/miner.hpp"
#include "cnhaven/pipeline_sim.hpp"
#include "cnhaven/sim_report.hpp"
#include "cnhaven/trace_io.hpp"

using namespace cnhaven;
using nlohmann::json;

namespace {

enum Exit : int { kOk = 0, kMismatch = 1, kBadInput = 2, kNoShare = 3 };

std::atomic<bool> g_interrupt{false};

extern "C" void on_sigint(int) { g_interrupt.store(true); }

struct Globals {
    bool json = false;
    unsigned threads = 1;
    std::string trace;
    std::optional<std::uint64_t> seed;
    std::string aes = "auto";
};

unsigned default_threads()
{
    if (const char* env = std::getenv("CNHAVEN_THREADS")) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::string read_input(const std::string& path)
{
    if (path == "-") return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
    out << text;
}

void apply_aes(const std::string& name)
{
    if (name == "auto")
        set_aes_backend(AesBackend::Auto);
    else if (name == "table")
        set_aes_backend(AesBackend::Table);
    else if (name == "hardware") {
        if (!hardware_aes_available()) throw Error(ErrorCode::ConfigInvalid, "hardware AES is not available on this CPU");
        set_aes_backend(AesBackend::Hardware);
    }
}

// ---- hash

struct HashArgs {
    std::string blob_hex;
    std::optional<std::uint32_t> nonce;
    std::size_t nonce_offset = kHaven.default_nonce_offset;
};

int cmd_hash(const Globals& g, const HashArgs& a)
{
    HashJob job{from_hex(a.blob_hex), a.nonce_offset, a.nonce.value_or(0)};
    const Bytes input = a.nonce ? patched_blob(job) : job.blob;
    if (!a.nonce && input.size() < kHaven.min_input_len) validate(job);

    Scratchpad pad;
    std::shared_ptr<FileTraceSink> sink;
    if (!g.trace.empty()) {
        sink = std::make_shared<FileTraceSink>(g.trace, trace_format_for_path(g.trace));
        pad.set_sink(sink);
        pad.trace_capture(true);
    }
    const HashCheckpoints cp = cn_haven_hash_checkpoints(input, pad);
    if (sink) {
        pad.trace_capture(false);
        sink->close();
    }

    const std::string hex = to_hex(cp.digest);
    if (g.json) {
        json j = {{"digest_hex", hex}, {"family", std::string(to_string(cp.family))}};
        if (a.nonce) j["nonce"] = *a.nonce;
        if (sink) j["trace"] = {{"path", g.trace}, {"records", sink->count()}};
        std::cout << j.dump() << '\n';
    } else {
        std::cout << hex << '\n';
    }
    return kOk;
}

// ---- mine

struct MineArgs {
    std::string job_path;
    bool strict = false;
    std::uint32_t chunk = 16;
};

int cmd_mine(const Globals& g, const MineArgs& a)
{
    const MiningJob job = job_from_json(read_input(a.job_path));
    MineOptions opt;
    opt.threads = g.threads;
    opt.strict_target = a.strict;
    opt.chunk = a.chunk;
    opt.cancel = &g_interrupt;
    std::signal(SIGINT, on_sigint);
    const ShareResult r = mine(job, opt);
    std::signal(SIGINT, SIG_DFL);

    if (g.json) {
        std::cout << share_to_json(r) << '\n';
    } else {
        if (r.found)
            std::cout << "share nonce=" << r.nonce << " digest=" << r.digest_hex << '\n';
        else
            std::cout << "no share in [" << job.nonce_start << ", " << job.nonce_end << ")\n";
        std::cout << "hashes=" << r.hashes_tried << " elapsed_s=" << r.elapsed_s << " hash_rate=" << r.hash_rate
                  << (r.interrupted ? " (interrupted)" : "") << '\n';
    }
    return r.found ? kOk : kNoShare;
}

// ---- verify

int cmd_verify(const Globals& g, const std::string& path)
{
    const auto entries = load_corpus(path);
    std::vector<EntryResult> results(entries.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < entries.size();) results[i] = verify_entry(entries[i], i);
    };
    std::vector<std::thread> pool;
    const unsigned n = std::min<unsigned>(g.threads, std::max<std::size_t>(1, entries.size()));
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::size_t failed = 0;
    json list = json::array();
    for (const auto& r : results) {
        if (!r.ok()) ++failed;
        if (g.json) {
            json e = {{"index", r.index}, {"ok", r.ok()}, {"digest_hex", r.digest_hex}};
            if (!r.ok()) e["first_failure"] = r.first_failure();
            list.push_back(e);
        } else {
            std::cout << "entry " << r.index << ": " << (r.ok() ? "pass" : "FAIL (" + r.first_failure() + ")") << '\n';
        }
    }
    if (g.json) {
        std::cout << json{{"entries", entries.size()}, {"passed", entries.size() - failed}, {"failed", failed},
                              {"results", list}}
                         .dump()
                  << '\n';
    } else {
        if (entries.empty()) std::cerr << "warning: 0 entries in " << path << '\n';
        std::cout << entries.size() - failed << "/" << entries.size() << " entries pass\n";
    }
    return failed ? kMismatch : kOk;
}

// ---- simulate / sweep

struct SimArgs {
    std::string config_path;
    std::uint64_t hashes = 16;
    std::optional<std::uint32_t> depth;
    std::optional<std::uint32_t> jitter;
    std::optional<std::uint32_t> kernels;
    std::optional<std::uint32_t> iterations;
    std::optional<std::uint32_t> groups;
    std::string replay;
    bool timeline = false;
};

std::optional<AddressReplay> load_replay(const std::string& path)
{
    if (path.empty()) return std::nullopt;
    return AddressReplay::from_trace(read_trace(path));
}

int cmd_simulate(const Globals& g, const SimArgs& a)
{
    PipelineConfig c = a.config_path.empty() ? PipelineConfig{} : config_from_json(read_input(a.config_path));
    if (a.depth) c.pipeline_depth = *a.depth;
    if (a.jitter) c.mem.jitter_max = *a.jitter;
    if (a.kernels) c.n_kernels = *a.kernels;
    if (a.iterations) c.workload.shuffle_iterations = *a.iterations;
    if (a.groups) c.workload.groups = *a.groups;
    if (g.seed) c.mem.seed = *g.seed;
    if (a.timeline) c.record_timeline = true;

    const auto replay = load_replay(a.replay.empty() ? g.trace : a.replay);
    const TheoreticalBounds b = theoretical_bounds(c);
    const SimReport r = simulate(c, a.hashes, replay ? &*replay : nullptr);

    if (g.json) {
        std::cout << "{\"config\":" << config_to_json(c) << ",\"report\":" << report_to_json(r)
                  << ",\"bounds\":" << bounds_to_json(b) << "}\n";
        return kOk;
    }
    std::cout << "hashes_completed " << r.hashes_completed << " / " << r.hashes_injected << '\n'
              << "shuffle_ticks    " << r.shuffle_ticks << '\n'
              << "hash_rate_hs     " << r.hash_rate_hs << '\n'
              << "bottleneck       " << r.bottleneck << '\n';
    for (std::size_t i = 0; i < kSimStages; ++i)
        std::cout << "util " << to_string(static_cast<SimStage>(i)) << ' ' << r.stage_utilization[i] << '\n';
    std::cout << "bound single     " << b.single_hash_rate << '\n'
              << "bound memory     " << b.memory_bound_rate << '\n'
              << "bound pipeline   " << b.pipeline_bound_rate << '\n';
    return kOk;
}

struct SweepArgs {
    std::string grid_path;
    std::uint64_t hashes = 16;
    std::string csv;
    std::string replay;
};

int cmd_sweep(const Globals& g, const SweepArgs& a)
{
    auto grid = grid_from_json(read_input(a.grid_path));
    if (g.seed)
        for (auto& c : grid) c.mem.seed = *g.seed;
    const auto replay = load_replay(a.replay.empty() ? g.trace : a.replay);
    const auto results = sweep(grid, a.hashes, g.threads, replay ? &*replay : nullptr);
    if (!a.csv.empty()) write_file(a.csv, sweep_to_csv(results));
    if (g.json) {
        std::cout << sweep_to_json(results) << '\n';
    } else {
        std::cout << sweep_to_json(results, 2) << '\n';
    }
    return kOk;
}

// ---- analyze

struct AnalyzeArgs {
    std::vector<std::string> paths;
    std::uint32_t depth = kMaxPipelineDepth;
    std::string stage;
};

int cmd_analyze(const Globals& g, const AnalyzeArgs& a)
{
    std::vector<AccessTrace> traces;
    for (const auto& p : a.paths) traces.push_back(read_trace(p));

    PipelineConfig c;
    c.pipeline_depth = a.depth;
    validate(c);

    json stats = json::array();
    for (std::size_t i = 0; i < traces.size(); ++i) {
        const AccessTrace* t = &traces[i];
        AccessTrace filtered;
        if (!a.stage.empty()) {
            const Stage s = a.stage == "explode" ? Stage::Explode : a.stage == "shuffle" ? Stage::Shuffle : Stage::Implode;
            filtered = filter_stage(*t, s);
            t = &filtered;
        }
        stats.push_back({{"path", a.paths[i]}, {"stats", json::parse(stats_to_json(trace_stats(*t)))}});
    }
    const PartitionReport part = partition_check(traces, c);
    const json out = {{"traces", stats}, {"partition", json::parse(partition_to_json(part))}};
    std::cout << out.dump(g.json ? -1 : 2) << '\n';
    return part.ok() ? kOk : kMismatch;
}

int exit_for(ErrorCode code) { return code == ErrorCode::Deadlock ? kMismatch : kBadInput; }

void report_error(bool as_json, std::string_view code, const std::string& message)
{
    if (as_json) std::cout << json{{"error", {{"code", std::string(code)}, {"message", message}}}}.dump() << '\n';
    std::cerr << "error: " << message << '\n';
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"CryptoNight-Haven hashing, mining and accelerator pipeline model"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    g.threads = default_threads();
    app.add_flag("--json", g.json, "Machine-readable output (errors too)");
    app.add_option("--threads", g.threads, "Worker threads (default: $CNHAVEN_THREADS or all cores)")
        ->check(CLI::PositiveNumber);
    app.add_option("--trace", g.trace, "Trace file: written by hash, replayed by simulate/sweep");
    app.add_option("--seed", g.seed, "Memory-latency PRNG seed for simulate/sweep");
    app.add_option("--aes", g.aes, "AES implementation")->check(CLI::IsMember({"auto", "table", "hardware"}));

    HashArgs ha;
    auto* hash = app.add_subcommand("hash", "Hash one blob and print the digest");
    hash->add_option("blob_hex", ha.blob_hex, "Input blob in hex")->required();
    hash->add_option("--nonce", ha.nonce, "Patch this 32-bit nonce in before hashing");
    hash->add_option("--nonce-offset", ha.nonce_offset, "Byte offset of the nonce");

    MineArgs ma;
    auto* mine_cmd = app.add_subcommand("mine", "Search a nonce range for a share");
    mine_cmd->add_option("job", ma.job_path, "Job JSON file, or - for stdin")->required();
    mine_cmd->add_flag("--strict-target", ma.strict, "Compare the full 256-bit digest against the target");
    mine_cmd->add_option("--chunk", ma.chunk, "Nonces per work unit")->check(CLI::PositiveNumber);

    std::string corpus_path;
    auto* verify = app.add_subcommand("verify", "Recompute a golden corpus including checkpoints");
    verify->add_option("corpus", corpus_path, "Corpus JSON-lines file")->required();

    SimArgs sa;
    auto* simulate_cmd = app.add_subcommand("simulate", "Run the pipeline model once");
    simulate_cmd->add_option("--config", sa.config_path, "Pipeline config JSON");
    simulate_cmd->add_option("--hashes", sa.hashes, "Hashes to inject");
    simulate_cmd->add_option("--depth", sa.depth, "In-flight hashes per kernel");
    simulate_cmd->add_option("--jitter", sa.jitter, "Uniform latency jitter bound (ticks)");
    simulate_cmd->add_option("--kernels", sa.kernels, "Kernel count");
    simulate_cmd->add_option("--iterations", sa.iterations, "Shuffle iterations per hash");
    simulate_cmd->add_option("--groups", sa.groups, "128-byte groups per scratchpad");
    simulate_cmd->add_option("--replay", sa.replay, "Replay Shuffle addresses from a trace");
    simulate_cmd->add_flag("--timeline", sa.timeline, "Include per-hash milestones");

    SweepArgs wa;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run the pipeline model over a grid of configs");
    sweep_cmd->add_option("grid", wa.grid_path, "Grid JSON: array of configs or {base, vary}")->required();
    sweep_cmd->add_option("--hashes", wa.hashes, "Hashes per config");
    sweep_cmd->add_option("--csv", wa.csv, "Also write one CSV row per config");
    sweep_cmd->add_option("--replay", wa.replay, "Replay Shuffle addresses from a trace");

    AnalyzeArgs aa;
    auto* analyze = app.add_subcommand("analyze", "Trace statistics and partition check");
    analyze->add_option("traces", aa.paths, "Trace files (binary or JSON lines)")->required();
    analyze->add_option("--depth", aa.depth, "Pipeline depth for the partition check");
    analyze->add_option("--stage", aa.stage, "Only this stage's records in the statistics")
        ->check(CLI::IsMember({"explode", "shuffle", "implode"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        const bool as_json = std::find(argv + 1, argv + argc, std::string("--json")) != argv + argc;
        report_error(as_json, "Usage", e.what());
        return kBadInput;
    }

    try {
        apply_aes(g.aes);
        if (*hash) return cmd_hash(g, ha);
        if (*mine_cmd) return cmd_mine(g, ma);
        if (*verify) return cmd_verify(g, corpus_path);
        if (*simulate_cmd) return cmd_simulate(g, sa);
        if (*sweep_cmd) return cmd_sweep(g, wa);
        if (*analyze) return cmd_analyze(g, aa);
    } catch (const Error& e) {
        report_error(g.json, to_string(e.code()), e.what());
        return exit_for(e.code());
    } catch (const std::exception& e) {
        report_error(g.json, "Internal", e.what());
        return kBadInput;
    }
    return kBadInput;
}
